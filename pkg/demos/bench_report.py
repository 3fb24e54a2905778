"""Work through the bundled benchmark tables end to end.

The package ships four measurement fixtures as plain CSV: generation-level
efficiency, thin-GEMM throughput on four devices, scaled-GEMM throughput
under different fp8 scaling policies, and decode throughput with and
without a power cap.  This script reproduces the headline numbers.
"""

import infercost as ic
from infercost import fixtures

registry = ic.default_registry()

print("*** efficiency across GPU generations ***")
gens = ic.load_gpu_generations(fixtures.fixture_path("table1_gpu_generations.csv"))
prev = None
for gen in gens:
    eff = ic.tflops_per_watt(gen.spec, gen.fmt)
    line = f"{gen.spec.name:<6} {gen.fmt:<5} {eff:.2f} TFLOPS/W"
    if prev is not None:
        line += f"  (+{ic.efficiency_increase(prev.spec, gen.spec, gen.fmt, prev_fmt=prev.fmt)}%)"
    print(line)
    prev = gen

print()
print("*** thin GEMMs against the roofline ***")
thin = ic.ingest_records(fixtures.fixture_path("table3_thin_gemm.csv"))
gaudi2 = registry.device("gaudi2")
print(f"{'fmt':<5} {'shape':<16} {'measured':>9} {'roofline':>9}")
for rec in thin.filter(device="gaudi2", fmt="fp8").records:
    ci = ic.computational_intensity(rec.shape, ic.TrafficModel(weights=rec.fmt))
    bound = ic.roofline_throughput(gaudi2, rec.fmt, ci)
    shape = "x".join(map(str, rec.shape.as_tuple()))
    print(f"{rec.fmt:<5} {shape:<16} {rec.tflops:>9.1f} {bound:>9.1f}")

print()
print("*** a cross-device throughput ratio feeds the cost model ***")
sel = dict(fmt="fp8", shape=(64, 4096, 4096))
r_th = ic.throughput_ratio(thin, "h100", "gaudi2", **sel)
print(f"h100 over gaudi2 at M=64: R_Th = {r_th:.3f}")
r_sc_even = 2 * r_th - 1  # equal-cost break-even solved for R_SC
print(f"under equal baseline costs the h100 may cost up to "
      f"{r_sc_even:.2f}x per server before losing")

print()
print("*** MFU of scaled GEMMs ***")
scaled = ic.ingest_records(fixtures.fixture_path("table5_scaled_gemm.csv"))
table = ic.mfu_table(scaled, registry)
for rec, report in table.entries:
    if rec.scaling != "hw-accel":
        continue
    print(f"{rec.fmt:<12} {rec.shape.m:>5}^3: {rec.tflops:6.0f} TFLOPS "
          f"= {100 * report.mfu:.1f}% of peak")

print()
print("*** what a 400 W cap costs at decode time ***")
runs = ic.ingest_records(fixtures.fixture_path("table6_powercap.csv"))
for model_name in ("llama31-8b", "llama33-70b"):
    for seqlen in (512, 1024, 2048, 4096, 8192):
        uncapped = runs.one(model=model_name, seqlen=seqlen, power_cap_w=None)
        capped = runs.one(model=model_name, seqlen=seqlen, power_cap_w=400.0)
        cmp = ic.powercap_slowdown(uncapped, capped)
        print(f"{model_name:<12} s={seqlen:<5} {cmp.uncapped_tflops:4.0f} -> "
              f"{cmp.capped_tflops:4.0f} TFLOPS  ({100 * cmp.slowdown_fraction:4.1f}% slower)")
