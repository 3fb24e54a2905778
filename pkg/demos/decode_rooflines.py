"""Why decode is memory-bound: FLOPs counts and bandwidth ceilings.

Prefill pushes big GEMMs through the device, so it runs near the matrix
peak.  Decode multiplies one token per sequence against every weight, so
its computational intensity collapses to roughly twice the batch size and
the memory roofline takes over.  KV-cache reads are worse still: their
intensity is fixed by the GQA group size, not the batch.
"""

import infercost as ic

registry = ic.default_registry()
gaudi2 = registry.device("gaudi2")
model = registry.model("llama31-8b")

print("*** exact operation counts ***")
print(f"forward pass, 2048-token prompt: {ic.forward_flops(model, 2048):,} FLOPs")
print(f"same count from walking every GEMM: {ic.layer_walk_flops(model, 2048):,}")

batch = ic.SequenceBatch.uniform(64, 1024)
parts = ic.decode_step_flops(model, batch)
print(f"one decode step at batch 64, context 1024: {parts.total:,}")
print(f"  linear layers {parts.linear:,}")
print(f"  lm head       {parts.lm_head:,}")
print(f"  attention     {parts.attention:,}")

print()
print("*** where the device stops being memory-bound ***")
knee = ic.saturation_ci(gaudi2, "fp8")
print(f"gaudi2 fp8 saturates at {knee:.1f} FLOPs/byte")
for m in (8, 16, 32, 64, 128):
    ci = ic.computational_intensity(ic.GemmShape(m, 4096, 4096), ic.TrafficModel())
    bound = ic.roofline_throughput(gaudi2, "fp8", ci)
    tag = "memory" if ci < knee else "compute"
    print(f"  M={m:<4} CI={ci:<6.0f} attainable {bound:6.1f} TFLOPS ({tag}-bound)")

print()
print("*** KV-cache ceiling is independent of batch ***")
for g in (1, 4, 8):
    print(f"  GQA group {g}: bf16 KV reads cap attention at "
          f"{ic.kv_attention_bound(gaudi2, g):.1f} TFLOPS")

print()
print("*** decode-step estimate across context lengths ***")
print(f"{'context':>8} {'time (ms)':>10} {'TFLOPS':>8}  dominant component")
for seqlen in (512, 1024, 2048, 4096, 8192):
    est = ic.decode_step_estimate(gaudi2, model, ic.SequenceBatch.uniform(64, seqlen))
    slowest = max(est.per_component, key=lambda c: c.time)
    print(f"{seqlen:>8} {est.time * 1e3:>10.2f} {est.tflops:>8.1f}  {slowest.name}")

print()
print("*** prefill for contrast ***")
est = ic.prefill_estimate(gaudi2, model, 2048, "fp8")
print(f"2048-token prefill: {est.time * 1e3:.1f} ms at {est.tflops:.0f} TFLOPS "
      f"({est.bound}-bound)")
