"""The three FP8 flavors, their grids, and what rounding mode costs you.

E4M3 as standardized by the OCP spec burns a single code point on NaN and
reaches 448.  The Gaudi-2 variant keeps IEEE semantics for the top exponent,
losing seven magnitudes and topping out at 240.  E5M2 trades mantissa for
range.  Stochastic rounding replaces the deterministic nearest choice with
a coin flip weighted by proximity, which kills bias at the price of variance.
"""

import numpy as np

import infercost as ic

print("*** grid facts ***")
for fmt in (ic.E4M3_OCP, ic.E4M3_G2, ic.E5M2):
    g = ic.grid(fmt)
    print(f"{fmt.name:<9} max {fmt.max_finite:<8.0f} "
          f"grid points {len(g):<4} smallest nonzero {g[1]:.3e}")

print()
print("*** round-to-nearest vs stochastic rounding ***")
x = 1.1  # sits 80% of the way from 1.0 to 1.125 on the e4m3 grids
nb = ic.neighbors(x, ic.E4M3_OCP)
print(f"neighbors of {x}: {nb.x_down} and {nb.x_up}, p_up={nb.p_up:.3f}")
print(f"RTN always gives {ic.round_to_grid(x, ic.E4M3_OCP)}")

rng = np.random.default_rng(0)
draws = ic.round_to_grid(np.full(100_000, x), ic.E4M3_OCP, mode="sr", rng=rng)
print(f"SR mean over 1e5 draws: {draws.mean():.5f} (unbiased toward {x})")
print(f"SR upper-neighbor rate: {np.mean(draws == nb.x_up):.3f}")

print()
print("*** quantization error by format and scaling policy ***")
rng = np.random.default_rng(7)
weights = rng.normal(0.0, 30.0, size=(256, 256))
policies = {
    "per-tensor": ic.ScalingPolicy(),
    "per-row": ic.ScalingPolicy(granularity="per-row"),
    "pow2": ic.ScalingPolicy(scale_domain="pow2"),
    "hw fixed set": ic.ScalingPolicy(scale_domain="fixed-set", fixed_set=ic.GAUDI2_FIXED_SET),
}
print(f"{'format':<9} {'policy':<13} {'max abs':>9} {'rms':>9}")
for fmt in (ic.E4M3_OCP, ic.E4M3_G2, ic.E5M2):
    for name, policy in policies.items():
        qt = ic.quantize_tensor(weights, fmt, policy)
        stats = ic.quant_error(weights, qt)
        print(f"{fmt.name:<9} {name:<13} {stats.max_abs_err:>9.4f} {stats.mse ** 0.5:>9.4f}")

print()
print("*** saturation hurts the narrow format first ***")
outliers = weights.copy()
outliers[0, 0] = 900.0  # one rogue value stretches the per-tensor scale
for fmt in (ic.E4M3_OCP, ic.E4M3_G2):
    stats = ic.quant_error(outliers, ic.quantize_tensor(outliers, fmt))
    row_stats = ic.quant_error(
        outliers, ic.quantize_tensor(outliers, fmt, ic.ScalingPolicy(granularity="per-row"))
    )
    print(f"{fmt.name}: per-tensor rms {stats.mse ** 0.5:.4f}, "
          f"per-row rms {row_stats.mse ** 0.5:.4f}")

print()
print("*** binary container round-trip ***")
qt = ic.quantize_tensor(weights, ic.E4M3_G2, ic.ScalingPolicy(granularity="per-row"))
blob = ic.dump_quantized(qt)
back = ic.load_quantized(blob)
print(f"dumped {len(blob)} bytes; codes identical after reload: "
      f"{np.array_equal(back.codes, qt.codes)}")
