"""
Bounded or diverging
====================

The expectation of the smoothed current's squared norm, as the smoothing
width shrinks. Above the Sobolev order alpha_H = d/2 - 1/(2H) + 1 it stays
bounded; below it grows like a power of 1/eps.
"""

from fbmcurrents import alpha_H, expected_Z_exact, mc_expected_Z, threshold_sweep

H, d = 0.5, 3
print(f"alpha_H = {alpha_H(H, d)}")
eps = [2.0**-k for k in range(3, 10)]
sweep = threshold_sweep(H, d, [2.0, 1.0], eps)
for a in (2.0, 1.0):
    vals = [row.value for row in sweep.rows if row.alpha == a]
    print(f"alpha={a}: E Z from {vals[0]:.4g} to {vals[-1]:.4g}, "
          f"slope {sweep.slopes[a]:+.3f}, max/min {sweep.ratios[a]:.3f} -> {sweep.trends[a]}")

# the forward quotient behaves the same way when H >= 1/2
fw = threshold_sweep(0.7, d, [alpha_H(0.7, d) + 0.5, alpha_H(0.7, d) - 0.5], eps, kind="forward")
print("forward, H=0.7:", fw.trends)

# the deterministic expectation against plain sampling
ex = expected_Z_exact(H, d, 2.0, "symmetric", 0.1)
mc = mc_expected_Z(H, d, 2.0, "symmetric", 0.1, n_replicas=300, seed=5)
print(f"E Z at eps=0.1: exact {ex.value:.5f}, MC {mc.mean:.5f} +/- {mc.stderr:.5f} (z = {mc.zscore(ex.value):+.2f})")
