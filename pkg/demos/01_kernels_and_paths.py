"""
Kernels and paths
=================

Bessel potential kernels in closed form, and fBm paths checked against
their covariance.
"""

import numpy as np

from fbmcurrents import FbmParams, KernelSpec, eval_K, eval_K_zero, kernel_table, sample_fbm_batch
from fbmcurrents.covariance import condition_B_threshold
from fbmcurrents.paths import fbm_covariance, empirical_covariance

# K_1 in three dimensions is the Yukawa potential e^-r / (4 pi r)
spec = KernelSpec(1.0, 3)
for r in (0.1, 1.0, 4.0):
    print(f"K_1({r}) = {eval_K(spec, r):.8f}   closed form {np.exp(-r) / (4 * np.pi * r):.8f}")

# above d/2 the kernel is finite at the origin
print("K_2(0) in d = 3:", eval_K_zero(KernelSpec(2.0, 3)))

# a table interpolates K on a log grid, used for the pairwise sums
tab = kernel_table(2.0, 3)
r = np.geomspace(0.01, 10, 5)
print("table vs direct:", np.max(np.abs(tab(r) / [eval_K(KernelSpec(2.0, 3), x) for x in r] - 1)))

# fBm sampled by circulant embedding; the empirical covariance matches the exact one
for H in (0.3, 0.7):
    paths = sample_fbm_batch(FbmParams(H, 1, 1.0, 256, seed=1), 4000, threads=1)
    est = empirical_covariance(paths, 0.25, 0.75)
    print(f"H={H}: Cov(X_.25, X_.75) = {est.mean:.4f} +/- {est.stderr:.4f}, "
          f"exact {fbm_covariance(H, 0.25, 0.75):.4f}")

# below this order E K(X_t - X_s) is not integrable near the diagonal
for H in (0.3, 0.5, 0.7):
    print(f"H={H}, d=3: integrability threshold {condition_B_threshold(H, 3):.3f}")
