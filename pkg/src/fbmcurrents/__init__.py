"""Regularised currents along fractional Brownian paths.

Submodules:

* :mod:`~fbmcurrents.paths`: fBm sampling and difference quotients
* :mod:`~fbmcurrents.kernel`: Bessel potential kernels ``K_alpha``
* :mod:`~fbmcurrents.covariance`: exact covariances of quotients and increments
* :mod:`~fbmcurrents.currents`: the double integral ``Z``, its expectation and sweeps
* :mod:`~fbmcurrents.wick`: Gaussian integration by parts
* :mod:`~fbmcurrents.vortex`: vortex filaments and their energy
* :mod:`~fbmcurrents.brownian`: Brownian moment and occupation checks
* :mod:`~fbmcurrents.experiments` and :mod:`~fbmcurrents.cli`: batch driver
"""

__version__ = "0.1.0"

from .covariance import CovarianceAtoms, alpha_H, condition_B_threshold, cov_exact
from .currents import (Z_double_integral, eta_field, expected_Z_exact, mc_expected_Z,
                       regularized_current, threshold_sweep, wick_decompose)
from .kernel import KernelSpec, eval_K, eval_K_zero, kernel_table, laplacian_K
from .montecarlo import MCResult, replica_rng, run_replicas
from .paths import DerivScheme, FbmParams, FbmPath, discrete_derivative, sample_fbm, sample_fbm_batch
from .vortex import SpectralMeasure, expected_energy_exact, mc_expected_energy, spectral_integral
from .wick import GaussianVectorSpec, verify_wick

__all__ = [
    "CovarianceAtoms", "DerivScheme", "FbmParams", "FbmPath", "GaussianVectorSpec", "KernelSpec",
    "MCResult", "SpectralMeasure", "Z_double_integral", "alpha_H", "condition_B_threshold",
    "cov_exact", "discrete_derivative", "eta_field", "eval_K", "eval_K_zero",
    "expected_Z_exact", "expected_energy_exact", "kernel_table", "laplacian_K",
    "mc_expected_Z", "mc_expected_energy", "regularized_current", "replica_rng",
    "run_replicas", "sample_fbm", "sample_fbm_batch", "spectral_integral", "threshold_sweep",
    "verify_wick", "wick_decompose",
]
