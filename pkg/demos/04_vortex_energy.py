"""
Vortex filament energy
======================

A 3-d fBm path smeared by a radial charge carries a velocity field through
the Biot-Savart law. Its energy is a pair sum against a divergence-free
kernel g, and its expectation is finite when a spectral integral converges.
"""

import numpy as np

from fbmcurrents import DerivScheme, FbmParams, SpectralMeasure, sample_fbm
from fbmcurrents.vortex import (check_conditions, energy_double_integral, energy_sweep,
                                spectral_integral, velocity_field)

gauss = SpectralMeasure.gaussian(1.0)
dipole = SpectralMeasure.dipole(1.0, 2.0)
print(f"spectral integral, gaussian, H=1/2: {spectral_integral(gauss, 0.5):.6f} "
      f"(2 pi^1.5 = {2 * np.pi**1.5:.6f})")
for name, m in (("gaussian", gauss), ("dipole", dipole)):
    c = check_conditions(m, 0.5, 1.0)
    print(f"{name}: Sobolev bound {c.sobolev_condition}, spectral integral finite {c.spectral_finite}")

vals, ratio = energy_sweep(0.4, gauss, [2.0**-k for k in range(3, 9)])
print("E energy over eps = 2^-3..2^-8:", np.round(vals, 5), f"max/min {ratio:.3f}")

# Parseval: the grid energy of u equals the pair sum
sch = DerivScheme("symmetric", 0.125)
path = sample_fbm(FbmParams(0.5, 3, 1.0, 32, seed=0, pad_steps=4))
pair = energy_double_integral(path, gauss, sch)
grid = velocity_field(path, gauss, sch, spacing=0.25, margin=6.0).energy()
print(f"pair sum {pair:.6f}, grid {grid:.6f}")
