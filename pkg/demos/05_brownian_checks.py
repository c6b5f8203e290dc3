"""
Brownian estimates
==================

Two inequalities with unspecified constants, checked for finiteness and
stability rather than for a value.
"""

from fbmcurrents.brownian import (BesselMomentCase, bessel_moment_estimates, maximal_exceedance,
                                  occupation_integral_estimate)

r = bessel_moment_estimates(BesselMomentCase(3, 0.5, 1.5, (1.0, 0.0, 0.0), n_paths=1000, n_steps=400))
print(f"moment inequality: lhs {r.lhs.mean:.4f} +/- {r.lhs.stderr:.4f}, "
      f"exact rhs terms {[round(t, 4) for t in r.exact_terms]}, ratio {r.ratio:.3f}")

for row in maximal_exceedance(n_paths=5000):
    print(f"P(max |W| >= {row.radius / 2}) = {row.frequency:.4f} +/- {row.stderr:.4f} "
          f"<= {row.bound:.4f}: {row.within}")

for n in (1000, 2000):
    o = occupation_integral_estimate(2, 1.8, 1.5, n_paths=n, seed=n)
    print(f"occupation integral, n={n}: {o.estimate.mean:.4f} +/- {o.estimate.stderr:.4f} {o.flags}")
