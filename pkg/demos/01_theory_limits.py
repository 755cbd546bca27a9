"""Closed-form limits: fixed point, asymptotic matrix MSE, detectability.

Walks the lambda axis at a few covariate strengths and prints where the
phase transition sits and how much estimation error the optimal procedure
retains above it.  Everything here is deterministic theory; no sampling.
"""

import numpy as np

from mvamp import SeConfig, detection_possible, fixed_point_z, limit_mmse, xi_limit

C = 5.0 / 3.0  # subjects per feature, n/p

print(f"subjects-per-feature ratio c = {C:.4f}")
print("detection is possible exactly when lambda + mu^2 / c > 1\n")

for mu in (0.0, 0.9, 1.5):
    threshold = 1.0 - mu ** 2 / C
    print(f"--- covariate strength mu = {mu}"
          + (f" (network threshold at lambda = {threshold:.3f})" if threshold > 0
             else " (covariates alone already cross the threshold)"))
    print(f"{'lambda':>8} {'detect':>8} {'z*':>10} {'mmse limit':>12} {'mi limit':>10}")
    for lam in (0.25, 0.5, 1.0, 1.5, 2.5, 4.0):
        z = fixed_point_z(SeConfig(lam=lam, mu=mu, c=C))
        print(f"{lam:8.2f} {str(detection_possible(lam, mu, C)):>8} "
              f"{z:10.5f} {limit_mmse(lam, mu, C):12.5f} {xi_limit(lam, mu, C):10.5f}")
    print()

print("note how the transition point moves with mu while the error level")
print("above the transition depends on (lambda, mu, c) in a finer way:")
for lam, mu, c in [(1.2, 0.0, 1.0), (0.2, 1.0, 1.0), (0.7, np.sqrt(0.5), 1.0)]:
    print(f"  lambda={lam:.2f}, mu={mu:.4f}, c={c}: lambda + mu^2/c = "
          f"{lam + mu**2/c:.2f}, mmse limit = {limit_mmse(lam, mu, c):.5f}")
