"""Scalar Gaussian channel with a symmetric binary input.

For the observation Y = sqrt(eta) * X0 + Z0 with X0 uniform on {-1, +1}
and Z0 standard normal, this module evaluates

    mmse(eta) = 1 - E[tanh^2(eta + sqrt(eta) Z0)]
    mi(eta)   = eta - E[log cosh(eta + sqrt(eta) Z0)]

by Gauss-Hermite quadrature under the standard normal weight.  These two
functions drive every state-evolution recursion and every closed-form
limit in the package, so they are kept deliberately small and heavily
cross-checked (Monte Carlo, and the identity d/d_eta mi = mmse / 2).

For eta above ``ETA_ASYMPTOTIC`` the integrands saturate below double
precision and the known asymptotes are returned (mmse -> 0, mi -> log 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_hermitenorm

__all__ = [
    "QuadratureRule",
    "gauss_hermite_rule",
    "log_cosh",
    "scalar_mmse",
    "scalar_mi",
    "DEFAULT_ORDER",
    "ETA_ASYMPTOTIC",
]

#: Default quadrature order.  The tanh/log-cosh integrands develop a
#: near-kink of width ~1/sqrt(eta) at large eta, which slows Gauss-Hermite
#: convergence; measured worst-case error over eta <= 50 is ~2e-5 at order
#: 61, ~1e-10 at 301, and below 1e-12 at 501.  Order 501 keeps a single
#: mmse evaluation around 30 microseconds, so there is no reason to be
#: stingy here.
DEFAULT_ORDER = 501

#: SNR beyond which the asymptotic values are returned instead of the
#: quadrature sum.  At eta = 50 the gap to the asymptote is below 1e-10.
ETA_ASYMPTOTIC = 50.0


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for integrating against the standard normal density.

    ``sum(weights * f(nodes))`` approximates E[f(Z)] for Z ~ N(0, 1); the
    rule is exact for polynomials of degree <= 2k - 1.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def expect(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def gauss_hermite_rule(k: int) -> QuadratureRule:
    """k-point Gauss-Hermite rule rescaled to the N(0,1) weight."""
    if k < 1:
        raise ValueError(f"quadrature order must be >= 1, got {k}")
    if k == 1:
        return QuadratureRule(nodes=np.zeros(1), weights=np.ones(1))
    nodes, weights = roots_hermitenorm(k)
    weights = weights / np.sqrt(2.0 * np.pi)
    return QuadratureRule(nodes=nodes, weights=weights)


_DEFAULT_RULE = gauss_hermite_rule(DEFAULT_ORDER)


def log_cosh(x):
    """Overflow-safe log cosh: |x| + log((1 + exp(-2|x|)) / 2)."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - np.log(2.0)


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not np.isfinite(eta) or eta < 0.0:
        raise ValueError(f"channel snr must be a finite nonnegative real, got {eta}")
    return eta


def scalar_mmse(eta: float, rule: QuadratureRule = _DEFAULT_RULE) -> float:
    """Minimum mean square error for estimating X0 from Y(eta).

    Exactly 1 at eta = 0 and decreasing to 0 as eta grows.
    """
    eta = _check_eta(eta)
    if eta == 0.0:
        return 1.0
    if eta > ETA_ASYMPTOTIC:
        return 0.0
    s = rule.expect(lambda z: np.tanh(eta + np.sqrt(eta) * z) ** 2)
    # Quadrature round-off can leave a value epsilon outside [0, 1].
    return float(min(max(1.0 - s, 0.0), 1.0))


def scalar_mi(eta: float, rule: QuadratureRule = _DEFAULT_RULE) -> float:
    """Mutual information between X0 and Y(eta), in nats; saturates at log 2."""
    eta = _check_eta(eta)
    if eta == 0.0:
        return 0.0
    if eta > ETA_ASYMPTOTIC:
        return float(np.log(2.0))
    val = eta - rule.expect(lambda z: log_cosh(eta + np.sqrt(eta) * z))
    return float(min(max(val, 0.0), np.log(2.0)))
