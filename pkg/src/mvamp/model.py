"""Synthetic data: labels, sparse networks, covariates, Gaussian surrogate.

All samplers are pure functions of (seed, parameters): pass either an
integer seed or a ``numpy.random.Generator``.  Use :func:`substream` to
derive independent, reproducible generators for the individual objects of
a replicate from one root seed.

The two-group structure is a vector of +-1 labels shared by every data
source.  Each network layer is an undirected graph whose edge probability
is a_n / n within groups and b_n / n across groups; its strength is
summarized by the invariant

    lambda = n (a - b)^2 / ((a + b)(2n - a - b)),

and layers are always handled through their centered and rescaled
adjacency operators, under which the planted signal has mean
sqrt(lambda / n) x x^T exactly like the Gaussian surrogate scaled by
1 / sqrt(n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .exceptions import InfeasibleSnrError
from .linalg import SparseCenteredOperator, SymmetricOperator, WeightedSumOperator

__all__ = [
    "CommunityLabels",
    "LayerParams",
    "SbmLayer",
    "CovariateModel",
    "GaussianSurrogate",
    "RevelationMasks",
    "substream",
    "sample_labels",
    "rates_from_lambda",
    "lambda_from_rates",
    "sample_sbm_layer",
    "sample_covariates",
    "sample_gaussian_surrogate",
    "sample_revelation",
    "center_scale_layer",
    "combine_layers",
    "write_edge_list",
    "write_labels_csv",
    "write_covariates_csv",
]


def substream(root_seed: int, *path: int) -> np.random.Generator:
    """Independent generator addressed by a tuple of integers.

    The same (root_seed, path) always yields the same stream, and distinct
    paths yield statistically independent streams, so replicates and the
    objects inside a replicate can be sampled in any order or in parallel.
    """
    return np.random.default_rng(np.random.SeedSequence(root_seed, spawn_key=tuple(path)))


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class CommunityLabels:
    """Ground-truth group assignment, one +-1 entry per subject."""

    x_star: np.ndarray

    def __post_init__(self):
        if self.x_star.ndim != 1 or self.x_star.size == 0:
            raise ValueError("labels must form a nonempty vector")
        if not np.all(np.abs(self.x_star) == 1.0):
            raise ValueError("every label must be exactly +1 or -1")

    @property
    def n(self) -> int:
        return self.x_star.size


def sample_labels(n: int, rng) -> CommunityLabels:
    """n i.i.d. uniform +-1 labels."""
    if n < 1:
        raise ValueError(f"need at least one subject, got n={n}")
    rng = _as_rng(rng)
    x = rng.integers(0, 2, size=n) * 2.0 - 1.0
    return CommunityLabels(x_star=x)


@dataclass(frozen=True)
class LayerParams:
    """Edge rates of one network layer.

    a_n / n and b_n / n are the within/between-group edge probabilities;
    p_bar is the mean density, delta the half-gap, lambda_i the layer
    signal strength.  Rates are kept as reals, not integer counts.
    """

    lambda_i: float
    p_bar: float
    delta: float
    a_n: float
    b_n: float

    def __post_init__(self):
        if not 0.0 < self.p_bar < 1.0:
            raise ValueError(f"mean density must lie in (0, 1), got {self.p_bar}")
        if not 0.0 <= self.delta < self.p_bar:
            raise ValueError(f"half-gap must lie in [0, p_bar), got {self.delta}")
        if self.b_n < 0.0 or self.a_n < self.b_n:
            raise ValueError("need a_n >= b_n >= 0")
        n = (self.a_n + self.b_n) / (2.0 * self.p_bar)
        lam = n * self.delta ** 2 / (self.p_bar * (1.0 - self.p_bar))
        if abs(self.a_n - n * (self.p_bar + self.delta)) > 1e-8 * max(1.0, self.a_n) \
                or abs(self.lambda_i - lam) > 1e-8 * max(1.0, lam):
            raise ValueError("inconsistent layer parameters: rates, density, "
                             "half-gap and strength must describe one layer")


def rates_from_lambda(lambda_i: float, p_bar: float, n: int) -> LayerParams:
    """Edge rates realizing signal strength lambda_i at density p_bar.

    Inverts the strength formula through delta = sqrt(lambda p_bar (1 - p_bar) / n).
    Raises InfeasibleSnrError (naming the largest feasible strength) when
    the implied half-gap reaches the density itself.
    """
    if lambda_i < 0.0:
        raise ValueError(f"signal strength must be nonnegative, got {lambda_i}")
    if not 0.0 < p_bar < 1.0:
        raise ValueError(f"mean density must lie in (0, 1), got {p_bar}")
    delta = np.sqrt(lambda_i * p_bar * (1.0 - p_bar) / n)
    if delta >= p_bar:
        lam_max = n * p_bar / (1.0 - p_bar)
        raise InfeasibleSnrError(
            f"lambda={lambda_i} infeasible at p_bar={p_bar}, n={n}: the "
            f"implied rate gap reaches zero edge probability; largest "
            f"feasible lambda is {lam_max:.6g}", lambda_max=lam_max)
    if p_bar + delta > 1.0:
        lam_max = n * (1.0 - p_bar) / p_bar
        raise InfeasibleSnrError(
            f"lambda={lambda_i} infeasible at p_bar={p_bar}, n={n}: the "
            f"implied within-group rate exceeds one; largest feasible "
            f"lambda is {lam_max:.6g}", lambda_max=lam_max)
    return LayerParams(lambda_i=float(lambda_i), p_bar=float(p_bar), delta=float(delta),
                       a_n=float(n * (p_bar + delta)), b_n=float(n * (p_bar - delta)))


def lambda_from_rates(params: LayerParams, n: int) -> float:
    """Signal strength n (a-b)^2 / ((a+b)(2n-a-b)) of a layer."""
    a, b = params.a_n, params.b_n
    if a < b:
        raise ValueError(f"within-group rate must dominate: a_n={a} < b_n={b}")
    if a == b:
        return 0.0
    if a > n:
        raise ValueError(f"a_n={a} exceeds n={n}")
    return n * (a - b) ** 2 / ((a + b) * (2.0 * n - a - b))


@dataclass(frozen=True)
class SbmLayer:
    """One sampled network layer: rates plus a sparse symmetric adjacency."""

    params: LayerParams
    adjacency: sparse.csr_array

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


def sample_sbm_layer(x_star: CommunityLabels, params: LayerParams, rng) -> SbmLayer:
    """Sample the layer's adjacency: symmetric 0/1 with a zero diagonal.

    For k < l the edge probability is a_n / n when the endpoints share a
    group and b_n / n otherwise.
    """
    n = x_star.n
    p_in, p_out = params.a_n / n, params.b_n / n
    if not (0.0 <= p_out <= p_in <= 1.0):
        raise ValueError(
            f"edge probabilities outside [0, 1]: a_n/n={p_in}, b_n/n={p_out}")
    rng = _as_rng(rng)
    rows, cols = np.triu_indices(n, k=1)
    same = x_star.x_star[rows] == x_star.x_star[cols]
    prob = np.where(same, p_in, p_out)
    edge = rng.random(rows.size) < prob
    r, c = rows[edge], cols[edge]
    adj = sparse.csr_array(
        (np.ones(2 * r.size), (np.concatenate([r, c]), np.concatenate([c, r]))),
        shape=(n, n))
    return SbmLayer(params=params, adjacency=adj)


@dataclass(frozen=True)
class CovariateModel:
    """Spiked covariate matrix B = sqrt(mu/n) v* x*^T + R, R i.i.d. N(0,1)."""

    mu: float
    v_star: np.ndarray
    B: np.ndarray

    @property
    def p(self) -> int:
        return self.B.shape[0]

    @property
    def n(self) -> int:
        return self.B.shape[1]

    @property
    def c(self) -> float:
        """Finite-sample subjects-per-feature ratio n / p."""
        return self.n / self.p

    def residual_noise(self, x_star: CommunityLabels) -> np.ndarray:
        """Reconstruct the noise draw R = B - sqrt(mu/n) v* x*^T."""
        return self.B - np.sqrt(self.mu / self.n) * np.outer(self.v_star, x_star.x_star)


def sample_covariates(x_star: CommunityLabels, mu: float, p: int, rng) -> CovariateModel:
    """Sample the spike v* ~ N(0, I_p) and the p x n covariate matrix."""
    if mu < 0.0:
        raise ValueError(f"spike strength must be nonnegative, got {mu}")
    if p < 1:
        raise ValueError(f"need at least one covariate, got p={p}")
    rng = _as_rng(rng)
    n = x_star.n
    v_star = rng.standard_normal(p)
    B = rng.standard_normal((p, n))
    B += np.sqrt(mu / n) * np.outer(v_star, x_star.x_star)
    return CovariateModel(mu=float(mu), v_star=v_star, B=B)


@dataclass(frozen=True)
class GaussianSurrogate:
    """Dense symmetric observation sqrt(lam/n) x* x*^T + Z.

    Z has independent N(0, 1) entries off the diagonal and N(0, 2) on it.
    """

    T: np.ndarray
    lam: float

    @property
    def n(self) -> int:
        return self.T.shape[0]


def sample_gaussian_surrogate(x_star: CommunityLabels, lam: float, rng) -> GaussianSurrogate:
    if lam < 0.0:
        raise ValueError(f"signal strength must be nonnegative, got {lam}")
    rng = _as_rng(rng)
    n = x_star.n
    M = rng.standard_normal((n, n))
    T = (M + M.T) / np.sqrt(2.0)
    T += np.sqrt(lam / n) * np.outer(x_star.x_star, x_star.x_star)
    return GaussianSurrogate(T=T, lam=float(lam))


@dataclass(frozen=True)
class RevelationMasks:
    """Side information revealing each truth coordinate with probability eps.

    Masks are stored explicitly: the spike prior is continuous, so revealed
    coordinates must never be inferred by testing v0 against zero.
    """

    eps: float
    x0: np.ndarray
    mask_x: np.ndarray
    v0: np.ndarray
    mask_v: np.ndarray


def sample_revelation(x_star: CommunityLabels, v_star: np.ndarray, eps: float,
                      rng) -> RevelationMasks:
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"revelation fraction must lie in [0, 1], got {eps}")
    rng = _as_rng(rng)
    mask_x = rng.random(x_star.n) < eps
    mask_v = rng.random(v_star.size) < eps
    x0 = np.where(mask_x, x_star.x_star, 0.0)
    v0 = np.where(mask_v, v_star, 0.0)
    return RevelationMasks(eps=float(eps), x0=x0, mask_x=mask_x, v0=v0, mask_v=mask_v)


def center_scale_layer(layer: SbmLayer) -> SparseCenteredOperator:
    """Centered, rescaled adjacency as a lazy operator.

    Applies v -> (G v - p_bar sum(v) 1) / sqrt(n p_bar (1 - p_bar)) via one
    sparse matvec plus a rank-one correction; the dense matrix is never
    formed.
    """
    p_bar = layer.params.p_bar
    if not 0.0 < p_bar < 1.0:
        raise ValueError(f"degenerate density p_bar={p_bar}")
    return SparseCenteredOperator(layer.adjacency, p_bar)


def combine_layers(ops: list[SymmetricOperator], lambdas: list[float]) -> SymmetricOperator:
    """Weighted combination sum_i sqrt(lambda_i / lambda) A_i of layer operators."""
    if len(ops) == 0:
        raise ValueError("need at least one layer")
    if len(ops) != len(lambdas):
        raise ValueError("one strength per operator required")
    if any(l <= 0 for l in lambdas):
        raise ValueError("all layer strengths must be positive")
    dims = {op.n for op in ops}
    if len(dims) != 1:
        raise ValueError(f"operators disagree on dimension: {sorted(dims)}")
    total = float(sum(lambdas))
    weights = [np.sqrt(l / total) for l in lambdas]
    if len(ops) == 1:
        return ops[0]
    return WeightedSumOperator(ops, weights)


def write_edge_list(layer: SbmLayer, path) -> None:
    """Write the adjacency as text, one 0-indexed "k l" pair per line, k < l."""
    coo = sparse.triu(sparse.coo_array(layer.adjacency), k=1)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", newline="\n") as fh:
        for k, l in zip(coo.row[order], coo.col[order]):
            fh.write(f"{k} {l}\n")


def write_labels_csv(x_star: CommunityLabels, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("subject,label\n")
        for i, v in enumerate(x_star.x_star):
            fh.write(f"{i},{int(v)}\n")


def write_covariates_csv(model: CovariateModel, path) -> None:
    """Write B row by row (one covariate per line, subjects as columns)."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(f"subject_{j}" for j in range(model.n)) + "\n")
        for row in model.B:
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")
