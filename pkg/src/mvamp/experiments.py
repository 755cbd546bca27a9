"""Monte-Carlo harness: replicate pipelines, sweeps, and tracking checks.

A replicate samples one instance of a model family, builds the operators,
initializes (spectral or revelation), runs the iteration, and reports the
matrix mean square error and the sign overlap.  Sweeps repeat that over a
parameter grid with i.i.d. replicates per point and attach the theoretical
limit for comparison.  Everything is deterministic in (config, seed):
replicate sub-seeds are derived with :func:`mvamp.model.substream` and
results are merged by index, so the thread count never changes a number.

Model families:

* ``gaussian`` - dense symmetric observation plus covariates.
* ``contextual-sbm`` - one sparse network plus covariates; the network
  enters through its centered, rescaled adjacency operator.
* ``multilayer`` - m sparse networks with strength fractions r_i and
  per-layer densities, combined as sum_i sqrt(lambda_i / lambda) A_i,
  plus covariates.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .amp import init_spectral, init_zero, run_amp, solve_a0, spectral_initialize
from .exceptions import MvampError
from .linalg import DenseSymmetricOperator, RectOperator
from .model import (CommunityLabels, center_scale_layer, combine_layers,
                    rates_from_lambda, sample_covariates, sample_gaussian_surrogate,
                    sample_labels, sample_revelation, sample_sbm_layer, substream)
from .state_evolution import SeConfig, detection_possible, limit_mmse, se_run

__all__ = [
    "ExperimentConfig",
    "ReplicateResult",
    "AggregateResult",
    "SeCheckReport",
    "empirical_mse",
    "empirical_overlap",
    "run_replicate",
    "run_sweep",
    "se_consistency_check",
]

FAMILIES = ("gaussian", "contextual-sbm", "multilayer")

# Sub-seed stream tags within one replicate.
_STREAM_LABELS = 0
_STREAM_COVARIATES = 1
_STREAM_SURROGATE = 2
_STREAM_MASKS = 3
_STREAM_INIT = 4
_STREAM_SE = 5
_STREAM_LAYER_BASE = 10


def empirical_mse(x_hat: np.ndarray, x_star: np.ndarray) -> float:
    """Matrix mean square error of the rank-one estimate, computed in O(n).

    (1/n^2) ||x* x*^T - x_hat x_hat^T||_F^2 equals
    1 - 2 <x_hat, x*>_n^2 + <x_hat, x_hat>_n^2 because ||x*||^2 = n; the
    n x n outer products are never formed.
    """
    if x_hat.shape != x_star.shape:
        raise ValueError(f"shape mismatch: {x_hat.shape} vs {x_star.shape}")
    n = x_star.size
    ov = float(np.dot(x_hat, x_star) / n)
    s = float(np.dot(x_hat, x_hat) / n)
    return 1.0 - 2.0 * ov * ov + s * s


def empirical_overlap(x_hat: np.ndarray, x_star: np.ndarray) -> float:
    """Sign overlap |<x*, sign(x_hat)>| / n, zero entries broken to +1."""
    if x_hat.shape != x_star.shape:
        raise ValueError(f"shape mismatch: {x_hat.shape} vs {x_star.shape}")
    signs = np.where(x_hat >= 0.0, 1.0, -1.0)
    return float(abs(np.dot(signs, x_star)) / x_star.size)


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep definition.

    The swept parameter (``sweep_param``) runs over ``grid`` while the
    other of (lambda, mu) is held at ``fixed_value``.  ``init`` selects the
    spectral start or zero iterates with eps-revelation.  ``r_fractions``
    must be positive and sum to one; layer i gets strength r_i * lambda
    and density p_bar_coeffs[i] / sqrt(n).
    """

    family: str
    n: int
    p: int
    sweep_param: str
    grid: tuple[float, ...]
    fixed_value: float
    replicates: int = 10
    n_iter: int = 100
    seed: int = 0
    init: str = "spectral"
    eps: float = 0.0
    m: int = 1
    r_fractions: tuple[float, ...] = (1.0,)
    p_bar_coeffs: tuple[float, ...] = (0.7,)
    se_init_mode: str = "deterministic-z1"
    se_init_interval: tuple[float, float] = (4.0, 10.0)
    early_stop_tol: float | None = None
    threads: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.sweep_param not in ("lambda", "mu"):
            raise ValueError(f"sweep_param must be 'lambda' or 'mu', got {self.sweep_param!r}")
        if len(self.grid) == 0:
            raise ValueError("sweep grid is empty")
        if any(g < 0 for g in self.grid) or self.fixed_value < 0:
            raise ValueError("grid values and fixed_value must be nonnegative")
        if self.n < 2 or self.p < 1 or self.replicates < 1 or self.n_iter < 1:
            raise ValueError("n >= 2, p >= 1, replicates >= 1, n_iter >= 1 required")
        if self.init not in ("spectral", "revelation"):
            raise ValueError(f"init must be 'spectral' or 'revelation', got {self.init!r}")
        if self.init == "revelation" and not 0.0 < self.eps <= 1.0:
            raise ValueError("revelation init requires eps in (0, 1]")
        if self.family == "multilayer":
            if self.m < 1 or len(self.r_fractions) != self.m or len(self.p_bar_coeffs) != self.m:
                raise ValueError("multilayer needs m matching r_fractions and p_bar_coeffs")
            if any(r <= 0 for r in self.r_fractions):
                raise ValueError("strength fractions must be positive")
            if abs(sum(self.r_fractions) - 1.0) > 1e-12:
                raise ValueError(f"strength fractions must sum to 1, got {sum(self.r_fractions)}")

    @property
    def c(self) -> float:
        return self.n / self.p

    def point(self, value: float) -> tuple[float, float]:
        """(lambda, mu) at one grid value."""
        if self.sweep_param == "lambda":
            return float(value), float(self.fixed_value)
        return float(self.fixed_value), float(value)


@dataclass(frozen=True)
class ReplicateResult:
    """Metrics of one replicate; deterministic in (config, point, index)."""

    point_index: int
    replicate_index: int
    empirical_mse: float
    empirical_overlap: float
    overlap_trajectory: np.ndarray
    wall_time: float


@dataclass
class AggregateResult:
    """Per-grid-point summary over replicates."""

    family: str
    n: int
    p: int
    lam: float
    mu: float
    c: float
    replicates: int
    theory_mmse: float
    detectable: bool
    mean_mse: float = np.nan
    sd_mse: float = np.nan
    min_mse: float = np.nan
    max_mse: float = np.nan
    mean_overlap: float = np.nan
    wall_time_s: float = 0.0
    errors: list[str] = field(default_factory=list)


def _build_sym_op(cfg: ExperimentConfig, labels: CommunityLabels, lam: float,
                  point_index: int, rep_index: int):
    n = cfg.n
    if cfg.family == "gaussian":
        surr = sample_gaussian_surrogate(
            labels, lam, substream(cfg.seed, point_index, rep_index, _STREAM_SURROGATE))
        return DenseSymmetricOperator(surr.T, denom=float(np.sqrt(n)))
    ops = []
    fractions = cfg.r_fractions if cfg.family == "multilayer" else (1.0,)
    coeffs = cfg.p_bar_coeffs if cfg.family == "multilayer" else cfg.p_bar_coeffs[:1]
    for i, (r_i, coeff) in enumerate(zip(fractions, coeffs)):
        p_bar = coeff / np.sqrt(n)
        if n * p_bar < 10.0:
            warnings.warn(
                f"layer {i}: average degree {n * p_bar:.2f} < 10; the "
                "dense-limit theory may be inaccurate at this scale",
                stacklevel=2)
        params = rates_from_lambda(r_i * lam, p_bar, n)
        layer = sample_sbm_layer(
            labels, params,
            substream(cfg.seed, point_index, rep_index, _STREAM_LAYER_BASE + i))
        ops.append(center_scale_layer(layer))
    # sqrt(lambda_i / lambda) = sqrt(r_i): the fractions alone fix the weights,
    # which keeps the combination well defined at lam = 0 as well.
    return combine_layers(ops, list(fractions))


def run_replicate(cfg: ExperimentConfig, point_index: int, rep_index: int) -> ReplicateResult:
    """Sample one instance, run the estimator, and score it."""
    t_start = time.perf_counter()
    lam, mu = cfg.point(cfg.grid[point_index])
    labels = sample_labels(cfg.n, substream(cfg.seed, point_index, rep_index, _STREAM_LABELS))
    cov = sample_covariates(labels, mu, cfg.p,
                            substream(cfg.seed, point_index, rep_index, _STREAM_COVARIATES))
    b_op = RectOperator(cov.B)
    sym_op = _build_sym_op(cfg, labels, lam, point_index, rep_index)

    eps = cfg.eps if cfg.init == "revelation" else 0.0
    masks = sample_revelation(labels, cov.v_star, eps,
                              substream(cfg.seed, point_index, rep_index, _STREAM_MASKS))

    se_seed = substream(cfg.seed, point_index, rep_index, _STREAM_SE).integers(2 ** 63)
    se_cfg = SeConfig(
        lam=lam, mu=mu, c=cfg.c, eps=eps,
        init_mode="zero" if cfg.init == "revelation" else cfg.se_init_mode,
        init_interval=cfg.se_init_interval, seed=int(se_seed),
        t_max=cfg.n_iter + 1, revealed_spike_snr=(cfg.init == "revelation"))
    traj = se_run(se_cfg)

    if cfg.init == "revelation":
        state = init_zero(masks, traj, cfg.p)
    else:
        rng = substream(cfg.seed, point_index, rep_index, _STREAM_INIT)
        if lam > 0 and mu > 0:
            a0 = solve_a0(lam, mu, cfg.c)
            x0_vec, u0_vec = spectral_initialize(sym_op, b_op, a0, rng, tol=1e-6)
        elif lam > 0:
            x0_vec, u0_vec = spectral_initialize(sym_op, None, 0.0, rng, tol=1e-6)
        elif mu > 0:
            x0_vec, u0_vec = spectral_initialize(None, b_op, 1.0, rng, tol=1e-6)
        else:
            x0_vec, u0_vec = spectral_initialize(sym_op, None, 0.0, rng, tol=1e-6)
        state = init_spectral(x0_vec, u0_vec, masks, traj, cfg.p)

    result = run_amp(sym_op, b_op, masks, traj, n_iter=cfg.n_iter, init=state,
                     x_star=labels.x_star, early_stop_tol=cfg.early_stop_tol)
    return ReplicateResult(
        point_index=point_index,
        replicate_index=rep_index,
        empirical_mse=empirical_mse(result.x_hat, labels.x_star),
        empirical_overlap=empirical_overlap(result.x_hat, labels.x_star),
        overlap_trajectory=result.overlap,
        wall_time=time.perf_counter() - t_start)


def run_sweep(cfg: ExperimentConfig) -> list[AggregateResult]:
    """All grid points with replication; per-point errors are recorded and
    the sweep continues.  Output order follows the grid, independent of the
    execution schedule."""
    tasks = [(i, r) for i in range(len(cfg.grid)) for r in range(cfg.replicates)]
    results: dict[tuple[int, int], ReplicateResult] = {}
    failures: dict[tuple[int, int], str] = {}

    def run_one(task):
        i, r = task
        try:
            return task, run_replicate(cfg, i, r), None
        except MvampError as exc:
            return task, None, f"replicate {r}: {type(exc).__name__}: {exc}"

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(pool.map(run_one, tasks))
    else:
        outcomes = [run_one(t) for t in tasks]
    for task, res, err in outcomes:
        if err is None:
            results[task] = res
        else:
            failures[task] = err

    aggregates = []
    for i, value in enumerate(cfg.grid):
        lam, mu = cfg.point(value)
        agg = AggregateResult(
            family=cfg.family, n=cfg.n, p=cfg.p, lam=lam, mu=mu, c=cfg.c,
            replicates=cfg.replicates,
            theory_mmse=limit_mmse(lam, mu, cfg.c),
            detectable=detection_possible(lam, mu, cfg.c))
        point_results = [results[(i, r)] for r in range(cfg.replicates) if (i, r) in results]
        agg.errors = [failures[(i, r)] for r in range(cfg.replicates) if (i, r) in failures]
        if point_results:
            mses = np.array([r.empirical_mse for r in point_results])
            agg.mean_mse = float(mses.mean())
            agg.sd_mse = float(mses.std(ddof=1)) if len(mses) > 1 else 0.0
            agg.min_mse = float(mses.min())
            agg.max_mse = float(mses.max())
            agg.mean_overlap = float(np.mean([r.empirical_overlap for r in point_results]))
            agg.wall_time_s = float(sum(r.wall_time for r in point_results))
        aggregates.append(agg)
    return aggregates


@dataclass
class SeCheckReport:
    """Comparison of empirical overlap against the predicted z_t for the
    post-step iterations t = 1..t_max."""

    t: np.ndarray
    z_theory: np.ndarray
    mean_overlap: np.ndarray

    @property
    def abs_gap(self) -> np.ndarray:
        return np.abs(self.mean_overlap - self.z_theory)


def se_consistency_check(lam: float, mu: float, c: float, eps: float, n: int,
                         t_max: int, replicates: int, seed: int = 0,
                         threads: int = 1) -> SeCheckReport:
    """Track the zero-initialized, eps-revealed run against state evolution.

    Uses the dense symmetric family and the revealed-spike channel
    convention, which is what the algorithm realizes (see the state
    evolution module docstring).
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError("tracking check requires eps in (0, 1]")
    p = int(round(n / c))
    cfg = ExperimentConfig(
        family="gaussian", n=n, p=p, sweep_param="lambda", grid=(lam,),
        fixed_value=mu, replicates=replicates, n_iter=t_max, seed=seed,
        init="revelation", eps=eps, threads=threads)
    se_cfg = SeConfig(lam=lam, mu=mu, c=cfg.c, eps=eps, init_mode="zero",
                      t_max=t_max + 1, revealed_spike_snr=True)
    traj = se_run(se_cfg)

    def one(rep):
        return run_replicate(cfg, 0, rep).overlap_trajectory

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trajs = list(pool.map(one, range(replicates)))
    else:
        trajs = [one(rep) for rep in range(replicates)]
    mean_overlap = np.mean(np.stack(trajs), axis=0)[1: t_max + 1]
    return SeCheckReport(t=np.arange(1, t_max + 1), z_theory=traj.z[1: t_max + 1],
                         mean_overlap=mean_overlap)
