"""Simulation-based sensitivity analysis over a grid of diffusion parameters.

For each hypothetical p̄ the procedure simulates R post-diffusion assignment
vectors (times M completed networks when links were imputed), re-estimates the
effect in every scenario, and pools the estimates into a mean, a between/within
variance decomposition and a confidence interval to compare against the naive
no-diffusion estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy import stats
from sklearn.base import BaseEstimator

from .design import Assignment, BernoulliDesign, Design, Stage, assignment_probabilities
from .diffusion import (
    ExposureKind,
    ExposureProbabilities,
    conditional_exposure,
    diffusion_scenario,
    marginal_exposure_mc,
    simulate_diffusion_matrix,
)
from .estimators import EffectEstimate, as_outcomes, column_estimates, ht_naive
from .graph import DirectedNetwork
from .rng import derive_seed, spawn_rng

__all__ = [
    "SensitivityConfig",
    "ScenarioEstimates",
    "PooledResult",
    "CiComparison",
    "SensitivityReport",
    "pool",
    "run_observed",
    "run_partial",
    "compare_ci",
    "critical_threshold",
    "DiffusionSensitivity",
]

_ESTIMATORS = ("conditional", "marginal")
_VARIANTS = ("observed", "partial")


@dataclass(frozen=True)
class SensitivityConfig:
    p_grid: tuple[float, ...]
    n_replicates: int
    n_networks: int = 1
    omega: int = 2000
    alpha: float = 0.05
    master_seed: int = 0
    estimator: str = "conditional"

    def __post_init__(self):
        grid = tuple(float(p) for p in self.p_grid)
        if not grid:
            raise ValueError("the diffusion-parameter grid cannot be empty")
        if any(not 0.0 <= p < 1.0 for p in grid):
            raise ValueError("every grid value must lie in [0, 1)")
        if len(set(grid)) != len(grid):
            raise ValueError("grid values must be distinct")
        object.__setattr__(self, "p_grid", grid)
        if self.n_replicates < 1:
            raise ValueError("need at least one replicate per grid value")
        if self.n_networks < 1:
            raise ValueError("need at least one network")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.estimator not in _ESTIMATORS:
            raise ValueError(f"estimator must be one of {_ESTIMATORS}")


@dataclass(frozen=True)
class ScenarioEstimates:
    """All R x M replicate estimates for one grid value, network-major order."""

    p_bar: float
    values: np.ndarray
    std_errors: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        ses = np.asarray(self.std_errors, dtype=np.float64)
        if values.shape != ses.shape or values.ndim != 1 or values.size == 0:
            raise ValueError("values and std_errors must be matching nonempty vectors")
        if not (np.isfinite(values).all() and np.isfinite(ses).all()):
            raise ValueError("replicate estimates must be finite")
        values.setflags(write=False)
        ses.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "std_errors", ses)


@dataclass(frozen=True)
class PooledResult:
    p_bar: float
    mean: float
    between_var: float
    within_var: float
    total_var: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class CiComparison:
    naive_ci: tuple[float, float]
    pooled_ci: tuple[float, float]
    overlap: bool
    sign_preserved: bool
    mean_gap: float


@dataclass(frozen=True)
class SensitivityReport:
    naive: EffectEstimate
    naive_ci: tuple[float, float]
    per_p_bar: tuple[PooledResult, ...]
    raw: tuple[ScenarioEstimates, ...]
    config: SensitivityConfig
    variant: str


def _critical_value(alpha: float) -> float:
    return float(stats.norm.ppf(1.0 - alpha / 2.0))


def _exact_mean(values: np.ndarray) -> float:
    # the arithmetic mean of identical values is that value; np.mean is not
    # ulp-exact on constant input, and the zero-diffusion degeneracy relies
    # on bitwise equality with the naive estimate
    if values[0] == values.min() == values.max():
        return float(values[0])
    return float(np.mean(values))


def pool(estimates: ScenarioEstimates, variant: str, alpha: float = 0.05) -> PooledResult:
    """Pool one grid value's replicate estimates.

    The observed-network variant divides both variance components by R; the
    partial-network variant divides both by R*M - 1, exactly as displayed for
    the two settings (the off-by-one in the partial within-variance included).
    """
    if variant not in _VARIANTS:
        raise ValueError(f"variant must be one of {_VARIANTS}")
    values, ses = estimates.values, estimates.std_errors
    n = values.size
    mean = _exact_mean(values)
    centered_ss = float(np.sum((values - mean) ** 2))
    within_ss = float(np.sum(ses**2))
    if variant == "observed":
        denom = n
    else:
        if n < 2:
            raise ValueError("partial-network pooling needs R*M of at least 2")
        denom = n - 1
    between_var = centered_ss / denom
    within_var = within_ss / denom
    total_var = between_var + within_var
    half = _critical_value(alpha) * np.sqrt(total_var)
    return PooledResult(
        p_bar=estimates.p_bar,
        mean=mean,
        between_var=between_var,
        within_var=within_var,
        total_var=total_var,
        ci_low=mean - half,
        ci_high=mean + half,
    )


def _exposure_probabilities(
    g: DirectedNetwork,
    d: Design,
    p_bar: float,
    rho: np.ndarray,
    cfg: SensitivityConfig,
    m_index: int,
) -> np.ndarray:
    if cfg.estimator == "conditional":
        if not isinstance(d, BernoulliDesign):
            raise ValueError(
                "the conditional estimator is undefined under cluster randomization; "
                "use estimator='marginal'"
            )
        return conditional_exposure(d.pi, rho)
    seed = derive_seed(cfg.master_seed, "exposure", m_index)
    return marginal_exposure_mc(g, d, p_bar, omega=cfg.omega, seed=seed).pi_t_prime


def _scenario_block(
    g: DirectedNetwork,
    z_t: Assignment,
    y: np.ndarray,
    d: Design,
    p_bar: float,
    cfg: SensitivityConfig,
    m_index: int,
):
    """R replicate estimates for one (grid value, network) pair.

    Seeded by (master, p̄ bit pattern, m), so each block is independent of
    loop order, of parallel scheduling, and of which other grid values are
    present.
    """
    scen = diffusion_scenario(g, z_t, p_bar)
    pi_prime = _exposure_probabilities(g, d, p_bar, scen.rho, cfg, m_index)
    rng = spawn_rng(cfg.master_seed, "replicates", float(p_bar), m_index)
    z_rows = simulate_diffusion_matrix(z_t, scen.rho, cfg.n_replicates, rng)
    return column_estimates(y, z_rows, pi_prime)


def _run(
    networks: Sequence[DirectedNetwork],
    z_t: Assignment,
    y,
    d: Design,
    cfg: SensitivityConfig,
    variant: str,
    n_jobs: int,
) -> SensitivityReport:
    n_units = networks[0].n_nodes
    if any(g.n_nodes != n_units for g in networks):
        raise ValueError("all networks must share the same node set")
    if z_t.stage is not Stage.INITIAL_T:
        raise ValueError("the sensitivity analysis starts from the initial assignment")
    y = as_outcomes(y, n_units)
    pi_t = assignment_probabilities(d, n_units)

    naive = ht_naive(y, z_t, pi_t)
    half = _critical_value(cfg.alpha) * naive.std_error
    naive_ci = (naive.value - half, naive.value + half)

    tasks = [(p_bar, m) for p_bar in cfg.p_grid for m in range(len(networks))]
    runner = Parallel(n_jobs=n_jobs) if n_jobs != 1 else None
    if runner is None:
        blocks = [_scenario_block(networks[m], z_t, y, d, p_bar, cfg, m) for p_bar, m in tasks]
    else:
        blocks = runner(
            delayed(_scenario_block)(networks[m], z_t, y, d, p_bar, cfg, m)
            for p_bar, m in tasks
        )

    raw: list[ScenarioEstimates] = []
    per_m = len(networks)
    for gi, p_bar in enumerate(cfg.p_grid):
        chunk = blocks[gi * per_m : (gi + 1) * per_m]
        raw.append(
            ScenarioEstimates(
                p_bar=p_bar,
                values=np.concatenate([vals for vals, _ in chunk]),
                std_errors=np.concatenate([ses for _, ses in chunk]),
            )
        )
    pooled = tuple(pool(est, variant, cfg.alpha) for est in raw)
    return SensitivityReport(
        naive=naive,
        naive_ci=naive_ci,
        per_p_bar=pooled,
        raw=tuple(raw),
        config=cfg,
        variant=variant,
    )


def run_observed(
    g: DirectedNetwork,
    z_t: Assignment,
    y,
    d: Design,
    cfg: SensitivityConfig,
    n_jobs: int = 1,
) -> SensitivityReport:
    """Sensitivity analysis on a fully observed network (M = 1)."""
    if cfg.n_networks != 1:
        raise ValueError("run_observed requires n_networks = 1; use run_partial for ensembles")
    return _run([g], z_t, y, d, cfg, "observed", n_jobs)


def run_partial(
    ensemble: Sequence[DirectedNetwork],
    z_t: Assignment,
    y,
    d: Design,
    cfg: SensitivityConfig,
    n_jobs: int = 1,
) -> SensitivityReport:
    """Sensitivity analysis over an ensemble of M completed networks."""
    ensemble = list(ensemble)
    if not ensemble:
        raise ValueError("the network ensemble is empty")
    if cfg.n_networks != len(ensemble):
        raise ValueError(
            f"config declares {cfg.n_networks} networks but the ensemble holds {len(ensemble)}"
        )
    return _run(ensemble, z_t, y, d, cfg, "partial", n_jobs)


def compare_ci(naive: EffectEstimate, pooled: PooledResult, alpha: float = 0.05) -> CiComparison:
    """Compare the naive and pooled normal-approximation confidence intervals."""
    z = _critical_value(alpha)
    naive_ci = (naive.value - z * naive.std_error, naive.value + z * naive.std_error)
    half = z * np.sqrt(pooled.total_var)
    pooled_ci = (pooled.mean - half, pooled.mean + half)
    overlap = naive_ci[0] <= pooled_ci[1] and pooled_ci[0] <= naive_ci[1]
    naive_sign = 0 if naive_ci[0] <= 0.0 <= naive_ci[1] else (1 if naive_ci[0] > 0 else -1)
    pooled_sign = 0 if pooled_ci[0] <= 0.0 <= pooled_ci[1] else (1 if pooled_ci[0] > 0 else -1)
    sign_preserved = naive_sign != 0 and naive_sign == pooled_sign
    return CiComparison(
        naive_ci=naive_ci,
        pooled_ci=pooled_ci,
        overlap=bool(overlap),
        sign_preserved=bool(sign_preserved),
        mean_gap=pooled.mean - naive.value,
    )


def critical_threshold(report: SensitivityReport) -> float | None:
    """Smallest grid p̄ whose pooled CI no longer overlaps the naive CI."""
    grid = [p.p_bar for p in report.per_p_bar]
    if any(a >= b for a, b in zip(grid, grid[1:])):
        raise ValueError("the grid must be sorted in ascending order")
    for pooled in report.per_p_bar:
        if not compare_ci(report.naive, pooled, report.config.alpha).overlap:
            return pooled.p_bar
    return None


class DiffusionSensitivity(BaseEstimator):
    """Estimator-style front end for the sensitivity analysis.

    Parameters mirror SensitivityConfig; ``fit`` accepts either a single
    observed network or a sequence of completed networks, the initial
    assignment, the outcomes and the randomization design, and stores the
    resulting report on ``report_``.
    """

    def __init__(
        self,
        p_grid=(0.01, 0.05, 0.10, 0.20, 0.25),
        n_replicates=500,
        omega=2000,
        alpha=0.05,
        estimator="conditional",
        random_state=0,
        n_jobs=1,
    ):
        self.p_grid = p_grid
        self.n_replicates = n_replicates
        self.omega = omega
        self.alpha = alpha
        self.estimator = estimator
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _config(self, n_networks: int) -> SensitivityConfig:
        return SensitivityConfig(
            p_grid=tuple(self.p_grid),
            n_replicates=self.n_replicates,
            n_networks=n_networks,
            omega=self.omega,
            alpha=self.alpha,
            master_seed=self.random_state,
            estimator=self.estimator,
        )

    def fit(self, network, z_t: Assignment, y, design: Design):
        if isinstance(network, DirectedNetwork):
            cfg = self._config(1)
            self.report_ = run_observed(network, z_t, y, design, cfg, n_jobs=self.n_jobs)
        else:
            ensemble = list(network)
            cfg = self._config(len(ensemble))
            self.report_ = run_partial(ensemble, z_t, y, design, cfg, n_jobs=self.n_jobs)
        return self

    def critical_threshold(self) -> float | None:
        if not hasattr(self, "report_"):
            raise ValueError("call fit before querying the critical threshold")
        return critical_threshold(self.report_)
