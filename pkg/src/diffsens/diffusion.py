"""The hidden diffusion step between assignment and outcome measurement.

Treated units stay treated; an initially untreated unit with T treated
in-neighbors independently becomes treated with probability 1 - (1 - p̄)^T.
Exposure probabilities at the post-diffusion time come in two flavors:
conditional on everyone else's initial assignment (Bernoulli designs) or
marginal given only the graph (cluster designs, where the conditional version
degenerates to 0/1).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from math import comb

import numpy as np

from .design import (
    Assignment,
    BernoulliDesign,
    ClusterRandomizedDesign,
    Design,
    Stage,
    assignment_probabilities,
    draw_assignment_matrix,
)
from .graph import DirectedNetwork
from .rng import spawn_rng

__all__ = [
    "ExposureKind",
    "ExposureProbabilities",
    "DiffusionScenario",
    "treated_in_degree",
    "receipt_probability",
    "conditional_exposure",
    "marginal_exposure_mc",
    "exact_marginal_exposure",
    "simulate_diffusion",
    "diffusion_scenario",
]


class ExposureKind(Enum):
    CONDITIONAL_ON_OTHERS = "conditional_on_others"
    MARGINAL_GIVEN_GRAPH = "marginal_given_graph"


@dataclass(frozen=True)
class ExposureProbabilities:
    pi_t_prime: np.ndarray
    kind: ExposureKind

    def __post_init__(self):
        pi = np.asarray(self.pi_t_prime, dtype=np.float64)
        if np.any(pi <= 0.0) or np.any(pi >= 1.0):
            raise ValueError("post-diffusion exposure probabilities must lie strictly in (0, 1)")
        pi.setflags(write=False)
        object.__setattr__(self, "pi_t_prime", pi)


@dataclass(frozen=True)
class DiffusionScenario:
    """Diffusion parameter with its derived per-unit quantities."""

    p_bar: float
    treated_in_degree: np.ndarray
    rho: np.ndarray


def _check_p_bar(p_bar: float) -> None:
    if not 0.0 <= p_bar < 1.0:
        raise ValueError(f"diffusion parameter must lie in [0, 1), got {p_bar}")


def treated_in_degree(g: DirectedNetwork, z_t: Assignment) -> np.ndarray:
    """Number of treated in-neighbors of each unit under the initial assignment."""
    if z_t.stage is not Stage.INITIAL_T:
        raise ValueError("treated in-degree is defined on the initial assignment")
    if z_t.n_units != g.n_nodes:
        raise ValueError("assignment length does not match the graph")
    src, dst = g.edges[:, 0], g.edges[:, 1]
    return np.bincount(dst[z_t.z[src] == 1], minlength=g.n_nodes)


def receipt_probability(t_it, p_bar: float):
    """1 - (1 - p̄)^T: chance an untreated unit receives the treatment.

    Accepts a scalar count or an array of counts; p̄ = 1 is rejected because
    the diffusion model requires p̄ < 1.
    """
    _check_p_bar(p_bar)
    t = np.asarray(t_it)
    if np.any(t < 0):
        raise ValueError("treated in-degree counts must be non-negative")
    out = 1.0 - (1.0 - p_bar) ** t
    return float(out) if np.ndim(t_it) == 0 else out


def conditional_exposure(pi_t, rho):
    """π + ρ(1 - π): exposure probability given the others' assignments."""
    pi = np.asarray(pi_t, dtype=np.float64)
    r = np.asarray(rho, dtype=np.float64)
    if np.any(pi <= 0.0) or np.any(pi >= 1.0):
        raise ValueError("initial probability must lie strictly in (0, 1)")
    if np.any(r < 0.0) or np.any(r >= 1.0):
        raise ValueError("receipt probability must lie in [0, 1)")
    out = pi + r * (1.0 - pi)
    return float(out) if np.ndim(pi_t) == 0 and np.ndim(rho) == 0 else out


def diffusion_scenario(g: DirectedNetwork, z_t: Assignment, p_bar: float) -> DiffusionScenario:
    t = treated_in_degree(g, z_t)
    return DiffusionScenario(p_bar=float(p_bar), treated_in_degree=t, rho=receipt_probability(t, p_bar))


def _treated_in_degree_matrix(g: DirectedNetwork, z_rows: np.ndarray) -> np.ndarray:
    """Per-row treated in-degrees for a (draws, n) assignment matrix."""
    return np.asarray(z_rows.astype(np.float64) @ g.adjacency())


def marginal_exposure_mc(
    g: DirectedNetwork,
    d: Design,
    p_bar: float,
    omega: int = 2000,
    seed: int = 0,
) -> ExposureProbabilities:
    """Monte-Carlo marginal exposure π_it'(1; G).

    Only the diffusion term E[ρ_i · I(Z_it = 0) | G] is simulated, over omega
    independent initial assignments; the initial probability is added
    analytically.
    """
    _check_p_bar(p_bar)
    if omega < 1:
        raise ValueError("omega must be at least 1")
    pi = assignment_probabilities(d, g.n_nodes)
    rng = spawn_rng(seed, "marginal-exposure", float(p_bar))
    z = draw_assignment_matrix(d, omega, rng)
    t = _treated_in_degree_matrix(g, z)
    rho_when_control = (1.0 - (1.0 - p_bar) ** t) * (z == 0)
    return ExposureProbabilities(
        pi_t_prime=pi + rho_when_control.mean(axis=0),
        kind=ExposureKind.MARGINAL_GIVEN_GRAPH,
    )


def exact_marginal_exposure(
    g: DirectedNetwork,
    d: Design,
    p_bar: float,
    max_enumeration: int = 200_000,
) -> ExposureProbabilities:
    """Exact marginal exposure π_it'(1; G).

    Cluster designs: full enumeration of the C(C, C_T) equally likely treated
    subsets. Bernoulli designs: the enumeration collapses in closed form,
    since ρ_i depends on independent assignments of the in-neighbors only:
    E[(1 - p̄)^{T_i}] = prod_{j -> i} (1 - π_j p̄).
    """
    _check_p_bar(p_bar)
    pi = assignment_probabilities(d, g.n_nodes)

    if isinstance(d, BernoulliDesign):
        log_survival = np.zeros(g.n_nodes)
        src, dst = g.edges[:, 0], g.edges[:, 1]
        np.add.at(log_survival, dst, np.log1p(-pi[src] * p_bar))
        mean_rho = 1.0 - np.exp(log_survival)
        return ExposureProbabilities(
            pi_t_prime=pi + (1.0 - pi) * mean_rho,
            kind=ExposureKind.MARGINAL_GIVEN_GRAPH,
        )

    clusters = d.clusters
    n_subsets = comb(len(clusters), d.n_treated_clusters)
    if n_subsets > max_enumeration:
        raise ValueError(
            f"enumeration of {n_subsets} cluster subsets exceeds the cap {max_enumeration}"
        )
    z = np.zeros((n_subsets, g.n_nodes), dtype=np.int8)
    for row, subset in enumerate(combinations(clusters.tolist(), d.n_treated_clusters)):
        z[row] = np.isin(d.cluster_of, subset)
    t = _treated_in_degree_matrix(g, z)
    rho_when_control = (1.0 - (1.0 - p_bar) ** t) * (z == 0)
    return ExposureProbabilities(
        pi_t_prime=pi + rho_when_control.mean(axis=0),
        kind=ExposureKind.MARGINAL_GIVEN_GRAPH,
    )


def simulate_diffusion(z_t: Assignment, rho: np.ndarray, seed: int) -> Assignment:
    """One diffusion realization: controls switch independently with ρ_i."""
    rng = spawn_rng(seed, "diffusion")
    z_prime = simulate_diffusion_matrix(z_t, rho, 1, rng)[0]
    return Assignment(z=z_prime, stage=Stage.POST_DIFFUSION_T_PRIME)


def simulate_diffusion_matrix(
    z_t: Assignment,
    rho: np.ndarray,
    n_draws: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """(n_draws, n_units) independent post-diffusion vectors from one Z_t."""
    if z_t.stage is not Stage.INITIAL_T:
        raise ValueError("diffusion applies to the initial assignment only")
    rho = np.asarray(rho, dtype=np.float64)
    if rho.shape != (z_t.n_units,):
        raise ValueError("rho length does not match the assignment")
    if np.any(rho < 0.0) or np.any(rho >= 1.0):
        raise ValueError("receipt probabilities must lie in [0, 1)")
    switches = rng.random((n_draws, z_t.n_units)) < rho
    return np.where(z_t.z[None, :] == 1, 1, switches.astype(np.int8)).astype(np.int8)
