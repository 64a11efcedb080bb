"""Synthetic data-generating processes with known ground truth.

Each scenario plants a hidden diffusion process at a known p̄* and gives the
diffusion-prone units (high in-degree, or high extra-cluster in-degree under
cluster randomization) an effect of known sign, so the naive estimator is
biased in a chosen direction while the population average effect is exactly
zero by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import (
    Assignment,
    BernoulliDesign,
    ClusterRandomizedDesign,
    Design,
    draw_assignment,
)
from .diffusion import diffusion_scenario, simulate_diffusion
from .graph import DirectedNetwork, degree_summary, generate_clustered, generate_erdos_renyi
from .rng import derive_seed, spawn_rng

__all__ = [
    "ScenarioSpec",
    "GroundTruthDataset",
    "high_exposure_indicator",
    "assign_effects",
    "generate_dataset",
]

_DIRECTIONS = ("underestimation", "overestimation")
_DESIGNS = ("bernoulli", "cluster")


@dataclass(frozen=True)
class ScenarioSpec:
    direction: str
    k: float
    p_bar_true: float
    design_variant: str = "bernoulli"
    n_units: int = 1000
    edge_probability: float = 0.01
    n_clusters: int = 10
    p_within: float = 0.2
    p_between: float = 0.02
    n_treated_clusters: int = 5
    assignment_probability: float = 0.5
    master_seed: int = 0

    def __post_init__(self):
        if self.direction not in _DIRECTIONS:
            raise ValueError(f"direction must be one of {_DIRECTIONS}")
        if self.design_variant not in _DESIGNS:
            raise ValueError(f"design_variant must be one of {_DESIGNS}")
        if self.k <= 0:
            raise ValueError("effect magnitude k must be positive")
        if not 0.0 <= self.p_bar_true < 1.0:
            raise ValueError("the true diffusion parameter must lie in [0, 1)")


@dataclass(frozen=True)
class GroundTruthDataset:
    graph: DirectedNetwork
    design: Design
    z_t: Assignment
    z_t_prime_true: Assignment
    tau_i_star: np.ndarray
    y0: np.ndarray
    y1: np.ndarray
    y_observed: np.ndarray
    true_ate: float


def high_exposure_indicator(g: DirectedNetwork, variant: str = "bernoulli") -> np.ndarray:
    """1 for units whose (extra-cluster) in-degree is strictly above the median.

    The bernoulli variant uses the plain in-degree; the cluster variant uses
    the count of in-neighbors from other clusters, because only those can
    carry the treatment into a control cluster.
    """
    if variant not in _DESIGNS:
        raise ValueError(f"variant must be one of {_DESIGNS}")
    deg = degree_summary(g)
    if variant == "bernoulli":
        counts = deg.in_degree
    else:
        if deg.extra_cluster_in_degree is None:
            raise ValueError("the cluster variant needs cluster labels on the graph")
        counts = deg.extra_cluster_in_degree
    return (counts > np.median(counts)).astype(np.int8)


def assign_effects(indicator: np.ndarray, k: float, direction: str) -> np.ndarray:
    """Per-unit effects summing to zero: the high-exposure group gets ±k and
    the rest gets the sign-flipped value scaled by the group-size ratio."""
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {_DIRECTIONS}")
    indicator = np.asarray(indicator)
    n_high = int(indicator.sum())
    n_low = indicator.size - n_high
    if n_high == 0 or n_low == 0:
        raise ValueError("both exposure groups must be nonempty")
    q1 = n_high / indicator.size
    q0 = n_low / indicator.size
    high_effect = k if direction == "underestimation" else -k
    low_effect = -high_effect * q1 / q0
    return np.where(indicator == 1, high_effect, low_effect)


def _scenario_graph_and_design(spec: ScenarioSpec) -> tuple[DirectedNetwork, Design]:
    graph_seed = derive_seed(spec.master_seed, "graph")
    if spec.design_variant == "bernoulli":
        g = generate_erdos_renyi(spec.n_units, spec.edge_probability, seed=graph_seed)
        return g, BernoulliDesign.constant(spec.assignment_probability, spec.n_units)
    g = generate_clustered(
        spec.n_units, spec.n_clusters, spec.p_within, spec.p_between, seed=graph_seed
    )
    return g, ClusterRandomizedDesign.from_graph(g, spec.n_treated_clusters)


def generate_dataset(spec: ScenarioSpec) -> GroundTruthDataset:
    """Graph, assignment, one true diffusion realization, and outcomes.

    The true post-diffusion vector is drawn exactly once and stored so the
    hidden truth stays available to validation code.
    """
    g, design = _scenario_graph_and_design(spec)
    z_t = draw_assignment(design, g, seed=derive_seed(spec.master_seed, "assignment"))
    scen = diffusion_scenario(g, z_t, spec.p_bar_true)
    z_t_prime = simulate_diffusion(z_t, scen.rho, seed=derive_seed(spec.master_seed, "true-diffusion"))

    indicator = high_exposure_indicator(g, spec.design_variant)
    tau = assign_effects(indicator, spec.k, spec.direction)

    rng = spawn_rng(spec.master_seed, "outcomes")
    y0 = rng.standard_normal(spec.n_units)
    y1 = y0 + tau
    y_observed = np.where(z_t_prime.z == 1, y1, y0)

    return GroundTruthDataset(
        graph=g,
        design=design,
        z_t=z_t,
        z_t_prime_true=z_t_prime,
        tau_i_star=tau,
        y0=y0,
        y1=y1,
        y_observed=y_observed,
        true_ate=0.0,
    )
