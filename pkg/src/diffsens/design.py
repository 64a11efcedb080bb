"""Randomization designs and initial-assignment probabilities."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graph import DirectedNetwork
from .rng import spawn_rng

__all__ = [
    "Stage",
    "Assignment",
    "BernoulliDesign",
    "ClusterRandomizedDesign",
    "Design",
    "assignment_probabilities",
    "assignment_probability",
    "draw_assignment",
]


class Stage(Enum):
    INITIAL_T = "initial_t"
    POST_DIFFUSION_T_PRIME = "post_diffusion_t_prime"


@dataclass(frozen=True)
class Assignment:
    """A binary treatment vector tagged with the time stage it refers to.

    The stage tag is what prevents a post-diffusion vector from being pushed
    through the diffusion step a second time.
    """

    z: np.ndarray
    stage: Stage

    def __post_init__(self):
        z = np.asarray(self.z, dtype=np.int8)
        if z.ndim != 1 or not np.isin(z, (0, 1)).all():
            raise ValueError("z must be a 1-d binary vector")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @property
    def n_units(self) -> int:
        return int(self.z.shape[0])


@dataclass(frozen=True)
class BernoulliDesign:
    """Independent per-unit treatment with probabilities strictly in (0, 1)."""

    pi: np.ndarray

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=np.float64)
        if pi.ndim != 1:
            raise ValueError("pi must be a per-unit vector")
        if np.any(pi <= 0.0) or np.any(pi >= 1.0):
            raise ValueError("every assignment probability must be strictly in (0, 1)")
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)

    @classmethod
    def constant(cls, pi: float, n_units: int) -> "BernoulliDesign":
        return cls(np.full(n_units, float(pi)))

    @property
    def n_units(self) -> int:
        return int(self.pi.shape[0])


@dataclass(frozen=True)
class ClusterRandomizedDesign:
    """Exactly n_treated_clusters clusters drawn treated, uniformly at random."""

    cluster_of: np.ndarray
    n_treated_clusters: int

    def __post_init__(self):
        labels = np.asarray(self.cluster_of, dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "cluster_of", labels)
        n_clusters = len(np.unique(labels))
        if not 0 < self.n_treated_clusters < n_clusters:
            raise ValueError(
                f"n_treated_clusters must be in (0, {n_clusters}), got {self.n_treated_clusters}"
            )

    @classmethod
    def from_graph(cls, g: DirectedNetwork, n_treated_clusters: int) -> "ClusterRandomizedDesign":
        if g.cluster_of is None:
            raise ValueError("graph carries no cluster labels")
        return cls(g.cluster_of, n_treated_clusters)

    @property
    def clusters(self) -> np.ndarray:
        return np.unique(self.cluster_of)

    @property
    def n_units(self) -> int:
        return int(self.cluster_of.shape[0])


Design = BernoulliDesign | ClusterRandomizedDesign


def assignment_probabilities(d: Design, n_units: int | None = None) -> np.ndarray:
    """Per-unit probability of being initially assigned to treatment."""
    if isinstance(d, BernoulliDesign):
        pi = d.pi
    else:
        share = d.n_treated_clusters / len(d.clusters)
        pi = np.full(d.n_units, share)
    if n_units is not None and pi.shape[0] != n_units:
        raise ValueError(f"design covers {pi.shape[0]} units, expected {n_units}")
    return pi


def assignment_probability(d: Design, i: int) -> float:
    return float(assignment_probabilities(d)[i])


def _validate_against_graph(d: Design, g: DirectedNetwork) -> None:
    if isinstance(d, ClusterRandomizedDesign):
        if d.n_units != g.n_nodes:
            raise ValueError("design cluster labels do not cover the graph's nodes")
        if g.cluster_of is not None and not np.array_equal(g.cluster_of, d.cluster_of):
            raise ValueError("design cluster labels disagree with the graph's labels")
    elif d.n_units != g.n_nodes:
        raise ValueError("design covers a different number of units than the graph")


def draw_assignment(d: Design, g: DirectedNetwork, seed: int) -> Assignment:
    """Draw one initial assignment. Independent of the graph's edges."""
    _validate_against_graph(d, g)
    rng = spawn_rng(seed, "assignment")
    return Assignment(z=draw_assignment_matrix(d, 1, rng)[0], stage=Stage.INITIAL_T)


def draw_assignment_matrix(d: Design, n_draws: int, rng: np.random.Generator) -> np.ndarray:
    """(n_draws, n_units) int8 matrix of independent initial assignments."""
    if isinstance(d, BernoulliDesign):
        return (rng.random((n_draws, d.n_units)) < d.pi).astype(np.int8)
    clusters = d.clusters
    # uniformly random C_T-subset per draw, without replacement
    perms = rng.permuted(np.tile(clusters, (n_draws, 1)), axis=1)
    treated = perms[:, : d.n_treated_clusters]
    member = d.cluster_of[None, :] == treated[:, :, None]
    return member.any(axis=1).astype(np.int8)
