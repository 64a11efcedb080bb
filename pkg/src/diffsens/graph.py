"""Directed networks, degree statistics, and random-graph generators.

A network is a set of ordered pairs (i, j), read as "i nominates j": j has an
in-going link from i, and only treated in-neighbors of j can pass it the
treatment. Networks are immutable after construction and safe to share across
parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .rng import spawn_rng

__all__ = [
    "DirectedNetwork",
    "DegreeSummary",
    "in_neighbors",
    "degree_summary",
    "generate_erdos_renyi",
    "generate_clustered",
]


def _as_edge_array(edges) -> np.ndarray:
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be ordered (src, dst) pairs")
    return arr


@dataclass(frozen=True)
class DirectedNetwork:
    """Immutable directed graph on nodes 0..n_nodes-1.

    ``edges`` is canonicalized to a lexicographically sorted, duplicate-free
    (E, 2) int array. ``cluster_of`` is an optional total labeling of nodes.
    """

    n_nodes: int
    edges: np.ndarray
    cluster_of: np.ndarray | None = None

    def __post_init__(self):
        if self.n_nodes < 0:
            raise ValueError("n_nodes must be non-negative")
        arr = _as_edge_array(self.edges)
        if arr.size:
            if arr.min() < 0 or arr.max() >= self.n_nodes:
                raise ValueError("edge endpoint outside [0, n_nodes)")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise ValueError("self-loops are not allowed")
            order = np.lexsort((arr[:, 1], arr[:, 0]))
            arr = arr[order]
            dup = np.all(arr[1:] == arr[:-1], axis=1)
            if np.any(dup):
                arr = np.concatenate([arr[:1], arr[1:][~dup]])
        arr.setflags(write=False)
        object.__setattr__(self, "edges", arr)
        if self.cluster_of is not None:
            labels = np.asarray(self.cluster_of, dtype=np.int64)
            if labels.shape != (self.n_nodes,):
                raise ValueError("cluster_of must label every node")
            labels.setflags(write=False)
            object.__setattr__(self, "cluster_of", labels)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(map(tuple, self.edges.tolist()))

    def adjacency(self) -> sparse.csr_matrix:
        """(n, n) CSR adjacency with A[i, j] = 1 for each edge (i, j). Cached."""
        cached = self.__dict__.get("_adjacency")
        if cached is None:
            data = np.ones(self.n_edges, dtype=np.float64)
            cached = sparse.csr_matrix(
                (data, (self.edges[:, 0], self.edges[:, 1])),
                shape=(self.n_nodes, self.n_nodes),
            )
            object.__setattr__(self, "_adjacency", cached)
        return cached

    def with_clusters(self, cluster_of) -> "DirectedNetwork":
        return DirectedNetwork(self.n_nodes, self.edges, np.asarray(cluster_of))


@dataclass(frozen=True)
class DegreeSummary:
    in_degree: np.ndarray
    out_degree: np.ndarray
    extra_cluster_in_degree: np.ndarray | None = None


def in_neighbors(g: DirectedNetwork, i: int) -> set[int]:
    """Nodes j with an edge (j, i), i.e. the potential spreaders toward i."""
    if not 0 <= i < g.n_nodes:
        raise IndexError(f"node {i} outside [0, {g.n_nodes})")
    mask = g.edges[:, 1] == i
    return set(g.edges[mask, 0].tolist())


def degree_summary(g: DirectedNetwork) -> DegreeSummary:
    in_deg = np.bincount(g.edges[:, 1], minlength=g.n_nodes)
    out_deg = np.bincount(g.edges[:, 0], minlength=g.n_nodes)
    extra = None
    if g.cluster_of is not None:
        cross = g.cluster_of[g.edges[:, 0]] != g.cluster_of[g.edges[:, 1]]
        extra = np.bincount(g.edges[cross, 1], minlength=g.n_nodes)
    return DegreeSummary(in_degree=in_deg, out_degree=out_deg, extra_cluster_in_degree=extra)


def _check_probability(p: float, name: str) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {p}")


def _sample_ordered_pairs(prob: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw each off-diagonal ordered pair (i, j) independently with prob[i, j]."""
    n = prob.shape[0]
    mask = rng.random((n, n)) < prob
    np.fill_diagonal(mask, False)
    return np.argwhere(mask).astype(np.int64)


def generate_erdos_renyi(n: int, p_edge: float, seed: int) -> DirectedNetwork:
    """Directed Erdős–Rényi graph: each ordered pair present independently."""
    _check_probability(p_edge, "p_edge")
    rng = spawn_rng(seed, "erdos-renyi")
    edges = _sample_ordered_pairs(np.full((n, n), p_edge), rng)
    return DirectedNetwork(n_nodes=n, edges=edges)


def generate_clustered(
    n: int,
    n_clusters: int,
    p_within: float,
    p_between: float,
    seed: int,
) -> DirectedNetwork:
    """Directed planted-partition graph with equal-size clusters.

    Ordered pairs inside a cluster appear with p_within, pairs across clusters
    with p_between; cluster labels are attached to the returned network.
    """
    _check_probability(p_within, "p_within")
    _check_probability(p_between, "p_between")
    if n_clusters <= 0 or n % n_clusters != 0:
        raise ValueError(f"n={n} must divide evenly into n_clusters={n_clusters}")
    cluster_of = np.repeat(np.arange(n_clusters), n // n_clusters)
    same = cluster_of[:, None] == cluster_of[None, :]
    prob = np.where(same, p_within, p_between)
    rng = spawn_rng(seed, "clustered")
    edges = _sample_ordered_pairs(prob, rng)
    return DirectedNetwork(n_nodes=n, edges=edges, cluster_of=cluster_of)
