"""Shared fixtures: tiny graphs and a synthetic clustered survey dataset whose
link formation is genuinely similarity-driven, so a scorer trained on the
observed intra-cluster block extrapolates lower probabilities to the less
similar inter-cluster dyads."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest
from scipy.special import expit, logit

from diffsens.graph import DirectedNetwork
from diffsens.imputation import (
    PartialNetwork,
    UnitCovariates,
    cultural_normalization,
    dyadic_features,
)


def make_covariates(n: int, n_clusters: int, seed: int) -> list[UnitCovariates]:
    """Clustered covariate profiles: same-cluster units share hobby pools,
    nearby gpas, and similar cultural-frequency baselines."""
    rng = np.random.default_rng(seed)
    if n % n_clusters:
        raise ValueError("need equal-size clusters")
    size = n // n_clusters
    global_hobbies = [f"g{i}" for i in range(6)]
    global_extras = [f"e{i}" for i in range(4)]
    personal_pool = ["female", "male", "senior", "junior", "abroad", "suburban"]
    covs = []
    for cluster in range(n_clusters):
        pool = [f"c{cluster}h{i}" for i in range(4)]
        extra_pool = [f"c{cluster}x{i}" for i in range(3)]
        gpa_center = 5.0 + 4.0 * cluster / max(n_clusters - 1, 1)
        base_freq = rng.integers(1, 5, size=4)
        for _ in range(size):
            hobbies = set(rng.choice(pool, size=2, replace=False))
            hobbies.add(str(rng.choice(global_hobbies)))
            extras = {str(rng.choice(extra_pool)), str(rng.choice(global_extras))}
            freq = np.clip(base_freq + rng.integers(-1, 2, size=4), 1, 5)
            covs.append(
                UnitCovariates(
                    hobbies=frozenset(hobbies),
                    gpa=float(gpa_center + rng.uniform(-0.5, 0.5)),
                    extracurriculars=frozenset(extras),
                    cultural_frequencies=tuple(float(f) for f in freq),
                    personal=frozenset(
                        str(t) for t in rng.choice(personal_pool, size=3, replace=False)
                    ),
                    inter_class_friend_count=int(rng.poisson(2)),
                    sociability_context=str(
                        rng.choice(["within_class", "outside_class"])
                    ),
                )
            )
    return covs


def mean_similarity_matrix(covs) -> np.ndarray:
    gpas = np.array([c.gpa for c in covs])
    gpa_min, gpa_max = float(gpas.min()), float(gpas.max())
    norm = cultural_normalization(covs)
    n = len(covs)
    sims = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            f = dyadic_features(covs[i], covs[j], gpa_min, gpa_max, norm)
            sims[i, j] = sims[j, i] = (f.x1 + f.x2 + f.x3 + f.x4) / 4.0
    return sims


@dataclass(frozen=True)
class SyntheticSurvey:
    truth: DirectedNetwork
    partial: PartialNetwork
    covariates: tuple[UnitCovariates, ...]
    intra_target: float
    inter_target: float


def make_survey(
    n: int = 60,
    n_clusters: int = 10,
    intra_density: float = 0.2,
    inter_density: float = 0.03,
    seed: int = 11,
) -> SyntheticSurvey:
    """Similarity-driven truth graph calibrated so the intra-cluster block has
    the target density and the inter-cluster block a much lower one; the
    partial view observes the intra block only."""
    covs = make_covariates(n, n_clusters, seed)
    cluster_of = np.repeat(np.arange(n_clusters), n // n_clusters)
    sims = mean_similarity_matrix(covs)
    same = cluster_of[:, None] == cluster_of[None, :]
    off_diag = ~np.eye(n, dtype=bool)
    intra_sims = sims[same & off_diag]
    inter_sims = sims[~same]

    # moment-match intercept and slope so the realized mean edge probability
    # hits both block targets (solving on the logit of the means would miss
    # them because expit is nonlinear over the similarity spread)
    def gap(params):
        a, b = params
        return [
            expit(a + b * intra_sims).mean() - intra_density,
            expit(a + b * inter_sims).mean() - inter_density,
        ]

    from scipy.optimize import fsolve

    slope0 = (logit(intra_density) - logit(inter_density)) / (
        intra_sims.mean() - inter_sims.mean()
    )
    intercept0 = logit(intra_density) - slope0 * intra_sims.mean()
    intercept, slope = fsolve(gap, [intercept0, slope0])
    prob = expit(intercept + slope * sims)
    rng = np.random.default_rng(seed + 1)
    adjacency = (rng.random((n, n)) < prob) & off_diag
    truth = DirectedNetwork(n, np.argwhere(adjacency), cluster_of=cluster_of)
    observed_edges = truth.edges[
        cluster_of[truth.edges[:, 0]] == cluster_of[truth.edges[:, 1]]
    ]
    base = DirectedNetwork(n, observed_edges, cluster_of=cluster_of)
    return SyntheticSurvey(
        truth=truth,
        partial=PartialNetwork.inter_cluster_missing(base),
        covariates=tuple(covs),
        intra_target=intra_density,
        inter_target=inter_density,
    )


@pytest.fixture(scope="session")
def survey() -> SyntheticSurvey:
    return make_survey()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
