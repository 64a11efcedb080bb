"""Dyadic similarity features and multiple imputation of missing links.

The observed network typically covers intra-cluster ties only; the status of
every inter-cluster ordered dyad is unknown. A link scorer trained on the
observed dyads assigns each missing dyad a probability, and an ensemble of M
completed networks is drawn by independent Bernoulli imputation, identical on
the observed block and differing only in the imputed ties.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, clone
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from .graph import DirectedNetwork
from .rng import derive_seed, spawn_rng

__all__ = [
    "UnitCovariates",
    "DyadicFeatures",
    "PartialNetwork",
    "LinkScorer",
    "LinkModel",
    "IterationStat",
    "DensityDiagnostics",
    "jaccard",
    "school_similarity",
    "cultural_similarity",
    "personal_similarity",
    "cultural_normalization",
    "dyadic_features",
    "fit_link_model",
    "impute_ensemble",
    "density_diagnostics",
    "NetworkLinkImputer",
]

FEATURE_NAMES = (
    "hobby_similarity",
    "school_similarity",
    "cultural_similarity",
    "personal_similarity",
    "inter_class_friends_src",
    "inter_class_friends_dst",
    "outside_class_inclination_src",
    "outside_class_inclination_dst",
)


@dataclass(frozen=True)
class UnitCovariates:
    """Survey covariates for one unit.

    ``cultural_frequencies`` holds the four ordinal activity frequencies
    (book reading, symphony, theatre, cinema). ``inter_class_friend_count``
    and ``sociability_context`` are optional; missing values are tolerated by
    the link model.
    """

    hobbies: frozenset
    gpa: float
    extracurriculars: frozenset
    cultural_frequencies: tuple
    personal: frozenset
    inter_class_friend_count: int | None = None
    sociability_context: str | None = None

    def __post_init__(self):
        if len(self.cultural_frequencies) != 4:
            raise ValueError("cultural_frequencies must have exactly 4 entries")
        if self.sociability_context not in (None, "within_class", "outside_class"):
            raise ValueError("sociability_context must be 'within_class' or 'outside_class'")
        object.__setattr__(self, "hobbies", frozenset(self.hobbies))
        object.__setattr__(self, "extracurriculars", frozenset(self.extracurriculars))
        object.__setattr__(self, "personal", frozenset(self.personal))
        object.__setattr__(
            self, "cultural_frequencies", tuple(float(f) for f in self.cultural_frequencies)
        )


@dataclass(frozen=True)
class DyadicFeatures:
    x1: float
    x2: float
    x3: float
    x4: float

    def __post_init__(self):
        for name in ("x1", "x2", "x3", "x4"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")


def jaccard(a, b) -> float:
    """|a ∩ b| / |a ∪ b|, with two empty sets scored 0 (no shared evidence)."""
    a, b = set(a), set(b)
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


def school_similarity(gpa_i, gpa_j, extras_i, extras_j, gpa_min, gpa_max) -> float:
    """Mean of the normalized gpa closeness and the extracurricular Jaccard.

    A degenerate gpa range (everyone identical) scores the gpa part as 1.
    """
    if gpa_max < gpa_min:
        raise ValueError("gpa_max must not be below gpa_min")
    for gpa in (gpa_i, gpa_j):
        if not gpa_min <= gpa <= gpa_max:
            raise ValueError(f"gpa {gpa} outside the dataset range [{gpa_min}, {gpa_max}]")
    if gpa_max == gpa_min:
        gpa_part = 1.0
    else:
        gpa_part = 1.0 - abs(gpa_i - gpa_j) / (gpa_max - gpa_min)
    return (gpa_part + jaccard(extras_i, extras_j)) / 2.0


def cultural_similarity(freq_i, freq_j, normalization: float) -> float:
    """1 - euclidean(freq_i, freq_j) / normalization, where the normalization
    is the dataset's maximum pairwise distance (so the most distant pair
    scores 0). An all-identical dataset (zero normalization) scores 1."""
    fi = np.asarray(freq_i, dtype=np.float64)
    fj = np.asarray(freq_j, dtype=np.float64)
    if fi.shape != (4,) or fj.shape != (4,):
        raise ValueError("frequency vectors must have length 4")
    if normalization < 0:
        raise ValueError("normalization must be non-negative")
    if normalization == 0:
        return 1.0
    return 1.0 - float(np.linalg.norm(fi - fj)) / normalization


def personal_similarity(personal_i, personal_j) -> float:
    return jaccard(personal_i, personal_j)


def cultural_normalization(covs: Sequence[UnitCovariates]) -> float:
    """Maximum pairwise euclidean distance between frequency vectors."""
    freqs = np.array([c.cultural_frequencies for c in covs])
    if len(freqs) < 2:
        return 0.0
    diffs = freqs[:, None, :] - freqs[None, :, :]
    return float(np.sqrt((diffs**2).sum(axis=2)).max())


def dyadic_features(
    cov_i: UnitCovariates,
    cov_j: UnitCovariates,
    gpa_min: float,
    gpa_max: float,
    normalization: float,
) -> DyadicFeatures:
    return DyadicFeatures(
        x1=jaccard(cov_i.hobbies, cov_j.hobbies),
        x2=school_similarity(
            cov_i.gpa, cov_j.gpa, cov_i.extracurriculars, cov_j.extracurriculars, gpa_min, gpa_max
        ),
        x3=cultural_similarity(
            cov_i.cultural_frequencies, cov_j.cultural_frequencies, normalization
        ),
        x4=personal_similarity(cov_i.personal, cov_j.personal),
    )


@dataclass(frozen=True)
class PartialNetwork:
    """Observed edges plus the set of ordered dyads whose status is unknown."""

    base: DirectedNetwork
    missing: np.ndarray

    def __post_init__(self):
        missing = np.asarray(self.missing, dtype=np.int64).reshape(-1, 2)
        if missing.size:
            if missing.min() < 0 or missing.max() >= self.base.n_nodes:
                raise ValueError("missing dyad endpoint outside the node range")
            if np.any(missing[:, 0] == missing[:, 1]):
                raise ValueError("a self-pair cannot be a dyad")
            order = np.lexsort((missing[:, 1], missing[:, 0]))
            missing = missing[order]
            if np.any(np.all(missing[1:] == missing[:-1], axis=1)):
                raise ValueError("duplicate missing dyads")
            present = self.base.edge_set()
            if any((int(i), int(j)) in present for i, j in missing):
                raise ValueError("a dyad cannot be both observed-present and missing")
        missing.setflags(write=False)
        object.__setattr__(self, "missing", missing)

    @classmethod
    def inter_cluster_missing(cls, base: DirectedNetwork) -> "PartialNetwork":
        """The application structure: intra-cluster dyads observed, every
        inter-cluster ordered dyad missing."""
        if base.cluster_of is None:
            raise ValueError("partial observation by cluster needs cluster labels")
        if base.n_edges and np.any(
            base.cluster_of[base.edges[:, 0]] != base.cluster_of[base.edges[:, 1]]
        ):
            raise ValueError("observed edges cross clusters; those dyads cannot be missing")
        labels = base.cluster_of
        cross = labels[:, None] != labels[None, :]
        return cls(base=base, missing=np.argwhere(cross))

    @property
    def n_missing(self) -> int:
        return int(self.missing.shape[0])

    def observed_dyads(self) -> np.ndarray:
        """All ordered dyads with known status (present or absent)."""
        n = self.base.n_nodes
        known = np.ones((n, n), dtype=bool)
        np.fill_diagonal(known, False)
        if self.n_missing:
            known[self.missing[:, 0], self.missing[:, 1]] = False
        return np.argwhere(known)

    def dyad_status(self, i: int, j: int) -> str:
        if i == j:
            raise ValueError("a self-pair is not a dyad")
        if self.n_missing and bool(
            np.any((self.missing[:, 0] == i) & (self.missing[:, 1] == j))
        ):
            return "missing"
        return "observed_present" if (i, j) in self.base.edge_set() else "observed_absent"


class LinkScorer(BaseEstimator):
    """Binary link scorer wrapping a scikit-learn style classifier.

    A single-class training set (all observed dyads present, or all absent)
    collapses to a constant score equal to the class's empirical rate, which
    plain classifiers refuse to fit.
    """

    def __init__(self, base=None):
        self.base = base

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if X.shape[0] != y.shape[0] or X.shape[0] == 0:
            raise ValueError("training features and labels must align and be nonempty")
        if len(np.unique(y)) < 2:
            self.constant_ = float(y.mean())
            self.model_ = None
        else:
            base = self.base if self.base is not None else logistic_scorer()
            self.model_ = clone(base).fit(X, y)
            self.constant_ = None
        return self

    def link_probability(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if not hasattr(self, "model_"):
            raise ValueError("scorer is not fitted")
        if self.model_ is None:
            return np.full(X.shape[0], self.constant_)
        probs = self.model_.predict_proba(X)[:, 1]
        return np.clip(probs, 0.0, 1.0)


def logistic_scorer():
    """Deterministic additive scorer on the dyadic features (the default)."""
    return make_pipeline(StandardScaler(), LogisticRegression(max_iter=1000))


def forest_scorer(seed: int = 0):
    """Small depth-limited tree ensemble (five trees)."""
    return RandomForestClassifier(n_estimators=5, max_depth=5, random_state=seed % 2**32)


@dataclass(frozen=True)
class IterationStat:
    mean: float
    std: float


@dataclass(frozen=True)
class LinkModel:
    """Fitted link scorer with its per-missing-dyad probabilities and the
    imputation stability trace."""

    scorer: LinkScorer
    missing_dyads: np.ndarray
    missing_probabilities: np.ndarray
    trace: tuple[IterationStat, ...]
    n_nodes: int

    def score(self, X) -> np.ndarray:
        return self.scorer.link_probability(X)


def _covariate_columns(covs: Sequence[UnitCovariates]) -> np.ndarray:
    """(n, 2) columns: inter-class friend count and outside-class inclination,
    with missing entries filled by the observed column mean (0 when the
    column is entirely absent)."""
    friends = np.array(
        [np.nan if c.inter_class_friend_count is None else c.inter_class_friend_count for c in covs],
        dtype=np.float64,
    )
    social = np.array(
        [
            np.nan
            if c.sociability_context is None
            else float(c.sociability_context == "outside_class")
            for c in covs
        ],
        dtype=np.float64,
    )
    cols = np.column_stack([friends, social])
    for k in range(cols.shape[1]):
        col = cols[:, k]
        observed = col[~np.isnan(col)]
        col[np.isnan(col)] = observed.mean() if observed.size else 0.0
    return cols


def _similarity_matrices(covs: Sequence[UnitCovariates]) -> np.ndarray:
    """(4, n, n) symmetric stack of the four dyadic similarities."""
    n = len(covs)
    gpa = np.array([c.gpa for c in covs])
    gpa_min, gpa_max = float(gpa.min()), float(gpa.max())
    norm = cultural_normalization(covs)
    sims = np.ones((4, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            f = dyadic_features(covs[i], covs[j], gpa_min, gpa_max, norm)
            sims[:, i, j] = sims[:, j, i] = (f.x1, f.x2, f.x3, f.x4)
    return sims


def _feature_matrix(
    dyads: np.ndarray, sims: np.ndarray, unit_cols: np.ndarray
) -> np.ndarray:
    src, dst = dyads[:, 0], dyads[:, 1]
    return np.column_stack(
        [
            sims[0, src, dst],
            sims[1, src, dst],
            sims[2, src, dst],
            sims[3, src, dst],
            unit_cols[src, 0],
            unit_cols[dst, 0],
            unit_cols[src, 1],
            unit_cols[dst, 1],
        ]
    )


def fit_link_model(
    pn: PartialNetwork,
    covs: Sequence[UnitCovariates],
    seed: int = 0,
    scorer="logistic",
    n_iterations: int = 5,
) -> LinkModel:
    """Train the link scorer on all observed dyads and score the missing ones.

    The stability trace records the mean and standard deviation of the
    imputed link indicator over ``n_iterations`` seeded imputation draws of
    the missing block.
    """
    if len(covs) != pn.base.n_nodes:
        raise ValueError("need covariates for every node")
    if n_iterations < 1:
        raise ValueError("need at least one trace iteration")

    if scorer == "logistic":
        base = logistic_scorer()
    elif scorer == "forest":
        base = forest_scorer(seed=derive_seed(seed, "forest"))
    else:
        base = scorer

    sims = _similarity_matrices(covs)
    unit_cols = _covariate_columns(covs)
    observed = pn.observed_dyads()
    present = np.zeros((pn.base.n_nodes, pn.base.n_nodes), dtype=bool)
    if pn.base.n_edges:
        present[pn.base.edges[:, 0], pn.base.edges[:, 1]] = True
    y_obs = present[observed[:, 0], observed[:, 1]].astype(np.int64)

    fitted = LinkScorer(base=base).fit(_feature_matrix(observed, sims, unit_cols), y_obs)
    if pn.n_missing:
        probs = fitted.link_probability(_feature_matrix(pn.missing, sims, unit_cols))
    else:
        probs = np.zeros(0)

    rng = spawn_rng(seed, "imputation-trace")
    trace = []
    for _ in range(n_iterations):
        draw = rng.random(pn.n_missing) < probs
        if pn.n_missing:
            trace.append(IterationStat(mean=float(draw.mean()), std=float(draw.std())))
        else:
            trace.append(IterationStat(mean=0.0, std=0.0))

    return LinkModel(
        scorer=fitted,
        missing_dyads=pn.missing,
        missing_probabilities=probs,
        trace=tuple(trace),
        n_nodes=pn.base.n_nodes,
    )


def impute_ensemble(
    pn: PartialNetwork, model: LinkModel, m: int, seed: int = 0
) -> list[DirectedNetwork]:
    """Draw M completed networks: observed block fixed, each missing dyad an
    independent Bernoulli with the model's probability."""
    if m < 1:
        raise ValueError("the ensemble needs at least one network")
    if model.n_nodes != pn.base.n_nodes or not np.array_equal(model.missing_dyads, pn.missing):
        raise ValueError("the link model was fitted on a different partial network")
    ensemble = []
    for index in range(m):
        rng = spawn_rng(seed, "impute-network", index)
        include = rng.random(pn.n_missing) < model.missing_probabilities
        edges = np.concatenate([pn.base.edges, pn.missing[include]], axis=0)
        ensemble.append(
            DirectedNetwork(pn.base.n_nodes, edges, cluster_of=pn.base.cluster_of)
        )
    return ensemble


@dataclass(frozen=True)
class DensityDiagnostics:
    observed_density: float
    imputed_densities: tuple[float, ...] | None
    sparser_than_observed: tuple[bool, ...] | None

    @property
    def all_sparser(self) -> bool | None:
        if self.sparser_than_observed is None:
            return None
        return all(self.sparser_than_observed)


def density_diagnostics(
    ensemble: Sequence[DirectedNetwork], pn: PartialNetwork
) -> DensityDiagnostics:
    """Observed-block link density against each network's imputed-block density."""
    if not ensemble:
        raise ValueError("the ensemble is empty")
    n = pn.base.n_nodes
    n_observed_dyads = n * (n - 1) - pn.n_missing
    observed_density = pn.base.n_edges / n_observed_dyads if n_observed_dyads else 0.0
    if pn.n_missing == 0:
        return DensityDiagnostics(observed_density, None, None)
    imputed = tuple((g.n_edges - pn.base.n_edges) / pn.n_missing for g in ensemble)
    sparser = tuple(d < observed_density for d in imputed)
    return DensityDiagnostics(observed_density, imputed, sparser)


class NetworkLinkImputer(BaseEstimator):
    """Estimator-style front end over fit_link_model / impute_ensemble."""

    def __init__(self, scorer="logistic", n_networks=500, n_iterations=5, random_state=0):
        self.scorer = scorer
        self.n_networks = n_networks
        self.n_iterations = n_iterations
        self.random_state = random_state

    def fit(self, pn: PartialNetwork, covs: Sequence[UnitCovariates]):
        self.model_ = fit_link_model(
            pn,
            covs,
            seed=self.random_state,
            scorer=self.scorer,
            n_iterations=self.n_iterations,
        )
        self.partial_network_ = pn
        return self

    def sample(self, m: int | None = None) -> list[DirectedNetwork]:
        if not hasattr(self, "model_"):
            raise ValueError("call fit before sampling networks")
        return impute_ensemble(
            self.partial_network_,
            self.model_,
            m if m is not None else self.n_networks,
            seed=derive_seed(self.random_state, "ensemble"),
        )
