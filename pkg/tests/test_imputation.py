import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffsens.graph import DirectedNetwork, generate_clustered
from diffsens.imputation import (
    LinkScorer,
    NetworkLinkImputer,
    PartialNetwork,
    UnitCovariates,
    cultural_normalization,
    cultural_similarity,
    density_diagnostics,
    dyadic_features,
    fit_link_model,
    impute_ensemble,
    jaccard,
    personal_similarity,
    school_similarity,
)

from conftest import make_covariates


class TestJaccard:
    def test_partial_overlap(self):
        assert jaccard({"a", "b"}, {"b", "c"}) == pytest.approx(1 / 3)

    def test_identical_nonempty(self):
        assert jaccard({"a", "b"}, {"a", "b"}) == 1.0

    def test_disjoint(self):
        assert jaccard({"a"}, {"b"}) == 0.0

    def test_both_empty(self):
        assert jaccard(set(), set()) == 0.0


class TestSchoolSimilarity:
    def test_hand_value(self):
        assert school_similarity(8.0, 6.0, {"m"}, {"m"}, 4.0, 10.0) == pytest.approx(5 / 6)

    def test_identical_units(self):
        assert school_similarity(7.0, 7.0, {"m", "l"}, {"m", "l"}, 4.0, 10.0) == 1.0

    def test_opposite_extremes_disjoint(self):
        assert school_similarity(4.0, 10.0, {"m"}, {"l"}, 4.0, 10.0) == 0.0

    def test_degenerate_range_scores_gpa_as_one(self):
        assert school_similarity(6.0, 6.0, {"m"}, {"l"}, 6.0, 6.0) == pytest.approx(0.5)

    def test_gpa_outside_range_rejected(self):
        with pytest.raises(ValueError, match="range"):
            school_similarity(3.0, 6.0, set(), set(), 4.0, 10.0)


class TestCulturalSimilarity:
    def test_identical_vectors(self):
        assert cultural_similarity((1, 2, 3, 4), (1, 2, 3, 4), 5.0) == 1.0

    def test_most_distant_pair(self):
        freq_a, freq_b = (1, 1, 1, 1), (5, 5, 5, 5)
        norm = float(np.linalg.norm(np.subtract(freq_a, freq_b)))
        assert cultural_similarity(freq_a, freq_b, norm) == pytest.approx(0.0)

    def test_hand_value(self):
        assert cultural_similarity((1, 1, 1, 1), (3, 1, 1, 1), 4.0) == pytest.approx(0.5)

    def test_zero_normalization(self):
        assert cultural_similarity((1, 1, 1, 1), (1, 1, 1, 1), 0.0) == 1.0

    def test_normalization_helper(self):
        covs = [
            UnitCovariates(frozenset(), 5.0, frozenset(), (1, 1, 1, 1), frozenset()),
            UnitCovariates(frozenset(), 5.0, frozenset(), (3, 1, 1, 1), frozenset()),
            UnitCovariates(frozenset(), 5.0, frozenset(), (2, 1, 1, 1), frozenset()),
        ]
        assert cultural_normalization(covs) == pytest.approx(2.0)


class TestPersonalSimilarity:
    def test_identical(self):
        assert personal_similarity({"f", "s"}, {"f", "s"}) == 1.0

    def test_disjoint(self):
        assert personal_similarity({"f"}, {"s"}) == 0.0

    def test_two_of_three_shared(self):
        assert personal_similarity({"a", "b", "c"}, {"a", "b", "d"}) == 0.5


@given(
    tags_a=st.sets(st.sampled_from("abcdef"), max_size=5),
    tags_b=st.sets(st.sampled_from("abcdef"), max_size=5),
    freq_a=st.tuples(*[st.integers(1, 5)] * 4),
    freq_b=st.tuples(*[st.integers(1, 5)] * 4),
    gpas=st.tuples(st.floats(4, 10), st.floats(4, 10)),
)
@settings(max_examples=60, deadline=None)
def test_similarities_bounded_and_symmetric(tags_a, tags_b, freq_a, freq_b, gpas):
    cov_a = UnitCovariates(frozenset(tags_a), gpas[0], frozenset(tags_a), freq_a, frozenset(tags_a))
    cov_b = UnitCovariates(frozenset(tags_b), gpas[1], frozenset(tags_b), freq_b, frozenset(tags_b))
    norm = max(cultural_normalization([cov_a, cov_b]), 1e-9)
    forward = dyadic_features(cov_a, cov_b, 4.0, 10.0, norm)
    backward = dyadic_features(cov_b, cov_a, 4.0, 10.0, norm)
    for name in ("x1", "x2", "x3", "x4"):
        value = getattr(forward, name)
        assert 0.0 <= value <= 1.0
        assert value == pytest.approx(getattr(backward, name))


def _tiny_partial():
    base = DirectedNetwork(4, [(0, 1), (1, 0)], cluster_of=[0, 0, 1, 1])
    return PartialNetwork.inter_cluster_missing(base)


class TestPartialNetwork:
    def test_inter_cluster_structure(self):
        pn = _tiny_partial()
        assert pn.n_missing == 8
        assert pn.dyad_status(0, 1) == "observed_present"
        assert pn.dyad_status(0, 2) == "missing"
        assert pn.dyad_status(2, 3) == "observed_absent"

    def test_rejects_cross_cluster_observed_edges(self):
        base = DirectedNetwork(4, [(0, 2)], cluster_of=[0, 0, 1, 1])
        with pytest.raises(ValueError, match="cross"):
            PartialNetwork.inter_cluster_missing(base)

    def test_missing_cannot_contain_present_edge(self):
        base = DirectedNetwork(3, [(0, 1)])
        with pytest.raises(ValueError, match="observed-present"):
            PartialNetwork(base, [(0, 1)])

    def test_requires_cluster_labels(self):
        with pytest.raises(ValueError, match="cluster"):
            PartialNetwork.inter_cluster_missing(DirectedNetwork(3, []))


class TestLinkScorer:
    def test_degenerate_single_class_constant_rate(self):
        scorer = LinkScorer().fit(np.zeros((5, 2)), np.ones(5))
        assert np.all(scorer.link_probability(np.zeros((3, 2))) == 1.0)
        scorer = LinkScorer().fit(np.zeros((5, 2)), np.zeros(5))
        assert np.all(scorer.link_probability(np.zeros((3, 2))) == 0.0)

    def test_separable_training_orders_scores(self):
        rng = np.random.default_rng(0)
        x_present = rng.uniform(0.8, 1.0, size=(40, 1))
        x_absent = rng.uniform(0.0, 0.2, size=(40, 1))
        x = np.vstack([x_present, x_absent])
        y = np.concatenate([np.ones(40), np.zeros(40)])
        scorer = LinkScorer().fit(np.column_stack([x]), y)
        high, low = scorer.link_probability(np.array([[0.9], [0.1]]))
        assert high > low

    def test_constant_features_score_base_rate(self):
        y = np.concatenate([np.ones(30), np.zeros(70)])
        scorer = LinkScorer().fit(np.ones((100, 3)), y)
        probs = scorer.link_probability(np.ones((5, 3)))
        assert probs == pytest.approx(np.full(5, 0.3), abs=1e-3)


class TestFitLinkModel:
    def test_deterministic_given_seed(self, survey):
        a = fit_link_model(survey.partial, survey.covariates, seed=5)
        b = fit_link_model(survey.partial, survey.covariates, seed=5)
        assert np.array_equal(a.missing_probabilities, b.missing_probabilities)
        assert a.trace == b.trace

    def test_probabilities_in_unit_interval(self, survey):
        model = fit_link_model(survey.partial, survey.covariates, seed=6)
        assert np.all((model.missing_probabilities >= 0) & (model.missing_probabilities <= 1))

    def test_trace_stability(self, survey):
        model = fit_link_model(survey.partial, survey.covariates, seed=7, n_iterations=5)
        means = np.array([stat.mean for stat in model.trace])
        overall = means.mean()
        se = np.sqrt(max(overall * (1 - overall), 1e-12) / survey.partial.n_missing)
        assert np.all(np.abs(means - overall) < 10 * se)

    def test_forest_scorer_variant(self, survey):
        model = fit_link_model(survey.partial, survey.covariates, seed=8, scorer="forest")
        forest = model.scorer.model_
        assert forest.n_estimators == 5
        assert forest.max_depth == 5

    def test_tolerates_absent_optional_covariates(self):
        base = DirectedNetwork(6, [(0, 1), (3, 4)], cluster_of=[0, 0, 0, 1, 1, 1])
        pn = PartialNetwork.inter_cluster_missing(base)
        covs = [
            UnitCovariates(
                hobbies=frozenset({f"h{i}"}),
                gpa=5.0 + i * 0.5,
                extracurriculars=frozenset({f"e{i % 2}"}),
                cultural_frequencies=(1.0 + i % 3, 2.0, 3.0, 1.0),
                personal=frozenset({f"p{i % 2}"}),
                inter_class_friend_count=i if i % 2 else None,
                sociability_context=None,
            )
            for i in range(6)
        ]
        model = fit_link_model(pn, covs, seed=4)
        assert np.all(np.isfinite(model.missing_probabilities))

    def test_separable_network_orders_dyads(self):
        # all observed links sit inside high-similarity cluster 0; the model
        # must score a similar pair above a dissimilar one
        covs = make_covariates(12, 2, seed=3)
        base_edges = [(i, j) for i in range(6) for j in range(6) if i != j]
        base = DirectedNetwork(12, base_edges, cluster_of=[0] * 6 + [1] * 6)
        pn = PartialNetwork.inter_cluster_missing(base)
        model = fit_link_model(pn, covs, seed=9)
        assert model.missing_probabilities.mean() < 1.0


class TestImputeEnsemble:
    def test_no_missing_dyads_copies_base(self):
        base = DirectedNetwork(3, [(0, 1)], cluster_of=[0, 0, 0])
        pn = PartialNetwork(base, np.zeros((0, 2), dtype=int))
        covs = make_covariates(3, 1, seed=1)
        model = fit_link_model(pn, covs, seed=1)
        ensemble = impute_ensemble(pn, model, 4, seed=2)
        assert all(g.edge_set() == base.edge_set() for g in ensemble)

    def test_zero_probability_copies_base(self, survey):
        model = fit_link_model(survey.partial, survey.covariates, seed=10)
        zeroed = type(model)(
            scorer=model.scorer,
            missing_dyads=model.missing_dyads,
            missing_probabilities=np.zeros(survey.partial.n_missing),
            trace=model.trace,
            n_nodes=model.n_nodes,
        )
        ensemble = impute_ensemble(survey.partial, zeroed, 3, seed=11)
        assert all(g.edge_set() == survey.partial.base.edge_set() for g in ensemble)

    def test_half_probability_frequency_and_observed_block(self, survey):
        model = fit_link_model(survey.partial, survey.covariates, seed=12)
        halves = type(model)(
            scorer=model.scorer,
            missing_dyads=model.missing_dyads,
            missing_probabilities=np.full(survey.partial.n_missing, 0.5),
            trace=model.trace,
            n_nodes=model.n_nodes,
        )
        m = 400
        ensemble = impute_ensemble(survey.partial, halves, m, seed=13)
        base_edges = survey.partial.base.edge_set()
        missing = {tuple(d) for d in survey.partial.missing.tolist()}
        counts = {dyad: 0 for dyad in missing}
        for g in ensemble:
            edges = g.edge_set()
            assert base_edges <= edges
            extras = edges - base_edges
            assert extras <= missing
            for dyad in extras:
                counts[dyad] += 1
        freq = np.array(list(counts.values())) / m
        se = np.sqrt(0.25 / m)
        assert np.mean(np.abs(freq - 0.5) <= 3 * se) >= 0.99

    def test_model_network_mismatch_rejected(self, survey):
        model = fit_link_model(survey.partial, survey.covariates, seed=14)
        other = PartialNetwork(
            DirectedNetwork(survey.partial.base.n_nodes, [], cluster_of=survey.partial.base.cluster_of),
            survey.partial.missing[:-1],
        )
        with pytest.raises(ValueError, match="different"):
            impute_ensemble(other, model, 2, seed=15)

    def test_determinism(self, survey):
        model = fit_link_model(survey.partial, survey.covariates, seed=16)
        a = impute_ensemble(survey.partial, model, 3, seed=17)
        b = impute_ensemble(survey.partial, model, 3, seed=17)
        for ga, gb in zip(a, b):
            assert np.array_equal(ga.edges, gb.edges)


class TestDensityDiagnostics:
    def test_imputed_sparser_flags(self, survey):
        model = fit_link_model(survey.partial, survey.covariates, seed=18)
        ensemble = impute_ensemble(survey.partial, model, 20, seed=19)
        diag = density_diagnostics(ensemble, survey.partial)
        assert diag.imputed_densities is not None
        assert diag.all_sparser

    def test_no_missing_dyads_reports_absent(self):
        base = DirectedNetwork(3, [(0, 1)], cluster_of=[0, 0, 0])
        pn = PartialNetwork(base, np.zeros((0, 2), dtype=int))
        diag = density_diagnostics([base], pn)
        assert diag.imputed_densities is None
        assert diag.all_sparser is None

    def test_recovers_planted_densities(self, survey):
        # the truth graph's own blocks must show the planted densities
        n = survey.truth.n_nodes
        diag = density_diagnostics([survey.truth], survey.partial)
        n_intra = n * (n - 1) - survey.partial.n_missing
        se_intra = np.sqrt(survey.intra_target * (1 - survey.intra_target) / n_intra)
        se_inter = np.sqrt(survey.inter_target * (1 - survey.inter_target) / survey.partial.n_missing)
        assert abs(diag.observed_density - survey.intra_target) <= 3 * se_intra
        assert abs(diag.imputed_densities[0] - survey.inter_target) <= 3 * se_inter

    def test_empty_ensemble_rejected(self, survey):
        with pytest.raises(ValueError, match="empty"):
            density_diagnostics([], survey.partial)


class TestNetworkLinkImputer:
    def test_facade_round_trip(self, survey):
        imputer = NetworkLinkImputer(n_networks=5, random_state=20).fit(
            survey.partial, survey.covariates
        )
        ensemble = imputer.sample()
        assert len(ensemble) == 5
        again = NetworkLinkImputer(n_networks=5, random_state=20).fit(
            survey.partial, survey.covariates
        )
        for ga, gb in zip(ensemble, again.sample()):
            assert np.array_equal(ga.edges, gb.edges)

    def test_sample_requires_fit(self):
        with pytest.raises(ValueError, match="fit"):
            NetworkLinkImputer().sample()
