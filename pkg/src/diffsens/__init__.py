"""Sensitivity analysis for hidden treatment diffusion on observed or
partially observed networks: diffusion model, Horvitz-Thompson style
estimators, closed-form bias, and the full simulation pipeline."""

from .design import (
    Assignment,
    BernoulliDesign,
    ClusterRandomizedDesign,
    Stage,
    assignment_probabilities,
    assignment_probability,
    draw_assignment,
)
from .dgp import GroundTruthDataset, ScenarioSpec, assign_effects, generate_dataset, high_exposure_indicator
from .diffusion import (
    DiffusionScenario,
    ExposureKind,
    ExposureProbabilities,
    conditional_exposure,
    diffusion_scenario,
    exact_marginal_exposure,
    marginal_exposure_mc,
    receipt_probability,
    simulate_diffusion,
    treated_in_degree,
)
from .estimators import (
    BiasComponents,
    EffectEstimate,
    closed_form_bias,
    general_bias,
    ht_naive,
    ht_post_diffusion_conditional,
    ht_post_diffusion_marginal,
    ht_std_error,
)
from .graph import (
    DegreeSummary,
    DirectedNetwork,
    degree_summary,
    generate_clustered,
    generate_erdos_renyi,
    in_neighbors,
)
from .imputation import (
    DensityDiagnostics,
    DyadicFeatures,
    LinkModel,
    LinkScorer,
    NetworkLinkImputer,
    PartialNetwork,
    UnitCovariates,
    cultural_similarity,
    density_diagnostics,
    fit_link_model,
    impute_ensemble,
    jaccard,
    personal_similarity,
    school_similarity,
)
from .rng import derive_seed, spawn_rng
from .sensitivity import (
    CiComparison,
    DiffusionSensitivity,
    PooledResult,
    ScenarioEstimates,
    SensitivityConfig,
    SensitivityReport,
    compare_ci,
    critical_threshold,
    pool,
    run_observed,
    run_partial,
)

__version__ = "0.1.0"
