"""Horvitz-Thompson effect estimators, their standard errors, and the
closed-form bias of ignoring diffusion.

All three estimators share one reduction path so that in the degenerate
no-diffusion case the post-diffusion estimators reproduce the naive estimate
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import Assignment, Stage
from .diffusion import ExposureKind, ExposureProbabilities

__all__ = [
    "EffectEstimate",
    "BiasComponents",
    "as_outcomes",
    "ht_naive",
    "ht_post_diffusion_conditional",
    "ht_post_diffusion_marginal",
    "ht_std_error",
    "closed_form_bias",
    "general_bias",
]


@dataclass(frozen=True)
class EffectEstimate:
    value: float
    std_error: float
    method: str
    n_units: int

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("standard error cannot be negative")
        if self.n_units <= 0:
            raise ValueError("estimate requires at least one unit")


@dataclass(frozen=True)
class BiasComponents:
    """Population moments entering the general bias formula.

    ``mean_y0_control_both_times`` conditions on being untreated both at
    assignment and after diffusion; ``mean_y1_diffusion_treated`` conditions
    on having received the treatment through diffusion only.
    """

    mean_y0: float
    mean_y0_control_both_times: float
    mean_y1_diffusion_treated: float
    mean_y1_initially_treated: float
    mean_y1: float
    mean_rho_given_control: float


def as_outcomes(y, n_units: int | None = None) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError("outcomes must be a 1-d vector")
    if not np.isfinite(y).all():
        raise ValueError("outcomes must be finite")
    if n_units is not None and y.shape[0] != n_units:
        raise ValueError(f"expected {n_units} outcomes, got {y.shape[0]}")
    return y


def _check_probabilities(pi: np.ndarray, n_units: int) -> np.ndarray:
    pi = np.asarray(pi, dtype=np.float64)
    if pi.shape != (n_units,):
        raise ValueError("probability vector length does not match the outcomes")
    if np.any(pi <= 0.0) or np.any(pi >= 1.0):
        raise ValueError("exposure probabilities must lie strictly in (0, 1)")
    return pi


def column_estimates(y: np.ndarray, z_rows: np.ndarray, pi: np.ndarray):
    """Estimates and standard errors for a (draws, n) block of assignments.

    Row-contiguous sums keep the reduction order identical across rows, which
    is what makes identical assignment rows yield identical estimates down to
    the last bit.
    """
    n = y.shape[0]
    z = np.ascontiguousarray(z_rows, dtype=np.float64)
    w1 = y / pi
    w0 = y / (1.0 - pi)
    values = (z * w1 - (1.0 - z) * w0).sum(axis=1) / n
    v1 = y * y * (1.0 - pi) / (pi * pi)
    v0 = y * y * pi / ((1.0 - pi) * (1.0 - pi))
    variances = (z * v1 + (1.0 - z) * v0).sum(axis=1) / (n * n)
    return values, np.sqrt(variances)


def ht_naive(y, z_t: Assignment, pi_t) -> EffectEstimate:
    """Standard Horvitz-Thompson estimate from the initial assignment.

    Biased for the effect of treatment receipt whenever diffusion occurred.
    """
    if z_t.stage is not Stage.INITIAL_T:
        raise ValueError("the naive estimator uses the initial assignment")
    y = as_outcomes(y, z_t.n_units)
    pi = _check_probabilities(pi_t, z_t.n_units)
    values, ses = column_estimates(y, z_t.z[None, :], pi)
    return EffectEstimate(float(values[0]), float(ses[0]), "naive_ht", z_t.n_units)


def _ht_post_diffusion(y, z_t_prime: Assignment, exposure: ExposureProbabilities, method: str):
    if z_t_prime.stage is not Stage.POST_DIFFUSION_T_PRIME:
        raise ValueError("post-diffusion estimators use the post-diffusion assignment")
    y = as_outcomes(y, z_t_prime.n_units)
    pi = _check_probabilities(exposure.pi_t_prime, z_t_prime.n_units)
    values, ses = column_estimates(y, z_t_prime.z[None, :], pi)
    return EffectEstimate(float(values[0]), float(ses[0]), method, z_t_prime.n_units)


def ht_post_diffusion_conditional(
    y, z_t_prime: Assignment, exposure: ExposureProbabilities
) -> EffectEstimate:
    """HT estimate weighting by exposure probabilities conditional on the
    others' initial assignments. Valid for Bernoulli designs only: under
    cluster randomization those conditional probabilities degenerate to 0/1.
    """
    if exposure.kind is not ExposureKind.CONDITIONAL_ON_OTHERS:
        raise ValueError("expected exposure probabilities conditional on the other units")
    return _ht_post_diffusion(y, z_t_prime, exposure, "post_diffusion_conditional")


def ht_post_diffusion_marginal(
    y, z_t_prime: Assignment, exposure: ExposureProbabilities
) -> EffectEstimate:
    """HT estimate weighting by marginal-given-graph exposure probabilities;
    the version usable under cluster randomized designs."""
    if exposure.kind is not ExposureKind.MARGINAL_GIVEN_GRAPH:
        raise ValueError("expected marginal-given-graph exposure probabilities")
    return _ht_post_diffusion(y, z_t_prime, exposure, "post_diffusion_marginal")


def ht_std_error(y, z: Assignment, pi) -> float:
    """Conservative HT standard error treating exposures as independent:

    sigma^2 = (1/N^2) [ sum_i Z_i Y_i^2 (1-pi_i)/pi_i^2
                      + sum_i (1-Z_i) Y_i^2 pi_i/(1-pi_i)^2 ]
    """
    y = as_outcomes(y, z.n_units)
    pi = _check_probabilities(pi, z.n_units)
    _, ses = column_estimates(y, z.z[None, :], pi)
    return float(ses[0])


def closed_form_bias(tau_star: float, mean_rho_given_control: float) -> float:
    """Bias of the naive estimator under full unconfoundedness: -τ* E[ρ | Z=0]."""
    if not 0.0 <= mean_rho_given_control < 1.0:
        raise ValueError("mean receipt probability must lie in [0, 1)")
    return -tau_star * mean_rho_given_control


def general_bias(components: BiasComponents) -> float:
    """Bias of the naive estimator without the full unconfoundedness reduction."""
    c = components
    rho = c.mean_rho_given_control
    return (
        c.mean_y0
        - c.mean_y0_control_both_times * (1.0 - rho)
        - c.mean_y1_diffusion_treated * rho
        + c.mean_y1_initially_treated
        - c.mean_y1
    )
