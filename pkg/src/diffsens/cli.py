"""Command-line interface.

Subcommands: dgp (write a synthetic ground-truth dataset), impute (fit the
link model and write an ensemble of completed networks), estimate (one-shot
estimator run), sensitivity (full report as JSON plus a flat per-estimate
CSV), diagnostics (observed-vs-imputed density report).

All randomness flows from --seed; a flat JSON config file can supply the
sensitivity parameters, with command-line flags taking precedence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from scipy import stats

from .design import BernoulliDesign, ClusterRandomizedDesign
from .dgp import ScenarioSpec, generate_dataset
from .diffusion import (
    ExposureKind,
    ExposureProbabilities,
    conditional_exposure,
    diffusion_scenario,
    marginal_exposure_mc,
)
from .estimators import ht_naive, ht_post_diffusion_conditional, ht_post_diffusion_marginal
from .imputation import PartialNetwork, density_diagnostics, fit_link_model, impute_ensemble
from .io import (
    diagnostics_document,
    read_edge_list,
    read_ensemble,
    read_units,
    results_document,
    write_edge_list,
    write_ensemble,
    write_raw_csv,
    write_results_json,
    write_units,
)
from .rng import derive_seed
from .sensitivity import (
    SensitivityConfig,
    compare_ci,
    critical_threshold,
    run_observed,
    run_partial,
)

_CONFIG_KEYS = ("grid", "replicates", "networks", "omega", "alpha", "estimator", "seed", "jobs")


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ValueError(f"could not parse grid {text!r}: {exc}") from None


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as handle:
        raw = json.load(handle)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config must be a flat JSON object")
    unknown = set(raw) - set(_CONFIG_KEYS)
    if unknown:
        raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
    return raw


def _resolved(args, config: dict, key: str, default):
    flag_value = getattr(args, key, None)
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _sensitivity_config(args) -> tuple[SensitivityConfig, int]:
    config = _load_config_file(args.config)
    grid = _resolved(args, config, "grid", (0.01, 0.05, 0.10, 0.20, 0.25))
    if isinstance(grid, str):
        grid = _parse_grid(grid)
    cfg = SensitivityConfig(
        p_grid=tuple(float(p) for p in grid),
        n_replicates=int(_resolved(args, config, "replicates", 500)),
        n_networks=int(_resolved(args, config, "networks", 1)),
        omega=int(_resolved(args, config, "omega", 2000)),
        alpha=float(_resolved(args, config, "alpha", 0.05)),
        master_seed=int(_resolved(args, config, "seed", 0)),
        estimator=str(_resolved(args, config, "estimator", "conditional")),
    )
    return cfg, int(_resolved(args, config, "jobs", 1))


def _load_graph_and_units(args):
    units = read_units(args.units)
    graph, _ = read_edge_list(args.edges, id_map=dict(units.id_map))
    if units.cluster_of is not None:
        graph = graph.with_clusters(units.cluster_of)
    return graph, units


def _design_from_units(units, design_flag: str | None, pi: float | None):
    wants_cluster = design_flag == "cluster" or (
        design_flag is None and units.cluster_of is not None
    )
    if wants_cluster:
        if units.cluster_of is None:
            raise ValueError("a cluster randomized design needs a cluster column")
        z = units.z_t.z
        clusters = np.unique(units.cluster_of)
        treated_clusters = 0
        for cluster in clusters:
            values = np.unique(z[units.cluster_of == cluster])
            if values.size != 1:
                raise ValueError(f"cluster {cluster} mixes treated and control units")
            treated_clusters += int(values[0])
        return ClusterRandomizedDesign(units.cluster_of, treated_clusters)
    return BernoulliDesign.constant(0.5 if pi is None else pi, len(units.ids))


def _cmd_dgp(args) -> int:
    spec = ScenarioSpec(
        direction=args.direction,
        k=args.k,
        p_bar_true=args.p_bar_true,
        design_variant=args.design,
        n_units=args.n,
        edge_probability=args.edge_p,
        n_clusters=args.clusters,
        p_within=args.p_within,
        p_between=args.p_between,
        n_treated_clusters=args.treated_clusters,
        assignment_probability=args.pi,
        master_seed=args.seed,
    )
    data = generate_dataset(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ids = [str(i) for i in range(spec.n_units)]
    write_edge_list(data.graph, out / "edges.csv", ids=ids)
    write_units(
        out / "units.csv",
        ids=ids,
        z=data.z_t.z,
        y=data.y_observed,
        cluster_of=data.graph.cluster_of,
        z_post=data.z_t_prime_true.z,
    )
    truth = {
        "true_ate": data.true_ate,
        "tau_i_star": data.tau_i_star.tolist(),
        "z_t_prime_true": data.z_t_prime_true.z.tolist(),
        "scenario": {
            "direction": spec.direction,
            "k": spec.k,
            "p_bar_true": spec.p_bar_true,
            "design_variant": spec.design_variant,
            "n_units": spec.n_units,
            "master_seed": spec.master_seed,
        },
    }
    with open(out / "truth.json", "w") as handle:
        json.dump(truth, handle, indent=2)
        handle.write("\n")
    print(f"wrote dataset ({spec.n_units} units, {data.graph.n_edges} edges) to {out}")
    return 0


def _cmd_impute(args) -> int:
    graph, units = _load_graph_and_units(args)
    if units.covariates is None:
        raise ValueError("imputation needs the covariate columns in the unit table")
    pn = PartialNetwork.inter_cluster_missing(graph)
    model = fit_link_model(
        pn, units.covariates, seed=args.seed, scorer=args.scorer, n_iterations=args.iterations
    )
    ensemble = impute_ensemble(pn, model, args.networks, seed=derive_seed(args.seed, "ensemble"))
    write_ensemble(ensemble, args.out)
    for index, stat in enumerate(model.trace):
        print(f"trace iteration {index}: mean={stat.mean:.6f} std={stat.std:.6f}")
    print(f"wrote {len(ensemble)} completed networks to {args.out}")
    return 0


def _cmd_estimate(args) -> int:
    graph, units = _load_graph_and_units(args)
    design = _design_from_units(units, args.design, args.pi)
    pi_t = (
        design.pi
        if isinstance(design, BernoulliDesign)
        else np.full(len(units.ids), design.n_treated_clusters / len(design.clusters))
    )
    if args.estimator == "naive":
        estimate = ht_naive(units.y, units.z_t, pi_t)
    else:
        if args.p_bar is None:
            raise ValueError("the diffusion-aware estimators need --p-bar")
        if units.z_post is None:
            raise ValueError(
                "the diffusion-aware estimators need a z_post column with the "
                "post-diffusion treatment status"
            )
        if args.estimator == "conditional":
            if not isinstance(design, BernoulliDesign):
                raise ValueError(
                    "the conditional estimator is undefined under cluster randomization"
                )
            scen = diffusion_scenario(graph, units.z_t, args.p_bar)
            exposure = ExposureProbabilities(
                conditional_exposure(design.pi, scen.rho), ExposureKind.CONDITIONAL_ON_OTHERS
            )
            estimate = ht_post_diffusion_conditional(units.y, units.z_post, exposure)
        else:
            exposure = marginal_exposure_mc(
                graph, design, args.p_bar, omega=args.omega, seed=args.seed
            )
            estimate = ht_post_diffusion_marginal(units.y, units.z_post, exposure)
    half = float(stats.norm.ppf(1 - args.alpha / 2)) * estimate.std_error
    payload = {
        "value": estimate.value,
        "std_error": estimate.std_error,
        "ci": [estimate.value - half, estimate.value + half],
        "method": estimate.method,
        "n_units": estimate.n_units,
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_sensitivity(args) -> int:
    cfg, n_jobs = _sensitivity_config(args)
    graph, units = _load_graph_and_units(args)
    design = _design_from_units(units, args.design, args.pi)
    if args.ensemble:
        ensemble = read_ensemble(
            args.ensemble,
            n_nodes=len(units.ids),
            n_networks=cfg.n_networks,
            cluster_of=units.cluster_of,
        )
        report = run_partial(ensemble, units.z_t, units.y, design, cfg, n_jobs=n_jobs)
    else:
        if cfg.n_networks != 1:
            raise ValueError("networks > 1 requires --ensemble with the completed networks")
        report = run_observed(graph, units.z_t, units.y, design, cfg, n_jobs=n_jobs)

    doc = results_document(report, include_raw=not args.no_raw)
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    write_results_json(doc, prefix.with_suffix(".json"))
    write_raw_csv(report, prefix.with_suffix(".csv"))
    threshold = critical_threshold(report) if _grid_sorted(cfg.p_grid) else None
    print(
        f"naive={report.naive.value:.6f} (se {report.naive.std_error:.6f}); "
        f"grid={list(cfg.p_grid)}"
    )
    for pooled in report.per_p_bar:
        comparison = compare_ci(report.naive, pooled, cfg.alpha)
        print(
            f"p_bar={pooled.p_bar}: mean={pooled.mean:.6f} "
            f"ci=[{pooled.ci_low:.6f}, {pooled.ci_high:.6f}] overlap={comparison.overlap}"
        )
    if threshold is not None:
        print(f"critical threshold: {threshold}")
    print(f"wrote {prefix.with_suffix('.json')} and {prefix.with_suffix('.csv')}")
    return 0


def _grid_sorted(grid) -> bool:
    return all(a < b for a, b in zip(grid, grid[1:]))


def _cmd_diagnostics(args) -> int:
    graph, units = _load_graph_and_units(args)
    pn = PartialNetwork.inter_cluster_missing(graph)
    ensemble = read_ensemble(args.ensemble, n_nodes=len(units.ids), cluster_of=units.cluster_of)
    diag = density_diagnostics(ensemble, pn)
    doc = diagnostics_document(diag)
    with open(args.out, "w") as handle:
        json.dump(doc, handle, indent=2)
        handle.write("\n")
    print(f"observed density {diag.observed_density:.6f}; wrote {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffsens",
        description="Sensitivity analysis for hidden treatment diffusion on networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    dgp = sub.add_parser("dgp", help="write a synthetic ground-truth dataset")
    dgp.add_argument("--direction", choices=("underestimation", "overestimation"), required=True)
    dgp.add_argument("--k", type=float, default=5.0)
    dgp.add_argument("--p-bar-true", type=float, default=0.1)
    dgp.add_argument("--design", choices=("bernoulli", "cluster"), default="bernoulli")
    dgp.add_argument("--n", type=int, default=1000)
    dgp.add_argument("--edge-p", type=float, default=0.01)
    dgp.add_argument("--clusters", type=int, default=10)
    dgp.add_argument("--p-within", type=float, default=0.2)
    dgp.add_argument("--p-between", type=float, default=0.02)
    dgp.add_argument("--treated-clusters", type=int, default=5)
    dgp.add_argument("--pi", type=float, default=0.5)
    dgp.add_argument("--seed", type=int, default=0)
    dgp.add_argument("--out", required=True, help="output directory")
    dgp.set_defaults(handler=_cmd_dgp)

    impute = sub.add_parser("impute", help="fit the link model and write an ensemble")
    impute.add_argument("--edges", required=True)
    impute.add_argument("--units", required=True)
    impute.add_argument("--networks", type=int, default=500)
    impute.add_argument("--scorer", choices=("logistic", "forest"), default="logistic")
    impute.add_argument("--iterations", type=int, default=5)
    impute.add_argument("--seed", type=int, default=0)
    impute.add_argument("--out", required=True, help="ensemble CSV path")
    impute.set_defaults(handler=_cmd_impute)

    estimate = sub.add_parser("estimate", help="one-shot estimator run")
    estimate.add_argument("--edges", required=True)
    estimate.add_argument("--units", required=True)
    estimate.add_argument(
        "--estimator", choices=("naive", "conditional", "marginal"), default="naive"
    )
    estimate.add_argument("--p-bar", type=float)
    estimate.add_argument("--omega", type=int, default=2000)
    estimate.add_argument("--alpha", type=float, default=0.05)
    estimate.add_argument("--design", choices=("bernoulli", "cluster"))
    estimate.add_argument("--pi", type=float)
    estimate.add_argument("--seed", type=int, default=0)
    estimate.add_argument("--out")
    estimate.set_defaults(handler=_cmd_estimate)

    sensitivity = sub.add_parser("sensitivity", help="full sensitivity report")
    sensitivity.add_argument("--edges", required=True)
    sensitivity.add_argument("--units", required=True)
    sensitivity.add_argument("--ensemble", help="completed-network ensemble CSV")
    sensitivity.add_argument("--config", help="flat JSON config file")
    sensitivity.add_argument("--grid", help="comma-separated diffusion parameters")
    sensitivity.add_argument("--replicates", type=int)
    sensitivity.add_argument("--networks", type=int)
    sensitivity.add_argument("--omega", type=int)
    sensitivity.add_argument("--alpha", type=float)
    sensitivity.add_argument("--estimator", choices=("conditional", "marginal"))
    sensitivity.add_argument("--seed", type=int)
    sensitivity.add_argument("--jobs", type=int)
    sensitivity.add_argument("--design", choices=("bernoulli", "cluster"))
    sensitivity.add_argument("--pi", type=float)
    sensitivity.add_argument("--no-raw", action="store_true", help="omit raw estimates from JSON")
    sensitivity.add_argument("--out", required=True, help="output prefix (.json/.csv)")
    sensitivity.set_defaults(handler=_cmd_sensitivity)

    diagnostics = sub.add_parser("diagnostics", help="observed-vs-imputed density report")
    diagnostics.add_argument("--edges", required=True)
    diagnostics.add_argument("--units", required=True)
    diagnostics.add_argument("--ensemble", required=True)
    diagnostics.add_argument("--out", required=True)
    diagnostics.set_defaults(handler=_cmd_diagnostics)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
