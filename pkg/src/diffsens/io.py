"""File formats: edge lists, unit tables, network ensembles, and the results
document with its published JSON schema.

External string ids are remapped to dense integer indices at this layer; the
rest of the package only ever sees 0..N-1.
"""

from __future__ import annotations

import csv
import datetime
import json
import warnings
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

import jsonschema
import numpy as np
import pandas as pd

from .design import Assignment, Stage
from .graph import DirectedNetwork
from .imputation import DensityDiagnostics, UnitCovariates
from .sensitivity import SensitivityReport

__all__ = [
    "UnitTable",
    "read_edge_list",
    "write_edge_list",
    "read_units",
    "write_units",
    "read_ensemble",
    "write_ensemble",
    "results_document",
    "diagnostics_document",
    "validate_results",
    "write_results_json",
    "write_raw_csv",
    "raw_estimate_rows",
]

SCHEMA_VERSION = 1

_COVARIATE_COLUMNS = (
    "hobbies",
    "gpa",
    "extracurriculars",
    "freq_reading",
    "freq_symphony",
    "freq_theatre",
    "freq_cinema",
    "personal",
)


def _split_tags(cell) -> frozenset:
    if cell is None or (isinstance(cell, float) and np.isnan(cell)):
        return frozenset()
    text = str(cell).strip()
    if not text:
        return frozenset()
    return frozenset(tag.strip() for tag in text.split(";") if tag.strip())


def _build_id_map(tokens: Sequence[str]) -> dict[str, int]:
    unique = sorted(set(tokens), key=(lambda t: int(t)) if all(
        t.lstrip("-").isdigit() for t in set(tokens)
    ) else None)
    return {token: index for index, token in enumerate(unique)}


def read_edge_list(path, id_map: dict[str, int] | None = None):
    """Parse a ``src,dst`` edge-list file.

    Returns (network, id_map). Without a supplied id map, node ids are densely
    remapped (numerically when every id is an integer, lexicographically
    otherwise) and isolated nodes are unknown to the result; supply the unit
    table's id map to pin the node set.
    """
    rows: list[tuple[str, str, int]] = []
    with open(path, newline="") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            parts = [p.strip() for p in text.split(",")]
            if lineno == 1 and [p.lower() for p in parts[:2]] == ["src", "dst"]:
                continue
            if len(parts) != 2 or not all(parts):
                raise ValueError(f"{path}: malformed edge on line {lineno}: {text!r}")
            if parts[0] == parts[1]:
                raise ValueError(f"{path}: self-loop on line {lineno}: {text!r}")
            rows.append((parts[0], parts[1], lineno))

    if id_map is None:
        id_map = _build_id_map([t for src, dst, _ in rows for t in (src, dst)])
    indexed = []
    for src, dst, lineno in rows:
        for token in (src, dst):
            if token not in id_map:
                raise ValueError(f"{path}: unknown unit id {token!r} on line {lineno}")
        indexed.append((id_map[src], id_map[dst]))
    if len(set(indexed)) != len(indexed):
        warnings.warn(f"{path}: duplicate edges were dropped", stacklevel=2)
    n_nodes = len(id_map)
    network = DirectedNetwork(n_nodes=n_nodes, edges=np.array(indexed, dtype=np.int64).reshape(-1, 2))
    return network, dict(id_map)


def write_edge_list(g: DirectedNetwork, path, ids: Sequence[str] | None = None) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["src", "dst"])
        for src, dst in g.edges.tolist():
            if ids is None:
                writer.writerow([src, dst])
            else:
                writer.writerow([ids[src], ids[dst]])


@dataclass(frozen=True)
class UnitTable:
    """Per-unit data aligned to dense indices (row order defines the index)."""

    ids: tuple[str, ...]
    id_map: dict[str, int]
    z_t: Assignment
    y: np.ndarray
    cluster_of: np.ndarray | None
    z_post: Assignment | None
    covariates: tuple[UnitCovariates, ...] | None


def read_units(path) -> UnitTable:
    """Parse the delimited unit table: id, z, y, optional cluster / z_post /
    covariate columns. Row order defines the dense unit index."""
    frame = pd.read_csv(path, dtype={"id": str})
    for column in ("id", "z", "y"):
        if column not in frame.columns:
            raise ValueError(f"{path}: missing required column {column!r}")
    ids = [str(v) for v in frame["id"]]
    if len(set(ids)) != len(ids):
        raise ValueError(f"{path}: duplicate unit ids")
    id_map = {unit_id: index for index, unit_id in enumerate(ids)}

    z_raw = frame["z"].to_numpy()
    if not np.isin(z_raw, (0, 1)).all():
        bad = z_raw[~np.isin(z_raw, (0, 1))][0]
        raise ValueError(f"{path}: treatment indicator must be 0/1, found {bad!r}")
    y = frame["y"].to_numpy(dtype=np.float64)
    if not np.isfinite(y).all():
        raise ValueError(f"{path}: outcomes must be finite")

    cluster_of = None
    if "cluster" in frame.columns:
        codes, _ = pd.factorize(frame["cluster"], sort=True)
        cluster_of = codes.astype(np.int64)

    z_post = None
    if "z_post" in frame.columns:
        post_raw = frame["z_post"].to_numpy()
        if not np.isin(post_raw, (0, 1)).all():
            raise ValueError(f"{path}: z_post must be 0/1")
        z_post = Assignment(post_raw.astype(np.int8), Stage.POST_DIFFUSION_T_PRIME)

    covariates = None
    if all(column in frame.columns for column in _COVARIATE_COLUMNS):
        covariates = tuple(
            UnitCovariates(
                hobbies=_split_tags(row["hobbies"]),
                gpa=float(row["gpa"]),
                extracurriculars=_split_tags(row["extracurriculars"]),
                cultural_frequencies=(
                    float(row["freq_reading"]),
                    float(row["freq_symphony"]),
                    float(row["freq_theatre"]),
                    float(row["freq_cinema"]),
                ),
                personal=_split_tags(row["personal"]),
                inter_class_friend_count=(
                    None
                    if "inter_class_friends" not in frame.columns
                    or pd.isna(row["inter_class_friends"])
                    else int(row["inter_class_friends"])
                ),
                sociability_context=(
                    None
                    if "sociability" not in frame.columns or pd.isna(row["sociability"])
                    else str(row["sociability"])
                ),
            )
            for _, row in frame.iterrows()
        )

    return UnitTable(
        ids=tuple(ids),
        id_map=id_map,
        z_t=Assignment(z_raw.astype(np.int8), Stage.INITIAL_T),
        y=y,
        cluster_of=cluster_of,
        z_post=z_post,
        covariates=covariates,
    )


def write_units(
    path,
    ids: Sequence[str],
    z: np.ndarray,
    y: np.ndarray,
    cluster_of: np.ndarray | None = None,
    z_post: np.ndarray | None = None,
) -> None:
    columns: dict[str, Sequence] = {"id": list(ids), "z": list(map(int, z))}
    columns["y"] = [repr(float(v)) for v in y]
    if cluster_of is not None:
        columns["cluster"] = list(map(int, cluster_of))
    if z_post is not None:
        columns["z_post"] = list(map(int, z_post))
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns.keys())
        writer.writerows(zip(*columns.values()))


def write_ensemble(ensemble: Sequence[DirectedNetwork], path) -> None:
    """One CSV for the whole ensemble: network index, then the full edge list
    of that completed network."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["network", "src", "dst"])
        for index, g in enumerate(ensemble):
            for src, dst in g.edges.tolist():
                writer.writerow([index, src, dst])


def read_ensemble(
    path,
    n_nodes: int,
    n_networks: int | None = None,
    cluster_of: np.ndarray | None = None,
) -> list[DirectedNetwork]:
    frame = pd.read_csv(path)
    for column in ("network", "src", "dst"):
        if column not in frame.columns:
            raise ValueError(f"{path}: missing required column {column!r}")
    total = int(frame["network"].max()) + 1 if len(frame) else 0
    if n_networks is None:
        n_networks = total
    if total > n_networks:
        raise ValueError(f"{path}: found network index beyond the declared count {n_networks}")
    ensemble = []
    for index in range(n_networks):
        block = frame[frame["network"] == index]
        edges = block[["src", "dst"]].to_numpy(dtype=np.int64)
        ensemble.append(DirectedNetwork(n_nodes=n_nodes, edges=edges, cluster_of=cluster_of))
    return ensemble


def _load_schema() -> dict:
    text = resources.files("diffsens.schemas").joinpath("results_schema.json").read_text()
    return json.loads(text)


def results_document(
    report: SensitivityReport,
    include_raw: bool = True,
    diagnostics: DensityDiagnostics | None = None,
) -> dict:
    cfg = report.config
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": {
            "p_grid": list(cfg.p_grid),
            "n_replicates": cfg.n_replicates,
            "n_networks": cfg.n_networks,
            "omega": cfg.omega,
            "alpha": cfg.alpha,
            "estimator": cfg.estimator,
            "variant": report.variant,
        },
        "naive": {
            "value": report.naive.value,
            "std_error": report.naive.std_error,
            "ci": [report.naive_ci[0], report.naive_ci[1]],
            "method": report.naive.method,
            "n_units": report.naive.n_units,
        },
        "pooled": [
            {
                "p_bar": p.p_bar,
                "mean": p.mean,
                "between_var": p.between_var,
                "within_var": p.within_var,
                "total_var": p.total_var,
                "ci": [p.ci_low, p.ci_high],
            }
            for p in report.per_p_bar
        ],
        "provenance": {
            "master_seed": cfg.master_seed,
            "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        },
    }
    if include_raw:
        doc["raw"] = [
            {
                "p_bar": est.p_bar,
                "values": est.values.tolist(),
                "std_errors": est.std_errors.tolist(),
            }
            for est in report.raw
        ]
    if diagnostics is not None:
        doc["imputation_diagnostics"] = diagnostics_document(diagnostics)
    return doc


def diagnostics_document(diagnostics: DensityDiagnostics) -> dict:
    doc: dict = {"observed_density": diagnostics.observed_density}
    if diagnostics.imputed_densities is not None:
        doc["imputed_densities"] = list(diagnostics.imputed_densities)
        doc["sparser_than_observed"] = list(diagnostics.sparser_than_observed)
        doc["all_sparser"] = diagnostics.all_sparser
    return doc


def validate_results(doc: dict) -> None:
    jsonschema.validate(doc, _load_schema())


def write_results_json(doc: dict, path) -> None:
    validate_results(doc)
    with open(path, "w") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")


def raw_estimate_rows(report: SensitivityReport):
    """Flat (p_bar, network, replicate, estimate, std_error) rows; network-major
    within each grid value, matching the estimate ordering."""
    n_replicates = report.config.n_replicates
    for est in report.raw:
        for position, (value, se) in enumerate(zip(est.values, est.std_errors)):
            yield (
                est.p_bar,
                position // n_replicates,
                position % n_replicates,
                float(value),
                float(se),
            )


def write_raw_csv(report: SensitivityReport, path) -> None:
    """Per-estimate table for plotting; byte-stable for fixed inputs."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["p_bar", "network", "replicate", "estimate", "std_error"])
        for p_bar, network, replicate, value, se in raw_estimate_rows(report):
            writer.writerow([repr(float(p_bar)), network, replicate, repr(value), repr(se)])
