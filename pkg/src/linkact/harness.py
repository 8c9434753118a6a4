"""Experiment harness: seeded instance sweeps for the two numerical studies,
with CSV output.

Study 1 (common threshold): every scheme is solved on the same seeded
topology for every threshold in the sweep, with unit weights, so scheme and
threshold comparisons are paired per seed. Study 2 (individual thresholds):
per-link thresholds are drawn from a small dB set, weights are the matching
spectral efficiencies, and the staged-cancellation solver runs once per
stage cap.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from multiprocessing import get_context
from typing import Iterable, Optional, Sequence

import numpy as np

from .feasibility import Scheme, SchemeConfig
from .instance import TopologySpec, generate, threshold_rng
from .solver import solve_exact
from .units import db_to_linear

CSV_HEADER = "dataset,density,k,seed,scheme,gamma_db,t_cap,activated,weight,solve_ms,status"

DATASET_CELLS = ("I-sparse", "I-dense", "N-sparse", "N-dense")

STUDY2_GAMMA_CHOICES_DB = (-6.0, -3.0, 3.0)


@dataclass(frozen=True)
class StudySpec:
    """One sweep description. ``datasets`` entries are dataset-density cells
    like "I-sparse"."""

    datasets: tuple[str, ...]
    k_values: tuple[int, ...]
    seeds_per_cell: int = 30
    study: str = "common_threshold"  # or "individual_threshold"
    thresholds_db: tuple[float, ...] = (-6.0,)
    t_values: tuple[int, ...] = (0, 1, 2, 3, 4, 5)
    weights_rule: str = "unit"  # or "rate"
    budget_per_solve_s: Optional[float] = 120.0
    seed_base: int = 1

    def __post_init__(self):
        if not self.datasets or not self.k_values:
            raise ValueError("datasets and k_values must be nonempty")
        for cell in self.datasets:
            if cell not in DATASET_CELLS:
                raise ValueError(f"unknown dataset cell {cell!r}")
        if self.study not in ("common_threshold", "individual_threshold"):
            raise ValueError(f"unknown study {self.study!r}")
        if self.study == "individual_threshold" and self.weights_rule != "rate":
            raise ValueError("the individual-threshold study uses rate weights")
        if self.seeds_per_cell <= 0:
            raise ValueError("seeds_per_cell must be positive")


@dataclass
class ResultRecord:
    dataset: str
    density: str
    k: int
    seed: int
    scheme: str
    gamma_db: str  # "mixed" for the individual-threshold study
    t_cap: int
    activated: int
    weight: float
    solve_ms: float
    status: str


def _sig6(x: float) -> str:
    return format(float(x), ".6g")


def _cell_parts(cell: str) -> tuple[str, str]:
    dataset, density = cell.split("-")
    return dataset, density


def _cell_seeds(spec: StudySpec) -> list[int]:
    return [spec.seed_base + i for i in range(spec.seeds_per_cell)]


def rate_weight(gamma_lin: float) -> float:
    """Spectral efficiency (b/s/Hz) at the decoding threshold."""
    return math.log2(1.0 + gamma_lin)


def draw_study2_thresholds(seed: int, k: int) -> np.ndarray:
    """Per-link thresholds for study 2, linear scale, drawn uniformly from
    the fixed dB choices on the instance's dedicated threshold stream."""
    rng = threshold_rng(seed)
    picks = rng.integers(0, len(STUDY2_GAMMA_CHOICES_DB), size=k)
    return np.array([db_to_linear(STUDY2_GAMMA_CHOICES_DB[i]) for i in picks])


_STUDY1_SCHEMES = (Scheme.SUD, Scheme.SLIC, Scheme.PIC, Scheme.SIC)


def _scheme_cap(scheme: Scheme, k: int) -> int:
    if scheme is Scheme.SUD:
        return 0
    if scheme is Scheme.SLIC:
        return 1
    return max(k - 1, 0)


def _study1_cell(args) -> list[ResultRecord]:
    spec, cell, k, seed = args
    dataset, density = _cell_parts(cell)
    topo = generate(TopologySpec(dataset=dataset, density=density, K=k, seed=seed))
    records = []
    for gamma_db in spec.thresholds_db:
        inst = topo.with_thresholds(db_to_linear(gamma_db)).with_weights(1.0)
        for scheme in _STUDY1_SCHEMES:
            cfg = SchemeConfig(scheme)
            report = solve_exact(inst, cfg, budget_s=spec.budget_per_solve_s)
            records.append(
                ResultRecord(
                    dataset=dataset,
                    density=density,
                    k=k,
                    seed=seed,
                    scheme=scheme.value,
                    gamma_db=_sig6(gamma_db),
                    t_cap=_scheme_cap(scheme, k),
                    activated=len(report.solution.active),
                    weight=report.solution.weight,
                    solve_ms=report.wall_time_s * 1000.0,
                    status=report.status.value,
                )
            )
    return records


def _study2_cell(args) -> list[ResultRecord]:
    spec, cell, k, seed = args
    dataset, density = _cell_parts(cell)
    topo = generate(TopologySpec(dataset=dataset, density=density, K=k, seed=seed))
    gammas = draw_study2_thresholds(seed, k)
    weights = np.array([rate_weight(g) for g in gammas])
    inst = topo.with_thresholds(gammas).with_weights(weights)
    records = []
    for t in spec.t_values:
        cfg = SchemeConfig(Scheme.SIC, stage_cap=int(t))
        report = solve_exact(inst, cfg, budget_s=spec.budget_per_solve_s)
        records.append(
            ResultRecord(
                dataset=dataset,
                density=density,
                k=k,
                seed=seed,
                scheme=Scheme.SIC.value,
                gamma_db="mixed",
                t_cap=int(t),
                activated=len(report.solution.active),
                weight=report.solution.weight,
                solve_ms=report.wall_time_s * 1000.0,
                status=report.status.value,
            )
        )
    return records


def _run_cells(spec: StudySpec, worker, jobs: int) -> list[ResultRecord]:
    tasks = [
        (spec, cell, k, seed)
        for cell in spec.datasets
        for k in spec.k_values
        for seed in _cell_seeds(spec)
    ]
    if jobs <= 1:
        chunks = [worker(t) for t in tasks]
    else:
        # Cells are independent; results are merged in task order so the
        # CSV is byte-identical regardless of completion order.
        with get_context("spawn").Pool(jobs) as pool:
            chunks = pool.map(worker, tasks)
    return [rec for chunk in chunks for rec in chunk]


def run_study1(spec: StudySpec, jobs: int = 1) -> list[ResultRecord]:
    if spec.study != "common_threshold":
        raise ValueError("run_study1 requires a common_threshold spec")
    return _run_cells(spec, _study1_cell, jobs)


def run_study2(spec: StudySpec, jobs: int = 1) -> list[ResultRecord]:
    if spec.study != "individual_threshold":
        raise ValueError("run_study2 requires an individual_threshold spec")
    return _run_cells(spec, _study2_cell, jobs)


def run_study(spec: StudySpec, jobs: int = 1) -> list[ResultRecord]:
    if spec.study == "common_threshold":
        return run_study1(spec, jobs)
    return run_study2(spec, jobs)


# ---------------------------------------------------------------------------
# Aggregation and CSV
# ---------------------------------------------------------------------------


@dataclass
class StatRow:
    group: tuple
    n: int
    activated_mean: float
    activated_sd: float
    weight_mean: float
    weight_sd: float


def _mean_sd(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def summarize(records: Iterable[ResultRecord], group_keys: Sequence[str]) -> list[StatRow]:
    """Grouped mean/sd/count of activated counts and weights, ordered by
    group key."""
    groups: dict[tuple, list[ResultRecord]] = {}
    for rec in records:
        key = tuple(getattr(rec, g) for g in group_keys)
        groups.setdefault(key, []).append(rec)
    rows = []
    for key in sorted(groups):
        recs = groups[key]
        a_mean, a_sd = _mean_sd([float(r.activated) for r in recs])
        w_mean, w_sd = _mean_sd([float(r.weight) for r in recs])
        rows.append(StatRow(key, len(recs), a_mean, a_sd, w_mean, w_sd))
    return rows


def records_to_csv(records: Iterable[ResultRecord]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    for r in records:
        writer.writerow(
            [
                r.dataset,
                r.density,
                r.k,
                r.seed,
                r.scheme,
                r.gamma_db,
                r.t_cap,
                r.activated,
                _sig6(r.weight),
                _sig6(r.solve_ms),
                r.status,
            ]
        )
    return buf.getvalue()


def write_records_csv(records: Iterable[ResultRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(records_to_csv(records))


SUMMARY_GROUP_KEYS = ("dataset", "density", "scheme", "gamma_db", "t_cap", "k")

SUMMARY_HEADER = (
    "dataset,density,scheme,gamma_db,t_cap,k,n,"
    "activated_mean,activated_sd,weight_mean,weight_sd"
)


def summary_to_csv(records: Iterable[ResultRecord]) -> str:
    rows = summarize(records, SUMMARY_GROUP_KEYS)
    buf = io.StringIO()
    buf.write(SUMMARY_HEADER + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(
            list(row.group)
            + [
                row.n,
                _sig6(row.activated_mean),
                _sig6(row.activated_sd),
                _sig6(row.weight_mean),
                _sig6(row.weight_sd),
            ]
        )
    return buf.getvalue()


def write_summary_csv(records: Iterable[ResultRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(summary_to_csv(records))


def read_records_csv(path) -> list[ResultRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        records = []
        for row in reader:
            records.append(
                ResultRecord(
                    dataset=row["dataset"],
                    density=row["density"],
                    k=int(row["k"]),
                    seed=int(row["seed"]),
                    scheme=row["scheme"],
                    gamma_db=row["gamma_db"],
                    t_cap=int(row["t_cap"]),
                    activated=int(row["activated"]),
                    weight=float(row["weight"]),
                    solve_ms=float(row["solve_ms"]),
                    status=row["status"],
                )
            )
    return records
