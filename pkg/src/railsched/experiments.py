"""Experiment matrix runner and CSV emission.

A cell is one (line, fleet profile, cost case) combination; within a cell
every method is scored on the identical fresh out-of-sample scenario set
so method comparisons are free of sampling noise. Fleet ages and the
out-of-sample set are keyed by (line, fleet profile) only, so cost cases
differ purely in their cost parameters.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .domain import (
    CostCase,
    FleetProfile,
    Instance,
    Line,
    SlaSchedule,
    apply_case,
    default_costs,
    preset_line,
    sample_fleet_ages,
)
from .evaluation import KpiSummary, evaluate_out_of_sample, ub_confidence_interval
from .deterministic import DetModelInput, intervals_from_reliability, solve_deterministic
from .reliability import WeibullParams
from .saa import SaaConfig, run_saa
from .scenarios import derive_seed, generate_scenarios

logger = logging.getLogger(__name__)

__all__ = [
    "METHODS",
    "ExperimentConfig",
    "ResultRow",
    "scale_instance",
    "run_experiment",
    "write_results",
    "write_trajectories",
    "read_results",
]

METHOD_STOCHASTIC = "stochastic"
METHOD_STRICT = "strict_deterministic"
METHOD_RELAXED = "relaxed_deterministic"
METHODS = (METHOD_STOCHASTIC, METHOD_STRICT, METHOD_RELAXED)

#: Reliability level used to build each deterministic method's windows.
DET_RELIABILITY = {METHOD_STRICT: 0.8, METHOD_RELAXED: 0.9}

RESULTS_COLUMNS = [
    "line",
    "fleet",
    "case",
    "method",
    "n_prev",
    "n_cor",
    "sla_v",
    "track_v",
    "cost",
    "time_s",
    "lb_lo",
    "lb_hi",
    "ub_lo",
    "ub_hi",
    "gap_percent",
]

TRAJECTORY_COLUMNS = ["period", "method", "kpi", "value"]


@dataclass
class ExperimentConfig:
    """Experiment matrix plus shared sampling/solver settings.

    ``scale`` shrinks the presets for desk runs: fleet size and track
    capacity round up, per-period requirements round to nearest. The
    defaults give a desk-scale matrix that finishes in minutes; set
    ``scale=1.0`` and the full sample sizes for production runs.
    """

    master_seed: int
    lines: tuple[str, ...] = tuple(line.value for line in Line)
    fleet_profiles: tuple[str, ...] = tuple(p.value for p in FleetProfile)
    cases: tuple[str, ...] = tuple(c.value for c in CostCase)
    methods: tuple[str, ...] = METHODS
    scale: float = 0.2
    weibull: WeibullParams = field(default_factory=lambda: WeibullParams(50.0, 5.0))
    saa: SaaConfig = field(default_factory=lambda: SaaConfig(n_in=30, m_reps=3, n_out=300))
    workers: int = 1

    def __post_init__(self) -> None:
        if not (self.lines and self.fleet_profiles and self.cases and self.methods):
            raise ValueError("experiment selections must be non-empty")
        if not 0.0 < self.scale <= 1.0:
            raise ValueError("scale must lie in (0, 1]")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        # validate enum-coded selections early
        self.lines = tuple(Line(v).value for v in self.lines)
        self.fleet_profiles = tuple(FleetProfile(v).value for v in self.fleet_profiles)
        self.cases = tuple(CostCase(v).value for v in self.cases)


@dataclass
class ResultRow:
    """One method in one cell; bound fields stay None for deterministic rows."""

    line: str
    fleet: str
    case: str
    method: str
    n_prev: float | None = None
    n_cor: float | None = None
    sla_v: float | None = None
    track_v: float | None = None
    cost: float | None = None
    time_s: float | None = None
    lb_lo: float | None = None
    lb_hi: float | None = None
    ub_lo: float | None = None
    ub_hi: float | None = None
    gap_percent: float | None = None
    status: str = "ok"  # bookkeeping only, not serialized
    solve_status: str = ""
    out_sample_hash: str = ""


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def scale_instance(instance: Instance, factor: float) -> Instance:
    """Shrink an instance for desk runs; no-op at factor 1."""
    if not 0.0 < factor <= 1.0:
        raise ValueError("scale factor must lie in (0, 1]")
    if factor == 1.0:
        return instance
    fleet = instance.fleet
    n = max(1, math.ceil(fleet.num_railcars * factor))
    track = math.ceil(fleet.track_capacity * factor)
    sla = tuple(
        max(0, _round_half_up(r * factor)) for r in instance.sla.requirements
    )
    return replace(
        instance,
        sla=SlaSchedule(sla),
        fleet=replace(fleet, num_railcars=n, track_capacity=track, initial_ages=None),
    )


def _build_cell_instance(cfg: ExperimentConfig, line: str, fleet: str, case: str) -> Instance:
    base = preset_line(line)
    base = scale_instance(base, cfg.scale)
    ages = sample_fleet_ages(
        fleet, base.num_railcars, derive_seed(cfg.master_seed, "ages", line, fleet)
    )
    costs = apply_case(default_costs(), case)
    return base.with_ages(ages).with_costs(costs)


def _run_cell(cfg: ExperimentConfig, line: str, fleet: str, case: str):
    instance = _build_cell_instance(cfg, line, fleet, case)
    instance = replace(instance, label=f"{line}-{fleet}-case{case}")
    out_sample = generate_scenarios(
        instance,
        cfg.weibull,
        cfg.saa.n_out,
        derive_seed(cfg.master_seed, "out-sample", line, fleet),
    )
    out_hash = out_sample.content_hash()

    rows: list[ResultRow] = []
    trajectories: dict[str, KpiSummary] = {}
    for method in cfg.methods:
        row = ResultRow(line=line, fleet=fleet, case=case, method=method)
        row.out_sample_hash = out_hash
        try:
            if method == METHOD_STOCHASTIC:
                saa_cfg = replace(
                    cfg.saa, master_seed=derive_seed(cfg.master_seed, "saa", line, fleet)
                )
                saa_res = run_saa(instance, cfg.weibull, saa_cfg, out_sample=out_sample)
                kpis = saa_res.kpis
                row.lb_lo, row.lb_hi = saa_res.lb_ci.lo, saa_res.lb_ci.hi
                row.ub_lo, row.ub_hi = saa_res.ub_ci.lo, saa_res.ub_ci.hi
                row.gap_percent = saa_res.gap_percent
                row.time_s = saa_res.in_sample_time
                row.solve_status = ",".join(r.status.value for r in saa_res.replications)
            else:
                intervals = intervals_from_reliability(
                    instance, cfg.weibull, DET_RELIABILITY[method]
                )
                plan, _, det_res = solve_deterministic(
                    DetModelInput(instance, intervals), cfg.saa.solve_options
                )
                kpis, omegas = evaluate_out_of_sample(plan, instance, out_sample)
                ub = ub_confidence_interval(omegas, cfg.saa.theta)
                row.ub_lo, row.ub_hi = ub.lo, ub.hi
                row.time_s = det_res.wall_time
                row.solve_status = det_res.status.value
            row.n_prev = kpis.n_prev
            row.n_cor = kpis.n_cor
            row.sla_v = kpis.sla_v
            row.track_v = kpis.track_v
            row.cost = kpis.cost
            trajectories[method] = kpis
        except Exception as exc:
            logger.exception("cell %s/%s/case %s, %s failed", line, fleet, case, method)
            row.status = f"failed: {exc}"
        rows.append(row)
    return rows, trajectories


def run_experiment(cfg: ExperimentConfig):
    """Run the whole matrix.

    Returns ``(rows, trajectories)`` where ``trajectories`` maps the cell
    key ``(line, fleet, case)`` to per-method KPI summaries. Rows are
    ordered by the configured (line, fleet, case, method) order regardless
    of worker scheduling.
    """
    cells = [
        (line, fleet, case)
        for line in cfg.lines
        for fleet in cfg.fleet_profiles
        for case in cfg.cases
    ]
    results: dict[tuple[str, str, str], tuple[list[ResultRow], dict]] = {}
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = {
                cell: pool.submit(_run_cell, cfg, *cell) for cell in cells
            }
            for cell, future in futures.items():
                results[cell] = future.result()
    else:
        for cell in cells:
            results[cell] = _run_cell(cfg, *cell)

    rows: list[ResultRow] = []
    trajectories: dict[tuple[str, str, str], dict[str, KpiSummary]] = {}
    for cell in cells:
        cell_rows, cell_traj = results[cell]
        rows.extend(cell_rows)
        trajectories[cell] = cell_traj

    by_cell: dict[tuple[str, str, str], set[str]] = {}
    for r in rows:
        by_cell.setdefault((r.line, r.fleet, r.case), set()).add(r.out_sample_hash)
    if any(len(h) > 1 for h in by_cell.values()):
        raise AssertionError("methods in one cell saw different out-of-sample sets")
    logger.info("experiment finished: %d rows over %d cells", len(rows), len(cells))
    return rows, trajectories


def _fmt(value: float | None, decimals: int = 2) -> str:
    if value is None:
        return ""
    return f"{value:.{decimals}f}"


def write_results(rows, path) -> None:
    """Emit the result rows as CSV with two-decimal KPI formatting."""
    if not rows:
        raise ValueError("no result rows to write")
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(RESULTS_COLUMNS)
            for r in rows:
                writer.writerow(
                    [
                        r.line,
                        r.fleet,
                        r.case,
                        r.method,
                        _fmt(r.n_prev),
                        _fmt(r.n_cor),
                        _fmt(r.sla_v),
                        _fmt(r.track_v),
                        _fmt(r.cost),
                        _fmt(r.time_s),
                        _fmt(r.lb_lo),
                        _fmt(r.lb_hi),
                        _fmt(r.ub_lo),
                        _fmt(r.ub_hi),
                        _fmt(r.gap_percent),
                    ]
                )
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def write_trajectories(kpis_by_method: dict[str, KpiSummary], path) -> None:
    """Emit per-period KPI trajectories of one cell as CSV."""
    if not kpis_by_method:
        raise ValueError("no trajectories to write")
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRAJECTORY_COLUMNS)
            for method, kpis in kpis_by_method.items():
                for kpi_name, values in kpis.trajectories.items():
                    for t, value in enumerate(values, start=1):
                        writer.writerow([t, method, kpi_name, _fmt(float(value))])
    except OSError as exc:
        raise OSError(f"cannot write trajectories to {path}: {exc}") from exc


def read_results(path) -> list[ResultRow]:
    """Parse a results CSV back into rows (bounds empty -> None)."""

    def parse(cell: str) -> float | None:
        return None if cell == "" else float(cell)

    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RESULTS_COLUMNS:
            raise ValueError(f"unexpected results header in {path}")
        for rec in reader:
            rows.append(
                ResultRow(
                    line=rec["line"],
                    fleet=rec["fleet"],
                    case=rec["case"],
                    method=rec["method"],
                    n_prev=parse(rec["n_prev"]),
                    n_cor=parse(rec["n_cor"]),
                    sla_v=parse(rec["sla_v"]),
                    track_v=parse(rec["track_v"]),
                    cost=parse(rec["cost"]),
                    time_s=parse(rec["time_s"]),
                    lb_lo=parse(rec["lb_lo"]),
                    lb_hi=parse(rec["lb_hi"]),
                    ub_lo=parse(rec["ub_lo"]),
                    ub_hi=parse(rec["ub_hi"]),
                    gap_percent=parse(rec["gap_percent"]),
                )
            )
    return rows
