"""Report rendering: figures plus a delimited summary.

Consumes the results/trajectory CSVs produced by the experiment runner and
writes PNG figures next to a per-method summary CSV. Rendering is headless
(Agg backend), so it works in batch environments.
"""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiments import METHODS, read_results

logger = logging.getLogger(__name__)

__all__ = ["render_report"]

_KPI_TITLES = {
    "n_prev": "Ongoing preventive jobs",
    "n_cor": "Ongoing corrective jobs",
    "sla_v": "Service-level shortfall",
}

_METHOD_LABELS = {
    "stochastic": "Stochastic",
    "strict_deterministic": "Strict deterministic",
    "relaxed_deterministic": "Relaxed deterministic",
}


def _read_trajectories(path) -> dict[str, dict[str, list[tuple[int, float]]]]:
    """-> {kpi: {method: [(period, value), ...]}}"""
    data: dict[str, dict[str, list[tuple[int, float]]]] = defaultdict(lambda: defaultdict(list))
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            data[rec["kpi"]][rec["method"]].append((int(rec["period"]), float(rec["value"])))
    for per_method in data.values():
        for series in per_method.values():
            series.sort()
    return data


def _cost_figure(rows, path: Path) -> None:
    cells = sorted({(r.line, r.fleet, r.case) for r in rows})
    methods = [m for m in METHODS if any(r.method == m for r in rows)]
    cost = {(r.line, r.fleet, r.case, r.method): r.cost for r in rows}
    fig, ax = plt.subplots(figsize=(max(6.0, 1.4 * len(cells)), 4.0))
    width = 0.8 / max(1, len(methods))
    for i, method in enumerate(methods):
        xs = [c + i * width for c in range(len(cells))]
        ys = [cost.get(cell + (method,)) or 0.0 for cell in cells]
        ax.bar(xs, ys, width=width, label=_METHOD_LABELS.get(method, method))
    ax.set_xticks([c + 0.4 - width / 2 for c in range(len(cells))])
    ax.set_xticklabels([f"{l}\n{f}/case {c}" for l, f, c in cells], fontsize=8)
    ax.set_ylabel("Mean out-of-sample cost")
    ax.set_title("Cost by cell and method")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _trajectory_figure(trajectories, path: Path) -> None:
    kpis = [k for k in _KPI_TITLES if k in trajectories]
    fig, axes = plt.subplots(len(kpis), 1, figsize=(8.0, 2.6 * len(kpis)), sharex=True)
    if len(kpis) == 1:
        axes = [axes]
    for ax, kpi in zip(axes, kpis):
        for method, series in trajectories[kpi].items():
            periods = [p for p, _ in series]
            values = [v for _, v in series]
            ax.plot(periods, values, marker=".", label=_METHOD_LABELS.get(method, method))
        ax.set_ylabel(_KPI_TITLES[kpi], fontsize=9)
        ax.grid(True, alpha=0.3)
    axes[0].legend(fontsize=8)
    axes[-1].set_xlabel("Period")
    fig.suptitle("KPI trajectories over the planning horizon")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _summary_csv(rows, path: Path) -> None:
    by_method: dict[str, list] = defaultdict(list)
    for r in rows:
        if r.cost is not None:
            by_method[r.method].append(r)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "cells", "n_prev", "n_cor", "sla_v", "track_v", "cost"])
        for method in METHODS:
            group = by_method.get(method)
            if not group:
                continue
            mean = lambda key: sum(getattr(r, key) for r in group) / len(group)
            writer.writerow(
                [
                    method,
                    len(group),
                    f"{mean('n_prev'):.2f}",
                    f"{mean('n_cor'):.2f}",
                    f"{mean('sla_v'):.2f}",
                    f"{mean('track_v'):.2f}",
                    f"{mean('cost'):.2f}",
                ]
            )


def render_report(results_path, trajectories_path, outdir) -> list[Path]:
    """Render figures and a summary CSV; returns the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = read_results(results_path)
    written: list[Path] = []

    cost_png = outdir / "cost_comparison.png"
    _cost_figure(rows, cost_png)
    written.append(cost_png)

    if trajectories_path is not None:
        traj_png = outdir / "kpi_trajectories.png"
        _trajectory_figure(_read_trajectories(trajectories_path), traj_png)
        written.append(traj_png)

    summary = outdir / "report_summary.csv"
    _summary_csv(rows, summary)
    written.append(summary)
    logger.info("report written: %s", ", ".join(str(p) for p in written))
    return written
