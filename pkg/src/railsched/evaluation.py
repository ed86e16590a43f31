"""Out-of-sample scoring of a fixed maintenance plan.

Given a plan and one realized failure period per railcar, the simulator
classifies each railcar:

* scheduled strictly before its failure -> preventive work, cost ``c_p``,
  busy from the start for ``y_p`` periods (clipped to the horizon);
* scheduled at/after the failure, or postponed with an in-horizon failure
  -> corrective work, cost ``c_c``, busy from the failure for ``y_c``
  periods (clipped);
* postponed and surviving the horizon -> nothing.

Per period it then operates ``min(available, required)`` railcars at
``c_o`` each, pays ``c_s`` per unit of unmet requirement and ``c_a`` per
maintenance slot beyond the track capacity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from .domain import Instance, MaintenancePlan, POSTPONED
from .scenarios import ScenarioSet

logger = logging.getLogger(__name__)

__all__ = [
    "MaintenanceKind",
    "EvaluationRecord",
    "KpiSummary",
    "ConfidenceInterval",
    "evaluate_plan",
    "evaluate_out_of_sample",
    "ub_confidence_interval",
]

#: Keys of the per-period KPI trajectories.
TRAJECTORY_KPIS = ("n_prev", "n_cor", "sla_v")


class MaintenanceKind(Enum):
    PREVENTIVE = "preventive"
    CORRECTIVE = "corrective"
    NONE = "none"


@dataclass(frozen=True, eq=False)
class EvaluationRecord:
    """Outcome of one scenario under a fixed plan."""

    scenario: int
    omega: float  # total scenario cost
    kinds: tuple[MaintenanceKind, ...]
    busy_windows: tuple[tuple[int, int] | None, ...]  # inclusive 1-based
    in_maintenance: np.ndarray  # per period
    available: np.ndarray
    sla_shortfall: np.ndarray
    track_overflow: np.ndarray
    preventive_count: np.ndarray
    corrective_count: np.ndarray
    maintenance_cost: float
    operational_cost: float
    sla_cost: float
    track_cost: float


@dataclass(frozen=True, eq=False)
class KpiSummary:
    """Scenario-averaged indicators plus per-period trajectories.

    The count/violation KPIs are per-period averages (nights included)
    further averaged over scenarios; ``cost`` is the plain scenario mean.
    """

    n_prev: float
    n_cor: float
    sla_v: float
    track_v: float
    cost: float
    trajectories: dict[str, np.ndarray]
    num_scenarios: int
    num_periods: int


@dataclass(frozen=True)
class ConfidenceInterval:
    lo: float
    hi: float
    level: float

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("interval bounds out of order")

    @property
    def half_width(self) -> float:
        return (self.hi - self.lo) / 2.0

    @property
    def midpoint(self) -> float:
        return (self.hi + self.lo) / 2.0


def evaluate_plan(
    plan: MaintenancePlan, instance: Instance, failure_times, scenario_index: int = 0
) -> EvaluationRecord:
    """Score one scenario; ``failure_times`` holds one period per railcar."""
    n, T = instance.num_railcars, instance.num_periods
    costs = instance.costs
    xi = [int(x) for x in failure_times]
    if len(xi) != n or len(plan) != n:
        raise ValueError("plan/failure vector must cover every railcar")
    if any(not 1 <= x <= T + 1 for x in xi):
        raise ValueError(f"failure periods must lie in [1, {T + 1}]")
    plan.validate_for(instance.horizon)

    kinds: list[MaintenanceKind] = []
    windows: list[tuple[int, int] | None] = []
    preventive = np.zeros(T, dtype=np.int64)
    corrective = np.zeros(T, dtype=np.int64)
    maintenance_cost = 0.0
    for j in range(n):
        scheduled = plan.assignment[j]
        fail = xi[j]
        if 1 <= scheduled < fail:
            maintenance_cost += costs.c_p
            lo, hi = scheduled, min(scheduled + costs.y_p - 1, T)
            preventive[lo - 1 : hi] += 1
            kinds.append(MaintenanceKind.PREVENTIVE)
            windows.append((lo, hi))
        elif (fail <= scheduled <= T) or (scheduled == POSTPONED and fail <= T):
            maintenance_cost += costs.c_c
            lo, hi = fail, min(fail + costs.y_c - 1, T)
            corrective[lo - 1 : hi] += 1
            kinds.append(MaintenanceKind.CORRECTIVE)
            windows.append((lo, hi))
        else:
            kinds.append(MaintenanceKind.NONE)
            windows.append(None)

    in_maint = preventive + corrective
    available = n - in_maint
    sla = np.asarray(instance.sla.requirements, dtype=np.int64)
    operated = np.minimum(available, sla)
    shortfall = np.maximum(sla - available, 0)
    overflow = np.maximum(in_maint - instance.fleet.track_capacity, 0)

    operational_cost = float(costs.c_o * operated.sum())
    sla_cost = float(costs.c_s * shortfall.sum())
    track_cost = float(costs.c_a * overflow.sum())
    omega = maintenance_cost + operational_cost + sla_cost + track_cost

    return EvaluationRecord(
        scenario=int(scenario_index),
        omega=omega,
        kinds=tuple(kinds),
        busy_windows=tuple(windows),
        in_maintenance=in_maint,
        available=available,
        sla_shortfall=shortfall,
        track_overflow=overflow,
        preventive_count=preventive,
        corrective_count=corrective,
        maintenance_cost=maintenance_cost,
        operational_cost=operational_cost,
        sla_cost=sla_cost,
        track_cost=track_cost,
    )


def evaluate_out_of_sample(
    plan: MaintenancePlan, instance: Instance, scenarios: ScenarioSet
) -> tuple[KpiSummary, np.ndarray]:
    """Score a plan on every scenario and aggregate the indicators."""
    if scenarios.num_scenarios < 1:
        raise ValueError("scenario set is empty")
    T = instance.num_periods
    count = scenarios.num_scenarios
    omegas = np.empty(count)
    prev_traj = np.zeros(T)
    cor_traj = np.zeros(T)
    sla_traj = np.zeros(T)
    track_total = 0.0
    for k in range(count):
        rec = evaluate_plan(plan, instance, scenarios.column(k), scenario_index=k)
        omegas[k] = rec.omega
        prev_traj += rec.preventive_count
        cor_traj += rec.corrective_count
        sla_traj += rec.sla_shortfall
        track_total += rec.track_overflow.sum()
    prev_traj /= count
    cor_traj /= count
    sla_traj /= count
    summary = KpiSummary(
        n_prev=float(prev_traj.sum() / T),
        n_cor=float(cor_traj.sum() / T),
        sla_v=float(sla_traj.sum() / T),
        track_v=float(track_total / (count * T)),
        cost=float(omegas.mean()),
        trajectories={"n_prev": prev_traj, "n_cor": cor_traj, "sla_v": sla_traj},
        num_scenarios=count,
        num_periods=T,
    )
    return summary, omegas


def ub_confidence_interval(omegas, theta: float = 0.05) -> ConfidenceInterval:
    """Normal-quantile interval for the mean out-of-sample cost.

    The spread estimate is the standard error of the mean,
    ``sqrt(sum((w - mean)^2) / (N (N - 1)))``.
    """
    values = np.asarray(omegas, dtype=float)
    if values.size < 2:
        raise ValueError("need at least two cost samples")
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie strictly inside (0, 1)")
    mean = float(values.mean())
    se = float(np.sqrt(np.sum((values - mean) ** 2) / (values.size * (values.size - 1))))
    z = float(stats.norm.ppf(1.0 - theta / 2.0))
    return ConfidenceInterval(lo=mean - z * se, hi=mean + z * se, level=1.0 - theta)
