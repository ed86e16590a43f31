"""Preventive-maintenance baseline model.

Each railcar either gets one maintenance start period or is postponed.
Deviations from a reliability-derived preferred window ``[due, end]`` are
penalized (one unit per period of earliness or tardiness, ``c_v`` per
period beyond the window end), railcars under maintenance cannot operate,
and per-period service shortfalls and track-capacity overflows carry their
own penalties. Failures play no role here; plans are scored against
failures by the evaluation module exactly like stochastic plans.

A postponed railcar is modelled as starting at the horizon end: it is
charged tardiness ``T - due`` when its window opens inside the horizon and
earliness ``due - T`` when the window lies beyond it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .domain import DetDiagnostics, Instance, MaintenancePlan, POSTPONED
from .milp import ModelBuilder, SolveOptions, SolveResult, SolverError, solve
from .reliability import MaintenanceInterval, WeibullParams, maintenance_interval

logger = logging.getLogger(__name__)

__all__ = [
    "DetModelInput",
    "DeterministicModel",
    "intervals_from_reliability",
    "build_deterministic",
    "solve_deterministic",
    "reconstruct_objective",
]


@dataclass(frozen=True)
class DetModelInput:
    """Instance plus one preferred maintenance window per railcar."""

    instance: Instance
    intervals: tuple[MaintenanceInterval, ...]

    def __post_init__(self) -> None:
        if len(self.intervals) != self.instance.num_railcars:
            raise ValueError("one maintenance interval per railcar required")


@dataclass(eq=False)
class DeterministicModel:
    """Built model plus the variable-id layout needed for extraction."""

    builder: ModelBuilder
    start_choice: np.ndarray  # (n, T) binaries: start maintenance in period t
    postpone: np.ndarray  # (n,) binaries
    start_time: np.ndarray  # (n,) continuous start period
    earliness: np.ndarray
    tardiness: np.ndarray
    violation: np.ndarray
    operate: np.ndarray  # (n, T) binaries
    shortfall: np.ndarray  # (T,)
    overflow: np.ndarray  # (T,)
    inp: DetModelInput


def intervals_from_reliability(
    instance: Instance, weibull: WeibullParams, r: float
) -> tuple[MaintenanceInterval, ...]:
    """Per-railcar preferred windows at reliability level ``r``."""
    return tuple(maintenance_interval(weibull, r, age) for age in instance.require_ages())


def build_deterministic(inp: DetModelInput) -> DeterministicModel:
    """Assemble the baseline MILP for an instance with given windows."""
    inst = inp.instance
    n, T = inst.num_railcars, inst.num_periods
    costs = inst.costs
    sla = inst.sla.requirements
    track = inst.fleet.track_capacity

    mb = ModelBuilder(name=f"deterministic[{inst.label or 'instance'}]")
    start_choice = np.array(
        [[mb.add_binary(f"z_{j + 1}_{t}") for t in range(1, T + 1)] for j in range(n)]
    )
    postpone = np.array([mb.add_binary(f"p_{j + 1}") for j in range(n)])
    start_time = np.array([mb.add_continuous(name=f"s_{j + 1}") for j in range(n)])
    earliness = np.array([mb.add_continuous(name=f"e_{j + 1}") for j in range(n)])
    tardiness = np.array([mb.add_continuous(name=f"t_{j + 1}") for j in range(n)])
    violation = np.array([mb.add_continuous(name=f"v_{j + 1}") for j in range(n)])
    operate = np.array(
        [[mb.add_binary(f"eta_{j + 1}_{t}") for t in range(1, T + 1)] for j in range(n)]
    )
    shortfall = np.array([mb.add_continuous(name=f"sigma_{t}") for t in range(1, T + 1)])
    overflow = np.array([mb.add_continuous(name=f"gamma_{t}") for t in range(1, T + 1)])

    for j in range(n):
        due = inp.intervals[j].due
        end = inp.intervals[j].end

        # one start period or postponement
        mb.add_constraint(
            [(start_choice[j, t], 1.0) for t in range(T)] + [(postpone[j], 1.0)], "==", 1.0
        )
        # tardiness: t_j >= s_j + T - due - T (1 - p_j)
        mb.add_constraint(
            [(tardiness[j], 1.0), (start_time[j], -1.0), (postpone[j], -float(T))],
            ">=",
            -float(due),
        )
        # earliness: e_j >= due - s_j - T p_j
        mb.add_constraint(
            [(earliness[j], 1.0), (start_time[j], 1.0), (postpone[j], float(T))],
            ">=",
            float(due),
        )
        # window violation beyond the end time
        mb.add_constraint([(tardiness[j], 1.0), (violation[j], -1.0)], "<=", float(end - due))
        # start time is the chosen period
        mb.add_constraint(
            [(start_choice[j, t], float(t + 1)) for t in range(T)]
            + [(start_time[j], -1.0)],
            "==",
            0.0,
        )

        for t in range(T):
            # a railcar under maintenance cannot operate; starts within the
            # last y_p - 1 periods keep it occupied
            occupying = [
                (start_choice[j, t - lag], 1.0) for lag in range(costs.y_p) if t - lag >= 0
            ]
            mb.add_constraint([(operate[j, t], 1.0)] + occupying, "<=", 1.0)

    for t in range(T):
        mb.add_constraint(
            [(operate[j, t], 1.0) for j in range(n)] + [(shortfall[t], 1.0)],
            ">=",
            float(sla[t]),
        )
        occupying = [
            (start_choice[j, t - lag], 1.0)
            for j in range(n)
            for lag in range(costs.y_p)
            if t - lag >= 0
        ]
        mb.add_constraint(occupying + [(overflow[t], -1.0)], "<=", float(track))

    for j in range(n):
        for t in range(T):
            mb.add_objective_term(operate[j, t], costs.c_o)
            mb.add_objective_term(start_choice[j, t], costs.c_p)
        mb.add_objective_term(tardiness[j], 1.0)
        mb.add_objective_term(earliness[j], 1.0)
        mb.add_objective_term(violation[j], costs.c_v)
    for t in range(T):
        mb.add_objective_term(shortfall[t], costs.c_s)
        mb.add_objective_term(overflow[t], costs.c_a)

    return DeterministicModel(
        builder=mb,
        start_choice=start_choice,
        postpone=postpone,
        start_time=start_time,
        earliness=earliness,
        tardiness=tardiness,
        violation=violation,
        operate=operate,
        shortfall=shortfall,
        overflow=overflow,
        inp=inp,
    )


def _extract_plan(model: DeterministicModel, values: np.ndarray) -> MaintenancePlan:
    n, T = model.start_choice.shape
    assignment = []
    for j in range(n):
        chosen = [t + 1 for t in range(T) if values[model.start_choice[j, t]] >= 0.5]
        if values[model.postpone[j]] >= 0.5:
            if chosen:
                raise SolverError(f"railcar {j + 1} both scheduled and postponed")
            assignment.append(POSTPONED)
        else:
            if len(chosen) != 1:
                raise SolverError(f"railcar {j + 1} has {len(chosen)} start periods")
            assignment.append(chosen[0])
    return MaintenancePlan(tuple(assignment))


def solve_deterministic(
    inp: DetModelInput, options: SolveOptions | None = None
) -> tuple[MaintenancePlan, DetDiagnostics, SolveResult]:
    """Solve the baseline model and extract the plan and solution detail."""
    model = build_deterministic(inp)
    result = solve(model.builder, options)
    if not result.ok:
        raise SolverError(
            f"deterministic solve failed: {result.status.value} ({result.message})"
        )
    values = result.values
    plan = _extract_plan(model, values)
    diag = DetDiagnostics(
        start=values[model.start_time].round(9),
        earliness=values[model.earliness],
        tardiness=values[model.tardiness],
        interval_violation=values[model.violation],
        sla_shortfall=values[model.shortfall],
        extra_capacity=values[model.overflow],
        operational=values[model.operate].astype(np.int64),
    )
    logger.info(
        "deterministic[%s]: obj=%.2f scheduled=%d postponed=%d (%.2fs)",
        inp.instance.label or "instance",
        result.objective_value,
        plan.num_scheduled,
        plan.num_postponed,
        result.wall_time,
    )
    return plan, diag, result


def reconstruct_objective(
    inp: DetModelInput, plan: MaintenancePlan, diag: DetDiagnostics
) -> float:
    """Recompute the objective from extracted solution values.

    Used to cross-check the solver-reported objective: operating cost,
    shortfall and overflow penalties, preventive cost per scheduled railcar,
    and the per-railcar earliness/tardiness/violation terms.
    """
    costs = inp.instance.costs
    return float(
        costs.c_o * diag.operational.sum()
        + costs.c_s * diag.sla_shortfall.sum()
        + costs.c_a * diag.extra_capacity.sum()
        + costs.c_p * plan.num_scheduled
        + diag.tardiness.sum()
        + diag.earliness.sum()
        + costs.c_v * diag.interval_violation.sum()
    )
