"""Shared test fixtures and independent reference implementations.

The reference evaluators here are deliberately written in a different
style from the package (sets, dicts, plain loops) so they provide a
genuinely independent route to the same numbers.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from railsched.domain import (
    CostParams,
    FleetSpec,
    Horizon,
    Instance,
    MaintenancePlan,
    SlaSchedule,
)


def make_instance(
    *,
    days: int = 2,
    periods_per_day: int = 4,
    sla,
    ages,
    track: int = 2,
    c_o: float = 2.0,
    c_s: float = 60.0,
    c_p: float = 8.0,
    c_c: float = 40.0,
    c_a: float = 8.0,
    c_v: float = 4.0,
    y_p: int = 3,
    y_c: int = 5,
    label: str = "test",
) -> Instance:
    return Instance(
        horizon=Horizon(days=days, periods_per_day=periods_per_day),
        sla=SlaSchedule(tuple(sla)),
        costs=CostParams(c_o=c_o, c_s=c_s, c_p=c_p, c_c=c_c, c_a=c_a, c_v=c_v, y_p=y_p, y_c=y_c),
        fleet=FleetSpec(num_railcars=len(ages), track_capacity=track, initial_ages=tuple(ages)),
        label=label,
    )


def figure_replica_instance() -> Instance:
    """Five railcars, two tracks, eight periods; the worked schedule example."""
    return make_instance(
        days=2,
        periods_per_day=4,
        sla=(3, 2, 3, 0, 3, 2, 3, 0),
        ages=(0, 0, 0, 0, 0),
        track=2,
        label="figure-replica",
    )


FIGURE_REPLICA_PLAN = MaintenancePlan((1, 1, 0, 4, 0))
FIGURE_REPLICA_XI = (4, 3, 4, 5, 4)


def naive_omega(plan: MaintenancePlan, instance: Instance, xi) -> float:
    """Slow reference evaluator for one scenario.

    Independent re-derivation of the second-stage cost: classify each
    railcar, collect busy periods as sets, then walk the horizon once.
    """
    T = instance.num_periods
    c = instance.costs
    busy: dict[int, set[int]] = {}
    total = 0.0
    for j, (start, fail) in enumerate(zip(plan.assignment, xi)):
        fail = int(fail)
        periods: set[int] = set()
        if 1 <= start < fail:
            total += c.c_p
            periods = {t for t in range(start, start + c.y_p) if t <= T}
        elif (1 <= start and fail <= start <= T) or (start == 0 and fail <= T):
            total += c.c_c
            periods = {t for t in range(fail, fail + c.y_c) if t <= T}
        busy[j] = periods
    for t in range(1, T + 1):
        in_maint = sum(1 for periods in busy.values() if t in periods)
        avail = instance.num_railcars - in_maint
        req = instance.sla.requirements[t - 1]
        total += c.c_o * min(avail, req)
        total += c.c_s * max(req - avail, 0)
        total += c.c_a * max(in_maint - instance.fleet.track_capacity, 0)
    return total


def det_objective_for_assignment(instance: Instance, intervals, combo) -> float:
    """Objective of the preventive baseline for one fixed assignment.

    Mirrors the model algebra: a postponed railcar behaves as if it started
    at the horizon end (tardiness T - due when the window opened inside the
    horizon, earliness due - T when it lies beyond).
    """
    n, T = instance.num_railcars, instance.num_periods
    c = instance.costs
    cost = 0.0
    occupied = [0] * (T + 2)
    for j, start in enumerate(combo):
        due, end = intervals[j].due, intervals[j].end
        if start == 0:
            tardy = max(0, T - due)
            early = max(0, due - T)
        else:
            cost += c.c_p
            tardy = max(0, start - due)
            early = max(0, due - start)
            for t in range(start, min(start + c.y_p - 1, T) + 1):
                occupied[t] += 1
        violation = max(0, tardy - (end - due))
        cost += tardy + early + c.c_v * violation
    for t in range(1, T + 1):
        avail = n - occupied[t]
        req = instance.sla.requirements[t - 1]
        served = min(avail, req)
        cost += min(c.c_o * served + c.c_s * (req - served), c.c_s * req)
        cost += c.c_a * max(occupied[t] - instance.fleet.track_capacity, 0)
    return cost


def det_enumerate(instance: Instance, intervals):
    """Brute-force optimum over every assignment combination."""
    n, T = instance.num_railcars, instance.num_periods
    best_cost, best_combo = math.inf, None
    for combo in itertools.product(range(T + 1), repeat=n):
        cost = det_objective_for_assignment(instance, intervals, combo)
        if cost < best_cost - 1e-12:
            best_cost, best_combo = cost, combo
    return best_cost, best_combo


def stoch_objective_for_assignment(instance: Instance, failure_times, combo, per_period: bool) -> float:
    """Expected scenario cost of a fixed first stage, both charging modes."""
    T = instance.num_periods
    c = instance.costs
    n_scen = failure_times.shape[1]
    total = 0.0
    plan = MaintenancePlan(tuple(combo))
    for k in range(n_scen):
        xi = failure_times[:, k]
        cost_k = naive_omega(plan, instance, xi)
        if per_period:
            for j, start in enumerate(combo):
                if start == 0 and xi[j] <= T:
                    cost_k += c.c_c * (T - int(xi[j]))
        total += cost_k
    return total / n_scen


def stoch_enumerate(instance: Instance, failure_times, per_period: bool):
    """Brute-force optimum of the scenario model over first-stage choices."""
    n, T = instance.num_railcars, instance.num_periods
    best_cost, best_combo = math.inf, None
    for combo in itertools.product(range(T + 1), repeat=n):
        cost = stoch_objective_for_assignment(instance, failure_times, combo, per_period)
        if cost < best_cost - 1e-12:
            best_cost, best_combo = cost, combo
    return best_cost, best_combo


def random_small_instance(rng: np.random.Generator, max_n: int = 5, max_periods: int = 8) -> Instance:
    """Random tiny instance with integer costs (exact arithmetic downstream)."""
    n = int(rng.integers(1, max_n + 1))
    periods = int(rng.integers(2, max_periods + 1))
    c_c = float(rng.integers(20, 61))
    c_p = float(rng.integers(1, int(c_c)))
    c_o = float(rng.integers(0, 5))
    c_s = float(rng.integers(int(c_o), 91))  # keep shortfall at least as dear as operating
    y_p = int(rng.integers(1, 4))
    y_c = y_p + int(rng.integers(1, 4))
    return Instance(
        horizon=Horizon(days=1, periods_per_day=periods),
        sla=SlaSchedule(tuple(int(rng.integers(0, n + 2)) for _ in range(periods))),
        costs=CostParams(
            c_o=c_o,
            c_s=c_s,
            c_p=c_p,
            c_c=c_c,
            c_a=float(rng.integers(1, 15)),
            c_v=float(rng.integers(2, 8)),
            y_p=y_p,
            y_c=y_c,
        ),
        fleet=FleetSpec(
            num_railcars=n,
            track_capacity=int(rng.integers(0, n + 1)),
            initial_ages=tuple(int(a) for a in rng.integers(0, 61, size=n)),
        ),
        label="random-small",
    )


def random_plan(rng: np.random.Generator, n: int, periods: int) -> MaintenancePlan:
    return MaintenancePlan(tuple(int(rng.integers(0, periods + 1)) for _ in range(n)))


def random_xi(rng: np.random.Generator, n: int, periods: int):
    return tuple(int(rng.integers(1, periods + 2)) for _ in range(n))
