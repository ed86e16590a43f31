"""Problem data model: fleets, horizons, service levels, costs and plans.

Everything here is an immutable value object. The two metro-line presets
(M1B and M4) carry the weekly service-level table, fleet size and track
capacity used throughout the experiments; costs are selected separately
through :func:`apply_case`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

__all__ = [
    "Line",
    "CostCase",
    "FleetProfile",
    "Horizon",
    "SlaSchedule",
    "CostParams",
    "FleetSpec",
    "Instance",
    "MaintenancePlan",
    "DetDiagnostics",
    "POSTPONED",
    "default_costs",
    "apply_case",
    "preset_line",
    "sample_fleet_ages",
    "instance_to_dict",
    "instance_from_dict",
]


class Line(str, Enum):
    """Metro line preset identifiers."""

    M1B = "M1B"
    M4 = "M4"


class CostCase(str, Enum):
    """Ratio of the service-shortfall penalty to the corrective cost."""

    CASE1 = "1"  # c_s = 1.5 * c_c
    CASE2 = "2"  # c_s = c_c
    CASE3 = "3"  # c_s = (2/3) * c_c


class FleetProfile(str, Enum):
    """Initial-age sampling profile for a fleet."""

    YOUNG = "young"
    MIXED = "mixed"
    OLD = "old"


# Required operational railcars per (line, day type), in within-day order
# Night, Morning, Afternoon, Evening. A week is five weekdays followed by
# Saturday and Sunday.
SLA_TABLE: dict[Line, dict[str, tuple[int, int, int, int]]] = {
    Line.M1B: {
        "weekday": (0, 45, 50, 49),
        "saturday": (12, 41, 51, 47),
        "sunday": (12, 40, 43, 41),
    },
    Line.M4: {
        "weekday": (0, 68, 66, 59),
        "saturday": (11, 55, 66, 56),
        "sunday": (11, 48, 66, 54),
    },
}

FLEET_SIZE: dict[Line, int] = {Line.M1B: 57, Line.M4: 74}
TRACK_CAPACITY: dict[Line, int] = {Line.M1B: 12, Line.M4: 15}

# Inclusive integer age ranges, in periods since the last maintenance.
AGE_RANGES: dict[FleetProfile, tuple[int, int]] = {
    FleetProfile.YOUNG: (10, 20),
    FleetProfile.MIXED: (10, 60),
    FleetProfile.OLD: (50, 60),
}

#: Plan entry marking a railcar with no maintenance inside the horizon.
POSTPONED = 0


@dataclass(frozen=True)
class Horizon:
    """Planning horizon of ``days * periods_per_day`` periods, indexed 1-based."""

    days: int = 7
    periods_per_day: int = 4

    def __post_init__(self) -> None:
        if self.days < 1 or self.periods_per_day < 1:
            raise ValueError("horizon dimensions must be positive")

    @property
    def num_periods(self) -> int:
        return self.days * self.periods_per_day


@dataclass(frozen=True)
class SlaSchedule:
    """Minimum operational railcars required in each period."""

    requirements: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(r < 0 for r in self.requirements):
            raise ValueError("SLA requirements must be non-negative")
        object.__setattr__(self, "requirements", tuple(int(r) for r in self.requirements))

    def __len__(self) -> int:
        return len(self.requirements)

    @property
    def total(self) -> int:
        return sum(self.requirements)


@dataclass(frozen=True)
class CostParams:
    """Unit costs and maintenance durations.

    ``y_p``/``y_c`` are the preventive/corrective durations in periods;
    preventive work must be both shorter and cheaper than corrective work.
    """

    c_o: float  # operating a railcar for one period
    c_s: float  # one unit of unmet service requirement, per period
    c_p: float  # one preventive action
    c_c: float  # one corrective action
    c_a: float  # one extra maintenance slot, per period
    c_v: float  # one period of interval violation (deterministic model)
    y_p: int
    y_c: int

    def __post_init__(self) -> None:
        for name in ("c_o", "c_s", "c_p", "c_c", "c_a", "c_v"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not self.y_p < self.y_c:
            raise ValueError("preventive duration must be shorter than corrective")
        if not self.c_p < self.c_c:
            raise ValueError("preventive cost must be lower than corrective")


@dataclass(frozen=True)
class FleetSpec:
    """Fleet size, per-railcar initial ages and maintenance track capacity.

    ``initial_ages`` may be left unset on presets and filled later via
    :func:`sample_fleet_ages`.
    """

    num_railcars: int
    track_capacity: int
    initial_ages: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.num_railcars < 1:
            raise ValueError("fleet must contain at least one railcar")
        if self.track_capacity < 0:
            raise ValueError("track capacity must be non-negative")
        if self.initial_ages is not None:
            ages = tuple(int(a) for a in self.initial_ages)
            if len(ages) != self.num_railcars:
                raise ValueError("one initial age per railcar required")
            if any(a < 0 for a in ages):
                raise ValueError("initial ages must be non-negative")
            object.__setattr__(self, "initial_ages", ages)


@dataclass(frozen=True)
class Instance:
    """A complete problem instance consumed by both optimization models."""

    horizon: Horizon
    sla: SlaSchedule
    costs: CostParams
    fleet: FleetSpec
    label: str = ""

    def __post_init__(self) -> None:
        if len(self.sla) != self.horizon.num_periods:
            raise ValueError(
                f"SLA length {len(self.sla)} does not match "
                f"{self.horizon.num_periods} horizon periods"
            )

    @property
    def num_periods(self) -> int:
        return self.horizon.num_periods

    @property
    def num_railcars(self) -> int:
        return self.fleet.num_railcars

    def with_ages(self, ages) -> "Instance":
        """Copy of the instance with the fleet ages filled in."""
        return replace(self, fleet=replace(self.fleet, initial_ages=tuple(ages)))

    def with_costs(self, costs: CostParams) -> "Instance":
        return replace(self, costs=costs)

    def require_ages(self) -> tuple[int, ...]:
        if self.fleet.initial_ages is None:
            raise ValueError("instance has no fleet ages; call with_ages() first")
        return self.fleet.initial_ages


@dataclass(frozen=True)
class MaintenancePlan:
    """First-stage decision: one entry per railcar.

    Entry ``t >= 1`` schedules maintenance to start in period ``t``;
    ``POSTPONED`` (0) leaves the railcar without maintenance in the horizon.
    """

    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        entries = tuple(int(a) for a in self.assignment)
        if any(a < 0 for a in entries):
            raise ValueError("plan entries must be 0 (postponed) or a period >= 1")
        object.__setattr__(self, "assignment", entries)

    def __len__(self) -> int:
        return len(self.assignment)

    @property
    def num_scheduled(self) -> int:
        return sum(1 for a in self.assignment if a != POSTPONED)

    @property
    def num_postponed(self) -> int:
        return len(self.assignment) - self.num_scheduled

    def validate_for(self, horizon: Horizon) -> None:
        if any(a > horizon.num_periods for a in self.assignment):
            raise ValueError("scheduled period outside the planning horizon")


@dataclass(frozen=True, eq=False)
class DetDiagnostics:
    """Solution detail extracted from the deterministic model.

    All arrays are indexed 0-based; ``start[j]`` is the scheduled period
    (1-based) or 0 for a postponed railcar.
    """

    start: np.ndarray
    earliness: np.ndarray
    tardiness: np.ndarray
    interval_violation: np.ndarray
    sla_shortfall: np.ndarray
    extra_capacity: np.ndarray
    operational: np.ndarray  # (railcars, periods) 0/1


def default_costs() -> CostParams:
    """Baseline cost set used by the line presets.

    The shortfall penalty defaults to the corrective cost (the equal-ratio
    case); pick another ratio with :func:`apply_case`.
    """
    return CostParams(c_o=2.0, c_s=40.0, c_p=8.0, c_c=40.0, c_a=8.0, c_v=4.0, y_p=3, y_c=5)


_CASE_RATIO = {CostCase.CASE1: 1.5, CostCase.CASE2: 1.0, CostCase.CASE3: 2.0 / 3.0}


def apply_case(costs_base: CostParams, case: CostCase | str) -> CostParams:
    """Copy of ``costs_base`` with the shortfall penalty set by the case ratio."""
    case = CostCase(case)
    return replace(costs_base, c_s=_CASE_RATIO[case] * costs_base.c_c)


def preset_line(line: Line | str) -> Instance:
    """Instance preset for a metro line: 28-period week, line SLA, fleet and track.

    Initial ages are left unset; costs default to the equal-ratio case.
    """
    line = Line(line)
    horizon = Horizon(days=7, periods_per_day=4)
    table = SLA_TABLE[line]
    week = ["weekday"] * 5 + ["saturday", "sunday"]
    requirements: list[int] = []
    for day in week:
        requirements.extend(table[day])
    return Instance(
        horizon=horizon,
        sla=SlaSchedule(tuple(requirements)),
        costs=default_costs(),
        fleet=FleetSpec(
            num_railcars=FLEET_SIZE[line],
            track_capacity=TRACK_CAPACITY[line],
        ),
        label=line.value,
    )


def sample_fleet_ages(profile: FleetProfile | str, n: int, rng_seed: int) -> tuple[int, ...]:
    """Draw ``n`` integer initial ages uniformly from the profile's range.

    The range endpoints are inclusive and the draw is reproducible for a
    given seed.
    """
    if n < 1:
        raise ValueError("need at least one railcar")
    lo, hi = AGE_RANGES[FleetProfile(profile)]
    rng = np.random.default_rng(rng_seed)
    return tuple(int(a) for a in rng.integers(lo, hi, size=n, endpoint=True))


def instance_to_dict(instance: Instance) -> dict:
    """JSON-ready representation of an instance."""
    ages = instance.fleet.initial_ages
    return {
        "label": instance.label,
        "horizon": {
            "days": instance.horizon.days,
            "periods_per_day": instance.horizon.periods_per_day,
        },
        "sla": list(instance.sla.requirements),
        "costs": {
            "c_o": instance.costs.c_o,
            "c_s": instance.costs.c_s,
            "c_p": instance.costs.c_p,
            "c_c": instance.costs.c_c,
            "c_a": instance.costs.c_a,
            "c_v": instance.costs.c_v,
            "y_p": instance.costs.y_p,
            "y_c": instance.costs.y_c,
        },
        "fleet": {
            "num_railcars": instance.fleet.num_railcars,
            "track_capacity": instance.fleet.track_capacity,
            "initial_ages": None if ages is None else list(ages),
        },
    }


def instance_from_dict(data: dict) -> Instance:
    """Inverse of :func:`instance_to_dict`."""
    horizon = Horizon(**data["horizon"])
    costs = CostParams(**data["costs"])
    fleet_data = dict(data["fleet"])
    ages = fleet_data.pop("initial_ages", None)
    fleet = FleetSpec(initial_ages=None if ages is None else tuple(ages), **fleet_data)
    return Instance(
        horizon=horizon,
        sla=SlaSchedule(tuple(data["sla"])),
        costs=costs,
        fleet=fleet,
        label=data.get("label", ""),
    )
