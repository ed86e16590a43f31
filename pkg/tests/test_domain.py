import dataclasses
import math
from fractions import Fraction

import numpy as np
import pytest

from railsched.domain import (
    CostCase,
    CostParams,
    FleetProfile,
    FleetSpec,
    Horizon,
    Instance,
    MaintenancePlan,
    SlaSchedule,
    apply_case,
    default_costs,
    instance_from_dict,
    instance_to_dict,
    preset_line,
    sample_fleet_ages,
)


class TestPresets:
    def test_m1b_weekday_sla(self):
        inst = preset_line("M1B")
        assert inst.sla.requirements[0:4] == (0, 45, 50, 49)

    def test_m4_saturday_sla(self):
        inst = preset_line("M4")
        assert inst.sla.requirements[20:24] == (11, 55, 66, 56)

    def test_m1b_sunday_sla(self):
        inst = preset_line("M1B")
        assert inst.sla.requirements[24:28] == (12, 40, 43, 41)

    def test_fleet_and_track_constants(self):
        m1b, m4 = preset_line("M1B"), preset_line("M4")
        assert (m1b.num_railcars, m1b.fleet.track_capacity) == (57, 12)
        assert (m4.num_railcars, m4.fleet.track_capacity) == (74, 15)

    def test_weekly_totals(self):
        # weekday block x5 plus Saturday plus Sunday
        assert preset_line("M1B").sla.total == 5 * 144 + 151 + 136 == 1007
        assert preset_line("M4").sla.total == 5 * 193 + 188 + 179 == 1332

    def test_horizon_shape(self):
        inst = preset_line("M1B")
        assert inst.horizon.num_periods == 28
        assert len(inst.sla) == 28

    def test_ages_left_unset(self):
        assert preset_line("M1B").fleet.initial_ages is None


class TestApplyCase:
    def test_case1(self):
        costs = apply_case(default_costs(), CostCase.CASE1)
        assert costs.c_s == 60.0

    def test_case2(self):
        assert apply_case(default_costs(), "2").c_s == 40.0

    def test_case3_exact_rational(self):
        costs = apply_case(default_costs(), CostCase.CASE3)
        assert math.isclose(costs.c_s, float(Fraction(2, 3) * 40), abs_tol=1e-9)

    def test_other_fields_unchanged_and_input_not_mutated(self):
        base = default_costs()
        out = apply_case(base, CostCase.CASE1)
        assert base.c_s == 40.0  # untouched
        for name in ("c_o", "c_p", "c_c", "c_a", "c_v", "y_p", "y_c"):
            assert getattr(out, name) == getattr(base, name)

    def test_idempotent(self):
        once = apply_case(default_costs(), CostCase.CASE3)
        twice = apply_case(once, CostCase.CASE3)
        assert once == twice

    def test_baseline_defaults(self):
        base = default_costs()
        assert (base.c_o, base.c_v, base.c_c) == (2.0, 4.0, 40.0)
        assert base.c_p == base.c_a == 8.0
        assert (base.y_p, base.y_c) == (3, 5)


class TestSampleFleetAges:
    @pytest.mark.parametrize(
        "profile,lo,hi",
        [(FleetProfile.YOUNG, 10, 20), (FleetProfile.MIXED, 10, 60), (FleetProfile.OLD, 50, 60)],
    )
    def test_support(self, profile, lo, hi):
        ages = sample_fleet_ages(profile, 500, rng_seed=7)
        assert min(ages) >= lo and max(ages) <= hi

    def test_old_bounds_large_sample(self):
        ages = sample_fleet_ages("old", 1000, rng_seed=3)
        assert min(ages) >= 50 and max(ages) <= 60

    def test_mixed_mean(self):
        # mean of the discrete uniform on [10, 60] is 35
        ages = sample_fleet_ages("mixed", 10_000, rng_seed=11)
        assert abs(np.mean(ages) - 35.0) < 1.5

    def test_deterministic_given_seed(self):
        assert sample_fleet_ages("young", 50, 42) == sample_fleet_ages("young", 50, 42)

    def test_seeds_differ(self):
        assert sample_fleet_ages("young", 10, 1) != sample_fleet_ages("young", 10, 2)

    def test_rejects_empty_fleet(self):
        with pytest.raises(ValueError):
            sample_fleet_ages("young", 0, 1)


class TestValidation:
    def test_sla_length_must_match_horizon(self):
        with pytest.raises(ValueError, match="SLA length"):
            Instance(
                horizon=Horizon(days=1, periods_per_day=4),
                sla=SlaSchedule((1, 2)),
                costs=default_costs(),
                fleet=FleetSpec(num_railcars=1, track_capacity=1),
            )

    def test_cost_orderings(self):
        with pytest.raises(ValueError):
            CostParams(c_o=1, c_s=1, c_p=50, c_c=40, c_a=1, c_v=1, y_p=3, y_c=5)
        with pytest.raises(ValueError):
            CostParams(c_o=1, c_s=1, c_p=8, c_c=40, c_a=1, c_v=1, y_p=5, y_c=5)
        with pytest.raises(ValueError):
            CostParams(c_o=-1, c_s=1, c_p=8, c_c=40, c_a=1, c_v=1, y_p=3, y_c=5)

    def test_ages_must_cover_fleet(self):
        with pytest.raises(ValueError):
            FleetSpec(num_railcars=3, track_capacity=1, initial_ages=(1, 2))
        with pytest.raises(ValueError):
            FleetSpec(num_railcars=2, track_capacity=1, initial_ages=(1, -2))

    def test_plan_entries(self):
        plan = MaintenancePlan((0, 3, 1))
        assert plan.num_scheduled == 2 and plan.num_postponed == 1
        with pytest.raises(ValueError):
            MaintenancePlan((-1, 2))
        with pytest.raises(ValueError):
            plan.validate_for(Horizon(days=1, periods_per_day=2))

    def test_require_ages(self):
        inst = preset_line("M1B")
        with pytest.raises(ValueError, match="no fleet ages"):
            inst.require_ages()
        assert inst.with_ages([1] * 57).require_ages() == (1,) * 57


def test_serialization_round_trip():
    inst = preset_line("M4").with_ages(sample_fleet_ages("mixed", 74, 5))
    inst = dataclasses.replace(inst, label="round-trip")
    assert instance_from_dict(instance_to_dict(inst)) == inst


def test_serialization_without_ages():
    inst = preset_line("M1B")
    assert instance_from_dict(instance_to_dict(inst)) == inst
