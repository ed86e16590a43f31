"""Predictive railcar-maintenance scheduling under failure uncertainty.

Library layout:

* :mod:`railsched.domain` -- instances, presets, cost cases, plans
* :mod:`railsched.reliability` -- Weibull remaining-useful-life math
* :mod:`railsched.scenarios` -- reproducible failure-scenario sets
* :mod:`railsched.milp` -- solver-agnostic model building and solving
* :mod:`railsched.deterministic` -- preventive-maintenance baseline MILP
* :mod:`railsched.stochastic` -- two-stage scenario MILP
* :mod:`railsched.evaluation` -- out-of-sample plan scoring and KPIs
* :mod:`railsched.saa` -- sample-average-approximation harness
* :mod:`railsched.experiments` -- experiment matrix and CSV emission
* :mod:`railsched.reporting` -- figures and report summaries
"""

from .domain import (
    CostCase,
    CostParams,
    DetDiagnostics,
    FleetProfile,
    FleetSpec,
    Horizon,
    Instance,
    Line,
    MaintenancePlan,
    POSTPONED,
    SlaSchedule,
    apply_case,
    default_costs,
    preset_line,
    sample_fleet_ages,
)
from .reliability import (
    MaintenanceInterval,
    WeibullParams,
    conditional_failure_cdf,
    maintenance_interval,
    reliability_time,
    sample_failure_time,
)
from .scenarios import ScenarioSet, derive_seed, generate_scenarios
from .milp import ModelBuilder, SolveOptions, SolveResult, SolveStatus, SolverError, solve
from .deterministic import (
    DetModelInput,
    build_deterministic,
    intervals_from_reliability,
    reconstruct_objective,
    solve_deterministic,
)
from .stochastic import ObjectiveMode, build_stochastic, pin_first_stage, solve_stochastic
from .evaluation import (
    ConfidenceInterval,
    EvaluationRecord,
    KpiSummary,
    MaintenanceKind,
    evaluate_out_of_sample,
    evaluate_plan,
    ub_confidence_interval,
)
from .saa import SaaConfig, SaaResult, lb_confidence_interval, pessimistic_gap, run_saa
from .experiments import (
    ExperimentConfig,
    ResultRow,
    run_experiment,
    scale_instance,
    write_results,
    write_trajectories,
)

__version__ = "0.1.0"
