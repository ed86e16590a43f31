"""Sample-average-approximation harness.

Runs M independent in-sample replications of the stochastic model, keeps
the plan with the smallest in-sample objective, and scores it on a fresh,
larger out-of-sample set. The replication objectives give a Student-t
confidence interval around the statistical lower bound; the out-of-sample
costs give a normal-quantile interval around the upper bound. The spread
between the outer interval ends is reported as a pessimistic optimality
gap.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .domain import Instance, MaintenancePlan
from .evaluation import (
    ConfidenceInterval,
    KpiSummary,
    evaluate_out_of_sample,
    ub_confidence_interval,
)
from .milp import SolveOptions, SolveStatus
from .reliability import WeibullParams
from .scenarios import ScenarioSet, derive_seed, generate_scenarios
from .stochastic import ObjectiveMode, solve_stochastic

logger = logging.getLogger(__name__)

__all__ = [
    "SaaConfig",
    "Replication",
    "SaaResult",
    "run_saa",
    "lb_confidence_interval",
    "pessimistic_gap",
]


@dataclass
class SaaConfig:
    """Sample sizes, significance level and solver settings for one run.

    ``mode`` defaults to the per-failure corrective charge so that the
    in-sample objective measures the same quantity the out-of-sample
    evaluator reports; switch to PER_PERIOD for the heavier postponement
    charging.
    """

    n_in: int = 150
    m_reps: int = 5
    n_out: int = 1000
    theta: float = 0.05
    master_seed: int = 0
    mode: ObjectiveMode = ObjectiveMode.PER_FAILURE
    solve_options: SolveOptions = field(default_factory=SolveOptions)
    rerank_out_of_sample: bool = False

    def __post_init__(self) -> None:
        if self.m_reps < 2:
            raise ValueError("need at least two replications for a t-interval")
        if self.n_out < 2:
            raise ValueError("need at least two out-of-sample scenarios")
        if self.n_in < 1:
            raise ValueError("in-sample size must be positive")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class Replication:
    objective: float
    plan: MaintenancePlan
    status: SolveStatus
    wall_time: float
    seed: int


@dataclass(eq=False)
class SaaResult:
    replications: tuple[Replication, ...]
    chosen_index: int
    plan: MaintenancePlan
    lb_ci: ConfidenceInterval
    ub_ci: ConfidenceInterval
    gap_percent: float
    kpis: KpiSummary
    omegas: np.ndarray
    out_sample_hash: str
    in_sample_time: float

    @property
    def objectives(self) -> tuple[float, ...]:
        return tuple(r.objective for r in self.replications)


def lb_confidence_interval(values, theta: float = 0.05) -> ConfidenceInterval:
    """Student-t interval around the mean in-sample objective.

    The spread estimate is the standard error of the mean over the M
    replications, with M - 1 degrees of freedom.
    """
    vals = np.asarray(values, dtype=float)
    if vals.size < 2:
        raise ValueError("need at least two replication objectives")
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie strictly inside (0, 1)")
    mean = float(vals.mean())
    se = float(np.sqrt(np.sum((vals - mean) ** 2) / (vals.size * (vals.size - 1))))
    t = float(stats.t.ppf(1.0 - theta / 2.0, vals.size - 1))
    return ConfidenceInterval(lo=mean - t * se, hi=mean + t * se, level=1.0 - theta)


def pessimistic_gap(lb: ConfidenceInterval, ub: ConfidenceInterval) -> float:
    """Conservative optimality-gap estimate in percent.

    Spread between the upper end of the upper-bound interval and the lower
    end of the lower-bound interval, relative to the former.
    """
    if ub.hi <= 0:
        raise ValueError("upper-bound interval must have a positive upper end")
    return 100.0 * (ub.hi - lb.lo) / ub.hi


def run_saa(
    instance: Instance,
    weibull: WeibullParams,
    cfg: SaaConfig,
    out_sample: ScenarioSet | None = None,
) -> SaaResult:
    """Full SAA procedure for one instance.

    In-sample replication seeds and the out-of-sample seed are disjoint
    children of ``cfg.master_seed``. An externally supplied ``out_sample``
    set (e.g. shared across methods for a fair comparison) is used as-is.
    """
    replications: list[Replication] = []
    for m in range(cfg.m_reps):
        seed = derive_seed(cfg.master_seed, "saa-in", m)
        scen = generate_scenarios(instance, weibull, cfg.n_in, seed)
        plan, result = solve_stochastic(instance, scen, cfg.mode, cfg.solve_options)
        replications.append(
            Replication(
                objective=result.objective_value,
                plan=plan,
                status=result.status,
                wall_time=result.wall_time,
                seed=seed,
            )
        )
        logger.info(
            "replication %d/%d: objective %.2f (%s, %.1fs)",
            m + 1,
            cfg.m_reps,
            result.objective_value,
            result.status.value,
            result.wall_time,
        )

    objectives = np.array([r.objective for r in replications])
    lb_ci = lb_confidence_interval(objectives, cfg.theta)
    chosen = int(np.argmin(objectives))

    if out_sample is None:
        out_sample = generate_scenarios(
            instance, weibull, cfg.n_out, derive_seed(cfg.master_seed, "saa-out")
        )

    if cfg.rerank_out_of_sample:
        # optional: re-rank every candidate by its fresh-sample mean cost
        means = []
        for rep in replications:
            _, omegas_m = evaluate_out_of_sample(rep.plan, instance, out_sample)
            means.append(float(omegas_m.mean()))
        chosen = int(np.argmin(means))
        logger.info("re-ranked candidates on the out-of-sample set: chose %d", chosen + 1)

    plan = replications[chosen].plan
    kpis, omegas = evaluate_out_of_sample(plan, instance, out_sample)
    ub_ci = ub_confidence_interval(omegas, cfg.theta)
    return SaaResult(
        replications=tuple(replications),
        chosen_index=chosen,
        plan=plan,
        lb_ci=lb_ci,
        ub_ci=ub_ci,
        gap_percent=pessimistic_gap(lb_ci, ub_ci),
        kpis=kpis,
        omegas=omegas,
        out_sample_hash=out_sample.content_hash(),
        in_sample_time=float(sum(r.wall_time for r in replications)),
    )
