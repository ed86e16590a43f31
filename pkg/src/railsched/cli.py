"""Command-line front end.

Subcommands cover the whole pipeline: instance presets, scenario
generation, single solves of either model, plan evaluation, the full
experiment matrix and report rendering. Progress goes to stderr; data goes
to the requested files (or stdout where noted). Exit codes: 0 on success,
1 when any experiment row failed, 2 on configuration errors.
"""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import click

from .domain import (
    CostCase,
    FleetProfile,
    Line,
    MaintenancePlan,
    apply_case,
    default_costs,
    instance_from_dict,
    instance_to_dict,
    preset_line,
    sample_fleet_ages,
)
from .deterministic import DetModelInput, build_deterministic, intervals_from_reliability, solve_deterministic
from .evaluation import evaluate_out_of_sample, ub_confidence_interval
from .experiments import (
    METHODS,
    ExperimentConfig,
    run_experiment,
    scale_instance,
    write_results,
    write_trajectories,
)
from .milp import SolveOptions
from .reliability import WeibullParams
from .reporting import render_report
from .saa import SaaConfig
from .scenarios import generate_scenarios, read_scenarios, write_scenarios
from .stochastic import ObjectiveMode, build_stochastic, solve_stochastic

logger = logging.getLogger("railsched")

_MODE_CHOICES = [m.value for m in ObjectiveMode]


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load_instance(path: str):
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def _load_plan(path: str) -> MaintenancePlan:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return MaintenancePlan(tuple(data["assignment"]))


def _dump_json(data, output: str | None) -> None:
    text = json.dumps(data, indent=2)
    if output is None or output == "-":
        click.echo(text)
    else:
        Path(output).write_text(text + "\n", encoding="utf-8")


def _solve_options(time_limit: float, mip_gap: float | None) -> SolveOptions:
    opts = SolveOptions(time_limit=time_limit)
    if mip_gap is not None:
        opts.relative_mip_gap = mip_gap
    return opts


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging on stderr.")
def main(verbose: bool) -> None:
    """Predictive railcar-maintenance scheduling toolkit."""
    _setup_logging(verbose)


@main.command()
@click.option("--line", type=click.Choice([l.value for l in Line]), required=True)
@click.option("--fleet", type=click.Choice([p.value for p in FleetProfile]), default=None,
              help="Sample initial ages from this profile.")
@click.option("--ages-seed", type=int, default=None, help="Seed for the age sampling.")
@click.option("--case", "cost_case", type=click.Choice([c.value for c in CostCase]),
              default=CostCase.CASE2.value, show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True,
              help="Down-scale fleet, SLA and track capacity for desk runs.")
@click.option("-o", "--output", default=None, help="Instance JSON path (default stdout).")
def preset(line, fleet, ages_seed, cost_case, scale, output) -> None:
    """Dump a metro-line instance preset as JSON."""
    instance = preset_line(line)
    if scale != 1.0:
        instance = scale_instance(instance, scale)
    instance = instance.with_costs(apply_case(default_costs(), cost_case))
    label = f"{line}-case{cost_case}"
    if fleet is not None:
        if ages_seed is None:
            raise click.UsageError("--ages-seed is required when --fleet is given")
        ages = sample_fleet_ages(fleet, instance.num_railcars, ages_seed)
        instance = instance.with_ages(ages)
        label = f"{line}-{fleet}-case{cost_case}"
    instance = replace(instance, label=label)
    _dump_json(instance_to_dict(instance), output)


@main.command()
@click.option("-i", "--instance", "instance_path", required=True)
@click.option("--alpha", type=float, default=50.0, show_default=True)
@click.option("--beta", type=float, default=5.0, show_default=True)
@click.option("-k", "--num", type=int, required=True, help="Number of scenarios.")
@click.option("--seed", type=int, required=True)
@click.option("-o", "--output", required=True, help="Scenario CSV path.")
def scenarios(instance_path, alpha, beta, num, seed, output) -> None:
    """Generate a failure-scenario set and export it as CSV."""
    instance = _load_instance(instance_path)
    scen = generate_scenarios(instance, WeibullParams(alpha, beta), num, seed)
    write_scenarios(scen, output)
    logger.info("wrote %d x %d scenario set to %s", scen.num_railcars, num, output)


@main.command("solve-det")
@click.option("-i", "--instance", "instance_path", required=True)
@click.option("-R", "--reliability", type=float, default=0.8, show_default=True,
              help="Reliability level for the maintenance windows.")
@click.option("--alpha", type=float, default=50.0, show_default=True)
@click.option("--beta", type=float, default=5.0, show_default=True)
@click.option("--time-limit", type=float, default=10800.0, show_default=True)
@click.option("--mip-gap", type=float, default=None)
@click.option("--lp-out", default=None, help="Also export the model in LP format.")
@click.option("-o", "--output", default=None, help="Plan JSON path (default stdout).")
def solve_det(instance_path, reliability, alpha, beta, time_limit, mip_gap, lp_out, output) -> None:
    """Solve the deterministic preventive-maintenance model."""
    instance = _load_instance(instance_path)
    weibull = WeibullParams(alpha, beta)
    inp = DetModelInput(instance, intervals_from_reliability(instance, weibull, reliability))
    if lp_out:
        Path(lp_out).write_text(build_deterministic(inp).builder.to_lp_string(), encoding="utf-8")
    plan, diag, result = solve_deterministic(inp, _solve_options(time_limit, mip_gap))
    _dump_json(
        {
            "assignment": list(plan.assignment),
            "objective": result.objective_value,
            "status": result.status.value,
            "wall_time_s": result.wall_time,
            "reliability": reliability,
            "sla_shortfall_total": float(diag.sla_shortfall.sum()),
        },
        output,
    )


@main.command("solve-stoch")
@click.option("-i", "--instance", "instance_path", required=True)
@click.option("-s", "--scenarios", "scenarios_path", required=True)
@click.option("--corrective-charge", type=click.Choice(_MODE_CHOICES),
              default=ObjectiveMode.PER_PERIOD.value, show_default=True,
              help="How postponed failing railcars accrue corrective cost.")
@click.option("--time-limit", type=float, default=10800.0, show_default=True)
@click.option("--mip-gap", type=float, default=None)
@click.option("--lp-out", default=None, help="Also export the model in LP format.")
@click.option("-o", "--output", default=None, help="Plan JSON path (default stdout).")
def solve_stoch(instance_path, scenarios_path, corrective_charge, time_limit, mip_gap,
                lp_out, output) -> None:
    """Solve the two-stage stochastic model on a scenario set."""
    instance = _load_instance(instance_path)
    scen = read_scenarios(scenarios_path)
    mode = ObjectiveMode(corrective_charge)
    if lp_out:
        Path(lp_out).write_text(
            build_stochastic(instance, scen, mode).builder.to_lp_string(), encoding="utf-8"
        )
    plan, result = solve_stochastic(instance, scen, mode, _solve_options(time_limit, mip_gap))
    _dump_json(
        {
            "assignment": list(plan.assignment),
            "objective": result.objective_value,
            "status": result.status.value,
            "wall_time_s": result.wall_time,
            "corrective_charge": mode.value,
        },
        output,
    )


@main.command()
@click.option("-i", "--instance", "instance_path", required=True)
@click.option("--plan", "plan_path", required=True)
@click.option("-s", "--scenarios", "scenarios_path", required=True)
@click.option("--theta", type=float, default=0.05, show_default=True)
@click.option("--trajectories", "trajectories_path", default=None,
              help="Also export per-period KPI trajectories as CSV.")
@click.option("-o", "--output", default=None, help="KPI JSON path (default stdout).")
def evaluate(instance_path, plan_path, scenarios_path, theta, trajectories_path, output) -> None:
    """Score a fixed plan on a scenario set."""
    instance = _load_instance(instance_path)
    plan = _load_plan(plan_path)
    scen = read_scenarios(scenarios_path)
    kpis, omegas = evaluate_out_of_sample(plan, instance, scen)
    ub = ub_confidence_interval(omegas, theta)
    if trajectories_path:
        write_trajectories({"plan": kpis}, trajectories_path)
    _dump_json(
        {
            "n_prev": kpis.n_prev,
            "n_cor": kpis.n_cor,
            "sla_v": kpis.sla_v,
            "track_v": kpis.track_v,
            "cost": kpis.cost,
            "ub_lo": ub.lo,
            "ub_hi": ub.hi,
            "level": ub.level,
            "num_scenarios": kpis.num_scenarios,
        },
        output,
    )


def _config_from_file(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise click.UsageError(f"config {path} must hold a JSON object")
    return data


@main.command()
@click.option("--config", "config_path", default=None, help="JSON config file.")
@click.option("--seed", type=int, required=True, help="Master seed (mandatory).")
@click.option("-o", "--outdir", required=True)
@click.option("--line", "lines", multiple=True, type=click.Choice([l.value for l in Line]))
@click.option("--fleet", "fleets", multiple=True,
              type=click.Choice([p.value for p in FleetProfile]))
@click.option("--case", "cases", multiple=True, type=click.Choice([c.value for c in CostCase]))
@click.option("--method", "methods", multiple=True, type=click.Choice(list(METHODS)))
@click.option("--scale", type=float, default=None)
@click.option("--n-in", type=int, default=None)
@click.option("--m-reps", type=int, default=None)
@click.option("--n-out", type=int, default=None)
@click.option("--theta", type=float, default=None)
@click.option("--corrective-charge", type=click.Choice(_MODE_CHOICES), default=None)
@click.option("--rerank/--no-rerank", default=None,
              help="Re-rank candidate plans on the out-of-sample set.")
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--time-limit", type=float, default=None)
@click.option("--mip-gap", type=float, default=None)
@click.option("--threads", type=int, default=None)
@click.option("--solver-seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
def experiment(config_path, seed, outdir, lines, fleets, cases, methods, scale, n_in,
               m_reps, n_out, theta, corrective_charge, rerank, alpha, beta, time_limit,
               mip_gap, threads, solver_seed, workers) -> None:
    """Run the experiment matrix and write results + trajectory CSVs.

    Every config-file field has a flag override; flags win. The config
    schema is documented in the README.
    """
    raw = _config_from_file(config_path) if config_path else {}
    saa_raw = dict(raw.get("saa", {}))
    solver_raw = dict(raw.get("solver", {}))
    weibull_raw = dict(raw.get("weibull", {}))

    def pick(flag, key, table, default):
        if flag not in (None, ()):
            return flag
        return table.get(key, default)

    try:
        solve_opts = SolveOptions(
            time_limit=float(pick(time_limit, "time_limit", solver_raw, 10800.0)),
            relative_mip_gap=pick(mip_gap, "mip_gap", solver_raw, None),
            thread_count=int(pick(threads, "threads", solver_raw, 1)),
            solver_seed=pick(solver_seed, "seed", solver_raw, None),
        )
        saa_cfg = SaaConfig(
            n_in=int(pick(n_in, "n_in", saa_raw, 30)),
            m_reps=int(pick(m_reps, "m_reps", saa_raw, 3)),
            n_out=int(pick(n_out, "n_out", saa_raw, 300)),
            theta=float(pick(theta, "theta", saa_raw, 0.05)),
            mode=ObjectiveMode(
                pick(corrective_charge, "corrective_charge", saa_raw,
                     ObjectiveMode.PER_FAILURE.value)
            ),
            rerank_out_of_sample=bool(pick(rerank, "rerank", saa_raw, False)),
            solve_options=solve_opts,
        )
        cfg = ExperimentConfig(
            master_seed=seed,
            lines=tuple(pick(lines, "lines", raw, [l.value for l in Line])),
            fleet_profiles=tuple(pick(fleets, "fleet_profiles", raw,
                                      [p.value for p in FleetProfile])),
            cases=tuple(pick(cases, "cases", raw, [c.value for c in CostCase])),
            methods=tuple(pick(methods, "methods", raw, list(METHODS))),
            scale=float(pick(scale, "scale", raw, 0.2)),
            weibull=WeibullParams(
                alpha=float(pick(alpha, "alpha", weibull_raw, 50.0)),
                beta=float(pick(beta, "beta", weibull_raw, 5.0)),
            ),
            saa=saa_cfg,
            workers=int(pick(workers, "workers", raw, 1)),
        )
    except (ValueError, KeyError) as exc:
        raise click.UsageError(f"invalid configuration: {exc}") from exc

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    rows, trajectories = run_experiment(cfg)
    write_results(rows, out / "results.csv")
    for (line, fleet, case), kpis_by_method in trajectories.items():
        if kpis_by_method:
            write_trajectories(
                kpis_by_method, out / f"trajectories-{line}-{fleet}-case{case}.csv"
            )
    failed = [r for r in rows if r.status != "ok"]
    for row in failed:
        logger.error("row %s/%s/case %s %s: %s", row.line, row.fleet, row.case,
                     row.method, row.status)
    logger.info("results written to %s (%d rows, %d failed)", out / "results.csv",
                len(rows), len(failed))
    if failed:
        sys.exit(1)


@main.command()
@click.option("--results", "results_path", required=True)
@click.option("--trajectories", "trajectories_path", default=None)
@click.option("-o", "--outdir", required=True)
def report(results_path, trajectories_path, outdir) -> None:
    """Render figures and a summary CSV from experiment output."""
    written = render_report(results_path, trajectories_path, outdir)
    for path in written:
        click.echo(str(path))


if __name__ == "__main__":
    main()
