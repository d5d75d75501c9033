"""Command-line front end.

Commands: plan, track, sweep, fuzzy eval, config. All run parameters come
from a single TOML config file; flags only pick the command, the config
path, and the output directory. Outputs are byte-identical across reruns
with the same config and seed, except for '#'-prefixed metadata lines
(which carry the timestamp).

Exit codes: 0 success, 2 config error, 3 scenario validation failure,
4 plan/scenario mismatch, 5 internal error.
"""

from __future__ import annotations

import argparse
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional, Sequence

from .config import ConfigError, RunConfig, build_controller, load_config, render_default_config, resolve_scenario
from .fuzzy import controller_step, rule_activations
from .planner import (
    AnnealSchedule,
    EnergyParams,
    PathPlan,
    PlanError,
    anneal,
    auto_t0,
    energy,
    init_plan,
    read_plan,
    reported_length,
    write_plan,
    write_trace,
)
from .simloop import NoiseModel, offset_start_pose, run_tracking, summarize, summary_to_json, write_log_csv
from .world import Scenario, ScenarioError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SCENARIO = 3
EXIT_MISMATCH = 4
EXIT_INTERNAL = 5


class PlanMismatchError(ValueError):
    """Plan file endpoints do not match the scenario start/goal."""


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _energy_params(cfg: RunConfig, scenario: Scenario) -> EnergyParams:
    margin = scenario.margin if cfg.planner.margin == "scenario" else float(cfg.planner.margin)
    return EnergyParams(
        delta_l=cfg.planner.delta_l,
        penalty_scale=cfg.planner.penalty_scale,
        margin=margin,
    )


def _resolve_schedule(
    cfg: RunConfig,
    scenario: Scenario,
    init: PathPlan,
    params: EnergyParams,
    iterations: Optional[int] = None,
    seed: Optional[int] = None,
) -> AnnealSchedule:
    sched = cfg.planner.schedule
    seed = cfg.seed if seed is None else seed
    t0 = sched.t0
    if t0 == "auto":
        t0 = auto_t0(scenario, init, params, sched.perturb_sigma, seed=seed)
    return AnnealSchedule(
        t0=float(t0),
        alpha=sched.alpha,
        iterations=sched.iterations if iterations is None else iterations,
        perturb_sigma=sched.perturb_sigma,
        seed=seed,
    )


def _plan_once(
    scenario: Scenario,
    cfg: RunConfig,
    iterations: Optional[int] = None,
    seed: Optional[int] = None,
):
    seed = cfg.seed if seed is None else seed
    params = _energy_params(cfg, scenario)
    init = init_plan(scenario, cfg.planner.waypoints, cfg.planner.init, seed=seed)
    schedule = _resolve_schedule(cfg, scenario, init, params, iterations=iterations, seed=seed)
    best, trace = anneal(scenario, init, schedule, params)
    return best, trace, params, schedule


def cmd_plan(config_path: str, outdir: str) -> int:
    cfg = load_config(config_path)
    scenario = resolve_scenario(cfg, os.path.dirname(os.path.abspath(config_path)))
    best, trace, params, schedule = _plan_once(scenario, cfg)
    breakdown = energy(best, scenario, params)
    length = reported_length(best)
    os.makedirs(outdir, exist_ok=True)
    meta = {
        "scenario": scenario.name,
        "seed": str(schedule.seed),
        "iterations": str(schedule.iterations),
        "energy": f"f_l={breakdown.f_l!r} f_z={breakdown.f_z!r} f={breakdown.f!r}",
        "length_m": repr(length),
        "generated": _timestamp(),
    }
    write_plan(best, os.path.join(outdir, "plan.txt"), meta)
    write_trace(trace, os.path.join(outdir, "trace.csv"), meta)
    print(f"energy f_l={breakdown.f_l!r} f_z={breakdown.f_z!r} f={breakdown.f!r} length_m={length!r}")
    return EXIT_OK


def cmd_track(config_path: str, plan_path: str, outdir: str) -> int:
    cfg = load_config(config_path)
    scenario = resolve_scenario(cfg, os.path.dirname(os.path.abspath(config_path)))
    plan = read_plan(plan_path)
    tol = 1e-9
    sx, sy = scenario.start_xy
    gx, gy = scenario.goal
    (px, py), (qx, qy) = plan.waypoints[0], plan.waypoints[-1]
    if abs(px - sx) > tol or abs(py - sy) > tol:
        raise PlanMismatchError("plan start does not match the scenario start")
    if abs(qx - gx) > tol or abs(qy - gy) > tol:
        raise PlanMismatchError("plan endpoint does not match the scenario goal")
    controller = build_controller(cfg)
    noise = NoiseModel(sigma_v=cfg.sim.sigma_v, sigma_omega=cfg.sim.sigma_omega, seed=cfg.seed)
    start = offset_start_pose(plan, cfg.sim.start_offset_mm, cfg.sim.start_angle_offset_deg)
    log = run_tracking(
        scenario,
        plan,
        cfg.behavior,
        controller,
        noise,
        cfg.sim.dt,
        cfg.sim.steps,
        geometry=cfg.robot,
        goal_radius=cfg.sim.goal_radius,
        lookahead=cfg.sim.lookahead,
        start_pose=start,
    )
    summary = summarize(log)
    os.makedirs(outdir, exist_ok=True)
    meta = {
        "scenario": scenario.name,
        "seed": str(cfg.seed),
        "plan": os.path.basename(plan_path),
        "generated": _timestamp(),
    }
    write_log_csv(log, os.path.join(outdir, "log.csv"), meta)
    text = summary_to_json(summary)
    with open(os.path.join(outdir, "summary.json"), "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    print(text)
    return EXIT_OK


def _sweep_run(args: tuple[Scenario, RunConfig, int, int]) -> float:
    scenario, cfg, budget, seed = args
    best, _, _, _ = _plan_once(scenario, cfg, iterations=budget, seed=seed)
    return reported_length(best)


@dataclass(frozen=True)
class SweepRow:
    budget: int
    lengths: tuple[float, ...]  # per-seed reported lengths, in seed order
    median: float
    best: float


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]

    def __post_init__(self) -> None:
        budgets = [row.budget for row in self.rows]
        if any(a >= b for a, b in zip(budgets, budgets[1:])):
            raise ValueError("sweep budgets must be strictly ascending")


def cmd_sweep(config_path: str, outdir: str, jobs: int) -> int:
    cfg = load_config(config_path)
    scenario = resolve_scenario(cfg, os.path.dirname(os.path.abspath(config_path)))
    grid = [(budget, seed) for budget in cfg.sweep.budgets for seed in cfg.sweep.seeds]
    tasks = [(scenario, cfg, budget, seed) for budget, seed in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            lengths = list(pool.map(_sweep_run, tasks))
    else:
        lengths = [_sweep_run(task) for task in tasks]
    by_budget: dict[int, list[float]] = {budget: [] for budget in cfg.sweep.budgets}
    for (budget, _), length in zip(grid, lengths):
        by_budget[budget].append(length)
    report = SweepReport(
        tuple(
            SweepRow(
                budget=budget,
                lengths=tuple(by_budget[budget]),
                median=statistics.median(by_budget[budget]),
                best=min(by_budget[budget]),
            )
            for budget in cfg.sweep.budgets
        )
    )
    lines = [f"# scenario: {scenario.name}", f"# generated: {_timestamp()}", "budget,seed,length_m"]
    for (budget, seed), length in zip(grid, lengths):
        lines.append(f"{budget},{seed},{repr(length)}")
    for row in report.rows:
        lines.append(f"{row.budget},median,{repr(row.median)}")
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "sweep.csv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    for row in report.rows:
        print(f"budget={row.budget} median_length_m={row.median!r} best_length_m={row.best!r}")
    return EXIT_OK


def cmd_fuzzy_eval(angle: float, center: float, config_path: Optional[str]) -> int:
    cfg = load_config(config_path) if config_path else RunConfig()
    controller = build_controller(cfg)
    output = controller_step(controller, angle, center)
    print(f"output={output!r}")
    for rule, act in rule_activations(controller, angle, center):
        print(f"rule {rule.angle_set}&{rule.center_set}->{rule.output_set}: {act!r}")
    return EXIT_OK


def cmd_config_defaults() -> int:
    sys.stdout.write(render_default_config())
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wayforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="plan a path with simulated annealing")
    p_plan.add_argument("-c", "--config", required=True)
    p_plan.add_argument("-o", "--out", default=".")

    p_track = sub.add_parser("track", help="track a planned path in closed loop")
    p_track.add_argument("-c", "--config", required=True)
    p_track.add_argument("-p", "--plan", required=True)
    p_track.add_argument("-o", "--out", default=".")

    p_sweep = sub.add_parser("sweep", help="sweep annealing budgets over seeds")
    p_sweep.add_argument("-c", "--config", required=True)
    p_sweep.add_argument("-o", "--out", default=".")
    p_sweep.add_argument("--jobs", type=int, default=int(os.environ.get("WAYFORGE_JOBS", "1")))

    p_fuzzy = sub.add_parser("fuzzy", help="fuzzy controller utilities")
    fuzzy_sub = p_fuzzy.add_subparsers(dest="fuzzy_command", required=True)
    p_eval = fuzzy_sub.add_parser("eval", help="evaluate the controller for one input pair")
    p_eval.add_argument("--angle", type=float, required=True, help="angle deviation, degrees")
    p_eval.add_argument("--center", type=float, required=True, help="center deviation, millimeters")
    p_eval.add_argument("-c", "--config")

    p_config = sub.add_parser("config", help="configuration utilities")
    p_config.add_argument("--defaults", action="store_true", help="print the default config")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "plan":
            return cmd_plan(args.config, args.out)
        if args.command == "track":
            return cmd_track(args.config, args.plan, args.out)
        if args.command == "sweep":
            if args.jobs < 1:
                raise ConfigError("--jobs: must be >= 1")
            return cmd_sweep(args.config, args.out, args.jobs)
        if args.command == "fuzzy":
            return cmd_fuzzy_eval(args.angle, args.center, args.config)
        if args.command == "config":
            if args.defaults:
                return cmd_config_defaults()
            parser.error("config: nothing to do (try --defaults)")
        parser.error(f"unknown command {args.command!r}")
        return EXIT_INTERNAL
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except (PlanMismatchError, PlanError) as exc:
        print(f"plan error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except Exception as exc:  # noqa: BLE001 - the CLI maps unexpected errors to exit 5
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
