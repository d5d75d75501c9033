"""Run configuration: one declarative TOML file drives every command.

Flags only select the command, the config path, and the output directory;
everything else (scenario, planner, behaviors, fuzzy controller, simulation,
sweep grid) lives here so runs are reproducible from the file alone.
Unknown keys and out-of-range values are rejected with the offending field
named in the error.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .behaviors import BehaviorParams
from .dynamics import RobotGeometry
from .fuzzy import FuzzyController, FuzzyDefinitionError, default_controller
from .world import Scenario, load_scenario
from . import scenarios as bundled_scenarios


class ConfigError(ValueError):
    """Raised for malformed or out-of-range configuration."""


@dataclass(frozen=True)
class ScheduleSection:
    t0: object = "auto"  # "auto" or a positive number
    alpha: float = 0.995
    iterations: int = 500
    perturb_sigma: float = 0.8


@dataclass(frozen=True)
class PlannerSection:
    waypoints: int = 12
    delta_l: float = 0.5
    penalty_scale: float = 100.0
    margin: object = "scenario"  # "scenario" or a number >= 0
    init: str = "random"
    schedule: ScheduleSection = field(default_factory=ScheduleSection)


@dataclass(frozen=True)
class FuzzySection:
    rules: str = "paper3"
    output_gain: float = 1.0
    angle_universe: tuple[float, float, float] = (-10.0, 10.0, 0.1)
    center_universe: tuple[float, float, float] = (-100.0, 100.0, 1.0)
    output_universe: tuple[float, float, float] = (-10.0, 10.0, 0.1)


@dataclass(frozen=True)
class SimSection:
    dt: float = 0.01
    steps: int = 2000
    goal_radius: float = 0.1
    lookahead: float = 0.5
    sigma_v: float = 0.0
    sigma_omega: float = 0.0
    start_offset_mm: float = 0.0
    start_angle_offset_deg: float = 0.0


@dataclass(frozen=True)
class SweepSection:
    budgets: tuple[int, ...] = (100, 200, 300, 400, 500)
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10)


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "bundled:straight"
    seed: int = 0
    planner: PlannerSection = field(default_factory=PlannerSection)
    behavior: BehaviorParams = field(default_factory=BehaviorParams)
    fuzzy: FuzzySection = field(default_factory=FuzzySection)
    sim: SimSection = field(default_factory=SimSection)
    robot: RobotGeometry = field(default_factory=RobotGeometry)
    sweep: SweepSection = field(default_factory=SweepSection)


def _check_table(table: dict, allowed: tuple[str, ...], where: str) -> None:
    for key in table:
        if key not in allowed:
            raise ConfigError(f"{where}.{key}: unknown key")


def _number(table: dict, key: str, where: str, default: float, lo=None, hi=None, lo_open=False) -> float:
    value = table.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number")
    value = float(value)
    if lo is not None and hi is not None and not (lo < value <= hi if lo_open else lo <= value <= hi):
        left = "(" if lo_open else "["
        raise ConfigError(f"{where}.{key}: must be in {left}{lo}, {hi}]")
    if lo is not None and (value <= lo if lo_open else value < lo):
        bound = f"> {lo}" if lo_open else f">= {lo}"
        raise ConfigError(f"{where}.{key}: must be {bound}")
    if hi is not None and value > hi:
        raise ConfigError(f"{where}.{key}: must be <= {hi}")
    return value


def _integer(table: dict, key: str, where: str, default: int, lo=None) -> int:
    value = table.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key}: expected an integer")
    if lo is not None and value < lo:
        raise ConfigError(f"{where}.{key}: must be >= {lo}")
    return value


def _choice(table: dict, key: str, where: str, default: str, choices: tuple[str, ...]) -> str:
    value = table.get(key, default)
    if value not in choices:
        raise ConfigError(f"{where}.{key}: must be one of {', '.join(choices)}")
    return value


def _universe(table: dict, key: str, where: str, default: tuple[float, float, float]):
    value = table.get(key, list(default))
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 3
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
    ):
        raise ConfigError(f"{where}.{key}: expected [lo, hi, step]")
    lo, hi, step = (float(v) for v in value)
    if not lo < hi:
        raise ConfigError(f"{where}.{key}: needs lo < hi")
    if step <= 0:
        raise ConfigError(f"{where}.{key}: step must be > 0")
    return (lo, hi, step)


def _parse_planner(table: dict) -> PlannerSection:
    _check_table(table, ("waypoints", "delta_l", "penalty_scale", "margin", "init", "schedule"), "planner")
    schedule_table = table.get("schedule", {})
    if not isinstance(schedule_table, dict):
        raise ConfigError("planner.schedule: expected a table")
    _check_table(schedule_table, ("t0", "alpha", "iterations", "perturb_sigma"), "planner.schedule")
    t0 = schedule_table.get("t0", "auto")
    if t0 != "auto":
        if isinstance(t0, bool) or not isinstance(t0, (int, float)) or float(t0) <= 0:
            raise ConfigError('planner.schedule.t0: must be "auto" or a number > 0')
        t0 = float(t0)
    margin = table.get("margin", "scenario")
    if margin != "scenario":
        if isinstance(margin, bool) or not isinstance(margin, (int, float)) or float(margin) < 0:
            raise ConfigError('planner.margin: must be "scenario" or a number >= 0')
        margin = float(margin)
    return PlannerSection(
        waypoints=_integer(table, "waypoints", "planner", 12, lo=2),
        delta_l=_number(table, "delta_l", "planner", 0.5, lo=0.0, hi=1.0),
        penalty_scale=_number(table, "penalty_scale", "planner", 100.0, lo=0.0, lo_open=True),
        margin=margin,
        init=_choice(table, "init", "planner", "random", ("straight", "random")),
        schedule=ScheduleSection(
            t0=t0,
            alpha=_number(schedule_table, "alpha", "planner.schedule", 0.995, lo=0.0, lo_open=True, hi=1.0),
            iterations=_integer(schedule_table, "iterations", "planner.schedule", 500, lo=1),
            perturb_sigma=_number(schedule_table, "perturb_sigma", "planner.schedule", 0.8, lo=0.0, lo_open=True),
        ),
    )


def _parse_behavior(table: dict) -> BehaviorParams:
    keys = (
        "rho_xi", "rho_v", "rho_goal", "epsilon_xi", "epsilon_v", "m",
        "v_max", "v_tmax", "omega_max", "avoid_trigger_distance",
        "turn_deadband", "turn_law", "no_obstacle_term",
    )
    _check_table(table, keys, "behavior")
    defaults = BehaviorParams()
    try:
        return BehaviorParams(
            rho_xi=_number(table, "rho_xi", "behavior", defaults.rho_xi, lo=0.0),
            rho_v=_number(table, "rho_v", "behavior", defaults.rho_v, lo=0.0),
            rho_goal=_number(table, "rho_goal", "behavior", defaults.rho_goal, lo=0.0),
            epsilon_xi=_number(table, "epsilon_xi", "behavior", defaults.epsilon_xi, lo=0.0),
            epsilon_v=_number(table, "epsilon_v", "behavior", defaults.epsilon_v, lo=0.0),
            m=_number(table, "m", "behavior", defaults.m, lo=1.0),
            v_max=_number(table, "v_max", "behavior", defaults.v_max, lo=0.0, lo_open=True),
            v_tmax=_number(table, "v_tmax", "behavior", defaults.v_tmax, lo=0.0, lo_open=True),
            omega_max=_number(table, "omega_max", "behavior", defaults.omega_max, lo=0.0, lo_open=True),
            avoid_trigger_distance=_number(
                table, "avoid_trigger_distance", "behavior", defaults.avoid_trigger_distance, lo=0.0
            ),
            turn_deadband=_number(table, "turn_deadband", "behavior", defaults.turn_deadband, lo=0.0),
            turn_law=_choice(table, "turn_law", "behavior", defaults.turn_law, ("literal", "corrected")),
            no_obstacle_term=_choice(
                table, "no_obstacle_term", "behavior", defaults.no_obstacle_term, ("drop", "epsilon")
            ),
        )
    except ValueError as exc:
        raise ConfigError(f"behavior: {exc}") from None


def _parse_fuzzy(table: dict) -> FuzzySection:
    _check_table(
        table,
        ("rules", "output_gain", "angle_universe", "center_universe", "output_universe"),
        "fuzzy",
    )
    defaults = FuzzySection()
    return FuzzySection(
        rules=_choice(table, "rules", "fuzzy", defaults.rules, ("paper3", "full9")),
        output_gain=_number(table, "output_gain", "fuzzy", defaults.output_gain, lo=0.0, lo_open=True),
        angle_universe=_universe(table, "angle_universe", "fuzzy", defaults.angle_universe),
        center_universe=_universe(table, "center_universe", "fuzzy", defaults.center_universe),
        output_universe=_universe(table, "output_universe", "fuzzy", defaults.output_universe),
    )


def _parse_sim(table: dict) -> SimSection:
    _check_table(
        table,
        (
            "dt", "steps", "goal_radius", "lookahead", "sigma_v", "sigma_omega",
            "start_offset_mm", "start_angle_offset_deg",
        ),
        "sim",
    )
    d = SimSection()
    return SimSection(
        dt=_number(table, "dt", "sim", d.dt, lo=0.0, lo_open=True),
        steps=_integer(table, "steps", "sim", d.steps, lo=1),
        goal_radius=_number(table, "goal_radius", "sim", d.goal_radius, lo=0.0, lo_open=True),
        lookahead=_number(table, "lookahead", "sim", d.lookahead, lo=0.0, lo_open=True),
        sigma_v=_number(table, "sigma_v", "sim", d.sigma_v, lo=0.0),
        sigma_omega=_number(table, "sigma_omega", "sim", d.sigma_omega, lo=0.0),
        start_offset_mm=_number(table, "start_offset_mm", "sim", d.start_offset_mm),
        start_angle_offset_deg=_number(table, "start_angle_offset_deg", "sim", d.start_angle_offset_deg),
    )


def _parse_robot(table: dict) -> RobotGeometry:
    _check_table(table, ("wheel_radius", "axle_length"), "robot")
    d = RobotGeometry()
    return RobotGeometry(
        wheel_radius=_number(table, "wheel_radius", "robot", d.wheel_radius, lo=0.0, lo_open=True),
        axle_length=_number(table, "axle_length", "robot", d.axle_length, lo=0.0, lo_open=True),
    )


def _parse_sweep(table: dict) -> SweepSection:
    _check_table(table, ("budgets", "seeds"), "sweep")
    d = SweepSection()

    def int_list(key: str, default: tuple[int, ...]) -> tuple[int, ...]:
        value = table.get(key, list(default))
        if (
            not isinstance(value, (list, tuple))
            or not value
            or any(isinstance(v, bool) or not isinstance(v, int) for v in value)
        ):
            raise ConfigError(f"sweep.{key}: expected a non-empty list of integers")
        return tuple(value)

    budgets = int_list("budgets", d.budgets)
    if any(b < 1 for b in budgets):
        raise ConfigError("sweep.budgets: budgets must be >= 1")
    if any(b1 >= b2 for b1, b2 in zip(budgets, budgets[1:])):
        raise ConfigError("sweep.budgets: must be strictly ascending")
    return SweepSection(budgets=budgets, seeds=int_list("seeds", d.seeds))


def parse_config(text: str) -> RunConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from None
    _check_table(data, ("scenario", "seed", "planner", "behavior", "fuzzy", "sim", "robot", "sweep"), "config")
    for section in ("planner", "behavior", "fuzzy", "sim", "robot", "sweep"):
        if section in data and not isinstance(data[section], dict):
            raise ConfigError(f"{section}: expected a table")
    scenario = data.get("scenario", "bundled:straight")
    if not isinstance(scenario, str) or not scenario:
        raise ConfigError("scenario: expected a non-empty string")
    return RunConfig(
        scenario=scenario,
        seed=_integer(data, "seed", "config", 0),
        planner=_parse_planner(data.get("planner", {})),
        behavior=_parse_behavior(data.get("behavior", {})),
        fuzzy=_parse_fuzzy(data.get("fuzzy", {})),
        sim=_parse_sim(data.get("sim", {})),
        robot=_parse_robot(data.get("robot", {})),
        sweep=_parse_sweep(data.get("sweep", {})),
    )


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from None
    return parse_config(text)


def resolve_scenario(cfg: RunConfig, config_dir: str = ".") -> Scenario:
    """Load the scenario referenced by the config: either "bundled:<name>"
    or a path (relative paths resolve against the config file's directory)."""
    ref = cfg.scenario
    if ref.startswith("bundled:"):
        name = ref.split(":", 1)[1]
        try:
            return bundled_scenarios.load_bundled(name)
        except KeyError as exc:
            raise ConfigError(f"scenario: {exc.args[0]}") from None
    path = ref if os.path.isabs(ref) else os.path.join(config_dir, ref)
    if not os.path.exists(path):
        raise ConfigError(f"scenario: file not found: {path}")
    return load_scenario(path)


def build_controller(cfg: RunConfig) -> FuzzyController:
    try:
        return default_controller(
            rules=cfg.fuzzy.rules,
            output_gain=cfg.fuzzy.output_gain,
            angle_universe=cfg.fuzzy.angle_universe,
            center_universe=cfg.fuzzy.center_universe,
            output_universe=cfg.fuzzy.output_universe,
        )
    except FuzzyDefinitionError as exc:
        raise ConfigError(f"fuzzy: {exc}") from None


def render_default_config() -> str:
    """The default configuration as TOML text (what `config --defaults` prints)."""
    cfg = RunConfig()
    b = cfg.behavior
    lines = [
        f'scenario = "{cfg.scenario}"',
        f"seed = {cfg.seed}",
        "",
        "[planner]",
        f"waypoints = {cfg.planner.waypoints}",
        f"delta_l = {cfg.planner.delta_l}",
        f"penalty_scale = {cfg.planner.penalty_scale}",
        f'margin = "{cfg.planner.margin}"  # "scenario" uses the scenario margin',
        f'init = "{cfg.planner.init}"',
        "",
        "[planner.schedule]",
        f't0 = "{cfg.planner.schedule.t0}"  # "auto" calibrates from the initial plan',
        f"alpha = {cfg.planner.schedule.alpha}",
        f"iterations = {cfg.planner.schedule.iterations}",
        f"perturb_sigma = {cfg.planner.schedule.perturb_sigma}",
        "",
        "[behavior]",
        f"rho_xi = {b.rho_xi}",
        f"rho_v = {b.rho_v}",
        f"rho_goal = {b.rho_goal}",
        f"epsilon_xi = {b.epsilon_xi}",
        f"epsilon_v = {b.epsilon_v}",
        f"m = {b.m}",
        f"v_max = {b.v_max}",
        f"v_tmax = {b.v_tmax}",
        f"omega_max = {b.omega_max}",
        f"avoid_trigger_distance = {b.avoid_trigger_distance}",
        f"turn_deadband = {b.turn_deadband}",
        f'turn_law = "{b.turn_law}"',
        f'no_obstacle_term = "{b.no_obstacle_term}"',
        "",
        "[fuzzy]",
        f'rules = "{cfg.fuzzy.rules}"',
        f"output_gain = {cfg.fuzzy.output_gain}",
        f"angle_universe = [{', '.join(str(v) for v in cfg.fuzzy.angle_universe)}]",
        f"center_universe = [{', '.join(str(v) for v in cfg.fuzzy.center_universe)}]",
        f"output_universe = [{', '.join(str(v) for v in cfg.fuzzy.output_universe)}]",
        "",
        "[sim]",
        f"dt = {cfg.sim.dt}",
        f"steps = {cfg.sim.steps}",
        f"goal_radius = {cfg.sim.goal_radius}",
        f"lookahead = {cfg.sim.lookahead}",
        f"sigma_v = {cfg.sim.sigma_v}",
        f"sigma_omega = {cfg.sim.sigma_omega}",
        f"start_offset_mm = {cfg.sim.start_offset_mm}",
        f"start_angle_offset_deg = {cfg.sim.start_angle_offset_deg}",
        "",
        "[robot]",
        f"wheel_radius = {cfg.robot.wheel_radius}",
        f"axle_length = {cfg.robot.axle_length}",
        "",
        "[sweep]",
        f"budgets = [{', '.join(str(v) for v in cfg.sweep.budgets)}]",
        f"seeds = [{', '.join(str(v) for v in cfg.sweep.seeds)}]",
    ]
    return "\n".join(lines) + "\n"
