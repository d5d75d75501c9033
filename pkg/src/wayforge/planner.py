"""Waypoint-path energy model and the simulated-annealing global planner.

The path energy combines squared segment lengths with a quadratic hinge
penalty on inflated-obstacle penetration at each waypoint, mixed by a
weighting coefficient delta_l. Human-facing path length is always the
plain sum of segment lengths in meters (reported_length), not the squared
energy term.

Everything here is deterministic given explicit seeds: the same scenario,
initial plan, schedule, and energy parameters reproduce the same best plan
and trace bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .world import Bounds, Scenario


class PlanError(ValueError):
    """Raised for plans that violate the path invariants."""


@dataclass(frozen=True)
class PathPlan:
    waypoints: tuple[tuple[float, float], ...]

    @property
    def m(self) -> int:
        return len(self.waypoints)


@dataclass(frozen=True)
class EnergyParams:
    delta_l: float = 0.5  # weight of the length term, in [0, 1]
    penalty_scale: float = 100.0
    margin: float = 0.0  # obstacle inflation used by the penalty term, m

    def __post_init__(self) -> None:
        if not 0.0 <= self.delta_l <= 1.0:
            raise ValueError("delta_l must be in [0, 1]")
        if self.penalty_scale <= 0:
            raise ValueError("penalty_scale must be > 0")
        if self.margin < 0:
            raise ValueError("margin must be >= 0")


@dataclass(frozen=True)
class EnergyBreakdown:
    f_l: float  # sum of squared segment lengths, m^2
    f_z: float  # collision penalty
    f: float  # delta_l * f_l + (1 - delta_l) * f_z


@dataclass(frozen=True)
class AnnealSchedule:
    t0: float
    alpha: float = 0.995
    iterations: int = 500
    perturb_sigma: float = 0.8  # m
    seed: int = 0

    def __post_init__(self) -> None:
        if self.t0 <= 0:
            raise ValueError("t0 must be > 0")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.perturb_sigma <= 0:
            raise ValueError("perturb_sigma must be > 0")


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    temperature: float
    current_energy: float
    best_energy: float
    accepted: bool


@dataclass(frozen=True)
class AnnealTrace:
    rows: tuple[TraceRow, ...]


def validate_plan(plan: PathPlan, scenario: Scenario, tol: float = 1e-9) -> None:
    if plan.m < 2:
        raise PlanError("plan needs at least 2 waypoints")
    sx, sy = scenario.start_xy
    gx, gy = scenario.goal
    x0, y0 = plan.waypoints[0]
    xn, yn = plan.waypoints[-1]
    if abs(x0 - sx) > tol or abs(y0 - sy) > tol:
        raise PlanError("first waypoint must equal the scenario start")
    if abs(xn - gx) > tol or abs(yn - gy) > tol:
        raise PlanError("last waypoint must equal the scenario goal")
    for i, (x, y) in enumerate(plan.waypoints):
        if not scenario.bounds.contains(x, y):
            raise PlanError(f"waypoint {i} outside bounds")


def energy(plan: PathPlan, scenario: Scenario, params: EnergyParams) -> EnergyBreakdown:
    """Path energy: squared-segment-length term plus waypoint collision
    penalties, mixed by delta_l."""
    validate_plan(plan, scenario)
    pts = plan.waypoints
    f_l = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        f_l += (x1 - x0) ** 2 + (y1 - y0) ** 2
    f_z = 0.0
    for x, y in pts:
        for ob in scenario.obstacles:
            depth = (ob.radius + params.margin) - math.hypot(x - ob.cx, y - ob.cy)
            if depth > 0.0:
                f_z += params.penalty_scale * depth * depth
    return EnergyBreakdown(f_l=f_l, f_z=f_z, f=params.delta_l * f_l + (1.0 - params.delta_l) * f_z)


def reported_length(plan: PathPlan) -> float:
    """Total path length in meters (sum of Euclidean segment lengths)."""
    return sum(
        math.hypot(x1 - x0, y1 - y0)
        for (x0, y0), (x1, y1) in zip(plan.waypoints, plan.waypoints[1:])
    )


def init_plan(scenario: Scenario, m: int, strategy: str = "straight", seed: int = 0) -> PathPlan:
    """Initial plan with endpoints pinned to start/goal.

    "straight": m points equally spaced on the start-goal segment.
    "random": interior points uniform inside the bounds (seeded).
    """
    if m < 2:
        raise PlanError("m must be >= 2")
    sx, sy = scenario.start_xy
    gx, gy = scenario.goal
    if strategy == "straight":
        pts = [
            (sx + (gx - sx) * i / (m - 1), sy + (gy - sy) * i / (m - 1))
            for i in range(m)
        ]
    elif strategy == "random":
        rng = np.random.default_rng(seed)
        b = scenario.bounds
        pts = [(sx, sy)]
        for _ in range(m - 2):
            pts.append((float(rng.uniform(b.xmin, b.xmax)), float(rng.uniform(b.ymin, b.ymax))))
        pts.append((gx, gy))
    else:
        raise PlanError(f"unknown init strategy {strategy!r}")
    pts[0] = (sx, sy)
    pts[-1] = (gx, gy)
    return PathPlan(tuple(pts))


def perturb(plan: PathPlan, sigma: float, rng: np.random.Generator, bounds: Bounds) -> PathPlan:
    """Displace one uniformly chosen interior waypoint by a Gaussian pair,
    clamped to the bounds. A 2-point plan has no interior and is returned
    unchanged."""
    if plan.m == 2:
        return plan
    idx = int(rng.integers(1, plan.m - 1))
    dx, dy = rng.normal(0.0, sigma, size=2)
    x, y = plan.waypoints[idx]
    moved = bounds.clamp(x + float(dx), y + float(dy))
    pts = list(plan.waypoints)
    pts[idx] = moved
    return PathPlan(tuple(pts))


def metropolis_accept(delta_f: float, temperature: float, rng: np.random.Generator) -> bool:
    """Accept improvements always; accept a worsening of delta_f with
    probability exp(-delta_f / temperature). Consumes one uniform draw only
    when delta_f > 0."""
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    if delta_f <= 0.0:
        return True
    ratio = delta_f / temperature
    threshold = math.exp(-ratio) if ratio < 745.0 else 0.0  # exp underflows past ~745
    return float(rng.random()) < threshold


def auto_t0(
    scenario: Scenario,
    init: PathPlan,
    params: EnergyParams,
    sigma: float,
    seed: int = 0,
    draws: int = 50,
) -> float:
    """Initial temperature calibration: the standard deviation of the energy
    over random single-waypoint perturbations of the initial plan. Uses its
    own seeded stream so the annealing stream is untouched."""
    rng = np.random.default_rng([seed, 1])
    energies = [
        energy(perturb(init, sigma, rng, scenario.bounds), scenario, params).f
        for _ in range(draws)
    ]
    t0 = float(np.std(energies))
    if not math.isfinite(t0) or t0 <= 0.0:
        return 1.0
    return t0


def anneal(
    scenario: Scenario,
    init: PathPlan,
    schedule: AnnealSchedule,
    params: EnergyParams,
) -> tuple[PathPlan, AnnealTrace]:
    """Simulated annealing over waypoint plans.

    Each iteration perturbs the current plan, applies the Metropolis rule
    at the current temperature, then cools geometrically. The best-so-far
    plan is tracked separately and returned with the full trace.
    """
    validate_plan(init, scenario)
    rng = np.random.default_rng(schedule.seed)
    current = init
    e_current = energy(current, scenario, params).f
    best, e_best = current, e_current
    temperature = schedule.t0
    rows = []
    for iteration in range(schedule.iterations):
        candidate = perturb(current, schedule.perturb_sigma, rng, scenario.bounds)
        e_candidate = energy(candidate, scenario, params).f
        accepted = metropolis_accept(e_candidate - e_current, temperature, rng)
        if accepted:
            current, e_current = candidate, e_candidate
        if e_current < e_best:
            best, e_best = current, e_current
        rows.append(TraceRow(iteration, temperature, e_current, e_best, accepted))
        temperature *= schedule.alpha
    return best, AnnealTrace(tuple(rows))


def write_plan(plan: PathPlan, path: str, metadata: Optional[dict[str, str]] = None) -> None:
    """Write a plan file: '#'-prefixed metadata lines, then one 'x y' pair
    per line. Floats are rendered with repr so a read round-trips exactly."""
    lines = [f"# {key}: {value}" for key, value in (metadata or {}).items()]
    lines.extend(f"{repr(float(x))} {repr(float(y))}" for x, y in plan.waypoints)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_plan(path: str) -> PathPlan:
    pts = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.split()
            if len(toks) != 2:
                raise PlanError(f"{path}:{lineno}: expected 'x y'")
            pts.append((float(toks[0]), float(toks[1])))
    if len(pts) < 2:
        raise PlanError(f"{path}: plan needs at least 2 waypoints")
    return PathPlan(tuple(pts))


def write_trace(trace: AnnealTrace, path: str, metadata: Optional[dict[str, str]] = None) -> None:
    """Trace CSV: iter,temperature,current_energy,best_energy,accepted."""
    lines = [f"# {key}: {value}" for key, value in (metadata or {}).items()]
    lines.append("iter,temperature,current_energy,best_energy,accepted")
    for row in trace.rows:
        lines.append(
            f"{row.iteration},{repr(row.temperature)},{repr(row.current_energy)},"
            f"{repr(row.best_energy)},{int(row.accepted)}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
