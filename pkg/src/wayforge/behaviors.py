"""Reactive motion behaviors (obstacle avoidance, target turning, target
approaching) and the arbitration rule that picks one per control step.

Sign convention for the steering laws: the turn direction factor is the
sign of the relevant bearing, so avoidance turns away from the obstacle
side and turning steers toward the goal side. The turn law ships in two
modes: "literal", whose steering term vanishes for non-negative goal
bearings, and "corrected", a proportional law used by the closed-loop
tracking experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .dynamics import Pose, VelocityCommand, wrap_angle
from .world import Scenario, nearest_obstacle


class BehaviorMode(Enum):
    AVOID = "avoid"
    TURN = "turn"
    APPROACH = "approach"


@dataclass(frozen=True)
class BehaviorParams:
    rho_xi: float = 3.0  # angular intensity factor, 1/s
    rho_v: float = 0.05  # linear intensity, m^(m+1)/s
    rho_goal: float = 0.5  # approach gain, 1/s
    epsilon_xi: float = 0.05  # minimum moving-out velocity, m/s
    epsilon_v: float = 0.05  # deadlock-escape minimum velocity, m/s
    m: float = 2.0  # obstacle-distance exponent
    v_max: float = 1.0  # m/s
    v_tmax: float = 0.8  # linear speed cap while turning, m/s
    omega_max: float = 2.0  # rad/s
    avoid_trigger_distance: float = 0.5  # m
    turn_deadband: float = 0.05  # rad
    turn_law: str = "literal"  # "literal" or "corrected"
    no_obstacle_term: str = "drop"  # "drop" or "epsilon"

    def __post_init__(self) -> None:
        for name in ("rho_xi", "rho_v", "rho_goal", "epsilon_xi", "epsilon_v"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.v_tmax > self.v_max:
            raise ValueError("v_tmax must be <= v_max")
        if self.turn_law not in ("literal", "corrected"):
            raise ValueError("turn_law must be 'literal' or 'corrected'")
        if self.no_obstacle_term not in ("drop", "epsilon"):
            raise ValueError("no_obstacle_term must be 'drop' or 'epsilon'")


@dataclass(frozen=True)
class SensorSnapshot:
    phi_obstacle: float  # bearing to nearest obstacle relative to heading, rad
    d_obstacle: float  # surface distance, m (may be +inf)
    phi_goal: float  # bearing to goal relative to heading, rad
    d_goal: float  # m


@dataclass(frozen=True)
class BehaviorOutput:
    mode: BehaviorMode
    cmd: VelocityCommand


def snapshot_from_pose(
    pose: Pose,
    scenario: Scenario,
    goal: tuple[float, float] | None = None,
    bearing_point: tuple[float, float] | None = None,
) -> SensorSnapshot:
    """Build the behavior inputs for a pose.

    goal defaults to the scenario goal and fixes d_goal. bearing_point, when
    given, is what phi_goal points at instead of the goal; the tracking loop
    uses this for its lookahead point so the speed laws still see the true
    remaining distance.
    """
    gx, gy = goal if goal is not None else scenario.goal
    bx, by = bearing_point if bearing_point is not None else (gx, gy)
    near = nearest_obstacle((pose.x, pose.y), scenario)
    phi_obstacle = 0.0 if near.index is None else wrap_angle(near.bearing - pose.theta)
    return SensorSnapshot(
        phi_obstacle=phi_obstacle,
        d_obstacle=near.distance,
        phi_goal=wrap_angle(math.atan2(by - pose.y, bx - pose.x) - pose.theta),
        d_goal=math.hypot(gx - pose.x, gy - pose.y),
    )


def _sign(x: float) -> float:
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    return 0.0


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, x))


def _obstacle_speed_term(snapshot: SensorSnapshot, params: BehaviorParams) -> float:
    """The rho_v / d^m + epsilon_v speed cap shared by approach and turn.

    With no obstacle in the scene the term is either dropped from the min
    (+inf, the default) or kept as epsilon_v, selected by no_obstacle_term.
    """
    if math.isinf(snapshot.d_obstacle):
        if params.no_obstacle_term == "drop":
            return math.inf
        return params.epsilon_v
    return params.rho_v / snapshot.d_obstacle**params.m + params.epsilon_v


def avoid(snapshot: SensorSnapshot, params: BehaviorParams) -> VelocityCommand:
    """Obstacle-avoidance command: steer away from the obstacle bearing.

    omega = -sign(phi) * rho_xi * (|phi| - pi/2), zero exactly at |phi| = pi/2;
    v = rho_v / d^m + epsilon_xi, capped at v_max.
    """
    if snapshot.d_obstacle <= 0:
        raise ValueError("in contact with obstacle (d_obstacle <= 0)")
    phi = snapshot.phi_obstacle
    omega = -_sign(phi) * params.rho_xi * (abs(phi) - math.pi / 2.0)
    v = params.rho_v / snapshot.d_obstacle**params.m + params.epsilon_xi
    return VelocityCommand(
        v=_clamp(v, 0.0, params.v_max),
        omega=_clamp(omega, -params.omega_max, params.omega_max),
    )


def approach(snapshot: SensorSnapshot, params: BehaviorParams) -> VelocityCommand:
    """Target-approaching command: straight drive, speed shrinking with distance."""
    v = min(params.rho_goal * snapshot.d_goal, params.v_max, _obstacle_speed_term(snapshot, params))
    return VelocityCommand(v=v, omega=0.0)


def turn(snapshot: SensorSnapshot, params: BehaviorParams) -> VelocityCommand:
    """Target-turning command: steer toward the goal bearing at reduced speed."""
    phi = snapshot.phi_goal
    if params.turn_law == "literal":
        omega = _sign(phi) * params.rho_xi * (abs(phi) - phi)
    else:
        omega = params.rho_xi * phi
    v = min(params.rho_goal * snapshot.d_goal, params.v_tmax, _obstacle_speed_term(snapshot, params))
    return VelocityCommand(v=v, omega=_clamp(omega, -params.omega_max, params.omega_max))


def arbitrate(snapshot: SensorSnapshot, params: BehaviorParams) -> BehaviorOutput:
    """Pick exactly one behavior: Avoid when an obstacle is close, else Turn
    when the goal bearing dominates the obstacle bearing or exceeds the
    deadband, else Approach."""
    if snapshot.d_obstacle < params.avoid_trigger_distance:
        return BehaviorOutput(BehaviorMode.AVOID, avoid(snapshot, params))
    if abs(snapshot.phi_goal) > abs(snapshot.phi_obstacle) or abs(snapshot.phi_goal) > params.turn_deadband:
        return BehaviorOutput(BehaviorMode.TURN, turn(snapshot, params))
    return BehaviorOutput(BehaviorMode.APPROACH, approach(snapshot, params))
