"""Closed-loop path tracking: behavior commands toward a lookahead point on
the planned path, optional Gaussian command noise, and fuzzy correction of
the measured angle/center deviation, applied as a wheel-speed difference.

Deviations are measured against the planned polyline: center deviation is
the signed perpendicular offset (positive = left of the travel direction,
in millimeters) and angle deviation is the wrapped difference between the
robot heading and the local path tangent (in degrees). A positive fuzzy
output commands a rightward correction, so it is applied with a negative
sign through apply_speed_difference (whose positive delta turns left).

Runs are pure functions of their inputs including the noise seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .behaviors import BehaviorParams, arbitrate, snapshot_from_pose
from .dynamics import (
    Pose,
    RobotGeometry,
    VelocityCommand,
    apply_speed_difference,
    command_to_wheels,
    constraint_residual,
    integrate,
    wheels_to_command,
    wrap_angle,
)
from .fuzzy import FuzzyController, controller_step
from .planner import PathPlan
from .world import Scenario


@dataclass(frozen=True)
class NoiseModel:
    sigma_v: float = 0.0  # m/s
    sigma_omega: float = 0.0  # rad/s
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sigma_v < 0 or self.sigma_omega < 0:
            raise ValueError("noise sigmas must be >= 0")


@dataclass(frozen=True)
class DeviationSample:
    t: float  # s
    angle_deg: float  # heading error vs the path tangent
    center_mm: float  # signed lateral offset, positive = left of travel


@dataclass(frozen=True)
class LogSample:
    step: int
    t: float
    pose: Pose
    cmd: VelocityCommand
    deviation: DeviationSample
    fuzzy_out: float
    off_track: bool


@dataclass(frozen=True)
class TrackingLog:
    samples: tuple[LogSample, ...]
    realized_length: float
    off_track_events: int
    reached_goal: bool
    max_constraint_residual: float
    dt: float


ANGLE_THRESHOLD_DEG = 10.0
CENTER_THRESHOLD_MM = 100.0


@dataclass(frozen=True)
class _Projection:
    segment: int
    proj_x: float
    proj_y: float
    tangent: float  # tangent angle of the segment, rad
    center_m: float  # signed lateral offset, m
    arc_length: float  # distance along the path to the projected point, m


def _project_on_path(x: float, y: float, plan: PathPlan) -> _Projection:
    pts = plan.waypoints
    best: Optional[_Projection] = None
    best_d2 = math.inf
    travelled = 0.0
    for i, ((ax, ay), (bx, by)) in enumerate(zip(pts, pts[1:])):
        dx, dy = bx - ax, by - ay
        seg2 = dx * dx + dy * dy
        if seg2 == 0.0:
            continue
        t = ((x - ax) * dx + (y - ay) * dy) / seg2
        t = min(1.0, max(0.0, t))
        px, py = ax + t * dx, ay + t * dy
        d2 = (x - px) ** 2 + (y - py) ** 2
        if d2 < best_d2:
            seg_len = math.sqrt(seg2)
            cross = (dx * (y - py) - dy * (x - px)) / seg_len
            best = _Projection(
                segment=i,
                proj_x=px,
                proj_y=py,
                tangent=math.atan2(dy, dx),
                center_m=cross,
                arc_length=travelled + t * seg_len,
            )
            best_d2 = d2
        travelled += math.sqrt(seg2)
    if best is None:
        raise ValueError("plan has zero total length; cannot project onto it")
    return best


def _point_at_arc_length(plan: PathPlan, s: float) -> tuple[float, float]:
    pts = plan.waypoints
    remaining = max(0.0, s)
    for (ax, ay), (bx, by) in zip(pts, pts[1:]):
        seg_len = math.hypot(bx - ax, by - ay)
        if seg_len == 0.0:
            continue
        if remaining <= seg_len:
            f = remaining / seg_len
            return (ax + f * (bx - ax), ay + f * (by - ay))
        remaining -= seg_len
    return pts[-1]


def compute_deviation(pose: Pose, plan: PathPlan, t: float = 0.0) -> DeviationSample:
    """Angle/center deviation of a pose against the planned polyline."""
    proj = _project_on_path(pose.x, pose.y, plan)
    return DeviationSample(
        t=t,
        angle_deg=math.degrees(wrap_angle(pose.theta - proj.tangent)),
        center_mm=proj.center_m * 1000.0,
    )


def off_track(sample: DeviationSample) -> bool:
    """True iff the deviation exceeds the +/-10 degree or +/-100 mm envelope."""
    return abs(sample.angle_deg) > ANGLE_THRESHOLD_DEG or abs(sample.center_mm) > CENTER_THRESHOLD_MM


def offset_start_pose(plan: PathPlan, offset_mm: float = 0.0, angle_offset_deg: float = 0.0) -> Pose:
    """Start pose displaced laterally from the first waypoint (positive =
    left of the initial tangent) with a heading offset from the tangent."""
    (ax, ay), (bx, by) = plan.waypoints[0], plan.waypoints[1]
    tangent = math.atan2(by - ay, bx - ax)
    nx, ny = -math.sin(tangent), math.cos(tangent)  # left normal
    offset = offset_mm / 1000.0
    return Pose(
        x=ax + nx * offset,
        y=ay + ny * offset,
        theta=wrap_angle(tangent + math.radians(angle_offset_deg)),
    )


def run_tracking(
    scenario: Scenario,
    plan: PathPlan,
    behavior_params: BehaviorParams,
    controller: FuzzyController,
    noise: NoiseModel,
    dt: float,
    steps: int,
    *,
    geometry: RobotGeometry = RobotGeometry(),
    goal_radius: float = 0.1,
    lookahead: float = 0.5,
    start_pose: Optional[Pose] = None,
) -> TrackingLog:
    """Simulate path tracking for up to `steps` control steps.

    Per step: behaviors produce the nominal command toward a point on the
    path `lookahead` meters ahead of the projection; Gaussian noise is added
    to (v, omega); the fuzzy correction is applied in wheel space; the final
    command (clamped to the velocity limits) is integrated. Terminates early
    once the pose is within goal_radius of the goal.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if dt <= 0:
        raise ValueError("dt must be > 0")
    rng = np.random.default_rng(noise.seed)
    pose = start_pose if start_pose is not None else Pose(*scenario.start)
    gx, gy = scenario.goal
    samples: list[LogSample] = []
    realized = 0.0
    events = 0
    reached = False
    max_residual = 0.0
    for step in range(steps):
        if math.hypot(pose.x - gx, pose.y - gy) <= goal_radius:
            reached = True
            break
        proj = _project_on_path(pose.x, pose.y, plan)
        carrot = _point_at_arc_length(plan, proj.arc_length + lookahead)
        snap = snapshot_from_pose(pose, scenario, bearing_point=carrot)
        nominal = arbitrate(snap, behavior_params).cmd
        noise_draw = rng.standard_normal(2)
        v = nominal.v + noise.sigma_v * float(noise_draw[0])
        omega = nominal.omega + noise.sigma_omega * float(noise_draw[1])
        v = min(behavior_params.v_max, max(-behavior_params.v_max, v))
        omega = min(behavior_params.omega_max, max(-behavior_params.omega_max, omega))
        wheels = command_to_wheels(VelocityCommand(v, omega), geometry)
        deviation = DeviationSample(
            t=step * dt,
            angle_deg=math.degrees(wrap_angle(pose.theta - proj.tangent)),
            center_mm=proj.center_m * 1000.0,
        )
        fuzzy_out = controller_step(controller, deviation.angle_deg, deviation.center_mm)
        wheels = apply_speed_difference(wheels, -fuzzy_out)  # positive output steers right
        cmd = wheels_to_command(wheels, geometry)
        cmd = VelocityCommand(
            v=min(behavior_params.v_max, max(-behavior_params.v_max, cmd.v)),
            omega=min(behavior_params.omega_max, max(-behavior_params.omega_max, cmd.omega)),
        )
        next_pose = integrate(pose, cmd, dt)
        max_residual = max(max_residual, abs(constraint_residual(pose, next_pose, dt)))
        realized += math.hypot(next_pose.x - pose.x, next_pose.y - pose.y)
        is_off = off_track(deviation)
        events += int(is_off)
        samples.append(
            LogSample(
                step=step,
                t=step * dt,
                pose=pose,
                cmd=cmd,
                deviation=deviation,
                fuzzy_out=fuzzy_out,
                off_track=is_off,
            )
        )
        pose = next_pose
    if not reached and math.hypot(pose.x - gx, pose.y - gy) <= goal_radius:
        reached = True
    return TrackingLog(
        samples=tuple(samples),
        realized_length=realized,
        off_track_events=events,
        reached_goal=reached,
        max_constraint_residual=max_residual,
        dt=dt,
    )


def summarize(
    log: TrackingLog,
    center_band_mm: float = 50.0,
    angle_band_deg: float = 2.0,
) -> dict:
    """Convergence and deviation metrics for a tracking log.

    convergence_step is the first step after which both deviations stay
    inside the band for the rest of the run (0 if the log never leaves it);
    the key is absent when the band is never finally entered.
    """
    if not log.samples:
        raise ValueError("empty tracking log")
    inside = [
        abs(s.deviation.center_mm) <= center_band_mm and abs(s.deviation.angle_deg) <= angle_band_deg
        for s in log.samples
    ]
    summary: dict = {}
    last_outside = None
    for i, ok in enumerate(inside):
        if not ok:
            last_outside = i
    if last_outside is None:
        summary["convergence_step"] = 0
    elif last_outside < len(inside) - 1:
        summary["convergence_step"] = last_outside + 1
    max_center = max(abs(s.deviation.center_mm) for s in log.samples)
    max_angle = max(abs(s.deviation.angle_deg) for s in log.samples)
    summary.update(
        max_center_mm=max_center,
        max_angle_deg=max_angle,
        realized_length_m=log.realized_length,
        off_track_events=log.off_track_events,
        reached_goal=log.reached_goal,
    )
    return summary


def write_log_csv(log: TrackingLog, path: str, metadata: Optional[dict[str, str]] = None) -> None:
    """Tracking log CSV with one row per control step."""
    lines = [f"# {key}: {value}" for key, value in (metadata or {}).items()]
    lines.append("step,t,x,y,theta,v_cmd,omega_cmd,angle_dev_deg,center_dev_mm,fuzzy_out,off_track")
    for s in log.samples:
        lines.append(
            f"{s.step},{repr(s.t)},{repr(s.pose.x)},{repr(s.pose.y)},{repr(s.pose.theta)},"
            f"{repr(s.cmd.v)},{repr(s.cmd.omega)},{repr(s.deviation.angle_deg)},"
            f"{repr(s.deviation.center_mm)},{repr(s.fuzzy_out)},{int(s.off_track)}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def summary_to_json(summary: dict) -> str:
    return json.dumps(summary, sort_keys=True)
