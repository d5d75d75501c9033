"""Differential-drive kinematics: pose state, forward-Euler integration,
wheel-speed conversions, and the no-lateral-slip residual check.

All types are plain values and all operations are pure; heading is kept
normalized to (-pi, pi] after every update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(theta, math.tau)
    if wrapped <= -math.pi:
        return math.pi
    return wrapped


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    theta: float


@dataclass(frozen=True)
class VelocityCommand:
    v: float  # linear velocity, m/s
    omega: float  # angular velocity, rad/s

    def __post_init__(self) -> None:
        if not (math.isfinite(self.v) and math.isfinite(self.omega)):
            raise ValueError("velocity command must be finite")


@dataclass(frozen=True)
class RobotGeometry:
    wheel_radius: float = 0.1
    axle_length: float = 0.2

    def __post_init__(self) -> None:
        if self.wheel_radius <= 0 or self.axle_length <= 0:
            raise ValueError("wheel_radius and axle_length must be > 0")


@dataclass(frozen=True)
class WheelSpeeds:
    omega_left: float  # rad/s
    omega_right: float  # rad/s


def integrate(pose: Pose, cmd: VelocityCommand, dt: float) -> Pose:
    """One forward-Euler step of the unicycle model.

    x += v*cos(theta)*dt, y += v*sin(theta)*dt, theta += omega*dt,
    evaluated at the pre-step heading, then theta is wrapped to (-pi, pi].
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if not all(math.isfinite(f) for f in (pose.x, pose.y, pose.theta)):
        raise ValueError("pose must be finite")
    return Pose(
        x=pose.x + cmd.v * math.cos(pose.theta) * dt,
        y=pose.y + cmd.v * math.sin(pose.theta) * dt,
        theta=wrap_angle(pose.theta + cmd.omega * dt),
    )


def command_to_wheels(cmd: VelocityCommand, geometry: RobotGeometry) -> WheelSpeeds:
    """Map (v, omega) onto left/right wheel angular speeds."""
    r, axle = geometry.wheel_radius, geometry.axle_length
    return WheelSpeeds(
        omega_left=(2.0 * cmd.v - cmd.omega * axle) / (2.0 * r),
        omega_right=(2.0 * cmd.v + cmd.omega * axle) / (2.0 * r),
    )


def wheels_to_command(wheels: WheelSpeeds, geometry: RobotGeometry) -> VelocityCommand:
    """Inverse of command_to_wheels."""
    r, axle = geometry.wheel_radius, geometry.axle_length
    return VelocityCommand(
        v=r * (wheels.omega_right + wheels.omega_left) / 2.0,
        omega=r * (wheels.omega_right - wheels.omega_left) / axle,
    )


def apply_speed_difference(wheels: WheelSpeeds, delta: float) -> WheelSpeeds:
    """Add a wheel-speed difference symmetrically: right +delta/2, left -delta/2.

    Preserves the linear velocity and changes omega by wheel_radius*delta/axle.
    """
    return WheelSpeeds(
        omega_left=wheels.omega_left - delta / 2.0,
        omega_right=wheels.omega_right + delta / 2.0,
    )


def constraint_residual(pose_before: Pose, pose_after: Pose, dt: float) -> float:
    """Lateral-slip residual (dx/dt)*sin(theta) - (dy/dt)*cos(theta).

    Zero (to rounding) for any pose pair produced by integrate; nonzero for
    motion with a sideways component relative to the pre-step heading.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    vx = (pose_after.x - pose_before.x) / dt
    vy = (pose_after.y - pose_before.y) / dt
    return vx * math.sin(pose_before.theta) - vy * math.cos(pose_before.theta)
