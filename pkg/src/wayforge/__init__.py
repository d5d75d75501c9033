"""wayforge: deterministic global path planning (simulated annealing over
waypoint plans) and closed-loop path tracking with behavior arbitration and
a Mamdani fuzzy deviation controller, for a differential-drive robot."""

__version__ = "0.1.0"

from .behaviors import BehaviorMode, BehaviorOutput, BehaviorParams, SensorSnapshot, arbitrate
from .dynamics import Pose, RobotGeometry, VelocityCommand, WheelSpeeds, integrate
from .fuzzy import FuzzyController, TriangularSet, controller_step, default_controller
from .planner import AnnealSchedule, EnergyParams, PathPlan, anneal, energy, init_plan, reported_length
from .simloop import NoiseModel, TrackingLog, compute_deviation, off_track, run_tracking, summarize
from .world import CircleObstacle, Scenario, load_scenario, nearest_obstacle, parse_scenario, segment_collides

__all__ = [
    "BehaviorMode",
    "BehaviorOutput",
    "BehaviorParams",
    "SensorSnapshot",
    "arbitrate",
    "Pose",
    "RobotGeometry",
    "VelocityCommand",
    "WheelSpeeds",
    "integrate",
    "FuzzyController",
    "TriangularSet",
    "controller_step",
    "default_controller",
    "AnnealSchedule",
    "EnergyParams",
    "PathPlan",
    "anneal",
    "energy",
    "init_plan",
    "reported_length",
    "NoiseModel",
    "TrackingLog",
    "compute_deviation",
    "off_track",
    "run_tracking",
    "summarize",
    "CircleObstacle",
    "Scenario",
    "load_scenario",
    "nearest_obstacle",
    "parse_scenario",
    "segment_collides",
    "__version__",
]
