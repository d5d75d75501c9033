"""Scene model: bounded rectangular world with circular obstacles.

The scenario file format is a strict key/value text format (see
``parse_scenario``). Scenarios are immutable after loading and every
geometric query here is a pure function, so they are safe to share
between threads or worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

INFINITE_DISTANCE = math.inf


class ScenarioError(ValueError):
    """Raised for malformed scenario text or violated scene invariants."""


@dataclass(frozen=True)
class CircleObstacle:
    cx: float
    cy: float
    radius: float

    def surface_distance(self, x: float, y: float) -> float:
        """Signed distance from (x, y) to the obstacle surface (negative inside)."""
        return math.hypot(x - self.cx, y - self.cy) - self.radius


@dataclass(frozen=True)
class Bounds:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax

    def clamp(self, x: float, y: float) -> tuple[float, float]:
        return (min(max(x, self.xmin), self.xmax), min(max(y, self.ymin), self.ymax))


@dataclass(frozen=True)
class Scenario:
    """A planning scene: bounds, start pose, goal point, obstacles, safety margin."""

    bounds: Bounds
    start: tuple[float, float, float]  # x, y, heading
    goal: tuple[float, float]
    obstacles: tuple[CircleObstacle, ...] = ()
    margin: float = 0.0
    name: str = "scenario"

    @property
    def start_xy(self) -> tuple[float, float]:
        return (self.start[0], self.start[1])


@dataclass(frozen=True)
class NearestObstacle:
    distance: float  # surface distance, +inf when the scene has no obstacles
    bearing: float  # world-frame bearing from the query point to the obstacle center
    index: Optional[int]


_SCALAR_KEYS = {"bounds": 4, "start": 3, "goal": 2, "margin": 1}


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    """Parse scenario text into a validated Scenario.

    Strict mode: unknown keys are an error. Blank lines and lines starting
    with ``#`` are ignored. Raises ScenarioError with a line number on parse
    failures and with the violated invariant's name on validation failures.
    """
    seen: dict[str, list[float]] = {}
    obstacles: list[CircleObstacle] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key: values', got {line!r}")
        key, _, rest = line.partition(":")
        key = key.strip()
        try:
            values = [float(tok) for tok in rest.split()]
        except ValueError:
            raise ScenarioError(f"line {lineno}: non-numeric value in {rest.strip()!r}") from None
        if key == "obstacle":
            if len(values) != 3:
                raise ScenarioError(f"line {lineno}: obstacle needs 'cx cy radius' (3 numbers)")
            obstacles.append(CircleObstacle(*values))
        elif key in _SCALAR_KEYS:
            if key in seen:
                raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
            if len(values) != _SCALAR_KEYS[key]:
                raise ScenarioError(
                    f"line {lineno}: key {key!r} needs {_SCALAR_KEYS[key]} numbers, got {len(values)}"
                )
            seen[key] = values
        else:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")

    for required in ("bounds", "start", "goal"):
        if required not in seen:
            raise ScenarioError(f"missing required key {required!r}")

    bx = seen["bounds"]
    scenario = Scenario(
        bounds=Bounds(bx[0], bx[1], bx[2], bx[3]),
        start=(seen["start"][0], seen["start"][1], seen["start"][2]),
        goal=(seen["goal"][0], seen["goal"][1]),
        obstacles=tuple(obstacles),
        margin=seen.get("margin", [0.0])[0],
        name=name,
    )
    validate_scenario(scenario)
    return scenario


def load_scenario(path: str) -> Scenario:
    """Read and parse a scenario file from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stem = path.rsplit("/", 1)[-1]
    stem = stem[:-4] if stem.endswith(".scn") else stem
    return parse_scenario(text, name=stem)


def validate_scenario(s: Scenario) -> None:
    b = s.bounds
    if not (b.xmin < b.xmax and b.ymin < b.ymax):
        raise ScenarioError("invalid bounds: xmin < xmax and ymin < ymax required")
    if s.margin < 0:
        raise ScenarioError("margin must be >= 0")
    for i, ob in enumerate(s.obstacles):
        if ob.radius <= 0:
            raise ScenarioError(f"obstacle {i}: radius must be > 0")
        inside = (
            b.xmin <= ob.cx - ob.radius
            and ob.cx + ob.radius <= b.xmax
            and b.ymin <= ob.cy - ob.radius
            and ob.cy + ob.radius <= b.ymax
        )
        if not inside:
            raise ScenarioError(f"obstacle {i}: obstacle outside scenario bounds")
    if not b.contains(s.start[0], s.start[1]):
        raise ScenarioError("start outside bounds")
    if not b.contains(*s.goal):
        raise ScenarioError("goal outside bounds")
    for label, point in (("start", s.start_xy), ("goal", s.goal)):
        near = nearest_obstacle(point, s)
        if near.distance <= s.margin:
            raise ScenarioError(f"{label} inside inflated obstacle")


def serialize_scenario(s: Scenario) -> str:
    """Render a scenario in canonical text form (parse -> serialize is stable)."""

    def nums(values) -> str:
        return " ".join(repr(float(v)) for v in values)

    lines = [
        f"bounds: {nums((s.bounds.xmin, s.bounds.ymin, s.bounds.xmax, s.bounds.ymax))}",
        f"start: {nums(s.start)}",
        f"goal: {nums(s.goal)}",
        f"margin: {repr(float(s.margin))}",
    ]
    lines.extend(f"obstacle: {nums((ob.cx, ob.cy, ob.radius))}" for ob in s.obstacles)
    return "\n".join(lines) + "\n"


def nearest_obstacle(point: tuple[float, float], scenario: Scenario) -> NearestObstacle:
    """Minimum surface distance from a point over all obstacles.

    Returns (+inf, 0.0, None) when the scene has no obstacles. The bearing is
    the world-frame angle from the query point to the nearest obstacle center.
    """
    x, y = point
    best: Optional[int] = None
    best_dist = INFINITE_DISTANCE
    for i, ob in enumerate(scenario.obstacles):
        d = ob.surface_distance(x, y)
        if d < best_dist:
            best_dist = d
            best = i
    if best is None:
        return NearestObstacle(INFINITE_DISTANCE, 0.0, None)
    ob = scenario.obstacles[best]
    return NearestObstacle(best_dist, math.atan2(ob.cy - y, ob.cx - x), best)


def _point_segment_distance(px: float, py: float, ax: float, ay: float, bx: float, by: float) -> float:
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / seg2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def segment_collides(p1: tuple[float, float], p2: tuple[float, float], scenario: Scenario) -> bool:
    """True iff the closed segment p1-p2 touches any margin-inflated obstacle disc.

    Closed-set convention: grazing the inflated boundary counts as a collision.
    """
    for ob in scenario.obstacles:
        d = _point_segment_distance(ob.cx, ob.cy, p1[0], p1[1], p2[0], p2[1])
        if d <= ob.radius + scenario.margin:
            return True
    return False
