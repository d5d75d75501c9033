"""Independent reference implementations used as test oracles.

Deliberately written with different structure from the package code
(scalar loops, scikit-style trimf membership) so agreement is meaningful.
"""

from __future__ import annotations


def trimf(x: float, abc: tuple[float, float, float]) -> float:
    """Triangular membership via the classic a/b/c formulation; duplicate
    corners make shoulders."""
    a, b, c = abc
    if x < a or x > c:
        return 0.0
    if x == b:
        return 1.0
    if x < b:
        return (x - a) / (b - a) if b > a else 1.0
    return (c - x) / (c - b) if c > b else 1.0


class MamdaniOracle:
    """Discretized min/clip/max/centroid pipeline over N/Z/P partitions."""

    def __init__(self, angle_u=(-10.0, 10.0, 0.1), center_u=(-100.0, 100.0, 1.0), output_u=(-10.0, 10.0, 0.1), rules=None):
        self.angle_u = angle_u
        self.center_u = center_u
        self.output_u = output_u
        # (angle term, center term) -> output term; terms are N/Z/P indices -1, 0, +1
        self.rules = rules if rules is not None else [(-1, -1, -1), (0, 0, 0), (1, 1, 1)]

    @staticmethod
    def _partition(lo: float, hi: float) -> dict[int, tuple[float, float, float]]:
        return {-1: (lo, lo, 0.0), 0: (lo, 0.0, hi), 1: (0.0, hi, hi)}

    @staticmethod
    def _grid(universe: tuple[float, float, float]) -> list[float]:
        lo, hi, step = universe
        n = int(round((hi - lo) / step)) + 1
        return [lo + (hi - lo) * i / (n - 1) for i in range(n)]

    def evaluate(self, angle: float, center: float) -> float:
        a_lo, a_hi, _ = self.angle_u
        c_lo, c_hi, _ = self.center_u
        angle = min(max(angle, a_lo), a_hi)
        center = min(max(center, c_lo), c_hi)
        angle_sets = self._partition(a_lo, a_hi)
        center_sets = self._partition(c_lo, c_hi)
        out_sets = self._partition(self.output_u[0], self.output_u[1])
        grid = self._grid(self.output_u)
        num = 0.0
        den = 0.0
        for x in grid:
            mu = 0.0
            for a_term, c_term, o_term in self.rules:
                fire = min(trimf(angle, angle_sets[a_term]), trimf(center, center_sets[c_term]))
                clipped = min(fire, trimf(x, out_sets[o_term]))
                if clipped > mu:
                    mu = clipped
            num += mu * x
            den += mu
        if den == 0.0:
            return 0.0
        return num / den
