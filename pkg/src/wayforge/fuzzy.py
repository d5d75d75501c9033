"""Mamdani fuzzy controller for path-deviation correction.

Inputs are the angle deviation (degrees) and center deviation (millimeters)
against the reference path; the output is a left/right wheel-speed
difference (rad/s). Inference is min-AND activation, output-set clipping,
pointwise-max aggregation over the sampled output universe, and discrete
centroid defuzzification. Out-of-universe inputs are clamped so the
controller stays total.

Universe grids are sampled inclusively at both endpoints; a symmetric grid
is required for the zero-input/odd-symmetry behavior of the default
controller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np


class FuzzyDefinitionError(ValueError):
    """Raised for inconsistent variable, set, or rule definitions."""


class NoRuleFired(ValueError):
    """Raised by defuzzify_centroid when every sample weight is zero."""


@dataclass(frozen=True)
class TriangularSet:
    """Piecewise-linear set with feet at left/right and apex at peak.

    Shoulder sets (left == peak or peak == right) have membership 1 on the
    flat end.
    """

    left: float
    peak: float
    right: float

    def __post_init__(self) -> None:
        if not (self.left <= self.peak <= self.right):
            raise FuzzyDefinitionError("triangular set needs left <= peak <= right")


def membership(fset: TriangularSet, x: float) -> float:
    """Membership degree of x in a triangular set, in [0, 1]."""
    if x < fset.left or x > fset.right:
        return 0.0
    if x <= fset.peak:
        if fset.peak == fset.left:
            return 1.0
        return (x - fset.left) / (fset.peak - fset.left)
    if fset.right == fset.peak:
        return 1.0
    return (fset.right - x) / (fset.right - fset.peak)


def membership_profile(fset: TriangularSet, xs: np.ndarray) -> np.ndarray:
    """Vectorized membership over a sample grid (same math as membership)."""
    rising = np.ones_like(xs) if fset.peak == fset.left else (xs - fset.left) / (fset.peak - fset.left)
    falling = np.ones_like(xs) if fset.right == fset.peak else (fset.right - xs) / (fset.right - fset.peak)
    mu = np.minimum(rising, falling)
    mu[(xs < fset.left) | (xs > fset.right)] = 0.0
    return np.clip(mu, 0.0, 1.0)


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    lo: float
    hi: float
    step: float
    sets: tuple[tuple[str, TriangularSet], ...]

    def __post_init__(self) -> None:
        if not (self.lo < self.hi):
            raise FuzzyDefinitionError(f"{self.name}: universe needs lo < hi")
        if self.step <= 0:
            raise FuzzyDefinitionError(f"{self.name}: step must be > 0")
        names = [n for n, _ in self.sets]
        if len(names) != len(set(names)):
            raise FuzzyDefinitionError(f"{self.name}: duplicate set names")
        if not names:
            raise FuzzyDefinitionError(f"{self.name}: needs at least one set")
        for n, s in self.sets:
            if s.left < self.lo - 1e-9 or s.right > self.hi + 1e-9:
                raise FuzzyDefinitionError(f"{self.name}: set {n!r} outside universe")
        xs = self.samples()
        coverage = np.zeros_like(xs)
        for _, s in self.sets:
            coverage = np.maximum(coverage, membership_profile(s, xs))
        # endpoints may sit exactly on a shoulder foot; everything else must be covered
        if np.any(coverage[1:-1] <= 0.0):
            raise FuzzyDefinitionError(f"{self.name}: universe not covered by sets")

    def samples(self) -> np.ndarray:
        n = int(round((self.hi - self.lo) / self.step)) + 1
        return np.linspace(self.lo, self.hi, n)

    def get(self, set_name: str) -> TriangularSet:
        for n, s in self.sets:
            if n == set_name:
                return s
        raise FuzzyDefinitionError(f"{self.name}: no set named {set_name!r}")

    def fuzzify(self, x: float) -> dict[str, float]:
        return {n: membership(s, x) for n, s in self.sets}


@dataclass(frozen=True)
class Rule:
    angle_set: str
    center_set: str
    output_set: str


@dataclass(frozen=True)
class FuzzyController:
    angle: LinguisticVariable
    center: LinguisticVariable
    output: LinguisticVariable
    rules: tuple[Rule, ...]
    output_gain: float = 1.0

    def __post_init__(self) -> None:
        if not self.rules:
            raise FuzzyDefinitionError("rule base must be non-empty")
        antecedents = [(r.angle_set, r.center_set) for r in self.rules]
        if len(antecedents) != len(set(antecedents)):
            raise FuzzyDefinitionError("duplicate rule antecedents")
        for r in self.rules:
            self.angle.get(r.angle_set)
            self.center.get(r.center_set)
            self.output.get(r.output_set)


def defuzzify_centroid(samples: Iterable[tuple[float, float]]) -> float:
    """Weighted mean of (value, weight) samples; raises NoRuleFired if all
    weights are zero."""
    num = 0.0
    den = 0.0
    for value, weight in samples:
        num += weight * value
        den += weight
    if den <= 0.0:
        raise NoRuleFired("no rule fired")
    return num / den


def rule_activations(ctrl: FuzzyController, angle_dev: float, center_dev: float) -> list[tuple[Rule, float]]:
    """min-AND activation of every rule for clamped crisp inputs."""
    a = min(max(angle_dev, ctrl.angle.lo), ctrl.angle.hi)
    c = min(max(center_dev, ctrl.center.lo), ctrl.center.hi)
    mu_a = ctrl.angle.fuzzify(a)
    mu_c = ctrl.center.fuzzify(c)
    return [(r, min(mu_a[r.angle_set], mu_c[r.center_set])) for r in ctrl.rules]


def controller_step(ctrl: FuzzyController, angle_dev: float, center_dev: float) -> float:
    """Crisp wheel-speed-difference output for one control step.

    Full Mamdani pipeline over the sampled output universe; returns 0.0 when
    no rule fires. The result is scaled by the controller's output_gain.
    """
    activations = rule_activations(ctrl, angle_dev, center_dev)
    xs = ctrl.output.samples()
    aggregate = np.zeros_like(xs)
    for rule, act in activations:
        if act <= 0.0:
            continue
        clipped = np.minimum(membership_profile(ctrl.output.get(rule.output_set), xs), act)
        aggregate = np.maximum(aggregate, clipped)
    try:
        crisp = defuzzify_centroid(zip(xs.tolist(), aggregate.tolist()))
    except NoRuleFired:
        return 0.0
    return ctrl.output_gain * crisp


def _three_set_partition(lo: float, hi: float) -> tuple[tuple[str, TriangularSet], ...]:
    """negative / zero / positive partition with shoulders at the ends and
    the zero apex at 0; requires lo < 0 < hi."""
    if not (lo < 0.0 < hi):
        raise FuzzyDefinitionError("universe must straddle 0 for the N/Z/P partition")
    return (
        ("negative", TriangularSet(lo, lo, 0.0)),
        ("zero", TriangularSet(lo, 0.0, hi)),
        ("positive", TriangularSet(0.0, hi, hi)),
    )


PAPER3_RULES = (
    Rule("negative", "negative", "negative"),
    Rule("zero", "zero", "zero"),
    Rule("positive", "positive", "positive"),
)

# Full 3x3 table. Mixed-sign antecedents map to the weaker consequent so the
# table stays odd-symmetric: table(-a, -c) == -table(a, c).
FULL9_RULES = PAPER3_RULES + (
    Rule("negative", "zero", "negative"),
    Rule("negative", "positive", "zero"),
    Rule("zero", "negative", "negative"),
    Rule("zero", "positive", "positive"),
    Rule("positive", "negative", "zero"),
    Rule("positive", "zero", "positive"),
)

RULE_VARIANTS = {"paper3": PAPER3_RULES, "full9": FULL9_RULES}


def default_controller(
    rules: str = "paper3",
    output_gain: float = 1.0,
    angle_universe: tuple[float, float, float] = (-10.0, 10.0, 0.1),
    center_universe: tuple[float, float, float] = (-100.0, 100.0, 1.0),
    output_universe: tuple[float, float, float] = (-10.0, 10.0, 0.1),
) -> FuzzyController:
    """Controller with the stock N/Z/P variables: angle deviation in degrees
    over +/-10, center deviation in millimeters over +/-100, wheel-speed
    difference in rad/s over +/-10."""
    if rules not in RULE_VARIANTS:
        raise FuzzyDefinitionError(f"unknown rule variant {rules!r} (choices: paper3, full9)")

    def var(name: str, universe: tuple[float, float, float]) -> LinguisticVariable:
        lo, hi, step = universe
        return LinguisticVariable(name, lo, hi, step, _three_set_partition(lo, hi))

    return FuzzyController(
        angle=var("angle_deviation", angle_universe),
        center=var("center_deviation", center_universe),
        output=var("speed_difference", output_universe),
        rules=RULE_VARIANTS[rules],
        output_gain=output_gain,
    )
