"""Facility-location mechanisms as pure functions Profile -> Lottery.

Every mechanism is deterministic as a function of (spec, profile, norm):
the returned lottery *is* the randomness.  Mechanisms that ignore the norm
(dictator, rand_med, rand_center, coord_median) still take it so the
interface is uniform.  Agent indices are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .geometry import (
    Lottery,
    Norm,
    Point,
    Profile,
    point_on_segment_at_distance,
)

KINDS = ("dictator", "rand_med", "rand_center", "sep2d", "coord_median")

MechanismFn = Callable[[Profile, Norm], Lottery]


@dataclass(frozen=True)
class MechanismSpec:
    """Which mechanism to run, with its parameters.

    * ``dictator`` needs ``index`` (1-based agent).
    * ``sep2d`` needs the branch constant ``a``.
    """

    kind: str
    index: Optional[int] = None
    a: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown mechanism kind {self.kind!r}")
        if self.kind == "dictator":
            if self.index is None or int(self.index) < 1:
                raise ValueError("dictator needs a 1-based agent index")
            object.__setattr__(self, "index", int(self.index))
        elif self.index is not None:
            raise ValueError(f"{self.kind} takes no agent index")
        if self.kind == "sep2d":
            if self.a is None or not math.isfinite(float(self.a)):
                raise ValueError("sep2d needs a finite constant a")
            object.__setattr__(self, "a", float(self.a))
        elif self.a is not None:
            raise ValueError(f"{self.kind} takes no constant a")


def parse_mechanism(text: str) -> MechanismSpec:
    """Parse CLI syntax: dictator:1, rand_med, rand_center, sep2d:a=0.0, coord_median."""
    text = text.strip()
    if text.startswith("dictator:"):
        return MechanismSpec("dictator", index=int(text.split(":", 1)[1]))
    if text.startswith("sep2d:"):
        arg = text.split(":", 1)[1]
        if not arg.startswith("a="):
            raise ValueError(f"sep2d parameter must look like a=<real>: {text!r}")
        return MechanismSpec("sep2d", a=float(arg[2:]))
    if text in ("rand_med", "rand_center", "coord_median"):
        return MechanismSpec(text)
    raise ValueError(f"unknown mechanism string {text!r}")


def format_mechanism(spec: MechanismSpec) -> str:
    if spec.kind == "dictator":
        return f"dictator:{spec.index}"
    if spec.kind == "sep2d":
        return f"sep2d:a={spec.a:.17g}"
    return spec.kind


MechanismLike = Union[MechanismSpec, str, MechanismFn]


def resolve(mech: MechanismLike) -> MechanismFn:
    """Turn a spec, spec string, or callable into a Profile x Norm -> Lottery."""
    if callable(mech) and not isinstance(mech, MechanismSpec):
        return mech
    if isinstance(mech, str):
        mech = parse_mechanism(mech)
    spec = mech

    def run(profile: Profile, norm: Norm) -> Lottery:
        return apply(spec, profile, norm)

    return run


def describe(mech: MechanismLike) -> str:
    if isinstance(mech, MechanismSpec):
        return format_mechanism(mech)
    if isinstance(mech, str):
        return format_mechanism(parse_mechanism(mech))
    return getattr(mech, "__name__", repr(mech))


def apply(spec: MechanismSpec, profile: Profile, norm: Norm) -> Lottery:
    """Run the mechanism; output is a canonical lottery."""
    if spec.kind == "dictator":
        return apply_dictator(profile, spec.index)
    if spec.kind == "rand_med":
        return apply_rand_med(profile)
    if spec.kind == "rand_center":
        return apply_rand_center(profile)
    if spec.kind == "sep2d":
        return apply_separate_2dictator(profile, norm, spec.a)
    if spec.kind == "coord_median":
        return apply_coordinate_median(profile)
    raise ValueError(f"unknown mechanism kind {spec.kind!r}")


def apply_dictator(profile: Profile, index: int) -> Lottery:
    """Always the dictator's own report; everyone else is ignored."""
    return Lottery.degenerate(profile.agent(index))


def apply_rand_med(profile: Profile) -> Lottery:
    """x1 with weight 1/4, x2 with 1/4, their midpoint with 1/2.

    Agents beyond the first two never influence the output; when x1 = x2
    the atoms merge into a degenerate lottery.
    """
    if profile.n < 2:
        raise ValueError("rand_med needs at least 2 agents")
    x1, x2 = profile.agent(1), profile.agent(2)
    mid = Point.from_array((x1.as_array() + x2.as_array()) / 2.0)
    return Lottery(((0.25, x1), (0.25, x2), (0.5, mid)))


def apply_rand_center(profile: Profile) -> Lottery:
    """The mean report with weight 1/2, each agent's report with 1/(2n)."""
    if profile.n < 2:
        raise ValueError("rand_center needs at least 2 agents")
    n = profile.n
    if all(p == profile.points[0] for p in profile.points):
        return Lottery.degenerate(profile.points[0])  # n*z/n need not round back to z
    mean = Point.from_array(profile.as_array.mean(axis=0))
    atoms = [(0.5, mean)] + [(0.5 / n, p) for p in profile.points]
    return Lottery(tuple(atoms))


def apply_separate_2dictator(profile: Profile, norm: Norm, a: float) -> Lottery:
    """Two-thirds on x1, one-third on a capped point along x1x2 or x1x3.

    With r the first raw coordinate of x1: for r >= a the companion point
    sits on segment x1x2 at distance min(|r - a|, ||x1 - x2||) from x1;
    otherwise it sits on segment x1x3 at distance min(|r - a|, ||x1 - x3||).
    The branch constant makes the mechanism sensitive to translations along
    the first coordinate.
    """
    if profile.n < 3:
        raise ValueError("sep2d needs at least 3 agents")
    x1 = profile.agent(1)
    r = x1.coords[0]
    partner = profile.agent(2) if r >= a else profile.agent(3)
    gap = norm.distance(x1, partner)
    target = min(abs(r - a), gap)
    if target <= 0.0 or gap <= 1e-12:  # collapsed segment: companion is x1 itself
        companion = x1
    else:
        companion = point_on_segment_at_distance(x1, partner, target, norm)
    return Lottery(((2.0 / 3.0, x1), (1.0 / 3.0, companion)))


def apply_coordinate_median(profile: Profile) -> Lottery:
    """Degenerate lottery at the coordinate-wise median.

    For even n the lower median is taken in each coordinate, which keeps
    the output deterministic and independent of agent order.
    """
    arr = np.sort(profile.as_array, axis=0)
    med = arr[(profile.n - 1) // 2]
    return Lottery.degenerate(Point.from_array(med))
