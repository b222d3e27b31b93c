"""Shared fixtures, hypothesis strategies, and test-side oracles.

The brute-force helpers here are deliberately independent of the package's
optimizers and checkers: they re-derive expected values the slow way so
the fast paths have something honest to be compared against.
"""

import math

import numpy as np
import pytest
from hypothesis import strategies as st

from facilab.geometry import Lottery, Norm, Point, Profile

STANDARD_NORMS = [Norm(1.0), Norm(1.5), Norm(2.0), Norm(3.0), Norm(math.inf)]
STRICT_NORMS = [Norm(1.5), Norm(2.0), Norm(3.0)]

coord = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


def point_strategy(d: int):
    return st.lists(coord, min_size=d, max_size=d).map(lambda cs: Point(tuple(cs)))


def profile_strategy(d: int, min_n: int = 2, max_n: int = 5):
    return st.lists(point_strategy(d), min_size=min_n, max_size=max_n).map(
        lambda ps: Profile(tuple(ps))
    )


def lottery_strategy(d: int, max_atoms: int = 4):
    def build(rows):
        weights = [w for w, _ in rows]
        total = sum(weights)
        return Lottery(tuple((w / total, pt) for w, pt in rows))

    atom = st.tuples(st.floats(min_value=0.05, max_value=1.0), point_strategy(d))
    return st.lists(atom, min_size=1, max_size=max_atoms).map(build)


@pytest.fixture
def mean_mechanism():
    """Deliberately manipulable control: degenerate output at the average."""

    def mech(profile: Profile, norm: Norm) -> Lottery:
        return Lottery.degenerate(Point.from_array(profile.as_array.mean(axis=0)))

    return mech


def brute_force_minimize(fn, lo, hi, steps=161):
    """Dense-grid oracle over a box; returns (best value, best point array)."""
    axes = [np.linspace(lo[k], hi[k], steps) for k in range(len(lo))]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.reshape(-1) for g in grids], axis=1)
    vals = np.array([fn(p) for p in pts])
    k = int(np.argmin(vals))
    return float(vals[k]), pts[k]


def brute_social_cost(profile: Profile, norm: Norm, point_arr) -> float:
    return float(
        sum(norm(point_arr - p.as_array()) for p in profile.points)
    )


def brute_max_cost(profile: Profile, norm: Norm, point_arr) -> float:
    return float(
        max(norm(point_arr - p.as_array()) for p in profile.points)
    )
