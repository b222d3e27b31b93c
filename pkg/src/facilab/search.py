"""Adversarial searches: misreport fuzzing and worst-ratio profile hunts.

All randomness flows from a single 64-bit seed through a counter-based
Philox generator; restart r uses the stream ``Philox(key=seed).jumped(r)``,
so results are reproducible and independent of worker count, and enlarging
the budget only extends the candidate stream (best-so-far is retained).

Structured profile families (clustered, collinear, simplex vertices,
two-cluster splits, and the known hard instances) are seeded before any
random sampling, so extremal profiles are hit deterministically at any
budget.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .geometry import (
    GEOM_TOL,
    IMPROVE_MARGIN,
    Norm,
    Point,
    Profile,
    centroid,
    expected_distance,
)
from .mechanisms import MechanismLike, resolve
from .objectives import (
    Objective,
    OptResult,
    approx_ratio,
    cost,
    opt_value_upper,
)
from .properties import (
    Witness,
    check_group_strategyproof_at,
    check_strategyproof_at,
)

CANDIDATE_KINDS = (
    "axis_steps",
    "common_point",
    "gaussian_jitter",
    "grid_near_support",
    "segment_points",
)


@dataclass(frozen=True)
class SearchConfig:
    rng_seed: int = 0
    restarts: int = 100
    local_steps: int = 24
    coalition_max_size: Optional[int] = None
    candidate_kinds: frozenset = frozenset(CANDIDATE_KINDS)
    bounding_scale: float = 4.0

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        unknown = set(self.candidate_kinds) - set(CANDIDATE_KINDS)
        if unknown:
            raise ValueError(f"unknown candidate kinds {sorted(unknown)}")
        object.__setattr__(self, "candidate_kinds", frozenset(self.candidate_kinds))


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(stream))


DISCUSSION_PROFILE = Profile.from_rows(
    [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 1, 1)]
)


def structured_profiles(n: int, d: int) -> list[Profile]:
    """Deterministic hard-instance families, emitted before random draws.

    Includes the isolated-agent cluster (x1 alone, everyone else together),
    its reverse, collinear spreads, simplex vertices, two-cluster splits,
    sign-straddling first coordinates, and fixed asymmetric profiles.
    """
    e1 = np.zeros(d)
    e1[0] = 1.0
    eye = np.eye(d)
    rows: list[np.ndarray] = []

    def add(points: Sequence[np.ndarray]) -> None:
        rows.append(np.asarray(points, dtype=float))

    # known extremal instances go first so any budget reaches them
    if n == 5 and d == 3:
        rows.append(DISCUSSION_PROFILE.as_array)
    add([e1] + [np.zeros(d)] * (n - 1))  # isolated first agent
    add([np.zeros(d)] + [e1] * (n - 1))  # reversed cluster
    if n >= 3 and d >= 2:
        add([eye[0], eye[1], np.zeros(d)] + [eye[0]] * (n - 3))  # non-collinear triangle
    for k in range(1, n):  # two-cluster splits
        add([np.zeros(d)] * k + [e1] * (n - k))
    add([k * e1 for k in range(n)])  # collinear spread
    add([eye[i % d] * (1.0 + i // d) for i in range(n)])  # simplex-ish vertices
    if n == 4 and d == 2:
        add([np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([1.0, 1.0])])
    # first coordinates straddling both signs (branch-sensitive mechanisms)
    base = [(i + 1.0) * eye[i % d] for i in range(n)]
    add([0.7 * e1] + base[1:])
    add([-0.7 * e1] + base[1:])
    # fixed asymmetric profiles (no axis alignment, no symmetry)
    gen = _rng(0x5EED_FAC1, 0)
    for _ in range(2):
        add(gen.normal(size=(n, d)))
    return [Profile.from_rows(r) for r in rows]


def _profile_stream(n: int, d: int, config: SearchConfig) -> Iterator[tuple[int, Profile]]:
    """Structured profiles first, then seeded random ones, `restarts` total."""
    structured = structured_profiles(n, d)
    for r in range(config.restarts):
        if r < len(structured):
            yield r, structured[r]
        else:
            gen = _rng(config.rng_seed, r)
            yield r, Profile.from_rows(gen.normal(size=(n, d)) * 2.0)


def _scale(profile: Profile, norm: Norm) -> float:
    diam = profile.diameter(norm)
    return diam if diam > GEOM_TOL else 1.0


def _clip_box(profile: Profile, scale: float, bounding_scale: float):
    lo, hi = profile.bounding_box()
    pad = bounding_scale * scale
    return lo - pad, hi + pad


def _pattern_minimize(fn, start: np.ndarray, scale: float, max_sweeps: int, lo, hi):
    """Coordinate pattern search: geometric step decay x0.5 from scale/4.

    Directions are axis-aligned plus the all-ones diagonal; candidates are
    clipped to [lo, hi].  Returns (best_x, best_value, evals).
    """
    d = start.size
    x = np.clip(start, lo, hi)
    best = fn(x)
    evals = 1
    step = scale / 4.0
    dirs = list(np.eye(d)) + [np.ones(d) / math.sqrt(d)]
    sweeps = 0
    while step > 1e-7 * scale and sweeps < max_sweeps:
        improved = False
        for direction in dirs:
            for sign in (1.0, -1.0):
                cand = np.clip(x + sign * step * direction, lo, hi)
                val = fn(cand)
                evals += 1
                if val < best - 1e-15:
                    best, x = val, cand
                    improved = True
        sweeps += 1
        if not improved:
            step *= 0.5
    return x, best, evals


# -- single-agent misreport search --------------------------------------------


def _sp_candidates(
    profile: Profile,
    agent: int,
    norm: Norm,
    mech_fn,
    rng: np.random.Generator,
    config: SearchConfig,
) -> list[np.ndarray]:
    xi = profile.agent(agent).as_array()
    xs = profile.as_array
    scale = _scale(profile, norm)
    truth_lot = mech_fn(profile, norm)
    out: list[np.ndarray] = []
    for kind in sorted(config.candidate_kinds):
        if kind == "common_point":
            out.append(centroid(truth_lot).as_array())
            out.append(xs.mean(axis=0))
            out.append(np.median(xs, axis=0))
            out.extend(xs[j] for j in range(profile.n) if j != agent - 1)
        elif kind == "segment_points":
            for j in range(profile.n):
                if j == agent - 1:
                    continue
                for t in (0.25, 0.5, 0.75, 1.0):
                    out.append(xi + t * (xs[j] - xi))
        elif kind == "gaussian_jitter":
            for sigma in (0.05, 0.25, 1.0):
                out.append(xi + sigma * scale * rng.normal(size=profile.d))
        elif kind == "grid_near_support":
            for _, pt in truth_lot.atoms:
                arr = pt.as_array()
                out.append(arr)
                for k in range(profile.d):
                    off = np.zeros(profile.d)
                    off[k] = 0.1 * scale
                    out.append(arr + off)
                    out.append(arr - off)
        elif kind == "axis_steps":
            for h in (0.5, 0.1, 0.02):
                for k in range(profile.d):
                    off = np.zeros(profile.d)
                    off[k] = h * scale
                    out.append(xi + off)
                    out.append(xi - off)
    lo, hi = _clip_box(profile, scale, config.bounding_scale)
    return [np.clip(c, lo, hi) for c in out]


def search_sp_violation(
    mech: MechanismLike, norm: Norm, n: int, d: int, config: SearchConfig
) -> Optional[Witness]:
    """Hunt for a single-agent misreport with a strict expected-cost gain.

    Candidate misreports are drawn per agent from the configured kinds and
    refined by pattern search on the agent's cost; the first candidate that
    re-validates through the strategyproofness checker (gain beyond
    IMPROVE_MARGIN) is returned.
    """
    fn = resolve(mech)
    for r, profile in _profile_stream(n, d, config):
        rng = _rng(config.rng_seed, r)
        scale = _scale(profile, norm)
        lo, hi = _clip_box(profile, scale, config.bounding_scale)
        for agent in range(1, n + 1):
            xi = profile.agent(agent)
            truth_cost = expected_distance(xi, fn(profile, norm), norm)

            def misreport_cost(z: np.ndarray) -> float:
                moved = profile.replaced(agent, Point.from_array(z))
                return expected_distance(xi, fn(moved, norm), norm)

            cands = _sp_candidates(profile, agent, norm, fn, rng, config)
            if not cands:
                continue
            vals = [misreport_cost(c) for c in cands]
            best_idx = int(np.argmin(vals))
            best_x, best_val = cands[best_idx], vals[best_idx]
            if best_val < truth_cost + 0.25 * scale:
                best_x, best_val, _ = _pattern_minimize(
                    misreport_cost, best_x, scale, config.local_steps, lo, hi
                )
            if best_val < truth_cost - IMPROVE_MARGIN:
                verdict = check_strategyproof_at(
                    mech, profile, agent, Point.from_array(best_x), norm
                )
                if not verdict.passed and not verdict.inconclusive:
                    return verdict.witness
    return None


# -- coalition misreport search ------------------------------------------------


def _gsp_common_targets(
    profile: Profile, coalition: tuple[int, ...], norm: Norm, mech_fn
) -> list[np.ndarray]:
    xs = profile.as_array
    members = xs[[i - 1 for i in coalition]]
    truth_lot = mech_fn(profile, norm)
    targets = [
        centroid(truth_lot).as_array(),
        xs.mean(axis=0),
        members.mean(axis=0),
        np.median(xs, axis=0),
        members.min(axis=0),
        members.max(axis=0),
    ]
    targets.extend(pt.as_array() for _, pt in truth_lot.atoms)
    return targets


def search_gsp_violation(
    mech: MechanismLike, norm: Norm, n: int, d: int, config: SearchConfig
) -> Optional[Witness]:
    """Hunt for a coalition misreport making every member strictly better.

    Coalitions are enumerated by size then lexicographically.  The main
    generator is the all-members-report-one-point move (output centroid,
    coalition centroid and extremes, atom points), refined by pattern
    search on the worst member's gain; per-member segment moves and
    correlated jitter follow.  Witnesses re-validate through the group
    checker before being returned.
    """
    fn = resolve(mech)
    coalition_cap = config.coalition_max_size or n
    if coalition_cap > n:
        raise ValueError("coalition_max_size exceeds n")
    kinds = sorted(config.candidate_kinds)
    for r, profile in _profile_stream(n, d, config):
        rng = _rng(config.rng_seed, r)
        scale = _scale(profile, norm)
        lo, hi = _clip_box(profile, scale, config.bounding_scale)
        truth_lot = fn(profile, norm)
        before = {
            i: expected_distance(profile.agent(i), truth_lot, norm)
            for i in range(1, n + 1)
        }
        for size in range(1, coalition_cap + 1):
            for coalition in itertools.combinations(range(1, n + 1), size):
                members = [profile.agent(i) for i in coalition]

                def joint_margin(reports: Sequence[Point]) -> float:
                    moved = profile.replaced_many(coalition, tuple(reports))
                    lot = fn(moved, norm)
                    return max(
                        expected_distance(x, lot, norm) - before[i]
                        for i, x in zip(coalition, members)
                    )

                def common_margin(z: np.ndarray) -> float:
                    pt = Point.from_array(np.clip(z, lo, hi))
                    return joint_margin([pt] * size)

                best_margin = math.inf
                best_reports: Optional[list[Point]] = None
                if "common_point" in kinds or "grid_near_support" in kinds:
                    targets = _gsp_common_targets(profile, coalition, norm, fn)
                    vals = [common_margin(t) for t in targets]
                    k = int(np.argmin(vals))
                    z, val, _ = _pattern_minimize(
                        common_margin, targets[k], scale, config.local_steps, lo, hi
                    )
                    if val < best_margin:
                        best_margin = val
                        best_reports = [Point.from_array(np.clip(z, lo, hi))] * size
                if "segment_points" in kinds:
                    center = np.asarray([m.coords for m in members]).mean(axis=0)
                    for t in (0.5, 1.0):
                        reports = [
                            Point.from_array(m.as_array() + t * (center - m.as_array()))
                            for m in members
                        ]
                        val = joint_margin(reports)
                        if val < best_margin:
                            best_margin, best_reports = val, reports
                if "gaussian_jitter" in kinds:
                    for sigma in (0.1, 0.5):
                        for _ in range(2):
                            shift = sigma * scale * rng.normal(size=d)
                            reports = [
                                Point.from_array(np.clip(m.as_array() + shift, lo, hi))
                                for m in members
                            ]
                            val = joint_margin(reports)
                            if val < best_margin:
                                best_margin, best_reports = val, reports
                if "axis_steps" in kinds:
                    for h in (0.5, 0.1):
                        for k in range(d):
                            off = np.zeros(d)
                            off[k] = h * scale
                            for sign in (1.0, -1.0):
                                reports = [
                                    Point.from_array(np.clip(m.as_array() + sign * off, lo, hi))
                                    for m in members
                                ]
                                val = joint_margin(reports)
                                if val < best_margin:
                                    best_margin, best_reports = val, reports
                if best_reports is not None and best_margin < -IMPROVE_MARGIN:
                    verdict = check_group_strategyproof_at(
                        mech, profile, coalition, best_reports, norm
                    )
                    if not verdict.passed and not verdict.inconclusive:
                        return verdict.witness
    return None


# -- worst-case ratio search ----------------------------------------------------


@dataclass(frozen=True)
class WorstRatioResult:
    """Best ratio found, with the certified interval of the extremal profile.

    ``ratio`` is the search's monotone score cost / (cheap optimum upper
    bound); it never exceeds the true ratio of the profile nor the
    certified interval's upper end.  ``lo``/``hi`` come from re-certifying
    the extremal profile with the full optimizer.
    """

    profile: Profile
    ratio: float
    lo: float
    hi: float
    cost: float
    opt: OptResult
    evaluations: int


def search_worst_ratio(
    mech: MechanismLike,
    norm: Norm,
    objective: Objective,
    n: int,
    d: int,
    config: SearchConfig,
    certify_budget: int = 60_000,
) -> WorstRatioResult:
    """Maximize the mechanism's approximation ratio over profiles.

    Structured families run first, then random restarts; each profile is
    hill-climbed in profile space (per-agent axis directions plus per-agent
    diagonals, geometric step decay).  Scoring uses a feasible upper bound
    on the optimum, so scores never exceed true ratios and the best-so-far
    score is monotone in the budget.
    """
    fn = resolve(mech)
    evaluations = 0

    def score(arr: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        profile = Profile.from_rows(arr.reshape(n, d))
        upper = opt_value_upper(objective, profile, norm)
        lot = fn(profile, norm)
        c = cost(objective, lot, profile, norm)
        if upper <= GEOM_TOL * GEOM_TOL:
            return 1.0  # unanimous profile: cost is 0 as well
        return c / upper

    best_score = -math.inf
    best_profile: Optional[Profile] = None
    box = 8.0  # profiles confined to [-box, box]^d; ratios are scale-invariant
    lo = np.full(n * d, -box)
    hi = np.full(n * d, box)
    for r, profile in _profile_stream(n, d, config):
        start = np.clip(profile.as_array.reshape(-1), lo, hi)
        climb_scale = max(1.0, profile.diameter(norm))
        x, val, _ = _pattern_minimize(
            lambda arr: -score(arr), start, climb_scale, config.local_steps, lo, hi
        )
        if -val > best_score:
            best_score = -val
            best_profile = Profile.from_rows(x.reshape(n, d))
    assert best_profile is not None
    certified = approx_ratio(mech, best_profile, norm, objective, certify_budget)
    return WorstRatioResult(
        profile=best_profile,
        ratio=best_score,
        lo=min(certified.lo, best_score),
        hi=certified.hi,
        cost=certified.cost,
        opt=certified.opt,
        evaluations=evaluations,
    )
