"""Geometric substrate: points, norms, profiles, finite-support lotteries.

Everything downstream (mechanisms, objectives, property checks) consumes
these types.  All types are immutable after construction and every
operation is pure, so they are safe to evaluate from many workers with no
coordination.

Tolerance ledger, shared across the package:

* ``WEIGHT_TOL`` (1e-12): lottery weight bookkeeping.
* ``GEOM_TOL`` (1e-9): geometric identities and pass/fail slack.
* ``IMPROVE_MARGIN`` (1e-6): strict-improvement threshold in violation
  searches.

The gap between ``GEOM_TOL`` and ``IMPROVE_MARGIN`` separates float noise
from genuine strict inequalities; outcomes landing in between are reported
as inconclusive rather than as either verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

WEIGHT_TOL = 1e-12
GEOM_TOL = 1e-9
IMPROVE_MARGIN = 1e-6


class DimensionMismatch(ValueError):
    """Operands live in different dimensions."""


@dataclass(frozen=True)
class Point:
    """A location in R^d, d >= 1.  Coordinates are finite floats."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        coords = tuple(float(c) for c in self.coords)
        if len(coords) < 1:
            raise ValueError("a point needs at least one coordinate")
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"non-finite coordinate in {coords!r}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_array(cls, arr: Iterable[float]) -> "Point":
        return cls(tuple(float(c) for c in arr))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def __add__(self, other: "Point") -> "Point":
        _same_dim(self, other)
        return Point(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Point") -> "Point":
        _same_dim(self, other)
        return Point(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, c: float) -> "Point":
        return Point(tuple(c * a for a in self.coords))


def point(*coords: float) -> Point:
    """Shorthand constructor: ``point(1, 2)`` instead of ``Point((1, 2))``."""
    return Point(tuple(coords))


def _same_dim(a: Point, b: Point) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension mismatch: {a.dim} vs {b.dim}")


@dataclass(frozen=True)
class Norm:
    """A declared-structure norm on R^d.

    ``p`` is the exponent in [1, inf].  Optional positive per-dimension
    ``weights`` enter as (sum_i w_i |u_i|^p)^(1/p) (for p = inf the value
    is max_i w_i |u_i|), and the optional invertible ``transform`` matrix
    is applied to the argument before evaluation.  The norm is strictly
    convex exactly when p lies strictly between 1 and infinity; weights
    and transform preserve that.
    """

    p: float
    weights: Optional[tuple[float, ...]] = None
    transform: Optional[tuple[tuple[float, ...], ...]] = None

    def __post_init__(self) -> None:
        p = float(self.p)
        if math.isnan(p) or p < 1.0:
            raise ValueError(f"norm exponent must be in [1, inf], got {p}")
        object.__setattr__(self, "p", p)
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if not w or any(not math.isfinite(x) or x <= 0.0 for x in w):
                raise ValueError("norm weights must be positive finite reals")
            object.__setattr__(self, "weights", w)
        if self.transform is not None:
            rows = tuple(tuple(float(x) for x in row) for row in self.transform)
            mat = np.asarray(rows, dtype=float)
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise ValueError("norm transform must be a square matrix")
            if not np.all(np.isfinite(mat)):
                raise ValueError("norm transform must be finite")
            if np.linalg.cond(mat) > 1e12:
                raise ValueError("norm transform must be invertible")
            if self.weights is not None and len(self.weights) != mat.shape[0]:
                raise ValueError("weights and transform disagree on dimension")
            object.__setattr__(self, "transform", rows)

    @property
    def strictly_convex(self) -> bool:
        return 1.0 < self.p < math.inf

    @property
    def dim(self) -> Optional[int]:
        """Pinned dimension, or None when the norm is dimension-agnostic."""
        if self.transform is not None:
            return len(self.transform)
        if self.weights is not None:
            return len(self.weights)
        return None

    @cached_property
    def _matrix(self) -> Optional[np.ndarray]:
        if self.transform is None:
            return None
        return np.asarray(self.transform, dtype=float)

    @cached_property
    def _weight_arr(self) -> Optional[np.ndarray]:
        if self.weights is None:
            return None
        return np.asarray(self.weights, dtype=float)

    def _check_dim(self, d: int) -> None:
        pinned = self.dim
        if pinned is not None and pinned != d:
            raise DimensionMismatch(f"norm expects dimension {pinned}, got {d}")

    def eval_many(self, vs: np.ndarray) -> np.ndarray:
        """Evaluate the norm on each row of an (m, d) array.

        The p-th powers are taken on max-factored coordinates so large
        exponents cannot overflow (ratios stay in [0, 1]).
        """
        vs = np.asarray(vs, dtype=float)
        if vs.ndim == 1:
            vs = vs[None, :]
        self._check_dim(vs.shape[1])
        if self._matrix is not None:
            vs = vs @ self._matrix.T
        u = np.abs(vs)
        w = self._weight_arr
        if self.p == math.inf:
            if w is not None:
                u = u * w
            return u.max(axis=1)
        if self.p == 1.0:
            if w is not None:
                u = u * w
            return u.sum(axis=1)
        if w is not None:
            u = u * w ** (1.0 / self.p)
        peak = u.max(axis=1)
        safe = np.where(peak > 0.0, peak, 1.0)
        ratios = u / safe[:, None]
        return peak * (ratios**self.p).sum(axis=1) ** (1.0 / self.p)

    def __call__(self, v) -> float:
        if isinstance(v, Point):
            arr = v.as_array()
        else:
            arr = np.asarray(v, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("norm argument must be finite")
        return float(self.eval_many(arr.reshape(1, -1))[0])

    def distance(self, a: Point, b: Point) -> float:
        _same_dim(a, b)
        return self(a.as_array() - b.as_array())


EUCLIDEAN = Norm(2.0)


def norm_eval(norm: Norm, v: Point) -> float:
    """Norm of a point, with dimension and finiteness checks."""
    return norm(v)


def parse_norm(text: str) -> Norm:
    """Parse a norm string: ``lp:<p>`` with optional ``;w=...`` and ``;A=...``.

    ``p`` may be ``inf``; weights are comma-separated positive reals; the
    transform is a row-major comma-separated square matrix.
    """
    parts = [s.strip() for s in text.strip().split(";") if s.strip()]
    if not parts or not parts[0].startswith("lp:"):
        raise ValueError(f"norm string must start with 'lp:<p>': {text!r}")
    p_text = parts[0][3:]
    p = math.inf if p_text in ("inf", "Inf", "INF") else float(p_text)
    weights = None
    transform = None
    for part in parts[1:]:
        if part.startswith("w="):
            weights = tuple(float(x) for x in part[2:].split(","))
        elif part.startswith("A="):
            flat = [float(x) for x in part[2:].split(",")]
            d = math.isqrt(len(flat))
            if d * d != len(flat):
                raise ValueError(f"transform must be square, got {len(flat)} entries")
            transform = tuple(tuple(flat[i * d : (i + 1) * d]) for i in range(d))
        else:
            raise ValueError(f"unknown norm component {part!r}")
    return Norm(p, weights, transform)


def format_norm(norm: Norm) -> str:
    """Inverse of :func:`parse_norm`."""
    p = "inf" if norm.p == math.inf else _fmt(norm.p)
    out = f"lp:{p}"
    if norm.weights is not None:
        out += ";w=" + ",".join(_fmt(w) for w in norm.weights)
    if norm.transform is not None:
        out += ";A=" + ",".join(_fmt(x) for row in norm.transform for x in row)
    return out


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass(frozen=True)
class Lottery:
    """Finite discrete probability distribution over points.

    Construction canonicalizes: exact-duplicate points are merged (weights
    summed), zero-weight atoms dropped, atoms sorted lexicographically by
    coordinates, and the total weight must equal 1 within ``WEIGHT_TOL``.
    Canonicalization is idempotent, so lottery equality is bit-stable.
    """

    atoms: tuple[tuple[float, Point], ...]

    def __post_init__(self) -> None:
        groups: dict[tuple[float, ...], list[float]] = {}
        dim = None
        for w, pt in self.atoms:
            w = float(w)
            if not isinstance(pt, Point):
                pt = Point(tuple(pt))
            if dim is None:
                dim = pt.dim
            elif pt.dim != dim:
                raise DimensionMismatch("lottery atoms live in different dimensions")
            if w < 0.0 or not math.isfinite(w):
                raise ValueError(f"atom weight must be a nonnegative real, got {w}")
            if w == 0.0:
                continue
            groups.setdefault(pt.coords, []).append(w)
        if not groups:
            raise ValueError("lottery needs at least one atom with positive weight")
        merged = {coords: math.fsum(ws) for coords, ws in groups.items()}
        total = math.fsum(merged.values())
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"lottery weights sum to {total!r}, expected 1")
        if len(merged) == 1:
            # a full merge carries the whole unit mass exactly
            merged = {coords: 1.0 for coords in merged}
        atoms = tuple(
            (merged[coords], Point(coords)) for coords in sorted(merged.keys())
        )
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def degenerate(cls, pt: Point) -> "Lottery":
        """Deterministic output embedded as a one-atom lottery."""
        return cls(((1.0, pt),))

    @property
    def dim(self) -> int:
        return self.atoms[0][1].dim

    @property
    def is_degenerate(self) -> bool:
        return len(self.atoms) == 1

    @cached_property
    def points_array(self) -> np.ndarray:
        return np.asarray([pt.coords for _, pt in self.atoms], dtype=float)

    @cached_property
    def weights_array(self) -> np.ndarray:
        return np.asarray([w for w, _ in self.atoms], dtype=float)

    def support(self) -> tuple[Point, ...]:
        return tuple(pt for _, pt in self.atoms)

    def translate(self, shift: Point) -> "Lottery":
        return Lottery(tuple((w, pt + shift) for w, pt in self.atoms))


def expected_distance(x: Point, lot: Lottery, norm: Norm) -> float:
    """Expected norm distance between a fixed point and the lottery."""
    if x.dim != lot.dim:
        raise DimensionMismatch("point and lottery dimensions differ")
    dists = norm.eval_many(lot.points_array - x.as_array())
    return float(lot.weights_array @ dists)


def centroid(lot: Lottery) -> Point:
    """Expectation point of the lottery (coordinate-wise convex combination)."""
    return Point.from_array(lot.weights_array @ lot.points_array)


def radius(lot: Lottery, norm: Norm) -> float:
    """Expected distance from the lottery to its own centroid.

    Zero exactly when the lottery is degenerate.
    """
    if lot.is_degenerate:
        return 0.0
    c = lot.weights_array @ lot.points_array
    dists = norm.eval_many(lot.points_array - c)
    return float(lot.weights_array @ dists)


@dataclass(frozen=True)
class Profile:
    """Ordered reports of n agents sharing one dimension.

    Agent indices are 1-based throughout the public API.
    """

    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        pts = tuple(
            p if isinstance(p, Point) else Point(tuple(p)) for p in self.points
        )
        if len(pts) < 1:
            raise ValueError("profile needs at least one agent")
        d = pts[0].dim
        if any(p.dim != d for p in pts):
            raise DimensionMismatch("profile points live in different dimensions")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "Profile":
        return cls(tuple(Point(tuple(row)) for row in rows))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def d(self) -> int:
        return self.points[0].dim

    @cached_property
    def as_array(self) -> np.ndarray:
        return np.asarray([p.coords for p in self.points], dtype=float)

    def agent(self, i: int) -> Point:
        """Report of agent i (1-based)."""
        if not 1 <= i <= self.n:
            raise ValueError(f"agent index {i} outside [1, {self.n}]")
        return self.points[i - 1]

    def replaced(self, i: int, pt: Point) -> "Profile":
        """Profile with agent i's report (1-based) replaced."""
        if not 1 <= i <= self.n:
            raise ValueError(f"agent index {i} outside [1, {self.n}]")
        pts = list(self.points)
        pts[i - 1] = pt
        return Profile(tuple(pts))

    def replaced_many(
        self, coalition: Sequence[int], reports: Sequence[Point]
    ) -> "Profile":
        """Profile after the coalition (1-based indices) jointly misreports."""
        if len(coalition) != len(reports):
            raise ValueError("coalition and reports must align")
        pts = list(self.points)
        for i, rep in zip(coalition, reports):
            if not 1 <= i <= self.n:
                raise ValueError(f"agent index {i} outside [1, {self.n}]")
            pts[i - 1] = rep
        return Profile(tuple(pts))

    def translate(self, shift: Point) -> "Profile":
        return Profile(tuple(p + shift for p in self.points))

    def diameter(self, norm: Norm) -> float:
        arr = self.as_array
        diffs = arr[:, None, :] - arr[None, :, :]
        return float(norm.eval_many(diffs.reshape(-1, self.d)).max())

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        arr = self.as_array
        return arr.min(axis=0), arr.max(axis=0)


def strict_convexity_witness(
    norm: Norm, trials: int, rng_seed: int, d: Optional[int] = None
) -> Optional[tuple[Point, Point]]:
    """Search for distinct unit vectors x, y with ||x + y|| = ||x|| + ||y||.

    Directed trials (axis-aligned pairs and single-sign-flip pairs of the
    all-ones pattern) run first so L1 and Linf witnesses are found
    deterministically; random unit pairs follow.  Returns None when no
    violation of strict convexity is found within ``GEOM_TOL``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if d is None:
        d = norm.dim
    if d is None:
        raise ValueError("dimension-agnostic norm: pass d explicitly")

    def unit(vec: np.ndarray) -> Optional[np.ndarray]:
        length = norm(vec)
        if length < 1e-12:
            return None
        return vec / length

    candidates: list[tuple[np.ndarray, np.ndarray]] = []
    eye = np.eye(d)
    for i in range(d):
        for j in range(i + 1, d):
            candidates.append((eye[i], eye[j]))
    ones = np.ones(d)
    for k in range(d):
        flipped = ones.copy()
        flipped[k] = -1.0
        candidates.append((ones, flipped))

    rng = np.random.Generator(np.random.Philox(key=rng_seed))
    for _ in range(trials):
        candidates.append((rng.normal(size=d), rng.normal(size=d)))

    for raw_x, raw_y in candidates:
        x = unit(raw_x)
        y = unit(raw_y)
        if x is None or y is None:
            continue
        if np.max(np.abs(x - y)) <= 1e-6:
            continue  # unit vectors must be distinct
        if abs(norm(x + y) - 2.0) <= GEOM_TOL:
            return Point.from_array(x), Point.from_array(y)
    return None


def point_on_segment_at_distance(
    a: Point, b: Point, dist: float, norm: Norm
) -> Point:
    """The point on segment ab at norm-distance ``dist`` from a.

    Relies on absolute homogeneity: the point a + t(b-a) with
    t = dist / ||b-a|| sits exactly at distance ``dist`` from a.
    """
    if dist < -GEOM_TOL:
        raise ValueError(f"distance must be nonnegative, got {dist}")
    if dist <= 0.0:
        return a
    length = norm.distance(a, b)
    if length <= WEIGHT_TOL:
        raise ValueError("segment endpoints coincide but distance is positive")
    if dist > length + GEOM_TOL:
        raise ValueError(f"distance {dist} exceeds segment length {length}")
    t = min(dist / length, 1.0)
    return Point.from_array(a.as_array() + t * (b.as_array() - a.as_array()))


def is_on_segment(
    a: Point, b: Point, q: Point, norm: Norm, tol: float = GEOM_TOL
) -> bool:
    """Betweenness test ||a-q|| + ||q-b|| <= ||a-b|| + tol.

    A correct segment-membership characterization only for strictly convex
    norms; callers fall back to the Euclidean norm otherwise.
    """
    return norm.distance(a, q) + norm.distance(q, b) <= norm.distance(a, b) + tol


def lotteries_match(
    lhs: Lottery, rhs: Lottery, tol: float = GEOM_TOL
) -> tuple[bool, float]:
    """Compare two lotteries as measures, tolerating near-duplicate atoms.

    Atoms from both sides are clustered greedily (coordinates within
    ``tol``), then per-cluster weights are compared.  Returns (match,
    worst weight deviation).  Clustering makes the comparison robust to
    one side having merged exact duplicates that the other side kept a
    hair apart.
    """
    if lhs.dim != rhs.dim:
        raise DimensionMismatch("lottery dimensions differ")
    tagged = [(pt.as_array(), w, 0) for w, pt in lhs.atoms]
    tagged += [(pt.as_array(), w, 1) for w, pt in rhs.atoms]
    m = len(tagged)
    parent = list(range(m))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if np.max(np.abs(tagged[i][0] - tagged[j][0])) <= tol:
                parent[find(i)] = find(j)
    sums: dict[int, list[float]] = {}
    for i, (_, w, side) in enumerate(tagged):
        root = find(i)
        sums.setdefault(root, [0.0, 0.0])[side] += w
    worst = max(abs(a - b) for a, b in sums.values())
    return worst <= tol, worst
