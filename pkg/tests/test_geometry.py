"""Geometry layer: norm evaluation, lotteries, segment math, invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from facilab.geometry import (
    GEOM_TOL,
    DimensionMismatch,
    Lottery,
    Norm,
    Profile,
    centroid,
    expected_distance,
    format_norm,
    is_on_segment,
    lotteries_match,
    norm_eval,
    parse_norm,
    point,
    point_on_segment_at_distance,
    radius,
    strict_convexity_witness,
)

from conftest import STANDARD_NORMS, lottery_strategy, point_strategy


class TestNormEval:
    def test_euclidean_pythagorean(self):
        assert norm_eval(Norm(2.0), point(3, 4)) == pytest.approx(5.0, abs=1e-12)

    def test_l1_sum_of_abs(self):
        assert norm_eval(Norm(1.0), point(1, -2, 3)) == pytest.approx(6.0, abs=1e-12)

    def test_linf_max_abs(self):
        assert norm_eval(Norm(math.inf), point(1, -2)) == pytest.approx(2.0, abs=1e-12)

    def test_weighted_norm(self):
        n = Norm(2.0, weights=(4.0, 1.0))
        assert n(point(1, 0)) == pytest.approx(2.0, abs=1e-12)

    def test_transformed_norm(self):
        n = Norm(2.0, transform=((2.0, 0.0), (0.0, 1.0)))
        assert n(point(1, 0)) == pytest.approx(2.0, abs=1e-12)

    def test_dimension_mismatch_rejected(self):
        n = Norm(2.0, weights=(1.0, 1.0))
        with pytest.raises(DimensionMismatch):
            n(point(1, 2, 3))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            Norm(2.0)(np.array([math.nan, 0.0]))

    def test_bad_exponent_rejected(self):
        with pytest.raises(ValueError):
            Norm(0.5)

    def test_strict_convexity_flag(self):
        assert not Norm(1.0).strictly_convex
        assert not Norm(math.inf).strictly_convex
        assert Norm(1.5).strictly_convex
        assert Norm(2.0, weights=(2.0, 3.0)).strictly_convex

    def test_large_exponent_does_not_overflow(self):
        assert Norm(1000.0)(point(3, 1)) == pytest.approx(3.0, abs=1e-6)
        # two coordinates tie at magnitude 7: value is 7 * 2^(1/600)
        assert Norm(600.0)(point(-7, 2, 7)) == pytest.approx(7.0 * 2 ** (1 / 600), rel=1e-12)

    def test_zero_vector_any_exponent(self):
        for p in (1.0, 1.0001, 2.0, 500.0, math.inf):
            assert Norm(p)(point(0, 0)) == 0.0


@given(v=point_strategy(3), c=st.floats(-5, 5, allow_nan=False))
@settings(max_examples=200)
def test_homogeneity_sampled(v, c):
    for norm in STANDARD_NORMS:
        assert norm(v.scale(c)) == pytest.approx(abs(c) * norm(v), abs=GEOM_TOL)


@given(u=point_strategy(3), v=point_strategy(3))
@settings(max_examples=200)
def test_triangle_inequality_sampled(u, v):
    for norm in STANDARD_NORMS:
        assert norm(u + v) <= norm(u) + norm(v) + GEOM_TOL


@given(v=point_strategy(2))
@settings(max_examples=200)
def test_nonnegative_and_definite(v):
    norms = STANDARD_NORMS + [
        Norm(2.0, weights=(0.5, 3.0)),
        Norm(1.5, transform=((1.0, 0.5), (0.0, 1.0))),
    ]
    for norm in norms:
        val = norm(v)
        assert val >= 0.0
        if max(abs(c) for c in v.coords) > 1e-6:
            assert val > 0.0  # zero only at the zero vector
        assert norm(v.scale(0.0)) == 0.0


def test_norm_string_round_trip():
    for text in ("lp:2", "lp:1.5;w=1,2", "lp:inf", "lp:2;A=1,0,0,1", "lp:3;w=2,1;A=1,0,0,2"):
        norm = parse_norm(text)
        assert parse_norm(format_norm(norm)) == norm


def test_norm_string_rejects_garbage():
    for text in ("l2", "lp:2;q=1", "lp:2;A=1,2,3"):
        with pytest.raises(ValueError):
            parse_norm(text)


class TestLottery:
    def test_merges_duplicates_and_sorts(self):
        lot = Lottery(((0.25, point(1, 0)), (0.5, point(0, 0)), (0.25, point(1, 0))))
        assert lot.atoms == ((0.5, point(0, 0)), (0.5, point(1, 0)))

    def test_zero_weight_atoms_dropped(self):
        lot = Lottery(((1.0, point(0, 0)), (0.0, point(1, 1))))
        assert lot.is_degenerate

    def test_rejects_bad_total(self):
        with pytest.raises(ValueError):
            Lottery(((0.5, point(0, 0)),))

    def test_rejects_negative_weight(self):
        with pytest.raises(ValueError):
            Lottery(((1.5, point(0, 0)), (-0.5, point(1, 0))))

    @given(lot=lottery_strategy(2))
    @settings(max_examples=150)
    def test_canonicalization_idempotent(self, lot):
        again = Lottery(lot.atoms)
        assert again.atoms == lot.atoms


class TestDerivedQuantities:
    def test_expected_distance_hand_values(self):
        n2 = Norm(2.0)
        lot = Lottery(((0.5, point(3, 4)), (0.5, point(0, 0))))
        assert expected_distance(point(0, 0), lot, n2) == pytest.approx(2.5, abs=1e-12)
        assert expected_distance(point(7, 7), Lottery.degenerate(point(7, 7)), n2) == 0.0
        lot2 = Lottery(((0.25, point(1, 0)), (0.75, point(2, 0))))
        assert expected_distance(point(0, 0), lot2, n2) == pytest.approx(1.75, abs=1e-12)

    def test_centroid_hand_values(self):
        assert centroid(Lottery(((0.5, point(0, 0)), (0.5, point(2, 0))))) == point(1, 0)
        assert centroid(Lottery.degenerate(point(3, -1))) == point(3, -1)
        assert centroid(Lottery(((0.25, point(0, 0)), (0.75, point(4, 0))))) == point(3, 0)

    def test_radius_hand_values(self):
        n2 = Norm(2.0)
        assert radius(Lottery(((0.5, point(0, 0)), (0.5, point(2, 0)))), n2) == pytest.approx(1.0)
        assert radius(Lottery.degenerate(point(5, 5)), n2) == 0.0
        lot = Lottery(((0.25, point(0, 0)), (0.75, point(4, 0))))
        assert radius(lot, n2) == pytest.approx(1.5, abs=1e-12)

    @given(x=point_strategy(2), lot=lottery_strategy(2))
    @settings(max_examples=300)
    def test_jensen_centroid_dominance(self, x, lot):
        for norm in STANDARD_NORMS:
            assert expected_distance(x, lot, norm) >= norm.distance(x, centroid(lot)) - GEOM_TOL


class TestStrictConvexityWitness:
    def test_l1_axis_pair(self):
        witness = strict_convexity_witness(Norm(1.0), trials=5, rng_seed=0, d=2)
        assert witness is not None
        x, y = witness
        n1 = Norm(1.0)
        assert n1(x) == pytest.approx(1.0, abs=GEOM_TOL)
        assert n1(y) == pytest.approx(1.0, abs=GEOM_TOL)
        assert n1(x + y) == pytest.approx(2.0, abs=GEOM_TOL)

    def test_strictly_convex_norms_have_no_witness(self):
        for p in (1.5, 2.0, 3.0):
            assert strict_convexity_witness(Norm(p), trials=300, rng_seed=1, d=2) is None

    def test_linf_sign_flip_pair(self):
        witness = strict_convexity_witness(Norm(math.inf), trials=5, rng_seed=0, d=2)
        assert witness is not None
        x, y = witness
        ninf = Norm(math.inf)
        assert ninf(x + y) == pytest.approx(ninf(x) + ninf(y), abs=GEOM_TOL)
        assert max(abs(a - b) for a, b in zip(x.coords, y.coords)) > 1e-6

    def test_requires_dimension(self):
        with pytest.raises(ValueError):
            strict_convexity_witness(Norm(2.0), trials=5, rng_seed=0)


class TestSegment:
    def test_interior_point(self):
        got = point_on_segment_at_distance(point(2, 0), point(5, 0), 2.0, Norm(2.0))
        assert got == point(4, 0)

    def test_zero_distance_returns_start(self):
        assert point_on_segment_at_distance(point(1, 2), point(5, 5), 0.0, Norm(2.0)) == point(1, 2)

    def test_full_length(self):
        got = point_on_segment_at_distance(point(0, 0), point(0, 3), 3.0, Norm(2.0))
        assert got == point(0, 3)

    def test_too_far_rejected(self):
        with pytest.raises(ValueError):
            point_on_segment_at_distance(point(0, 0), point(1, 0), 2.0, Norm(2.0))

    def test_collapsed_segment_rejected(self):
        with pytest.raises(ValueError):
            point_on_segment_at_distance(point(0, 0), point(0, 0), 1.0, Norm(2.0))

    @given(
        a=point_strategy(2),
        b=point_strategy(2),
        t=st.floats(0, 1, allow_nan=False),
    )
    @settings(max_examples=300)
    def test_round_trip_distance(self, a, b, t):
        for norm in STANDARD_NORMS:
            length = norm.distance(a, b)
            if length < 1e-6:
                continue
            dist = t * length
            got = point_on_segment_at_distance(a, b, dist, norm)
            assert norm.distance(a, got) == pytest.approx(dist, abs=GEOM_TOL)
            assert is_on_segment(a, b, got, norm)


class TestProfile:
    def test_dimension_consistency_enforced(self):
        with pytest.raises(DimensionMismatch):
            Profile((point(0, 0), point(1, 2, 3)))

    def test_replace_and_translate(self):
        prof = Profile.from_rows([(0, 0), (2, 0)])
        assert prof.replaced(2, point(5, 5)).agent(2) == point(5, 5)
        shifted = prof.translate(point(1, 1))
        assert shifted.agent(1) == point(1, 1)

    def test_agent_indices_are_one_based(self):
        prof = Profile.from_rows([(0, 0), (2, 0)])
        assert prof.agent(1) == point(0, 0)
        with pytest.raises(ValueError):
            prof.agent(0)


class TestLotteriesMatch:
    def test_near_duplicate_atoms_cluster(self):
        eps = 1e-12
        lhs = Lottery(((0.5, point(1, 0)), (0.25, point(0, 0)), (0.25, point(2, 0))))
        rhs = Lottery(
            ((0.25, point(1, 0)), (0.25, point(1 + eps, 0)), (0.25, point(0, 0)), (0.25, point(2, 0)))
        )
        ok, dev = lotteries_match(lhs, rhs)
        assert ok and dev <= GEOM_TOL

    def test_interleaved_coordinates_still_cluster(self):
        # a far-apart atom sorting between two near-identical ones must not split them
        ulp = 1e-16
        lhs = Lottery(((0.5, point(0.5, -0.7)), (0.5, point(0.5, -1.0))))
        rhs = Lottery(((0.5, point(0.5 - ulp, -0.7)), (0.5, point(0.5, -1.0))))
        ok, dev = lotteries_match(lhs, rhs)
        assert ok, dev

    def test_detects_mass_mismatch(self):
        lhs = Lottery.degenerate(point(0, 0))
        rhs = Lottery(((0.5, point(0, 0)), (0.5, point(3, 0))))
        ok, dev = lotteries_match(lhs, rhs)
        assert not ok and dev == pytest.approx(0.5)
