"""Property checkers: worked examples, witness plumbing, verdict bands."""

import math

import numpy as np
import pytest
from hypothesis import given, settings

from facilab.geometry import GEOM_TOL, Lottery, Norm, Profile, point
from facilab.mechanisms import MechanismSpec
from facilab.properties import (
    PropertyVerdict,
    check_2dictatorship,
    check_cost_continuity,
    check_delta_bound,
    check_group_strategyproof_at,
    check_strategyproof_at,
    check_support_segment,
    check_translation_invariance,
    check_unanimity,
    check_uncompromising,
)

from conftest import point_strategy

N2 = Norm(2.0)
N1 = Norm(1.0)

RAND_MED = MechanismSpec("rand_med")
RAND_CENTER = MechanismSpec("rand_center")
DICTATOR = MechanismSpec("dictator", index=1)
SEP2D = MechanismSpec("sep2d", a=0.0)
COORD_MEDIAN = MechanismSpec("coord_median")


class TestStrategyproofAt:
    def test_rand_center_symmetric_misreport_is_neutral(self):
        prof = Profile.from_rows([(0, 0), (1, 0)])
        v = check_strategyproof_at(RAND_CENTER, prof, 1, point(-1, 0), N2)
        assert v.passed
        assert v.margin == pytest.approx(0.0, abs=GEOM_TOL)

    def test_dictator_immune_to_others(self):
        prof = Profile.from_rows([(3, 3), (0, 0)])
        v = check_strategyproof_at(DICTATOR, prof, 2, point(9, -9), N2)
        assert v.passed and v.margin == pytest.approx(0.0, abs=GEOM_TOL)

    def test_coord_median_truthful_is_optimal_for_agent(self):
        prof = Profile.from_rows([(0, 0), (1, 0), (2, 0)])
        # exhaustive grid of misreports: no gain anywhere (oracle for the checker)
        worst = math.inf
        for gx in np.linspace(-3, 3, 25):
            for gy in np.linspace(-3, 3, 25):
                v = check_strategyproof_at(COORD_MEDIAN, prof, 1, point(gx, gy), N2)
                worst = min(worst, v.margin)
                assert v.passed
        assert worst >= -GEOM_TOL

    def test_violation_produces_witness(self, mean_mechanism):
        prof = Profile.from_rows([(0, 0), (1, 0)])
        v = check_strategyproof_at(mean_mechanism, prof, 1, point(-1, 0), N2)
        assert not v.passed and not v.inconclusive
        assert v.witness is not None
        agent, before, after = v.witness.per_agent_delta[0]
        assert agent == 1
        assert before == pytest.approx(0.5) and after == pytest.approx(0.0)


class TestGroupStrategyproofAt:
    def test_discussion_coalition_violation(self):
        prof = Profile.from_rows([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 1, 1)])
        v = check_group_strategyproof_at(
            COORD_MEDIAN, prof, (1, 2, 3), [point(0, 0, 0)] * 3, N1
        )
        assert not v.passed and v.witness is not None
        for agent, before, after in v.witness.per_agent_delta:
            assert before == pytest.approx(2.0) and after == pytest.approx(1.0)
        assert v.margin == pytest.approx(-1.0)

    def test_identity_misreport_never_violates(self):
        prof = Profile.from_rows([(0.5, 1), (2, 0), (1, 1)])
        for spec in (RAND_MED, RAND_CENTER, DICTATOR, SEP2D, COORD_MEDIAN):
            v = check_group_strategyproof_at(
                spec, prof, (1, 2, 3), list(prof.points), N2
            )
            assert v.passed and v.margin == pytest.approx(0.0, abs=GEOM_TOL)

    def test_rand_med_joint_midpoint_is_neutral(self):
        # both members keep expected cost 1 before and after the joint move
        prof = Profile.from_rows([(0, 0), (2, 0)])
        v = check_group_strategyproof_at(RAND_MED, prof, (1, 2), [point(1, 0)] * 2, N2)
        assert v.passed
        assert v.margin == pytest.approx(0.0, abs=GEOM_TOL)

    def test_requires_alignment(self):
        prof = Profile.from_rows([(0, 0), (2, 0)])
        with pytest.raises(ValueError):
            check_group_strategyproof_at(RAND_MED, prof, (1, 2), [point(1, 0)], N2)


class TestUnanimity:
    def test_builtins_unanimous(self):
        zs = [point(0, 0), point(2, -3), point(0.5, 0.25)]
        for spec in (RAND_MED, RAND_CENTER, DICTATOR, SEP2D, COORD_MEDIAN):
            v = check_unanimity(spec, N2, zs)
            assert v.passed, spec

    def test_violating_mechanism_caught(self):
        def stubborn(profile, norm):
            return Lottery.degenerate(point(0, 0))

        v = check_unanimity(stubborn, N2, [point(1, 1)], n=2)
        assert not v.passed and v.witness is not None


class TestTranslationInvariance:
    def test_rand_med_invariant(self):
        profs = [Profile.from_rows([(0, 0), (2, 0)]), Profile.from_rows([(1, 1), (-2, 3)])]
        shifts = [point(1, 0), point(-0.5, 2)]
        assert check_translation_invariance(RAND_MED, N2, profs, shifts).passed

    def test_dictator_invariant(self):
        profs = [Profile.from_rows([(0, 0), (2, 0)])]
        assert check_translation_invariance(DICTATOR, N2, profs, [point(3, -1)]).passed

    def test_sep2d_fails_with_branch_switch_witness(self):
        profs = [Profile.from_rows([(2, 0), (5, 0), (0, 4)])]
        shifts = [point(-3, 0)]
        v = check_translation_invariance(SEP2D, N2, profs, shifts)
        assert not v.passed
        assert v.witness is not None
        assert v.witness.coalition == (1, 2, 3)
        # shifted profile output moved onto segment x1x3: a third of the mass strays
        assert v.margin <= -(1 / 3) + GEOM_TOL


class TestUncompromising:
    def test_dictator(self):
        v = check_uncompromising(DICTATOR, Profile.from_rows([(3, 3), (0, 0)]), N2)
        assert v.passed

    def test_coord_median_recomputed(self):
        v = check_uncompromising(COORD_MEDIAN, Profile.from_rows([(0, 0), (2, 0), (4, 0)]), N2)
        assert v.passed

    def test_rand_med_degenerate_profile(self):
        v = check_uncompromising(RAND_MED, Profile.from_rows([(1, 1), (1, 1), (9, 9)]), N2)
        assert v.passed

    def test_randomized_output_skipped(self):
        v = check_uncompromising(RAND_MED, Profile.from_rows([(0, 0), (2, 0)]), N2)
        assert v.passed and "skipped" in v.note

    def test_violating_mechanism_caught(self, mean_mechanism):
        v = check_uncompromising(mean_mechanism, Profile.from_rows([(0, 0), (2, 0), (1, 0)]), N2)
        assert not v.passed and v.witness is not None


class TestCostContinuity:
    def test_rand_center_small_move(self):
        prof = Profile.from_rows([(0, 0), (1, 0)])
        v = check_cost_continuity(RAND_CENTER, prof, 1, [point(0.1, 0)], N2)
        assert v.passed
        # own cost moves from 0.5 to 0.45: well within the 0.1 movement
        assert v.margin == pytest.approx(0.1 - 0.05, abs=1e-12)

    def test_dictator_own_cost_identically_zero(self):
        prof = Profile.from_rows([(3, 3), (0, 0)])
        v = check_cost_continuity(DICTATOR, prof, 1, [point(5, 5), point(-1, 2)], N2)
        assert v.passed

    def test_sep2d_across_branch_boundary(self):
        prof = Profile.from_rows([(0.05, 0), (5, 0), (-5, 4)])
        sweeps = [point(x, 0.0) for x in np.linspace(-0.4, 0.4, 41)]
        v = check_cost_continuity(SEP2D, prof, 1, sweeps, N2)
        assert v.passed, v.margin

    def test_discontinuous_mechanism_caught(self):
        # own cost jumps by ~10 across the boundary while the agent moves 0.002
        def jumpy(profile, norm):
            x = profile.agent(1)
            target = point(10, 0) if x.coords[0] > 0 else x
            return Lottery.degenerate(target)

        prof = Profile.from_rows([(0.001, 0), (1, 1)])
        v = check_cost_continuity(jumpy, prof, 1, [point(-0.001, 0)], N2)
        assert not v.passed and v.witness is not None


class TestSupportSegment:
    def test_rand_med_on_leader_segment(self):
        v = check_support_segment(RAND_MED, Profile.from_rows([(0, 0), (2, 0), (9, 9)]), N2)
        assert v.passed

    def test_sep2d_on_segment(self):
        v = check_support_segment(SEP2D, Profile.from_rows([(2, 0), (5, 0), (0, 4)]), N2)
        assert v.passed

    def test_rand_center_triangle_fails(self):
        v = check_support_segment(RAND_CENTER, Profile.from_rows([(0, 0), (1, 0), (0, 1)]), N2)
        assert not v.passed and v.witness is not None

    def test_degenerate_output_trivially_passes(self):
        v = check_support_segment(COORD_MEDIAN, Profile.from_rows([(0, 1), (1, 0)]), N2)
        assert v.passed and "degenerate" in v.note

    def test_non_strictly_convex_norm_flagged(self):
        v = check_support_segment(RAND_MED, Profile.from_rows([(0, 0), (2, 0)]), N1)
        assert v.passed and "Euclidean" in v.note


class TestTwoDictatorship:
    PROFILES = [
        Profile.from_rows([(0, 0), (2, 0), (5, 1)]),
        Profile.from_rows([(1, 1), (-1, 2), (0, 4)]),
        Profile.from_rows([(0.3, -2), (2, 1), (1, 1)]),
    ]

    def test_rand_med_pair_12(self):
        v = check_2dictatorship(RAND_MED, self.PROFILES, N2)
        assert v.passed and "(1, 2)" in v.note

    def test_dictator_degenerate_pair(self):
        v = check_2dictatorship(DICTATOR, self.PROFILES, N2)
        assert v.passed

    def test_rand_center_fails(self):
        v = check_2dictatorship(RAND_CENTER, self.PROFILES, N2)
        assert not v.passed and v.witness is not None

    def test_sep2d_fails_across_branches(self):
        profs = [
            Profile.from_rows([(2, 0), (5, 0), (0, 4)]),
            Profile.from_rows([(-2, 0), (5, 0), (0, 4)]),
        ]
        v = check_2dictatorship(SEP2D, profs, N2)
        assert not v.passed

    def test_needs_two_profiles(self):
        with pytest.raises(ValueError):
            check_2dictatorship(RAND_MED, self.PROFILES[:1], N2)


class TestDeltaBound:
    def test_rand_med_two_agents(self):
        # delta = 2, displacement 1 of 4: bound 8/3; measured 1.5
        v = check_delta_bound(RAND_MED, point(0, 0), point(4, 0), point(3, 0), N2)
        assert v.passed
        assert v.margin == pytest.approx(8.0 / 3.0 - 1.5, abs=1e-9)

    def test_identity_displacement_is_tight(self):
        v = check_delta_bound(RAND_MED, point(0, 0), point(4, 0), point(4, 0), N2)
        assert v.passed and v.margin == pytest.approx(0.0, abs=GEOM_TOL)

    def test_dictator_trivial(self):
        v = check_delta_bound(DICTATOR, point(0, 0), point(4, 0), point(2, 0), N2)
        assert v.passed

    def test_precondition_enforced(self):
        with pytest.raises(ValueError):
            check_delta_bound(RAND_MED, point(0, 0), point(1, 0), point(9, 0), N2)


class TestVerdictBands:
    def test_inconclusive_band(self):
        # a mechanism granting a gain inside the indeterminate band
        def nudge(profile, norm):
            x = profile.agent(1)
            if x == point(0, 0):
                return Lottery.degenerate(point(1e-8, 0))
            return Lottery.degenerate(point(0, 0))

        prof = Profile.from_rows([(0, 0), (1, 0)])
        v = check_strategyproof_at(nudge, prof, 1, point(-1, 0), N2)
        assert not v.passed and v.inconclusive and v.witness is None

    def test_status_strings(self):
        assert PropertyVerdict("x", True, 0.0).status == "pass"
        assert PropertyVerdict("x", False, -1.0).status == "fail"
        assert PropertyVerdict("x", False, -1e-8, inconclusive=True).status == "inconclusive"

    @given(z=point_strategy(2))
    @settings(max_examples=50)
    def test_singleton_coalition_matches_individual_check(self, z):
        prof = Profile.from_rows([(0, 0), (2, 0), (1, 3)])
        a = check_strategyproof_at(RAND_CENTER, prof, 2, z, N2)
        b = check_group_strategyproof_at(RAND_CENTER, prof, (2,), [z], N2)
        assert a.passed == b.passed
        assert a.margin == pytest.approx(b.margin, abs=1e-12)
