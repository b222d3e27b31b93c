"""Adversarial search: controls, determinism, monotone budgets, fixtures.

Positive controls (mechanisms with known violations) must yield witnesses;
negative controls (mechanisms with proved guarantees) must yield none.
Fixture outcomes for the open cases record what the oracle run found.
"""

import pytest

from facilab.geometry import IMPROVE_MARGIN, Norm, point
from facilab.mechanisms import MechanismSpec
from facilab.objectives import Objective
from facilab.properties import check_group_strategyproof_at, check_strategyproof_at
from facilab.search import (
    DISCUSSION_PROFILE,
    SearchConfig,
    search_gsp_violation,
    search_sp_violation,
    search_worst_ratio,
    structured_profiles,
)

N2 = Norm(2.0)
N1 = Norm(1.0)

RAND_MED = MechanismSpec("rand_med")
RAND_CENTER = MechanismSpec("rand_center")
DICTATOR = MechanismSpec("dictator", index=1)
SEP2D = MechanismSpec("sep2d", a=0.0)
COORD_MEDIAN = MechanismSpec("coord_median")


def small_config(seed=0, restarts=10, steps=12, **kw):
    return SearchConfig(rng_seed=seed, restarts=restarts, local_steps=steps, **kw)


class TestStructuredProfiles:
    def test_families_present(self):
        profs = structured_profiles(4, 2)
        arrays = [p.as_array.tolist() for p in profs]
        assert [[1, 0], [0, 0], [0, 0], [0, 0]] in arrays  # isolated first agent
        assert [[0, 0], [1, 0], [2, 0], [3, 0]] in arrays  # collinear spread

    def test_discussion_profile_seeded_first(self):
        profs = structured_profiles(5, 3)
        assert profs[0] == DISCUSSION_PROFILE

    def test_deterministic(self):
        a = structured_profiles(4, 2)
        b = structured_profiles(4, 2)
        assert a == b


class TestSpSearch:
    def test_broken_mean_mechanism_caught(self, mean_mechanism):
        witness = search_sp_violation(mean_mechanism, N2, 2, 2, small_config())
        assert witness is not None
        agent = witness.coalition[0]
        _, before, after = witness.per_agent_delta[0]
        assert after < before - IMPROVE_MARGIN
        # witness re-validates through the checker
        v = check_strategyproof_at(
            mean_mechanism, witness.profile, agent, witness.misreports[0], N2
        )
        assert not v.passed

    def test_dictator_clean(self):
        assert search_sp_violation(DICTATOR, N2, 3, 2, small_config()) is None

    def test_rand_center_clean(self):
        for p in (1.5, 2.0, 3.0):
            w = search_sp_violation(RAND_CENTER, Norm(p), 3, 2, small_config(restarts=8))
            assert w is None, p

    def test_deterministic_witness(self, mean_mechanism):
        a = search_sp_violation(mean_mechanism, N2, 2, 2, small_config(seed=3))
        b = search_sp_violation(mean_mechanism, N2, 2, 2, small_config(seed=3))
        assert a == b


class TestGspSearch:
    def test_discussion_counterexample(self):
        witness = search_gsp_violation(COORD_MEDIAN, N1, 5, 3, small_config(restarts=2))
        assert witness is not None
        assert witness.profile == DISCUSSION_PROFILE
        assert witness.coalition == (1, 2, 3)
        assert all(m == point(0, 0, 0) for m in witness.misreports)
        for _, before, after in witness.per_agent_delta:
            assert before == pytest.approx(2.0) and after == pytest.approx(1.0)

    def test_rand_med_clean(self):
        assert search_gsp_violation(RAND_MED, N2, 4, 2, small_config(restarts=8)) is None

    def test_sep2d_clean(self):
        assert search_gsp_violation(SEP2D, N2, 3, 2, small_config(restarts=8)) is None

    def test_rand_center_n3_violated(self):
        # oracle-recorded fixture: coalition manipulation exists at n=3
        witness = search_gsp_violation(RAND_CENTER, N2, 3, 2, small_config(restarts=8))
        assert witness is not None
        v = check_group_strategyproof_at(
            RAND_CENTER, witness.profile, witness.coalition, witness.misreports, N2
        )
        assert not v.passed and not v.inconclusive
        for _, before, after in v.witness.per_agent_delta:
            assert after < before - IMPROVE_MARGIN

    def test_rand_center_n2_clean(self):
        # oracle-recorded fixture: no coalition gain at n=2 (the centroid
        # move is cost-neutral for two agents)
        assert search_gsp_violation(RAND_CENTER, N2, 2, 2, small_config(restarts=12)) is None

    def test_coalition_cap_respected(self):
        with pytest.raises(ValueError):
            search_gsp_violation(
                RAND_MED, N2, 3, 2, small_config(coalition_max_size=5)
            )

    def test_singleton_cap_blocks_group_moves(self):
        w = search_gsp_violation(
            RAND_CENTER, N2, 3, 2, small_config(restarts=6, coalition_max_size=1)
        )
        assert w is None  # individual manipulations alone cannot break it


class TestWorstRatio:
    def test_rand_med_sc_hits_half_n(self):
        for n in (3, 4):
            res = search_worst_ratio(RAND_MED, N2, Objective.SOCIAL_COST, n, 2, small_config())
            assert res.ratio == pytest.approx(n / 2, abs=1e-9)

    def test_rand_center_mc_hits_two_minus_one_over_n(self):
        res = search_worst_ratio(RAND_CENTER, N2, Objective.MAX_COST, 3, 2, small_config())
        assert res.ratio == pytest.approx(5 / 3, abs=1e-9)

    def test_dictator_mc_two(self):
        res = search_worst_ratio(DICTATOR, N2, Objective.MAX_COST, 2, 2, small_config())
        assert res.ratio == pytest.approx(2.0, abs=1e-9)

    def test_ratio_never_exceeds_certified_upper_end(self):
        for spec, obj in ((RAND_MED, Objective.SOCIAL_COST), (RAND_CENTER, Objective.MAX_COST)):
            res = search_worst_ratio(spec, N2, obj, 3, 2, small_config(seed=11))
            assert res.ratio <= res.hi + 1e-12
            assert res.lo <= res.hi

    def test_deterministic(self):
        a = search_worst_ratio(RAND_MED, N2, Objective.SOCIAL_COST, 3, 2, small_config(seed=4))
        b = search_worst_ratio(RAND_MED, N2, Objective.SOCIAL_COST, 3, 2, small_config(seed=4))
        assert a.ratio == b.ratio and a.profile == b.profile

    def test_monotone_budget(self):
        small = search_worst_ratio(
            RAND_CENTER, N2, Objective.MAX_COST, 3, 2,
            SearchConfig(rng_seed=9, restarts=4, local_steps=6),
        )
        large = search_worst_ratio(
            RAND_CENTER, N2, Objective.MAX_COST, 3, 2,
            SearchConfig(rng_seed=9, restarts=12, local_steps=12),
        )
        assert large.ratio >= small.ratio - 1e-15
        assert large.evaluations > small.evaluations


class TestConfig:
    def test_rejects_bad_restarts(self):
        with pytest.raises(ValueError):
            SearchConfig(restarts=0)

    def test_rejects_unknown_candidate_kind(self):
        with pytest.raises(ValueError):
            SearchConfig(candidate_kinds=frozenset({"telepathy"}))

    def test_common_point_kind_alone_finds_coalition_witness(self):
        config = small_config(restarts=8, candidate_kinds=frozenset({"common_point"}))
        assert search_gsp_violation(RAND_CENTER, N2, 3, 2, config) is not None

    def test_restricted_kinds_still_catch_broken_mean(self, mean_mechanism):
        config = small_config(restarts=8, candidate_kinds=frozenset({"axis_steps"}))
        assert search_sp_violation(mean_mechanism, N2, 2, 2, config) is not None
