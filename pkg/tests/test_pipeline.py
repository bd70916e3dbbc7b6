import numpy as np
import pytest

from posetvote.oracle import brute_force_nw, brute_force_pw
from posetvote.orders import PartialOrder, PartialProfile, Ranking
from posetvote.pipeline import METHODS, phase1, phase2_try_completion, pw_set
from posetvote.rules import ScoringRule, winners

from helpers import SMALL_RULES, generated_profile, random_profile


def _instances(count, seed, max_m=5, max_n=6):
    rng = np.random.default_rng(seed)
    for k in range(count):
        m, n = int(rng.integers(1, max_m + 1)), int(rng.integers(1, max_n + 1))
        yield generated_profile(k, m, n, k) if k % 2 else random_profile(rng, m, n)


@pytest.mark.parametrize("rule_name", sorted(SMALL_RULES))
def test_phase1_is_sound(rule_name):
    rule = SMALL_RULES[rule_name]
    for prof in _instances(80, 0):
        if rule.kind == "custom" and prof.m < 2:
            continue
        for unique in (False, True):
            confirmed, pruned, undecided = phase1(prof, rule, unique)
            assert confirmed | pruned | undecided == set(range(prof.m))
            assert not (confirmed & pruned) and not (confirmed & undecided) and not (pruned & undecided)
            pw = brute_force_pw(prof, rule, unique)
            assert confirmed <= pw and not (pruned & pw)
            assert brute_force_nw(prof, rule, unique) <= confirmed


def test_phase1_example():
    # candidate 0 is on top of every vote: everyone else is pruned
    prof = PartialProfile.from_orders([PartialOrder.from_pairs(3, [(0, 1), (0, 2)])] * 3)
    assert phase1(prof, ScoringRule.borda()) == ({0}, {1, 2}, frozenset())


def test_phase2_completions_are_witnesses():
    rule = ScoringRule.borda()
    hits = 0
    for prof in _instances(80, 1):
        for unique in (False, True):
            pw = brute_force_pw(prof, rule, unique)
            for c in range(prof.m):
                T = phase2_try_completion(prof, rule, c, unique=unique)
                if T is not None:
                    hits += 1
                    assert T.extends(prof) and c in winners(rule, T, unique)
                    assert c in pw
    assert hits > 0


def test_phase2_example():
    prof = PartialProfile.from_orders([PartialOrder.empty(3), Ranking((1, 0, 2)).to_partial_order()])
    T = phase2_try_completion(prof, ScoringRule.borda(), 0)
    assert T is not None and 0 in winners(ScoringRule.borda(), T)


@pytest.mark.parametrize("rule_name", sorted(SMALL_RULES))
def test_pw_set_matches_oracle_for_every_method(rule_name):
    rule = SMALL_RULES[rule_name]
    for prof in _instances(60, 2):
        if rule.kind == "custom" and prof.m < 2:
            continue
        for unique in (False, True):
            expect = brute_force_pw(prof, rule, unique)
            for method in METHODS:
                if method == "flow" and rule.kind not in ("plurality", "veto"):
                    continue
                got, report = pw_set(prof, rule, method=method, timeout=60, unique=unique)
                assert got == expect, (method, unique)
                assert not report.unknown
                report.check()


def test_report_partitions_and_rows():
    prof = generated_profile(2, 6, 8, 3)
    got, report = pw_set(prof, ScoringRule.borda(), method="threephase", timeout=60)
    report.check()
    rows = report.rows()
    assert [r[0] for r in rows] == list(range(6))
    assert {r[2] for r in rows} <= {"possible", "not-possible", "unknown"}
    assert frozenset(r[0] for r in rows if r[2] == "possible") == got
    assert report.ilp_invocations == len(report.undecided_into_phase3)


def test_timeout_leaves_candidates_unknown():
    prof = generated_profile(2, 10, 30, 4)
    got, report = pw_set(prof, ScoringRule.borda(), method="ilp", timeout=0.0)
    report.check()
    assert report.unknown == set(range(10)) and got == frozenset()
    assert {r[2] for r in report.rows()} == {"unknown"}


def test_threads_give_the_same_answer():
    prof = generated_profile(2, 6, 10, 5)
    one = pw_set(prof, ScoringRule.borda(), method="ilp", timeout=60)[0]
    four = pw_set(prof, ScoringRule.borda(), method="ilp", timeout=60, threads=4)[0]
    assert one == four


def test_method_validation():
    prof = PartialProfile.from_orders([PartialOrder.empty(3)])
    with pytest.raises(ValueError):
        pw_set(prof, ScoringRule.borda(), method="flow")
    with pytest.raises(ValueError):
        pw_set(prof, ScoringRule.borda(), method="magic")
    assert pw_set(prof, ScoringRule.plurality())[1].method == "flow"
    assert pw_set(prof, ScoringRule.borda())[1].method == "threephase"
