import numpy as np
import pytest
from hypothesis import given, strategies as st

from posetvote.orders import Ranking, TotalProfile
from posetvote.rules import ScoringRule, parse_rule, profile_scores, score_vector, total_score, winners

from helpers import score_of


def test_score_vector_examples():
    assert score_vector(ScoringRule.plurality(), 4).tolist() == [1, 0, 0, 0]
    assert score_vector(ScoringRule.veto(), 4).tolist() == [1, 1, 1, 0]
    assert score_vector(ScoringRule.approval(2), 4).tolist() == [1, 1, 0, 0]
    assert score_vector(ScoringRule.borda(), 4).tolist() == [3, 2, 1, 0]
    assert score_vector(ScoringRule.approval(7), 3).tolist() == [1, 1, 1]
    assert score_vector(ScoringRule.plurality(), 1).tolist() == [1]
    assert score_vector(ScoringRule.veto(), 1).tolist() == [0]


def test_custom_templates():
    r = parse_rule("custom:2,1,...,0")
    assert score_vector(r, 2).tolist() == [2, 0]
    assert score_vector(r, 4).tolist() == [2, 1, 1, 0]
    assert score_vector(r, 6).tolist() == [2, 1, 1, 1, 1, 0]
    with pytest.raises(ValueError):
        score_vector(r, 1)
    fixed = parse_rule("custom:5,3,0")
    assert score_vector(fixed, 3).tolist() == [5, 3, 0]
    with pytest.raises(ValueError):
        score_vector(fixed, 4)
    with pytest.raises(ValueError):
        score_vector(parse_rule("custom:0,1"), 2)  # increasing
    with pytest.raises(ValueError):
        ScoringRule.custom("...", 1)


def test_parse_rule():
    assert parse_rule("Borda") == ScoringRule.borda()
    assert parse_rule("approval:3") == ScoringRule.approval(3)
    assert parse_rule("t-approval:2") == ScoringRule.approval(2)
    for bad in ("", "approval", "approval:0", "foo", "custom:"):
        with pytest.raises(ValueError):
            parse_rule(bad)
    for rule in (ScoringRule.veto(), ScoringRule.approval(4), parse_rule("custom:3,1,...,0")):
        assert parse_rule(rule.name) == rule


@given(st.integers(1, 512), st.sampled_from(["plurality", "veto", "approval:3", "borda", "custom:4,2,...,1,0"]))
def test_vectors_are_nonincreasing(m, text):
    rule = parse_rule(text)
    if text.startswith("custom") and m < 4:
        return
    s = score_vector(rule, m)
    assert s.shape == (m,)
    assert (s >= 0).all() and (np.diff(s) <= 0).all()
    assert total_score(rule, m, 3) == 3 * int(s.sum())


def test_total_score_examples():
    assert total_score(ScoringRule.borda(), 4, 10) == 60
    assert total_score(ScoringRule.plurality(), 7, 10) == 10


def test_profile_scores_and_winners():
    T = TotalProfile([Ranking((0, 1, 2)), Ranking((1, 0, 2)), Ranking((0, 2, 1))])
    assert profile_scores(ScoringRule.borda(), T).tolist() == [5, 3, 1]
    assert winners(ScoringRule.borda(), T) == {0}
    tie = TotalProfile([Ranking((0, 1)), Ranking((1, 0))])
    assert winners(ScoringRule.plurality(), tie) == {0, 1}
    assert winners(ScoringRule.plurality(), tie, unique=True) == frozenset()


def test_profile_scores_match_position_sum():
    rng = np.random.default_rng(0)
    for _ in range(50):
        m, n = int(rng.integers(1, 8)), int(rng.integers(1, 6))
        orders = [tuple(rng.permutation(m).tolist()) for _ in range(n)]
        s = score_vector(ScoringRule.borda(), m)
        expect = np.sum([score_of(o, s) for o in orders], axis=0)
        assert profile_scores(ScoringRule.borda(), TotalProfile([Ranking(o) for o in orders])).tolist() == expect.tolist()
