from itertools import product

import numpy as np
import pytest

from posetvote import ilp
from posetvote.ilp import (
    Constraint, IlpModel, add_profile_constraints, add_winner_constraints, build_base_model,
    build_pw_model, export_lp, extract_completion, parse_lp, pw_check_ilp, solve,
)
from posetvote.oracle import brute_force_pw
from posetvote.orders import PartialOrder, PartialProfile, Ranking, enumerate_completions
from posetvote.rules import ScoringRule, winners

from helpers import SMALL_RULES, generated_profile, random_profile


def assignment_of(orders, m):
    x = np.zeros((len(orders), m, m), dtype=np.int64)
    for l, order in enumerate(orders):
        for rank, c in enumerate(order):
            x[l, c, rank] = 1
    return x.ravel()


def test_base_model_is_cached_and_sized():
    before = ilp.base_model_builds
    a = build_base_model(3, 17)
    b = build_base_model(3, 17)
    assert ilp.base_model_builds == before + 1
    assert a.constraints == b.constraints and a.constraints is not b.constraints
    assert a.num_vars == 3 * 3 * 17 and len(a) == 2 * 3 * 17


def test_assignment_constraints_define_permutations():
    model = build_base_model(3, 1)
    for bits in product((0, 1), repeat=9):
        x = np.array(bits)
        ok = all(con.satisfied(x) for con in model.constraints)
        M = x.reshape(3, 3)
        assert ok == ((M.sum(0) == 1).all() and (M.sum(1) == 1).all())


def test_constraint_counts():
    rng = np.random.default_rng(0)
    for _ in range(20):
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 5))
        prof = random_profile(rng, m, n)
        model = build_pw_model(prof, 0, ScoringRule.borda())
        pairs = int(prof.relations.sum())
        assert len(model) == 2 * m * n + pairs + (m - 1)


def test_reduction_semantics_by_enumeration():
    """Completion assignments satisfy the model iff they extend the profile and ``c`` wins."""
    rng = np.random.default_rng(1)
    for trial in range(25):
        m, n = int(rng.integers(2, 4)), int(rng.integers(1, 3))
        prof = random_profile(rng, m, n)
        rule = list(SMALL_RULES.values())[trial % 5]
        c = int(rng.integers(m))
        unique = bool(trial % 2)
        model = build_pw_model(prof, c, rule, unique)
        perms = [T.order for T in enumerate_completions(PartialOrder.empty(m))]
        for combo in product(perms, repeat=n):
            x = assignment_of(combo, m)
            ok = all(con.satisfied(x) for con in model.constraints)
            T = extract_completion(x, m, n)
            w = winners(rule, T, unique)
            assert ok == (T.extends(prof) and c in w)


@pytest.mark.parametrize("rule_name", sorted(SMALL_RULES))
def test_solver_matches_oracle(rule_name):
    rule = SMALL_RULES[rule_name]
    rng = np.random.default_rng(2)
    for k in range(25):
        m, n = int(rng.integers(2, 5)), int(rng.integers(1, 6))
        prof = generated_profile(k, m, n, k) if k % 2 else random_profile(rng, m, n)
        for unique in (False, True):
            pw = brute_force_pw(prof, rule, unique)
            for c in range(m):
                out = pw_check_ilp(prof, c, rule, unique, timeout=60)
                assert out.status in (ilp.FEASIBLE, ilp.INFEASIBLE)
                assert out.feasible == (c in pw)
                if out.feasible:
                    model = build_pw_model(prof, c, rule, unique)
                    assert all(con.satisfied(out.assignment) for con in model.constraints)
                    T = extract_completion(out.assignment, m, n)
                    assert T.extends(prof) and c in winners(rule, T, unique)


def test_contradictory_preferences_are_infeasible():
    model = build_base_model(2, 1)
    model.add(Constraint.build({model.var(0, 0, 0): 1}, ilp.EQ, 1, "fix_top"))
    model.add(Constraint.build({model.var(0, 1, 0): 1}, ilp.EQ, 1, "fix_other_top"))
    assert solve(model).status == ilp.INFEASIBLE


def test_unrecognised_constraints_are_enforced():
    prof = PartialProfile.from_orders([PartialOrder.empty(3)] * 2)
    model = build_pw_model(prof, 0, ScoringRule.borda())
    # voter 1 must put candidate 3 first
    model.add(Constraint.build({model.var(0, 2, 0): 1}, ilp.GE, 1, "extra"))
    out = solve(model)
    assert out.feasible
    assert extract_completion(out.assignment, 3, 2).rankings[0].order[0] == 2


def test_single_candidate_and_timeout():
    single = PartialProfile.from_orders([PartialOrder.empty(1)] * 3)
    assert pw_check_ilp(single, 0, ScoringRule.plurality()).feasible
    prof = generated_profile(2, 12, 60, 7)
    out = pw_check_ilp(prof, 5, ScoringRule.borda(), timeout=0.0)
    assert out.status == ilp.TIMEOUT and out.elapsed < 1.0


def test_constraint_build_validation():
    c = Constraint.build({5: 2, 1: -1, 3: 0}, ilp.LE, 4, "r")
    assert c.terms == ((1, -1), (5, 2))
    with pytest.raises(ValueError):
        Constraint.build({1: 1}, "<", 0, "bad")


def test_lp_export_format():
    prof = PartialProfile.from_orders([PartialOrder.from_pairs(3, [(0, 1)])])
    text = export_lp(build_pw_model(prof, 2, ScoringRule.borda(), unique=True))
    lines = text.splitlines()
    assert lines[0].startswith("\\ ") and "m=3" in lines[0] and "unique=1" in lines[0]
    for head in ("Maximize", "Subject To", "Binaries", "End"):
        assert head in lines
    assert " pref_1_1_2: - x_1_1_1 - 2 x_1_1_2 - 3 x_1_1_3 + x_1_2_1 + 2 x_1_2_2 + 3 x_1_2_3 >= 1" in lines
    assert any(line.startswith(" win_1:") and line.endswith("<= -1") for line in lines)
    assert lines[-1] == "End"


def test_lp_round_trip():
    for k in range(6):
        prof = generated_profile(k, 4, 5, k)
        for unique in (False, True):
            model = build_pw_model(prof, k % 4, ScoringRule.approval(2), unique)
            text = export_lp(model)
            back = parse_lp(text)
            assert export_lp(back) == text
            assert [c.name for c in back.constraints] == [c.name for c in model.constraints]
            assert back.constraints == model.constraints
            assert solve(back).status == solve(model).status
    with pytest.raises(ValueError):
        parse_lp("Maximize\nEnd\n")


def test_export_to_file(tmp_path):
    model = build_pw_model(PartialProfile.from_orders([PartialOrder.empty(2)]), 0, ScoringRule.plurality())
    path = tmp_path / "model.lp"
    text = export_lp(model, path)
    assert path.read_text() == text
    assert isinstance(model, IlpModel) and repr(model).startswith("IlpModel(m=2")


def test_profile_dimension_check():
    with pytest.raises(ValueError):
        add_profile_constraints(build_base_model(3, 2), PartialProfile.from_orders([PartialOrder.empty(3)]))
    model = add_winner_constraints(build_base_model(2, 1), 1, ScoringRule.veto())
    assert model.distinguished == 1 and model.rule == "veto"
