import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from posetvote.orders import CycleError, PartialOrder, PartialProfile, profile_density
from posetvote.profile_io import (
    ProfileSyntaxError, dumps_profile, ingest_pairwise, ingest_ratings, loads_profile,
    parse_profile, read_table, write_profile,
)

from helpers import random_poset

DOC = """# poset-profile v1
candidates: 4
voters: 2
names: a,b,c,d
0: 0>1,1>2
1:
"""


def test_parse_example():
    prof = loads_profile(DOC)
    assert prof.m == 4 and prof.n == 2 and prof.names == ("a", "b", "c", "d")
    assert set(prof[0].pairs()) == {(0, 1), (1, 2), (0, 2)}
    assert len(prof[1]) == 0
    assert dumps_profile(prof) == DOC


def test_empty_votes_document():
    prof = loads_profile("# poset-profile v1\ncandidates: 3\nvoters: 2\n0:\n1:\n")
    assert all(len(P) == 0 for P in prof) and prof.names is None


@pytest.mark.parametrize("text, lineno", [
    ("candidates: 3\n", 1),
    ("# poset-profile v1\ncandidates: 3\nvoters: 1\n0: 0-1\n", 4),
    ("# poset-profile v1\ncandidates: 3\nvoters: 1\n0: 0>7\n", 4),
    ("# poset-profile v1\ncandidates: 3\nvoters: 2\n0:\n0:\n", 5),
    ("# poset-profile v1\ncandidates: 3\nvoters: 1\nfoo: 1\n", 4),
    ("# poset-profile v1\ncandidates: 2\nvoters: 1\nnames: a\n0:\n", 4),
])
def test_syntax_errors_carry_line_numbers(text, lineno):
    with pytest.raises(ProfileSyntaxError) as err:
        loads_profile(text)
    assert err.value.line == lineno
    assert f"line {lineno}" in str(err.value)


def test_missing_voters_and_cycles():
    with pytest.raises(ProfileSyntaxError):
        loads_profile("# poset-profile v1\ncandidates: 3\nvoters: 2\n0:\n")
    with pytest.raises(CycleError) as err:
        loads_profile("# poset-profile v1\ncandidates: 3\nvoters: 2\n0:\n1: 0>1,1>2,2>0\n")
    assert err.value.voter == 1


def test_non_cover_pairs_are_closed_and_normalised():
    prof = loads_profile("# poset-profile v1\ncandidates: 3\nvoters: 1\n0: 0>2,1>2,0>1\n")
    assert dumps_profile(prof).endswith("0: 0>1,1>2\n")


@settings(max_examples=60)
@given(st.integers(1, 7), st.integers(1, 6), st.integers(0, 2**31 - 1), st.booleans())
def test_round_trip(m, n, seed, named):
    rng = np.random.default_rng(seed)
    names = [f"c{i}" for i in range(m)] if named else None
    prof = PartialProfile.from_orders([random_poset(rng, m) for _ in range(n)], names)
    text = dumps_profile(prof)
    back = loads_profile(text)
    assert back == prof and back.names == (tuple(names) if named else None)
    assert dumps_profile(back) == text


def test_file_io(tmp_path):
    path = tmp_path / "p.txt"
    prof = loads_profile(DOC)
    write_profile(prof, path)
    assert parse_profile(path) == prof
    buf = io.StringIO()
    write_profile(prof, buf)
    assert buf.getvalue() == DOC


def test_ingest_ratings_examples():
    prof = ingest_ratings([("u", "x", 5), ("u", "y", 3), ("u", "z", 1)])
    assert set(prof[0].pairs()) == {(0, 1), (1, 2), (0, 2)}
    tied = ingest_ratings([("u", "x", 4), ("u", "y", 4)])
    assert len(tied[0]) == 0
    partial = ingest_ratings([("u", "x", 4), ("v", "y", 2.5), ("v", "x", 3.0)])
    assert partial.names == ("x", "y") and len(partial[0]) == 0 and set(partial[1].pairs()) == {(0, 1)}
    with pytest.raises(ValueError):
        ingest_ratings([("u", "x", "five")])


def test_ingest_ratings_agrees_with_comparator():
    rng = np.random.default_rng(0)
    rows = [(f"u{u}", f"i{i}", float(rng.integers(1, 6)))
            for u in range(20) for i in range(6) if rng.random() < 0.7]
    prof = ingest_ratings(rows)
    users = list(dict.fromkeys(r[0] for r in rows))
    for l, user in enumerate(users):
        rated = {item: r for u, item, r in rows if u == user}
        for a, x in enumerate(prof.names):
            for b, y in enumerate(prof.names):
                expect = x in rated and y in rated and rated[x] > rated[y]
                assert prof[l].prefers(a, b) == expect


def test_ingest_pairwise_examples():
    rows = [("u", "x", "y", "x", 0.9), ("u", "y", "z", "y", 0.2),
            ("v", "x", "y", "x", 0.8), ("v", "x", "y", "y", 0.7)]
    prof, dropped = ingest_pairwise(rows, threshold=0.5)
    assert dropped == ["v"] and prof.n == 1 and set(prof[0].pairs()) == {(0, 1)}
    empty, dropped = ingest_pairwise(rows[:2], threshold=2.0)
    assert dropped == [] and all(len(P) == 0 for P in empty)
    with pytest.raises(ValueError):
        ingest_pairwise([("u", "x", "y", "q", 1.0)])


def test_pairwise_density_does_not_grow_with_threshold():
    rng = np.random.default_rng(1)
    items = [f"i{k}" for k in range(6)]
    rank = {f"u{u}": rng.permutation(6) for u in range(30)}
    rows = []
    for u, perm in rank.items():
        for _ in range(12):
            a, b = rng.choice(6, 2, replace=False)
            win = a if perm[a] < perm[b] else b
            rows.append((u, items[a], items[b], items[win], round(float(rng.random()), 3)))
    densities = [profile_density(ingest_pairwise(rows, t)[0]) for t in np.linspace(0, 0.95, 12)]
    assert all(b <= a + 1e-12 for a, b in zip(densities, densities[1:]))


def test_read_table(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("user,item,rating\nu,x,4.5\n", encoding="utf-8")
    assert ingest_ratings(read_table(path, ("user", "item", "rating"))).names == ("x",)
    with pytest.raises(ValueError):
        read_table(path, ("user", "a", "b"))
