"""Shared random instances and independent reference implementations for the tests."""

from itertools import permutations

import numpy as np

from posetvote.orders import PartialOrder, PartialProfile
from posetvote.posetgen import gen_partial_chains_profile, gen_partitioned_profile, gen_rsm_mix_profile
from posetvote.rules import ScoringRule, parse_rule

SMALL_RULES = {
    "plurality": ScoringRule.plurality(),
    "veto": ScoringRule.veto(),
    "2-approval": ScoringRule.approval(2),
    "borda": ScoringRule.borda(),
    "custom": parse_rule("custom:2,1,...,0"),
}

SMALL_GENERATORS = (gen_partial_chains_profile, gen_partitioned_profile, gen_rsm_mix_profile)


def naive_closure(adj):
    """Floyd-Warshall on a Python list-of-lists boolean matrix."""
    m = len(adj)
    r = [[bool(adj[i][j]) for j in range(m)] for i in range(m)]
    for k in range(m):
        for i in range(m):
            if r[i][k]:
                for j in range(m):
                    if r[k][j]:
                        r[i][j] = True
    return np.array(r, dtype=bool).reshape(m, m)


def bfs_below(m, pairs, c):
    """Candidates reachable from ``c`` along ``pairs`` (``c`` included)."""
    succ = {a: [] for a in range(m)}
    for a, b in pairs:
        succ[a].append(b)
    seen, todo = {c}, [c]
    while todo:
        x = todo.pop()
        for y in succ[x]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def random_pairs(rng, m, density=0.4):
    """Acyclic pair set: edges respect a random permutation."""
    perm = rng.permutation(m)
    return [(int(perm[i]), int(perm[j])) for i in range(m) for j in range(i + 1, m) if rng.random() < density]


def random_poset(rng, m, density=None):
    d = rng.random() if density is None else density
    return PartialOrder.from_pairs(m, random_pairs(rng, m, d))


def random_profile(rng, m, n):
    return PartialProfile.from_orders([random_poset(rng, m) for _ in range(n)])


def generated_profile(k, m, n, seed):
    return SMALL_GENERATORS[k % 3](m, n, seed)


def all_permutations(m):
    return [tuple(p) for p in permutations(range(m))]


def score_of(ranking, s):
    """Score vector per candidate of one ranking, computed position by position."""
    out = [0] * len(ranking)
    for pos, c in enumerate(ranking):
        out[c] = int(s[pos])
    return out


def naive_winners(profile, rule, unique=False):
    """(NW, PW) by walking the product of every vote's completions; tiny instances only."""
    from itertools import product

    from posetvote.orders import enumerate_completions
    from posetvote.rules import score_vector

    m = profile.m
    s = score_vector(rule, m)
    per_vote = [[T.order for T in enumerate_completions(P)] for P in profile]
    nw, pw = set(range(m)), set()
    for combo in product(*per_vote):
        tot = [0] * m
        for order in combo:
            for c, x in enumerate(score_of(order, s)):
                tot[c] += x
        best = max(tot)
        top = {c for c in range(m) if tot[c] == best}
        if unique and len(top) > 1:
            top = set()
        pw |= top
        nw &= top
    return frozenset(nw), frozenset(pw)
