from collections import deque

import numpy as np
import pytest

from posetvote.flow import (
    FlowNetwork, first_place_options, last_place_options, max_flow, plurality_bounds,
    pw_check_plurality, pw_check_veto, pw_set_plurality, pw_set_veto, veto_bounds,
)
from posetvote.oracle import brute_force_pw
from posetvote.orders import PartialOrder, PartialProfile, Ranking, enumerate_completions
from posetvote.rules import ScoringRule

from helpers import generated_profile, random_poset, random_profile


def edmonds_karp(num_nodes, edges, s, t):
    cap = [[0] * num_nodes for _ in range(num_nodes)]
    for u, v, c in edges:
        if u != v:
            cap[u][v] += c
    total = 0
    while True:
        parent = [-1] * num_nodes
        parent[s] = s
        q = deque([s])
        while q and parent[t] < 0:
            u = q.popleft()
            for v in range(num_nodes):
                if parent[v] < 0 and cap[u][v] > 0:
                    parent[v] = u
                    q.append(v)
        if parent[t] < 0:
            return total
        f, v = float("inf"), t
        while v != s:
            f = min(f, cap[parent[v]][v])
            v = parent[v]
        v = t
        while v != s:
            cap[parent[v]][v] -= f
            cap[v][parent[v]] += f
            v = parent[v]
        total += f


def test_max_flow_examples():
    net = FlowNetwork(4)
    for u, v, c in ((0, 1, 3), (0, 2, 2), (1, 2, 5), (1, 3, 2), (2, 3, 3)):
        net.add_edge(u, v, c)
    assert max_flow(net) == 5
    assert max_flow(FlowNetwork(2)) == 0
    with pytest.raises(ValueError):
        net.add_edge(0, 1, -1)


def test_max_flow_matches_edmonds_karp():
    rng = np.random.default_rng(0)
    for _ in range(150):
        k = int(rng.integers(2, 9))
        net = FlowNetwork(k)
        for _ in range(int(rng.integers(0, 3 * k))):
            net.add_edge(int(rng.integers(k)), int(rng.integers(k)), int(rng.integers(0, 6)))
        value, flows = max_flow(net, return_flow=True)
        assert value == edmonds_karp(k, net.edges, 0, k - 1)
        # conservation and capacity on the returned flow
        capacity = {}
        for u, v, c in net.edges:
            capacity[(u, v)] = capacity.get((u, v), 0) + c
        net_out = np.zeros(k, dtype=int)
        for (u, v), x in flows.items():
            assert 0 < x <= capacity.get((u, v), 0)
            net_out[u] += x
            net_out[v] -= x
        assert net_out[0] == value and net_out[k - 1] == -value
        assert not net_out[1:k - 1].any()


def test_place_options_match_completions():
    rng = np.random.default_rng(1)
    for _ in range(100):
        P = random_poset(rng, int(rng.integers(1, 7)))
        orders = [T.order for T in enumerate_completions(P)]
        assert first_place_options(P) == {o[0] for o in orders}
        assert last_place_options(P) == {o[-1] for o in orders}


def test_plurality_examples():
    top = PartialOrder.from_pairs(3, [(0, 1), (0, 2)])
    prof = PartialProfile.from_orders([top, top, PartialOrder.empty(3)])
    assert pw_set_plurality(prof) == {0}
    assert pw_check_plurality(prof, 0) and not pw_check_plurality(prof, 2)
    tie = PartialProfile.from_orders([Ranking((0, 1)).to_partial_order(), Ranking((1, 0)).to_partial_order()])
    assert pw_set_plurality(tie) == {0, 1}
    assert pw_set_plurality(tie, unique=True) == frozenset()


def test_veto_examples():
    prof = PartialProfile.from_orders([Ranking((0, 1, 2)).to_partial_order(), PartialOrder.empty(3)])
    assert pw_set_veto(prof) == {0, 1}
    assert pw_check_veto(prof, 1) and not pw_check_veto(prof, 2)


@pytest.mark.parametrize("unique", [False, True])
def test_flow_sets_match_oracle(unique):
    rng = np.random.default_rng(2)
    for k in range(120):
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 7))
        prof = generated_profile(k, m, n, k) if k % 2 else random_profile(rng, m, n)
        assert pw_set_plurality(prof, unique) == brute_force_pw(prof, ScoringRule.plurality(), unique)
        assert pw_set_veto(prof, unique) == brute_force_pw(prof, ScoringRule.veto(), unique)


def test_bounds_are_sound():
    rng = np.random.default_rng(3)
    for k in range(120):
        m, n = int(rng.integers(2, 6)), int(rng.integers(1, 7))
        prof = random_profile(rng, m, n)
        for bounds, rule in ((plurality_bounds, ScoringRule.plurality()), (veto_bounds, ScoringRule.veto())):
            win, lose = bounds(prof)
            pw = brute_force_pw(prof, rule)
            assert win <= pw and not (lose & pw)
            assert not (lose & brute_force_pw(prof, rule, unique=True))
