"""Possible winners for plurality and veto via bipartite max-flow.

For plurality, ``c`` takes the top spot wherever it can.  Every remaining
voter must hand its point to one of its maximal candidates, and no opponent
may collect more than ``c``'s total: a voter -> candidate -> sink network
whose max-flow must saturate all remaining voters.  Veto is the mirror
image over minimal candidates, where each opponent must absorb at least as
many vetoes as ``c`` is forced to take.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .orders import PartialOrder, PartialProfile


@dataclass
class FlowNetwork:
    """Directed network with integral capacities; node 0 is the source by default."""

    num_nodes: int
    source: int = 0
    sink: int = -1
    edges: list[tuple[int, int, int]] = field(default_factory=list)

    def __post_init__(self):
        if self.sink < 0:
            self.sink = self.num_nodes - 1

    def add_edge(self, u: int, v: int, cap: int) -> None:
        if cap < 0:
            raise ValueError("capacities must be non-negative")
        self.edges.append((u, v, int(cap)))


def max_flow(net: FlowNetwork, return_flow: bool = False):
    """Maximum ``source -> sink`` flow value (Dinic's algorithm via scipy).

    With ``return_flow`` also returns a dict ``{(u, v): units}`` of positive
    edge flows, merged over parallel edges.
    """
    if net.source == net.sink:
        raise ValueError("source and sink coincide")
    if not net.edges:
        return (0, {}) if return_flow else 0
    u, v, cap = (np.array(x, dtype=np.int64) for x in zip(*net.edges))
    keep = u != v
    graph = csr_matrix((cap[keep].astype(np.int32), (u[keep], v[keep])), shape=(net.num_nodes, net.num_nodes))
    graph.sum_duplicates()
    res = maximum_flow(graph, net.source, net.sink, method="dinic")
    value = int(res.flow_value)
    if not return_flow:
        return value
    f = res.flow.tocoo()
    flows = {(int(a), int(b)): int(x) for a, b, x in zip(f.row, f.col, f.data) if x > 0}
    return value, flows


def first_place_options(P: PartialOrder) -> frozenset[int]:
    """Candidates that some completion of ``P`` ranks first (its maximal elements)."""
    return frozenset(P.maximal())


def last_place_options(P: PartialOrder) -> frozenset[int]:
    return frozenset(P.minimal())


def _can_top(profile: PartialProfile) -> np.ndarray:
    return ~profile.relations.any(axis=1)


def _can_bottom(profile: PartialProfile) -> np.ndarray:
    return ~profile.relations.any(axis=2)


def _bipartite_flow(options: np.ndarray, voters: np.ndarray, c: int, cap: int) -> int:
    """Max-flow of source -> voters -> candidates (except ``c``) -> sink with sink caps ``cap``."""
    k, m = voters.size, options.shape[1]
    net = FlowNetwork(k + m + 2)
    for i in range(k):
        net.add_edge(0, 1 + i, 1)
    vi, cand = np.nonzero(options[voters])
    for i, x in zip(vi.tolist(), cand.tolist()):
        if x != c:
            net.add_edge(1 + i, 1 + k + x, 1)
    for x in range(m):
        if x != c:
            net.add_edge(1 + k + x, net.sink, cap)
    return max_flow(net)


def _plurality_check(can_top: np.ndarray, c: int, unique: bool) -> bool:
    n, m = can_top.shape
    K = int(can_top[:, c].sum())
    cap = K - 1 if unique else K
    if cap < 0:
        return False
    rest = np.flatnonzero(~can_top[:, c])
    if rest.size == 0:
        return True
    if rest.size > cap * (m - 1):
        return False
    return _bipartite_flow(can_top, rest, c, cap) == rest.size


def _veto_check(can_bottom: np.ndarray, c: int, unique: bool) -> bool:
    n, m = can_bottom.shape
    if m == 1:
        return True
    forced = can_bottom[:, c] & (can_bottom.sum(axis=1) == 1)
    need = int(forced.sum()) + (1 if unique else 0)
    if need == 0:
        return True
    free = np.flatnonzero(~forced)
    if free.size < need * (m - 1):
        return False
    return _bipartite_flow(can_bottom, free, c, need) == need * (m - 1)


def pw_check_plurality(profile: PartialProfile, c: int, unique: bool = False) -> bool:
    return _plurality_check(_can_top(profile), c, unique)


def pw_check_veto(profile: PartialProfile, c: int, unique: bool = False) -> bool:
    return _veto_check(_can_bottom(profile), c, unique)


def plurality_bounds(profile: PartialProfile) -> tuple[frozenset[int], frozenset[int]]:
    """``(obvious winners, obvious losers)`` from can-be-first counts."""
    n, m = profile.n, profile.m
    counts = _can_top(profile).sum(axis=0)
    return (frozenset(np.flatnonzero(2 * counts > n).tolist()),
            frozenset(np.flatnonzero(m * counts < n).tolist()))


def veto_bounds(profile: PartialProfile) -> tuple[frozenset[int], frozenset[int]]:
    """``(obvious winners, obvious losers)`` from the best veto score of each candidate."""
    n, m = profile.n, profile.m
    cb = _can_bottom(profile)
    forced = (cb & (cb.sum(axis=1) == 1)[:, None]).sum(axis=0)
    best = n - forced
    total = n * (m - 1)
    return (frozenset(np.flatnonzero(2 * best > total).tolist()),
            frozenset(np.flatnonzero(m * best < total).tolist()))


def pw_set_plurality(profile: PartialProfile, unique: bool = False) -> frozenset[int]:
    admitted, rejected = plurality_bounds(profile)
    can_top = _can_top(profile)
    result = set(admitted)
    for c in range(profile.m):
        if c not in admitted and c not in rejected and _plurality_check(can_top, c, unique):
            result.add(c)
    return frozenset(result)


def pw_set_veto(profile: PartialProfile, unique: bool = False) -> frozenset[int]:
    admitted, rejected = veto_bounds(profile)
    cb = _can_bottom(profile)
    result = set(admitted)
    for c in range(profile.m):
        if c not in admitted and c not in rejected and _veto_check(cb, c, unique):
            result.add(c)
    return frozenset(result)
