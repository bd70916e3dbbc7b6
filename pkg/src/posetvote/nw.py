"""Necessary winners under positional scoring rules.

The per-candidate test pits ``c`` against every opponent ``w``: in each vote
the adversary picks the completion minimising ``score(c) - score(w)``, and
``c`` is a necessary winner iff it still keeps up with every opponent on the
summed scores.  :class:`NwWorkspace` caches the per-vote Up/Down sizes and
the best achievable totals so that many such competitions share the work.
"""

from __future__ import annotations

import numpy as np

from .orders import PartialOrder, PartialProfile, transitive_closure
from .rules import ScoringRule, score_vector

_BIG = np.iinfo(np.int64).max // 4


def _slide_table(s: np.ndarray) -> np.ndarray:
    """``table[b, q-1] = s(q) - s(q+b-1)`` for blocks of size ``b``; invalid slots are huge."""
    m = s.size
    table = np.full((m + 1, m), _BIG, dtype=np.int64)
    for b in range(1, m + 1):
        q = np.arange(m - b + 1)
        table[b, q] = s[q] - s[q + b - 1]
    return table


def adversarial_pair(P: PartialOrder, c: int, w: int, rule: ScoringRule) -> tuple[int, int]:
    """Scores ``(s_c, s_w)`` of the completion of ``P`` minimising ``s_c - s_w``."""
    if c == w:
        raise ValueError("c and w must differ")
    m = P.m
    s = score_vector(rule, m)
    rel = P.relation
    up_w = int(rel[:, w].sum()) + 1
    down_c = int(rel[c].sum()) + 1
    if not rel[c, w]:
        return int(s[m - down_c]), int(s[up_w - 1])
    b = int((rel[c] & rel[:, w]).sum()) + 2
    lo, hi = up_w - b + 1, m - down_c + 1
    best = None
    for q in range(lo, hi + 1):
        d = s[q - 1] - s[q + b - 2]
        if best is None or d < best[0]:
            best = (d, q)
    q = best[1]
    return int(s[q - 1]), int(s[q + b - 2])


def _ancestor_sums(n: int, m: int, votes, upper, lower):
    """Pointer jumping along one chosen cover parent per candidate.

    Returns ``(indeg, outdeg, depth, root)`` as ``(n, m)`` arrays, where
    ``depth`` sums the in-degrees met on the way up (excluding the top) and
    ``root`` is the topmost candidate reached.  On a linear forest ``depth``
    is the position inside the chain; on a partitioned vote it is the number
    of strict ancestors.
    """
    lower_key = votes * m + lower
    indeg = np.bincount(lower_key, minlength=n * m)
    outdeg = np.bincount(votes * m + upper, minlength=n * m)
    anc = np.full(n * m, -1, dtype=np.int64)
    anc[lower_key] = votes * m + upper
    dist = np.where(anc >= 0, indeg, 0)
    top = np.where(anc >= 0, anc, np.arange(n * m))
    for _ in range(max(1, int(np.ceil(np.log2(max(m, 2))))) + 1):
        live = np.flatnonzero(anc >= 0)
        if live.size == 0:
            break
        a = anc[live]
        dist[live] += dist[a]
        top[live] = top[a]
        anc[live] = anc[a]
    shape = (n, m)
    return indeg.reshape(shape), outdeg.reshape(shape), dist.reshape(shape), top.reshape(shape) % m


def _layer_counts(depth: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per candidate: how many candidates of its vote have smaller / equal ``depth``."""
    n, m = depth.shape
    order = np.argsort(depth, axis=1, kind="stable")
    srt = np.take_along_axis(depth, order, axis=1)
    ks = np.broadcast_to(np.arange(m), (n, m))
    new = np.ones((n, m), dtype=bool)
    new[:, 1:] = srt[:, 1:] != srt[:, :-1]
    first = np.maximum.accumulate(np.where(new, ks, 0), axis=1)
    end = np.ones((n, m), dtype=bool)
    end[:, :-1] = new[:, 1:]
    last = np.minimum.accumulate(np.where(end, ks, m)[:, ::-1], axis=1)[:, ::-1]
    smaller = np.empty((n, m), dtype=np.int64)
    equal = np.empty((n, m), dtype=np.int64)
    np.put_along_axis(smaller, order, first, axis=1)
    np.put_along_axis(equal, order, last - first + 1, axis=1)
    return smaller, equal


class NwWorkspace:
    """Cached per-vote data for pairwise competitions on one profile.

    Votes are read in their cover form (:meth:`PartialProfile.cover_edges`).
    ``up[l, c]`` and ``down[l, c]`` are the sizes of the inclusive Up/Down
    sets and ``smax[c]`` is the best total score ``c`` can reach.

    With ``structure=True`` linear-forest and partitioned votes are
    recognised from their cover pairs, and their Up/Down sizes, orderings and
    block sizes come from chain positions or layer offsets in ``O(m)``.
    Reachability is rebuilt only for the remaining votes.  With
    ``structure=False`` every vote goes through reachability.
    """

    def __init__(self, profile: PartialProfile, rule: ScoringRule, structure: bool = True):
        self.profile = profile
        self.rule = rule
        m, n = profile.m, profile.n
        self.m, self.n = m, n
        self.scores = score_vector(rule, m)
        self.structure = structure
        votes, upper, lower = profile.cover_edges()
        if structure:
            indeg, outdeg, depth, root = _ancestor_sums(n, m, votes, upper, lower)
            has_edges = np.bincount(votes, minlength=n) > 0
            forest = has_edges & (indeg <= 1).all(axis=1) & (outdeg <= 1).all(axis=1)
            smaller, equal = _layer_counts(depth)
            # layered with every cover joining consecutive layers completely
            ok = (depth == smaller).all(axis=1) & ((indeg > 0) == (depth > 0)).all(axis=1)
            ea, eb = depth[votes, upper], depth[votes, lower]
            bad = (eb != ea + equal[votes, upper]) | (indeg[votes, lower] != equal[votes, upper])
            ok[votes[bad]] = False
            self.forest, self.partitioned = forest, ok & ~forest
            general = ~(self.forest | self.partitioned)
            chain_len = np.bincount((np.arange(n)[:, None] * m + root).ravel(), minlength=n * m).reshape(n, m)
            self.depth, self.root = depth, root
            self.up = depth + 1
            self.down = np.where(forest[:, None], np.take_along_axis(chain_len, root, axis=1) - depth,
                                 m - depth - equal + 1)
        else:
            self.forest = self.partitioned = np.zeros(n, dtype=bool)
            general = np.ones(n, dtype=bool)
            self.depth = np.zeros((n, m), dtype=np.int64)
            self.root = np.zeros((n, m), dtype=np.int64)
            self.up = np.empty((n, m), dtype=np.int64)
            self.down = np.empty((n, m), dtype=np.int64)
        self.general = np.flatnonzero(general)
        self._gid = np.full(n, -1, dtype=np.int64)
        self._gid[self.general] = np.arange(self.general.size)
        adj = np.zeros((self.general.size, m, m), dtype=bool)
        keep = general[votes]
        adj[self._gid[votes[keep]], upper[keep], lower[keep]] = True
        self.reach = transitive_closure(adj) if self.general.size else adj
        self.up[self.general] = self.reach.sum(axis=1) + 1
        self.down[self.general] = self.reach.sum(axis=2) + 1
        self.smax = self.scores[self.up - 1].sum(axis=0)
        self.smin = self.scores[m - self.down].sum(axis=0)
        self._table = _slide_table(self.scores)
        self._affine = m < 3 or bool(np.all(np.diff(self.scores, 2) == 0))

    def above(self, c: int, w: int) -> np.ndarray:
        """Per vote, whether ``c`` is preferred to ``w``."""
        res = self.depth[:, c] < self.depth[:, w]
        res &= ~self.forest | (self.root[:, c] == self.root[:, w])
        res[self.general] = self.reach[:, c, w]
        return res

    def block_sizes(self, c: int, w: int, votes: np.ndarray) -> np.ndarray:
        """``|Block(c, w)|`` in each of ``votes`` (all must have ``c > w``)."""
        b = np.empty(votes.size, dtype=np.int64)
        f = self.forest[votes]
        p = self.partitioned[votes]
        g = ~(f | p)
        b[f] = self.up[votes[f], w] - self.up[votes[f], c] + 1
        b[p] = self.up[votes[p], w] + self.down[votes[p], c] - self.m
        if g.any():
            gi = self._gid[votes[g]]
            b[g] = (self.reach[gi, c, :] & self.reach[gi, :, w]).sum(axis=1) + 2
        return b

    def competition(self, c: int, w: int) -> tuple[int, int]:
        """Adversarial totals ``(S(c), S(w))`` summed over all votes."""
        s = self.scores
        above = self.above(c, w)
        free = ~above
        sc = int(s[self.m - self.down[free, c]].sum())
        sw = int(s[self.up[free, w] - 1].sum())
        votes = np.flatnonzero(above)
        if votes.size:
            b = self.block_sizes(c, w, votes)
            lo = self.up[votes, w] - b + 1
            if self._affine:
                q = lo
            else:
                hi = self.m - self.down[votes, c] + 1
                rows = self._table[b]
                cols = np.arange(self.m)[None, :]
                rows = np.where((cols >= lo[:, None] - 1) & (cols <= hi[:, None] - 1), rows, _BIG)
                q = rows.argmin(axis=1) + 1
            sc += int(s[q - 1].sum())
            sw += int(s[q + b - 2].sum())
        return sc, sw


def _beats(sc: int, sw: int, unique: bool) -> bool:
    return sw < sc if unique else sw <= sc


def check_nw(c: int, profile: PartialProfile, rule: ScoringRule, unique: bool = False,
             workspace: NwWorkspace | None = None) -> bool:
    ws = workspace if workspace is not None else NwWorkspace(profile, rule, structure=False)
    for w in range(ws.m):
        if w != c and not _beats(*ws.competition(c, w), unique):
            return False
    return True


def contenders(ws: NwWorkspace, unique: bool = False) -> list[int]:
    """Candidates that can still be necessary winners: those with maximal ``smax``."""
    top = np.flatnonzero(ws.smax == ws.smax.max()).tolist()
    if unique and len(top) > 1:
        return []
    return top


def opponent_order(ws: NwWorkspace) -> list[int]:
    return sorted(range(ws.m), key=lambda w: (-int(ws.smax[w]), w))


def nw_set(profile: PartialProfile, rule: ScoringRule, unique: bool = False,
           workspace: NwWorkspace | None = None) -> frozenset[int]:
    ws = workspace if workspace is not None else NwWorkspace(profile, rule, structure=True)
    order = opponent_order(ws)
    result = []
    for c in contenders(ws, unique):
        if all(_beats(*ws.competition(c, w), unique) for w in order if w != c):
            result.append(c)
    return frozenset(result)


def nw_set_baseline(profile: PartialProfile, rule: ScoringRule, unique: bool = False) -> frozenset[int]:
    """Every candidate against every opponent in index order; no structure shortcuts."""
    ws = NwWorkspace(profile, rule, structure=False)
    return frozenset(c for c in range(ws.m) if check_nw(c, profile, rule, unique, ws))
