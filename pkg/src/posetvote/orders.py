"""Candidates, strict partial orders, rankings and voting profiles.

Candidates are dense integers ``0..m-1``.  A :class:`PartialOrder` is kept as
a transitively closed ``m x m`` boolean matrix where ``rel[a, b]`` means
``a`` is preferred to ``b``.  Profiles store all votes stacked into one
``(n, m, m)`` array so that the winner algorithms can work on whole profiles
with vectorised numpy operations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_ENUMERATION_BOUND = 8


class CycleError(ValueError):
    """Preference pairs whose closure is not a strict partial order."""

    def __init__(self, cycle: Sequence[int], voter: int | None = None):
        self.cycle = tuple(cycle)
        self.voter = voter
        where = f" (voter {voter})" if voter is not None else ""
        path = " > ".join(str(c) for c in self.cycle)
        super().__init__(f"preference cycle{where}: {path}")


class BoundError(ValueError):
    """Raised when an exhaustive routine is asked for an instance that is too large."""


class PreconditionError(ValueError):
    pass


def transitive_closure(adj: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Reachability matrix of ``adj`` by repeated squaring.

    Accepts a single ``(m, m)`` matrix or a stack ``(k, m, m)``.  The diagonal
    of the result is set wherever a vertex lies on a cycle.
    """
    a = np.asarray(adj, dtype=bool)
    if a.ndim == 2:
        return transitive_closure(a[None], chunk)[0]
    m = a.shape[-1]
    out = np.empty_like(a)
    for start in range(0, a.shape[0], chunk):
        r = a[start:start + chunk].astype(np.float32)
        # paths of length <= 2**k after k squarings; one extra pass detects the fixpoint
        for _ in range(max(1, math.ceil(math.log2(max(m, 2)))) + 1):
            nxt = np.minimum(r + r @ r, 1.0)
            if np.array_equal(nxt, r):
                break
            r = nxt
        out[start:start + chunk] = r > 0
    return out


def _find_cycle(adj: np.ndarray) -> list[int]:
    m = adj.shape[0]
    color = [0] * m
    parent = [-1] * m
    for root in range(m):
        if color[root]:
            continue
        stack = [(root, iter(np.flatnonzero(adj[root]).tolist()))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
            elif color[nxt] == 0:
                color[nxt] = 1
                parent[nxt] = node
                stack.append((nxt, iter(np.flatnonzero(adj[nxt]).tolist())))
            elif color[nxt] == 1:
                cycle = [node]
                while cycle[-1] != nxt:
                    cycle.append(parent[cycle[-1]])
                cycle.reverse()
                return cycle + [nxt]
    return []


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class PartialOrder:
    """Immutable strict partial order over ``m`` candidates."""

    __slots__ = ("_rel",)

    def __init__(self, relation: np.ndarray, *, check: bool = True):
        rel = np.array(relation, dtype=bool)
        if rel.ndim != 2 or rel.shape[0] != rel.shape[1]:
            raise ValueError("relation must be a square matrix")
        if check:
            if rel.diagonal().any() or (rel & rel.T).any():
                raise CycleError(_find_cycle(rel))
            if not np.array_equal(transitive_closure(rel), rel):
                raise ValueError("relation is not transitively closed")
        self._rel = _freeze(rel)

    @classmethod
    def from_pairs(cls, m: int, pairs: Iterable[tuple[int, int]]) -> "PartialOrder":
        """Transitive closure of ``pairs``; raises :class:`CycleError` on cycles."""
        if m < 1:
            raise ValueError("need at least one candidate")
        adj = np.zeros((m, m), dtype=bool)
        for a, b in pairs:
            if not (0 <= a < m and 0 <= b < m):
                raise IndexError(f"pair ({a}, {b}) out of range for m={m}")
            adj[a, b] = True
        closed = transitive_closure(adj)
        if closed.diagonal().any():
            raise CycleError(_find_cycle(adj))
        return cls(closed, check=False)

    @classmethod
    def empty(cls, m: int) -> "PartialOrder":
        return cls(np.zeros((m, m), dtype=bool), check=False)

    @property
    def m(self) -> int:
        return self._rel.shape[0]

    @property
    def relation(self) -> np.ndarray:
        return self._rel

    def prefers(self, a: int, b: int) -> bool:
        return bool(self._rel[a, b])

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in zip(*np.nonzero(self._rel))]

    def __len__(self) -> int:
        return int(self._rel.sum())

    def covers(self) -> list[tuple[int, int]]:
        """Pairs of the transitive reduction (immediate preferences)."""
        r = self._rel
        implied = (r.astype(np.int32) @ r.astype(np.int32)) > 0
        red = r & ~implied
        return [(int(a), int(b)) for a, b in zip(*np.nonzero(red))]

    def up_set(self, c: int) -> frozenset[int]:
        return frozenset(np.flatnonzero(self._rel[:, c]).tolist()) | {c}

    def down_set(self, c: int) -> frozenset[int]:
        return frozenset(np.flatnonzero(self._rel[c]).tolist()) | {c}

    def block(self, c: int, w: int) -> frozenset[int]:
        if not self._rel[c, w]:
            raise PreconditionError(f"block({c}, {w}) requires {c} > {w}")
        return self.down_set(c) & self.up_set(w)

    def maximal(self) -> list[int]:
        return np.flatnonzero(~self._rel.any(axis=0)).tolist()

    def minimal(self) -> list[int]:
        return np.flatnonzero(~self._rel.any(axis=1)).tolist()

    def is_total(self) -> bool:
        m = self.m
        return len(self) == m * (m - 1) // 2

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartialOrder):
            return NotImplemented
        return np.array_equal(self._rel, other._rel)

    def __hash__(self) -> int:
        return hash((self.m, np.packbits(self._rel).tobytes()))

    def __repr__(self) -> str:
        return f"PartialOrder(m={self.m}, covers={self.covers()})"


def up_set(P: PartialOrder, c: int) -> frozenset[int]:
    return P.up_set(c)


def down_set(P: PartialOrder, c: int) -> frozenset[int]:
    return P.down_set(c)


def block(P: PartialOrder, c: int, w: int) -> frozenset[int]:
    """Candidates ranked between ``c`` and ``w`` (inclusive); needs ``c > w``."""
    return P.block(c, w)


@dataclass(frozen=True)
class Ranking:
    """A total order, stored best to worst."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(x) for x in self.order)
        if sorted(order) != list(range(len(order))):
            raise ValueError(f"not a permutation: {order}")
        object.__setattr__(self, "order", order)

    @property
    def m(self) -> int:
        return len(self.order)

    def rank_of(self, a: int) -> int:
        """1-based position of ``a``."""
        return self.order.index(a) + 1

    def positions(self) -> np.ndarray:
        """0-based position of every candidate."""
        pos = np.empty(self.m, dtype=np.int64)
        pos[list(self.order)] = np.arange(self.m)
        return pos

    def to_partial_order(self) -> PartialOrder:
        pos = self.positions()
        return PartialOrder(pos[:, None] < pos[None, :], check=False)

    def __iter__(self) -> Iterator[int]:
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)


def is_extension(T: Ranking, P: PartialOrder) -> bool:
    pos = T.positions()
    a, b = np.nonzero(P.relation)
    return bool(np.all(pos[a] < pos[b]))


def enumerate_completions(P: PartialOrder, max_m: int = DEFAULT_ENUMERATION_BOUND) -> Iterator[Ranking]:
    """Yield every linear extension of ``P`` exactly once."""
    m = P.m
    if m > max_m:
        raise BoundError(f"m={m} exceeds enumeration bound {max_m}")
    rel = P.relation
    preds = [set(np.flatnonzero(rel[:, c]).tolist()) for c in range(m)]
    prefix: list[int] = []
    placed: set[int] = set()

    def rec() -> Iterator[Ranking]:
        if len(prefix) == m:
            yield Ranking(tuple(prefix))
            return
        for c in range(m):
            if c not in placed and preds[c] <= placed:
                prefix.append(c)
                placed.add(c)
                yield from rec()
                placed.remove(c)
                prefix.pop()

    yield from rec()


@dataclass(frozen=True)
class StructureClass:
    kind: str  # "linear_forest" | "partitioned" | "general"
    partition: tuple[frozenset[int], ...] | None = None


LINEAR_FOREST = "linear_forest"
PARTITIONED = "partitioned"
GENERAL = "general"


def structure_masks(rel: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-vote ``(linear_forest, partitioned)`` flags for a stack of closed relations.

    Edgeless votes are reported as partitioned only, so the two masks never
    overlap.
    """
    r = np.asarray(rel, dtype=bool)
    single = r.ndim == 2
    if single:
        r = r[None]
    up = r.sum(axis=1)  # strict ancestors per candidate
    ri = r.astype(np.float32)
    reduction = r & ~(np.matmul(ri, ri) > 0)
    has_edges = r.any(axis=(1, 2))
    forest = (
        has_edges
        & (reduction.sum(axis=1) <= 1).all(axis=1)
        & (reduction.sum(axis=2) <= 1).all(axis=1)
    )
    # weak order <=> preference coincides with comparing ancestor counts
    weak = (r == (up[:, :, None] < up[:, None, :])).all(axis=(1, 2))
    partitioned = weak & ~forest
    if single:
        return forest[0], partitioned[0]
    return forest, partitioned


def classify_structure(P: PartialOrder) -> StructureClass:
    forest, partitioned = structure_masks(P.relation)
    if forest:
        return StructureClass(LINEAR_FOREST)
    if partitioned:
        up = P.relation.sum(axis=0)
        levels = sorted(set(up.tolist()))
        blocks = tuple(frozenset(np.flatnonzero(up == lv).tolist()) for lv in levels)
        return StructureClass(PARTITIONED, blocks)
    return StructureClass(GENERAL)


def kendall_tau(sigma: Ranking | Sequence[int], tau: Ranking | Sequence[int]) -> int:
    s = sigma if isinstance(sigma, Ranking) else Ranking(tuple(sigma))
    t = tau if isinstance(tau, Ranking) else Ranking(tuple(tau))
    if s.m != t.m:
        raise ValueError("rankings over different candidate counts")
    ps, pt = s.positions(), t.positions()
    ds = np.sign(ps[:, None] - ps[None, :])
    dt = np.sign(pt[:, None] - pt[None, :])
    return int((ds * dt < 0).sum() // 2)


def density(P: PartialOrder) -> float:
    """Fraction of the ``m(m-1)/2`` candidate pairs that are ordered."""
    m = P.m
    if m < 2:
        return 0.0
    return 2.0 * len(P) / (m * (m - 1))


def vote_densities(profile: "PartialProfile") -> np.ndarray:
    m = profile.m
    if m < 2:
        return np.zeros(profile.n)
    return 2.0 * profile.relations.sum(axis=(1, 2)) / (m * (m - 1))


def profile_density(profile: "PartialProfile") -> float:
    """Mean density over the votes of ``profile``."""
    return float(vote_densities(profile).mean())


class PartialProfile:
    """``n`` partial orders over the same ``m`` candidates."""

    __slots__ = ("_rel", "names", "_covers")

    def __init__(self, relations: np.ndarray, names: Sequence[str] | None = None, *, check: bool = True):
        rel = np.array(relations, dtype=bool)
        if rel.ndim != 3 or rel.shape[1] != rel.shape[2]:
            raise ValueError("relations must have shape (n, m, m)")
        if rel.shape[0] < 1 or rel.shape[1] < 1:
            raise ValueError("need n >= 1 and m >= 1")
        if check:
            closed = transitive_closure(rel)
            bad = np.flatnonzero(closed.diagonal(axis1=1, axis2=2).any(axis=1) | (closed != rel).any(axis=(1, 2)))
            if bad.size:
                l = int(bad[0])
                if closed[l].diagonal().any():
                    raise CycleError(_find_cycle(rel[l]), voter=l)
                raise ValueError(f"vote {l} is not transitively closed")
        self._rel = _freeze(rel)
        if names is not None and len(names) != rel.shape[1]:
            raise ValueError("names must match the candidate count")
        self.names = tuple(names) if names is not None else None
        self._covers = None

    @classmethod
    def from_orders(cls, orders: Sequence[PartialOrder], names=None) -> "PartialProfile":
        if not orders:
            raise ValueError("profile needs at least one vote")
        ms = {P.m for P in orders}
        if len(ms) != 1:
            raise ValueError("all votes must share the candidate count")
        return cls(np.stack([P.relation for P in orders]), names, check=False)

    @classmethod
    def empty(cls, m: int, n: int) -> "PartialProfile":
        return cls(np.zeros((n, m, m), dtype=bool), check=False)

    @property
    def m(self) -> int:
        return self._rel.shape[1]

    @property
    def n(self) -> int:
        return self._rel.shape[0]

    @property
    def relations(self) -> np.ndarray:
        return self._rel

    def cover_edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cover pairs of every vote as flat ``(vote, upper, lower)`` index arrays, sorted.

        Computed once and cached; this is the compact form the necessary-winner
        routines start from.
        """
        if self._covers is None:
            votes, upper, lower = [], [], []
            for start in range(0, self.n, 512):
                r = self._rel[start:start + 512]
                rf = r.astype(np.float32)
                l, a, b = np.nonzero(r & ~(np.matmul(rf, rf) > 0))
                votes.append(l + start)
                upper.append(a)
                lower.append(b)
            self._covers = tuple(_freeze(np.concatenate(x).astype(np.int64)) for x in (votes, upper, lower))
        return self._covers

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, l: int) -> PartialOrder:
        return PartialOrder(self._rel[l], check=False)

    def __iter__(self) -> Iterator[PartialOrder]:
        for l in range(self.n):
            yield self[l]

    @property
    def votes(self) -> tuple[PartialOrder, ...]:
        return tuple(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartialProfile):
            return NotImplemented
        return np.array_equal(self._rel, other._rel)

    def __repr__(self) -> str:
        return f"PartialProfile(m={self.m}, n={self.n})"


class TotalProfile:
    """``n`` rankings over the same ``m`` candidates."""

    __slots__ = ("_orders",)

    def __init__(self, rankings: Sequence[Ranking] | np.ndarray):
        arr = np.array([list(r) for r in rankings] if not isinstance(rankings, np.ndarray) else rankings, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError("need at least one ranking")
        if not (np.sort(arr, axis=1) == np.arange(arr.shape[1])).all():
            raise ValueError("every row must be a permutation")
        self._orders = _freeze(arr)

    @property
    def m(self) -> int:
        return self._orders.shape[1]

    @property
    def n(self) -> int:
        return self._orders.shape[0]

    @property
    def orders(self) -> np.ndarray:
        """``(n, m)`` array, row ``l`` lists voter ``l``'s candidates best first."""
        return self._orders

    def positions(self) -> np.ndarray:
        """``(n, m)`` array of 0-based candidate positions."""
        pos = np.empty_like(self._orders)
        rows = np.arange(self.n)[:, None]
        pos[rows, self._orders] = np.arange(self.m)[None, :]
        return pos

    @property
    def rankings(self) -> tuple[Ranking, ...]:
        return tuple(Ranking(tuple(row)) for row in self._orders.tolist())

    def to_partial_profile(self) -> PartialProfile:
        pos = self.positions()
        return PartialProfile(pos[:, :, None] < pos[:, None, :], check=False)

    def extends(self, profile: PartialProfile) -> bool:
        if profile.m != self.m or profile.n != self.n:
            return False
        pos = self.positions()
        ordered = pos[:, :, None] < pos[:, None, :]
        return bool(np.all(~profile.relations | ordered))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TotalProfile):
            return NotImplemented
        return np.array_equal(self._orders, other._orders)

    def __repr__(self) -> str:
        return f"TotalProfile(m={self.m}, n={self.n})"


def all_rankings(m: int) -> Iterator[Ranking]:
    for perm in itertools.permutations(range(m)):
        yield Ranking(perm)
