"""0-1 ILP reduction of the possible-winner question and an exact solver.

Variable ``x[l, i, j]`` is 1 when voter ``l`` puts candidate ``i`` at rank
``j``.  Every candidate gets one rank and every rank one candidate per voter;
a preference ``i > j`` in vote ``l`` forces ``rank(j) - rank(i) >= 1``; and
for the distinguished candidate ``w`` every other candidate's total score must
not exceed ``w``'s (or stay strictly below it for unique winners).

:func:`solve` is a depth-first branch-and-bound that fills each voter's
ranking top to bottom.  It reads the constraint list back into precedence
DAGs and pairwise score constraints, prunes on per-vote score bounds, and
checks any constraint it does not recognise by activity bounds.
"""

from __future__ import annotations

import io
import os
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .nw import _slide_table, _BIG
from .orders import PartialProfile, TotalProfile, transitive_closure
from .rules import ScoringRule, score_vector
from .weighted_bound import VoteMinimiser, best_weights

DEFAULT_TIMEOUT = 2000.0

EQ, LE, GE = "=", "<=", ">="


class Constraint:
    """``sum coefs * x[vars] (sense) rhs`` with strictly increasing ``vars`` and no zero coefficients.

    ``hint`` is an optional structural tag set by the model builders so the
    solver need not re-derive what kind of row this is; it takes no part in
    equality or in the LP text.
    """

    __slots__ = ("vars", "coefs", "sense", "rhs", "name", "hint", "_terms")

    def __init__(self, vars, coefs, sense: str, rhs: int, name: str, hint: tuple | None = None):
        if sense not in (EQ, LE, GE):
            raise ValueError(f"bad sense {sense!r}")
        self.vars = np.asarray(vars, dtype=np.int64)
        self.coefs = np.asarray(coefs, dtype=np.int64)
        self.sense, self.rhs, self.name, self.hint = sense, int(rhs), name, hint
        self._terms = None

    @classmethod
    def build(cls, coeffs: dict[int, int], sense: str, rhs: int, name: str, hint=None) -> "Constraint":
        items = sorted((v, int(c)) for v, c in coeffs.items() if c != 0)
        return cls([v for v, _ in items], [c for _, c in items], sense, rhs, name, hint)

    @property
    def terms(self) -> tuple[tuple[int, int], ...]:
        """``(variable index, coefficient)`` pairs in variable order."""
        if self._terms is None:
            self._terms = tuple(zip(self.vars.tolist(), self.coefs.tolist()))
        return self._terms

    def satisfied(self, x: np.ndarray) -> bool:
        lhs = int(self.coefs @ np.asarray(x, dtype=np.int64)[self.vars]) if self.vars.size else 0
        if self.sense == EQ:
            return lhs == self.rhs
        return lhs <= self.rhs if self.sense == LE else lhs >= self.rhs

    def __eq__(self, other):
        if not isinstance(other, Constraint):
            return NotImplemented
        return (self.name, self.sense, self.rhs) == (other.name, other.sense, other.rhs) and \
            np.array_equal(self.vars, other.vars) and np.array_equal(self.coefs, other.coefs)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Constraint({self.name}: {len(self.vars)} terms {self.sense} {self.rhs})"


class IlpModel:
    """Binary variables ``x[l, i, j]`` for ``n`` voters and ``m`` candidates plus linear constraints."""

    def __init__(self, m: int, n: int, constraints: Iterable[Constraint] = (),
                 distinguished: int | None = None, rule: str | None = None, unique: bool = False):
        self.m, self.n = m, n
        self.constraints: list[Constraint] = list(constraints)
        self.distinguished = distinguished
        self.rule = rule
        self.unique = unique

    @property
    def num_vars(self) -> int:
        return self.m * self.m * self.n

    def var(self, l: int, i: int, j: int) -> int:
        """Index of ``x[l, i, j]`` (all 0-based)."""
        return (l * self.m + i) * self.m + j

    def var_name(self, v: int) -> str:
        l, rest = divmod(v, self.m * self.m)
        i, j = divmod(rest, self.m)
        return f"x_{l + 1}_{i + 1}_{j + 1}"

    def add(self, constraint: Constraint) -> None:
        self.constraints.append(constraint)

    def copy(self) -> "IlpModel":
        return IlpModel(self.m, self.n, self.constraints, self.distinguished, self.rule, self.unique)

    def __len__(self) -> int:
        return len(self.constraints)

    def __repr__(self) -> str:
        return f"IlpModel(m={self.m}, n={self.n}, vars={self.num_vars}, constraints={len(self)})"


_base_cache: dict[tuple[int, int], tuple[Constraint, ...]] = {}
_base_lock = threading.Lock()
base_model_builds = 0


def _assignment_constraints(m: int, n: int) -> tuple[Constraint, ...]:
    out = []
    ones = np.ones(m, dtype=np.int64)
    ar = np.arange(m)
    for l in range(n):
        base = l * m * m
        for i in range(m):
            out.append(Constraint(base + i * m + ar, ones, EQ, 1, f"cand_{l + 1}_{i + 1}", ("cand", l, i)))
        for j in range(m):
            out.append(Constraint(base + ar * m + j, ones, EQ, 1, f"rank_{l + 1}_{j + 1}", ("rank", l, j)))
    return tuple(out)


def build_base_model(m: int, n: int) -> IlpModel:
    """Model with only the assignment constraints; constructed once per ``(m, n)``."""
    global base_model_builds
    key = (m, n)
    with _base_lock:
        cons = _base_cache.get(key)
        if cons is None:
            cons = _assignment_constraints(m, n)
            _base_cache[key] = cons
            base_model_builds += 1
    return IlpModel(m, n, cons)


def add_profile_constraints(model: IlpModel, profile: PartialProfile) -> IlpModel:
    """One ``rank(j) - rank(i) >= 1`` row per voter and preference pair ``i > j``."""
    if (profile.m, profile.n) != (model.m, model.n):
        raise ValueError("profile does not match the model dimensions")
    m = model.m
    L, I, J = np.nonzero(profile.relations)
    if L.size == 0:
        return model
    p = np.arange(m)
    ivars = ((L * m + I) * m)[:, None] + p
    jvars = ((L * m + J) * m)[:, None] + p
    first = (I < J)[:, None]
    # rows sorted by variable index: the smaller candidate's block comes first
    vars_ = np.where(first, np.hstack([ivars, jvars]), np.hstack([jvars, ivars]))
    up = np.concatenate([-(p + 1), p + 1])
    coefs = np.where(first, up, -up)
    for k, (l, i, j) in enumerate(zip(L.tolist(), I.tolist(), J.tolist())):
        model.add(Constraint(vars_[k], coefs[k], GE, 1, f"pref_{l + 1}_{i + 1}_{j + 1}", ("pref", l, i, j)))
    return model


def add_winner_constraints(model: IlpModel, c_w: int, rule: ScoringRule, unique: bool = False) -> IlpModel:
    """``score(i) <= score(c_w)`` for each ``i != c_w`` (``score(i) - score(c_w) <= -1`` if unique)."""
    m, n = model.m, model.n
    s = score_vector(rule, m).astype(np.int64)
    nz = np.flatnonzero(s)
    rhs = -1 if unique else 0
    offsets = (np.arange(n) * m * m)[:, None]
    for i in range(m):
        if i == c_w:
            continue
        lo, hi = (i, c_w) if i < c_w else (c_w, i)
        sign_lo = 1 if lo == i else -1
        vars_ = np.hstack([offsets + lo * m + nz, offsets + hi * m + nz]).ravel()
        coefs = np.tile(np.concatenate([sign_lo * s[nz], -sign_lo * s[nz]]), n)
        model.add(Constraint(vars_, coefs, LE, rhs, f"win_{i + 1}", ("win", i, c_w, tuple(s.tolist()), rhs)))
    model.distinguished = c_w
    model.rule = rule.name
    model.unique = unique
    return model


def build_pw_model(profile: PartialProfile, c_w: int, rule: ScoringRule, unique: bool = False) -> IlpModel:
    model = build_base_model(profile.m, profile.n)
    add_profile_constraints(model, profile)
    return add_winner_constraints(model, c_w, rule, unique)


FEASIBLE, INFEASIBLE, TIMEOUT = "feasible", "infeasible", "timeout"


@dataclass(frozen=True)
class SolveOutcome:
    status: str
    assignment: np.ndarray | None = None
    elapsed: float = 0.0
    nodes: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def extract_completion(assignment: np.ndarray, m: int, n: int) -> TotalProfile:
    """Read each voter's ranking off a feasible 0-1 assignment."""
    x = np.asarray(assignment).reshape(n, m, m)
    orders = np.argmax(x, axis=1)  # candidate holding each rank
    return TotalProfile(orders)


# --------------------------------------------------------------------- solver


class _Timeout(Exception):
    pass


@dataclass
class _PairGroup:
    """Constraints ``sum_l a(rank_i) - sum_l a(rank_w) <= rhs`` sharing ``w`` and ``a``."""

    w: int
    a: np.ndarray
    members: list[int] = field(default_factory=list)
    rhs: list[int] = field(default_factory=list)


def _split_var(v: int, m: int) -> tuple[int, int, int]:
    l, rest = divmod(v, m * m)
    i, j = divmod(rest, m)
    return l, i, j


def _recognise(model: IlpModel):
    """Sort constraints into assignment rows, precedences, pairwise score rows and the rest."""
    m, n = model.m, model.n
    seen_cand = np.zeros((n, m), dtype=bool)
    seen_rank = np.zeros((n, m), dtype=bool)
    prec: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    groups: dict[tuple[int, tuple[int, ...]], _PairGroup] = {}
    generic: list[Constraint] = []
    for con in model.constraints:
        hint = con.hint
        if hint is not None:
            kind = hint[0]
            if kind == "cand":
                seen_cand[hint[1], hint[2]] = True
            elif kind == "rank":
                seen_rank[hint[1], hint[2]] = True
            elif kind == "pref":
                prec[hint[1]].append((hint[2], hint[3]))
            else:
                _, i, w, a, rhs = hint
                g = groups.setdefault((w, a), _PairGroup(w, np.array(a, dtype=np.int64)))
                g.members.append(i)
                g.rhs.append(rhs)
            continue
        split = [(*_split_var(v, m), c) for v, c in con.terms]
        if con.sense == EQ and con.rhs == 1 and len(split) == m and all(c == 1 for *_, c in split):
            ls = {t[0] for t in split}
            if len(ls) == 1:
                l = split[0][0]
                cands = {t[1] for t in split}
                ranks = {t[2] for t in split}
                is_cand = len(cands) == 1 and len(ranks) == m
                is_rank = len(ranks) == 1 and len(cands) == m
                if is_cand:
                    seen_cand[l, split[0][1]] = True
                if is_rank:
                    seen_rank[l, split[0][2]] = True
                if is_cand or is_rank:
                    continue
        pair = _as_precedence(split, con, m)
        if pair is not None:
            prec[pair[0]].append(pair[1:])
            continue
        row = _as_pairwise(split, con, m, n)
        if row is not None:
            i, w, a, rhs = row
            g = groups.setdefault((w, tuple(a.tolist())), _PairGroup(w, a))
            g.members.append(i)
            g.rhs.append(rhs)
            continue
        generic.append(con)
    if not (seen_cand.all() and seen_rank.all()):
        raise ValueError("solver needs the complete assignment constraints of the base model")
    return prec, list(groups.values()), generic


def _as_precedence(split, con: Constraint, m: int):
    if con.sense != GE or con.rhs != 1 or len(split) != 2 * m:
        return None
    ls = {t[0] for t in split}
    if len(ls) != 1:
        return None
    pos, neg = {}, {}
    for _, i, j, c in split:
        if c == j + 1:
            pos.setdefault(i, set()).add(j)
        elif c == -(j + 1):
            neg.setdefault(i, set()).add(j)
        else:
            return None
    if len(pos) != 1 or len(neg) != 1:
        return None
    (lo, lo_r), = pos.items()
    (hi, hi_r), = neg.items()
    if lo == hi or len(lo_r) != m or len(hi_r) != m:
        return None
    return split[0][0], hi, lo


def _as_pairwise(split, con: Constraint, m: int, n: int):
    if con.sense == EQ or not split:
        return None
    sign = 1 if con.sense == LE else -1
    coef: dict[int, np.ndarray] = {}
    for l, i, j, c in split:
        coef.setdefault(i, np.zeros((n, m), dtype=np.int64))[l, j] = sign * c
    if len(coef) != 2:
        return None
    (i1, c1), (i2, c2) = coef.items()
    for i, ci, w, cw in ((i1, c1, i2, c2), (i2, c2, i1, c1)):
        a = ci[0]
        if (ci == a).all() and (cw == -a).all() and (a >= 0).all() and not (np.diff(a) > 0).any():
            return i, w, a, sign * con.rhs
    return None


class _Search:
    def __init__(self, model: IlpModel, deadline: float):
        self.m, self.n = model.m, model.n
        self.deadline = deadline
        self.nodes = 0
        prec, self.groups, self.generic = _recognise(model)
        self._check_time()
        m, n = self.m, self.n
        adj = np.zeros((n, m, m), dtype=bool)
        for l, pairs in enumerate(prec):
            for i, j in pairs:
                adj[l, i, j] = True
        self.pre = transitive_closure(adj)
        self.cyclic = bool(self.pre.diagonal(axis1=1, axis2=2).any())
        self.down = self.pre.sum(axis=2) + 1
        self.rank = np.full((n, m), -1, dtype=np.int64)
        for g in self.groups:
            g.members_arr = np.array(g.members, dtype=np.int64)
            g.rhs_arr = np.array(g.rhs, dtype=np.int64)
            g.acc = np.zeros(m, dtype=np.int64)
            g.table = _slide_table(g.a)
            g.affine = m < 3 or bool(np.all(np.diff(g.a, 2) == 0))
            per_vote = np.stack([self._vote_min_diff(g, l, 0) for l in range(n)]) if n else np.zeros((0, len(g.members)))
            g.suffix = np.zeros((n + 1, len(g.members)), dtype=np.int64)
            g.suffix[:n] = np.cumsum(per_vote[::-1], axis=0)[::-1]
            g.lam = None
        self._check_time()
        self.root_infeasible = False
        if n and not self.cyclic:
            self._weight_groups()
            self._check_time()

    def _check_time(self) -> None:
        if time.perf_counter() > self.deadline:
            raise _Timeout

    def _weight_groups(self) -> None:
        """Combine each group's rows with weights; may prove the model infeasible outright."""
        minimiser = None
        for g in self.groups:
            if len(g.members) < 2:
                continue  # a single row is already bounded exactly
            room = g.rhs_arr - g.suffix[0]
            if (room < 0).any():
                self.root_infeasible = True
                return
            if minimiser is None:
                minimiser = VoteMinimiser(self.pre)
            lam, margin, per_vote = best_weights(minimiser, g.a, g.w, g.members_arr, g.rhs_arr.astype(float),
                                                 1.0 / (1.0 + room), deadline=self.deadline)
            if per_vote is None:
                continue
            if margin > 1e-7:
                self.root_infeasible = True
                return
            g.lam = lam
            g.lam_rhs = float(lam @ g.rhs_arr)
            g.lag_suffix = np.zeros(self.n + 1)
            g.lag_suffix[: self.n] = np.cumsum(per_vote[::-1])[::-1]

    # bound on one vote given its current prefix ---------------------------------
    def _up_rem(self, l: int) -> np.ndarray:
        unplaced = self.rank[l] < 0
        return self.pre[l][unplaced].sum(axis=0) + 1

    def _vote_min_diff(self, g: _PairGroup, l: int, K: int, up_rem: np.ndarray | None = None) -> np.ndarray:
        """Least ``a(rank_i) - a(rank_w)`` over completions of vote ``l``'s prefix, per member ``i``."""
        m, a, w = self.m, g.a, g.w
        if up_rem is None:
            up_rem = self._up_rem(l)
        rank = self.rank[l]
        ii = g.members_arr
        ri = rank[ii]
        low_i = np.where(ri >= 0, a[np.maximum(ri, 0)], a[m - self.down[l, ii]])
        w_placed = rank[w] >= 0
        high_w = a[rank[w]] if w_placed else a[K + up_rem[w] - 1]
        diff = low_i - high_w
        if not w_placed:
            sel = (ri < 0) & self.pre[l, ii, w]
            if sel.any():
                ci = ii[sel]
                b = (self.pre[l, ci, :] & self.pre[l, :, w]).sum(axis=1) + 2
                lo = K + up_rem[w] - b + 1
                if g.affine:
                    q = lo
                else:
                    hi = m - self.down[l, ci] + 1
                    cols = np.arange(m)[None, :]
                    rows = np.where((cols >= lo[:, None] - 1) & (cols <= hi[:, None] - 1), g.table[b], _BIG)
                    q = rows.argmin(axis=1) + 1
                diff[sel] = a[q - 1] - a[q + b - 2]
        return diff

    def _generic_ok(self, complete_votes: int) -> bool:
        """Activity-bound check of unrecognised constraints; exact once every vote is complete."""
        m = self.m
        for con in self.generic:
            lo = hi = 0
            for v, c in con.terms:
                l, i, j = _split_var(v, m)
                r = self.rank[l, i]
                if r >= 0 or l < complete_votes:
                    val = int(r == j)
                    lo += c * val
                    hi += c * val
                else:
                    lo += min(0, c)
                    hi += max(0, c)
            if con.sense == LE and lo > con.rhs:
                return False
            if con.sense == GE and hi < con.rhs:
                return False
            if con.sense == EQ and not lo <= con.rhs <= hi:
                return False
        return True

    def _expand(self, l: int, K: int) -> list[int] | None:
        """Bound-check node ``(l, K)`` and return its branching candidates, or ``None`` to prune."""
        self.nodes += 1
        if self.nodes & 255 == 0:
            self._check_time()
        if K == 0 and self.generic and not self._generic_ok(l):
            return None
        m = self.m
        up_rem = self._up_rem(l)
        slack = np.zeros(m, dtype=np.int64)
        for g in self.groups:
            cur = self._vote_min_diff(g, l, K, up_rem)
            total = g.acc[g.members_arr] - g.acc[g.w] + cur + g.suffix[l + 1]
            room = g.rhs_arr - total
            if (room < 0).any():
                return None
            if g.lam is not None:
                mixed = g.lam @ (g.acc[g.members_arr] - g.acc[g.w] + cur) + g.lag_suffix[l + 1]
                if mixed > g.lam_rhs + 1e-7:
                    return None
            slack[g.members_arr] += room
        unplaced = self.rank[l] < 0
        latest = m - self.down[l]  # 0-based last feasible rank
        forced = np.flatnonzero(unplaced & (latest == K))
        if forced.size > 1:
            return None
        if forced.size == 1:
            x = int(forced[0])
            return [x] if up_rem[x] == 1 else None
        eligible = np.flatnonzero(unplaced & (up_rem == 1)).tolist()
        if len(eligible) <= 1:
            return eligible or None
        below = self.pre[l][:, unplaced].sum(axis=1)
        targets = {g.w for g in self.groups}
        # targets of the score rows first, then candidates forced high by their
        # unplaced descendants, then those with the most room under their rows
        eligible.sort(key=lambda x: (x not in targets, -int(below[x]), -int(slack[x]), x))
        return eligible

    def _commit(self, l: int, sign: int) -> None:
        for g in self.groups:
            g.acc += sign * g.a[self.rank[l]]

    def run(self) -> np.ndarray | None:
        m, n = self.m, self.n
        if self.cyclic or self.root_infeasible:
            return None
        if n == 0:
            return np.zeros(0, dtype=np.int8) if self._generic_ok(0) else None
        root = self._expand(0, 0)
        if root is None:
            return None
        stack = [[0, 0, root, 0]]
        while stack:
            frame = stack[-1]
            l, K, choices, idx = frame
            if idx > 0:
                if K == m - 1:
                    self._commit(l, -1)
                self.rank[l, choices[idx - 1]] = -1
            if idx == len(choices):
                stack.pop()
                continue
            x = choices[idx]
            frame[3] = idx + 1
            self.rank[l, x] = K
            if K == m - 1:
                self._commit(l, +1)
                nl, nK = l + 1, 0
            else:
                nl, nK = l, K + 1
            if nl == n:
                if self._generic_ok(n):
                    return self._assignment()
                continue
            child = self._expand(nl, nK)
            if child is not None:
                stack.append([nl, nK, child, 0])
        return None

    def _assignment(self) -> np.ndarray:
        m, n = self.m, self.n
        x = np.zeros((n, m, m), dtype=np.int8)
        rows = np.repeat(np.arange(n), m)
        cands = np.tile(np.arange(m), n)
        x[rows, cands, self.rank.ravel()] = 1
        return x.ravel()


def solve(model: IlpModel, timeout: float | None = DEFAULT_TIMEOUT) -> SolveOutcome:
    """Decide feasibility of ``model`` by depth-first branch-and-bound.

    Returns a :class:`SolveOutcome` whose status is ``feasible`` (with a 0-1
    assignment satisfying every constraint), ``infeasible`` or ``timeout``.
    The search order is fixed, so answers are reproducible.
    """
    start = time.perf_counter()
    deadline = start + timeout if timeout is not None else float("inf")
    search = None
    try:
        search = _Search(model, deadline)
        x = search.run()
    except _Timeout:
        return SolveOutcome(TIMEOUT, None, time.perf_counter() - start, search.nodes if search else 0)
    elapsed = time.perf_counter() - start
    if x is None:
        return SolveOutcome(INFEASIBLE, None, elapsed, search.nodes)
    return SolveOutcome(FEASIBLE, x, elapsed, search.nodes)


def pw_check_ilp(profile: PartialProfile, c: int, rule: ScoringRule, unique: bool = False,
                 timeout: float | None = DEFAULT_TIMEOUT) -> SolveOutcome:
    return solve(build_pw_model(profile, c, rule, unique), timeout)


# ------------------------------------------------------------------ LP format

_TERMS_PER_LINE = 8


def _format_terms(model: IlpModel, terms) -> list[str]:
    chunks = []
    for k, (v, c) in enumerate(terms):
        name = model.var_name(v)
        mag = abs(c)
        body = name if mag == 1 else f"{mag} {name}"
        if k == 0:
            chunks.append(body if c > 0 else f"- {body}")
        else:
            chunks.append(f"{'+' if c > 0 else '-'} {body}")
    if not chunks:
        chunks.append(f"0 {model.var_name(0)}")
    return chunks


def export_lp(model: IlpModel, destination: str | os.PathLike | TextIO | None = None) -> str:
    """Serialise ``model`` in CPLEX LP format (zero objective, all variables binary)."""
    meta = [f"m={model.m}", f"n={model.n}"]
    if model.distinguished is not None:
        meta.append(f"distinguished={model.distinguished + 1}")
    if model.rule is not None:
        meta.append(f"rule={model.rule}")
    meta.append(f"unique={int(model.unique)}")
    out = io.StringIO()
    out.write("\\ possible-winner ILP " + " ".join(meta) + "\n")
    out.write("Maximize\n")
    out.write(f" obj: 0 {model.var_name(0)}\n")
    out.write("Subject To\n")
    for con in model.constraints:
        chunks = _format_terms(model, con.terms)
        lines = [" ".join(chunks[k:k + _TERMS_PER_LINE]) for k in range(0, len(chunks), _TERMS_PER_LINE)]
        lines[-1] += f" {con.sense} {con.rhs}"
        out.write(f" {con.name}: {lines[0]}\n")
        for extra in lines[1:]:
            out.write(f"   {extra}\n")
    out.write("Binaries\n")
    names = [model.var_name(v) for v in range(model.num_vars)]
    for k in range(0, len(names), _TERMS_PER_LINE):
        out.write(" " + " ".join(names[k:k + _TERMS_PER_LINE]) + "\n")
    out.write("End\n")
    text = out.getvalue()
    if destination is not None:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    return text


_VAR_RE = re.compile(r"x_(\d+)_(\d+)_(\d+)$")
_NAME_RE = re.compile(r"^\s*([A-Za-z_][\w.]*)\s*:(.*)$")


def parse_lp(text: str) -> IlpModel:
    """Read back a document written by :func:`export_lp`."""
    lines = text.splitlines()
    meta = {}
    if lines and lines[0].startswith("\\"):
        for tok in lines[0].split():
            if "=" in tok:
                k, _, v = tok.partition("=")
                meta[k] = v
    if "m" not in meta or "n" not in meta:
        raise ValueError("LP document lacks the m/n header comment")
    m, n = int(meta["m"]), int(meta["n"])
    model = IlpModel(m, n, distinguished=int(meta["distinguished"]) - 1 if "distinguished" in meta else None,
                     rule=meta.get("rule"), unique=meta.get("unique") == "1")
    section = None
    pending: list[str] = []

    def flush():
        if pending:
            model.add(_parse_constraint(" ".join(pending), model))
            pending.clear()

    for raw in lines[1:]:
        line = raw.rstrip()
        head = line.strip().lower()
        if head in ("maximize", "minimize", "subject to", "binaries", "end"):
            flush()
            section = head
            continue
        if section == "subject to" and line.strip():
            if _NAME_RE.match(line) and not line.startswith("   "):
                flush()
            pending.append(line.strip())
    flush()
    return model


def _parse_constraint(text: str, model: IlpModel) -> Constraint:
    match = _NAME_RE.match(text)
    if not match:
        raise ValueError(f"constraint without a name: {text!r}")
    name, body = match.group(1), match.group(2)
    for sense in (LE, GE, EQ):
        if f" {sense} " in f" {body} ":
            lhs, _, rhs = body.rpartition(f" {sense} ")
            break
    else:
        raise ValueError(f"no relation in constraint {name}")
    coeffs: dict[int, int] = {}
    sign, mag = 1, None
    for tok in lhs.split():
        if tok in "+-":
            sign = -1 if tok == "-" else 1
        elif tok.isdigit():
            mag = int(tok)
        else:
            vm = _VAR_RE.match(tok)
            if not vm:
                raise ValueError(f"unexpected token {tok!r} in {name}")
            l, i, j = (int(g) - 1 for g in vm.groups())
            v = model.var(l, i, j)
            coeffs[v] = coeffs.get(v, 0) + sign * (1 if mag is None else mag)
            sign, mag = 1, None
    return Constraint.build(coeffs, sense, int(rhs), name)
