"""Possible-winner sets with as few ILP calls as possible.

Phase 1 settles candidates from best-score bounds and the pairwise
competitions of the necessary-winner test.  Phase 2 tries to build a
completion in which the candidate wins.  Whatever is left goes to one ILP per
candidate under a shared deadline.  Plurality and veto go straight to the
max-flow algorithms unless another method is requested.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import flow, ilp
from .nw import NwWorkspace, _beats, contenders
from .orders import PartialProfile, TotalProfile
from .rules import ScoringRule, score_vector, total_score, winners

METHODS = ("auto", "flow", "threephase", "ilp")

CONFIRMED, PRUNED, UNKNOWN = "possible", "not-possible", "unknown"


@dataclass
class PhaseReport:
    """How each candidate was decided.

    The four Phase-1/2/3 entry sets partition the candidates; the Phase-3
    outcome sets partition ``undecided_into_phase3``.  For the flow method the
    bound checks play the role of Phase 1 and the flow tests that of Phase 3.
    """

    method: str
    m: int
    confirmed_phase1: set[int] = field(default_factory=set)
    pruned_phase1: set[int] = field(default_factory=set)
    confirmed_phase2: set[int] = field(default_factory=set)
    undecided_into_phase3: set[int] = field(default_factory=set)
    confirmed_phase3: set[int] = field(default_factory=set)
    rejected_phase3: set[int] = field(default_factory=set)
    timeout_candidates: set[int] = field(default_factory=set)
    ilp_invocations: int = 0
    phase_times: dict[str, float] = field(default_factory=lambda: {"phase1": 0.0, "phase2": 0.0, "phase3": 0.0})
    decisions: dict[int, tuple[str, str, float]] = field(default_factory=dict)

    def decide(self, c: int, phase: str, decision: str, t0: float) -> None:
        self.decisions[c] = (phase, decision, (time.perf_counter() - t0) * 1000.0)

    @property
    def possible(self) -> frozenset[int]:
        return frozenset(self.confirmed_phase1 | self.confirmed_phase2 | self.confirmed_phase3)

    @property
    def unknown(self) -> frozenset[int]:
        return frozenset(self.timeout_candidates)

    def check(self) -> None:
        """Raise ``AssertionError`` if the partition invariants are broken."""
        parts = [self.confirmed_phase1, self.pruned_phase1, self.confirmed_phase2, self.undecided_into_phase3]
        assert sum(len(p) for p in parts) == self.m, "phase sets overlap or miss candidates"
        assert set().union(*parts) == set(range(self.m))
        outcome = [self.confirmed_phase3, self.rejected_phase3, self.timeout_candidates]
        assert sum(len(p) for p in outcome) == len(self.undecided_into_phase3)
        assert set().union(*outcome) == self.undecided_into_phase3

    def rows(self) -> list[tuple[int, str, str, float]]:
        """``(candidate, phase_decided, decision, time_ms)`` per candidate."""
        return [(c, *self.decisions[c]) for c in sorted(self.decisions)]


def phase1(profile: PartialProfile, rule: ScoringRule, unique: bool = False,
           workspace: NwWorkspace | None = None,
           all_pairs: bool = True) -> tuple[frozenset[int], frozenset[int], frozenset[int]]:
    """Split candidates into ``(confirmed, pruned, undecided)`` from score bounds.

    Confirms the top best-score candidates (strictly unique top in unique
    mode), anyone whose best score exceeds half of all points, and necessary
    winners.  Prunes anyone whose best score is below the average score, and
    any opponent that trails a top candidate even in the worst case for it.
    """
    ws = workspace if workspace is not None else NwWorkspace(profile, rule)
    m = ws.m
    smax = ws.smax
    total = total_score(rule, m, ws.n)
    confirmed: set[int] = set()
    pruned: set[int] = set()
    top = np.flatnonzero(smax == smax.max()).tolist()
    if not unique or len(top) == 1:
        confirmed.update(top)
    confirmed.update(np.flatnonzero(2 * smax > total).tolist())
    if unique and m > 1:
        # a unique winner must beat the average score strictly
        pruned.update(np.flatnonzero(m * smax <= total).tolist())
    else:
        pruned.update(np.flatnonzero(m * smax < total).tolist())
    nw_members = set(contenders(ws, unique))
    for c in (range(m) if all_pairs else top):
        for w in range(m):
            if w == c:
                continue
            sc, sw = ws.competition(c, w)
            if not _beats(sc, sw, unique):
                nw_members.discard(c)
            # w cannot reach c even when every vote favours w as much as possible
            if sw < sc or (unique and sw == sc):
                pruned.add(w)
    confirmed |= nw_members
    pruned -= confirmed
    undecided = set(range(m)) - confirmed - pruned
    return frozenset(confirmed), frozenset(pruned), frozenset(undecided)


def _greedy_completion(rel_all: np.ndarray, s: np.ndarray, c: int, known: np.ndarray) -> np.ndarray:
    """Rankings ``(n, m)`` built vote by vote with ``c`` at its deepest best-score rank."""
    n, m = rel_all.shape[0], rel_all.shape[1]
    totals = np.zeros(m, dtype=np.int64)
    orders = np.empty((n, m), dtype=np.int64)
    for l, rel in enumerate(rel_all):
        up_c = int(rel[:, c].sum()) + 1
        last = m - int(rel[c].sum())
        feasible = np.arange(up_c, last + 1)
        r_c = int(feasible[s[feasible - 1] == s[up_c - 1]].max())
        unplaced = np.ones(m, dtype=bool)
        indeg = rel.sum(axis=0)
        anc_c = rel[:, c]
        for r in range(1, m + 1):
            if r == r_c:
                x = c
            else:
                cand = unplaced & (indeg == 0)
                cand[c] = False
                if int((anc_c & unplaced).sum()) == r_c - r:
                    cand &= anc_c
                pool = np.flatnonzero(cand)
                opp = totals.copy()
                opp[c] = -1
                gain = np.maximum(opp[pool] + s[r - 1] - opp.max(), 0)
                keys = np.lexsort((pool, totals[pool], gain, known[pool]))
                x = int(pool[keys[0]])
            orders[l, r - 1] = x
            totals[x] += s[r - 1]
            unplaced[x] = False
            indeg -= rel[x]
    return orders


def _repair(rel_all: np.ndarray, s: np.ndarray, c: int, orders: np.ndarray, bound: int,
            max_steps: int) -> bool:
    """Swap points away from opponents above ``bound`` in place; True once none is left.

    A move exchanges an over-bound opponent ``x`` with a later candidate ``y``
    of the same vote, which keeps the ranking a completion when no
    descendant of ``x`` sits between them and every ancestor of ``y`` is
    ranked above ``x``.  ``c`` never moves.
    """
    n, m = orders.shape
    rows = np.arange(n)
    pos = np.empty_like(orders)
    pos[rows[:, None], orders] = np.arange(m)[None, :]
    totals = np.bincount(orders.ravel(), weights=np.tile(s, n), minlength=m).astype(np.int64)
    idx = np.arange(m)
    for _ in range(max_steps):
        over = totals - bound
        over[c] = np.iinfo(np.int64).min
        x = int(over.argmax())
        excess = int(over[x])
        if excess <= 0:
            return True
        px = pos[:, x]
        # first position below x holding one of its descendants (m if none)
        desc_first = np.where(rel_all[:, x, :], pos, m).min(axis=1)
        # last position holding an ancestor of each candidate (-1 if none)
        anc_last = np.where(rel_all, pos[:, :, None], -1).max(axis=1)
        py = pos
        ok = (py > px[:, None]) & (py < desc_first[:, None]) & (anc_last < px[:, None])
        ok[:, c] = False
        ok[:, x] = False
        delta = s[px][:, None] - s[py]
        ok &= delta > 0
        if not ok.any():
            return False
        new_y = totals[None, :] + delta
        # prefer moves that keep y within bound and shed as much excess as possible
        fits = ok & (new_y <= bound)
        if fits.any():
            shed = np.where(fits, np.minimum(delta, excess), -1)
            best = shed.max()
            slack = np.where(fits & (shed == best), bound - new_y, -1)
            l, y = np.unravel_index(int(slack.argmax()), slack.shape)
        else:
            worst = np.where(ok, np.maximum(totals[x] - delta, new_y), np.iinfo(np.int64).max)
            l, y = np.unravel_index(int(worst.argmin()), worst.shape)
            if worst[l, y] >= totals[x]:
                return False
        l, y = int(l), int(y)
        i, j = int(px[l]), int(py[l, y])
        orders[l, i], orders[l, j] = y, x
        pos[l, x], pos[l, y] = j, i
        d = int(s[i] - s[j])
        totals[x] -= d
        totals[y] += d
    return False


def phase2_try_completion(profile: PartialProfile, rule: ScoringRule, c: int,
                          known_pw: frozenset[int] | set[int] = frozenset(),
                          unique: bool = False, repair_steps: int | None = None) -> TotalProfile | None:
    """Heuristic completion in which ``c`` wins; ``None`` when the heuristic fails.

    In each vote ``c`` takes the deepest rank that still earns its best score
    there.  The other ranks are filled top-down by topological order, picking
    the candidate whose points raise the strongest opponent's total the least
    (then lower current total, then lower index), with candidates already
    known to be possible winners pushed as deep as possible.  If some
    opponent still ends above ``c``, pairwise swaps inside votes move its
    points to candidates with room to spare.  Failure says nothing about ``c``.
    """
    m, n = profile.m, profile.n
    s = score_vector(rule, m)
    known = np.zeros(m, dtype=bool)
    known[list(known_pw)] = True
    known[c] = False
    rel = profile.relations
    orders = _greedy_completion(rel, s, c, known)
    target = int(s[orders.argsort(axis=1)[:, c]].sum())
    bound = target - 1 if unique else target
    steps = 4 * n * m if repair_steps is None else repair_steps
    if m > 1 and steps > 0:
        _repair(rel, s, c, orders, bound, steps)
    T = TotalProfile(orders)
    return T if c in winners(rule, T, unique) else None


def _flow_kind(rule: ScoringRule, m: int) -> str | None:
    s = score_vector(rule, m)
    if m == 1:
        return "plurality"
    if s[0] > 0 and not s[1:].any():
        return "plurality"
    if s[-1] == 0 and (s[:-1] == s[0]).all() and s[0] > 0:
        return "veto"
    return None


def _run_flow(profile: PartialProfile, kind: str, unique: bool, report: PhaseReport, t0: float) -> None:
    bounds = flow.plurality_bounds if kind == "plurality" else flow.veto_bounds
    check = flow.pw_check_plurality if kind == "plurality" else flow.pw_check_veto
    t = time.perf_counter()
    # both bounds are strict, so they hold for unique winners as well
    admitted, rejected = bounds(profile)
    for c in admitted:
        report.decide(c, "flow-bounds", CONFIRMED, t0)
    for c in rejected - admitted:
        report.decide(c, "flow-bounds", PRUNED, t0)
    report.confirmed_phase1 = set(admitted)
    report.pruned_phase1 = set(rejected - admitted)
    report.phase_times["phase1"] = time.perf_counter() - t
    t = time.perf_counter()
    rest = sorted(set(range(profile.m)) - report.confirmed_phase1 - report.pruned_phase1)
    report.undecided_into_phase3 = set(rest)
    for c in rest:
        ok = check(profile, c, unique)
        (report.confirmed_phase3 if ok else report.rejected_phase3).add(c)
        report.decide(c, "flow", CONFIRMED if ok else PRUNED, t0)
    report.phase_times["phase3"] = time.perf_counter() - t


def _run_ilp(profile: PartialProfile, rule: ScoringRule, cands: list[int], unique: bool,
             report: PhaseReport, deadline: float, t0: float, threads: int) -> None:
    """One ILP per candidate in ``cands``; completions found also confirm their co-winners."""
    t = time.perf_counter()
    shared = ilp.build_base_model(profile.m, profile.n)
    ilp.add_profile_constraints(shared, profile)
    pending = set(cands)

    def solve_one(c: int) -> ilp.SolveOutcome:
        model = ilp.add_winner_constraints(shared.copy(), c, rule, unique)
        return ilp.solve(model, max(0.0, deadline - time.perf_counter()))

    def record(c: int, out: ilp.SolveOutcome) -> None:
        report.ilp_invocations += 1
        if out.status == ilp.FEASIBLE:
            T = ilp.extract_completion(out.assignment, profile.m, profile.n)
            for x in sorted(winners(rule, T, unique) & pending):
                pending.discard(x)
                report.confirmed_phase3.add(x)
                report.decide(x, "phase3", CONFIRMED, t0)
        elif out.status == ilp.INFEASIBLE:
            report.rejected_phase3.add(c)
            report.decide(c, "phase3", PRUNED, t0)
        else:
            report.timeout_candidates.add(c)
            report.decide(c, "phase3", UNKNOWN, t0)
        pending.discard(c)

    if threads > 1 and len(cands) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [(c, pool.submit(solve_one, c)) for c in cands]
            for c, fut in futures:
                out = fut.result()
                if c in pending:
                    record(c, out)
    else:
        for c in cands:
            if c in pending:
                record(c, solve_one(c))
    report.phase_times["phase3"] = time.perf_counter() - t


def pw_set(profile: PartialProfile, rule: ScoringRule, method: str = "auto",
           timeout: float | None = ilp.DEFAULT_TIMEOUT, unique: bool = False,
           threads: int = 1) -> tuple[frozenset[int], PhaseReport]:
    """Possible winners of ``profile`` under ``rule`` with a per-candidate report.

    ``method`` is ``auto`` (flow for plurality/veto, else three-phase),
    ``flow``, ``threephase`` or ``ilp`` (one ILP per candidate, no bounds).
    Candidates whose ILP hits the shared ``timeout`` are reported as unknown
    and left out of the returned set.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    m = profile.m
    t0 = time.perf_counter()
    deadline = t0 + timeout if timeout is not None else float("inf")
    kind = _flow_kind(rule, m)
    if method == "flow" and kind is None:
        raise ValueError(f"the flow method only handles plurality and veto, not {rule.name}")
    if method == "auto":
        method = "flow" if kind is not None else "threephase"
    report = PhaseReport(method, m)
    if method == "flow":
        _run_flow(profile, kind, unique, report, t0)
    elif method == "ilp":
        report.undecided_into_phase3 = set(range(m))
        _run_ilp(profile, rule, list(range(m)), unique, report, deadline, t0, threads)
    else:
        t = time.perf_counter()
        confirmed, pruned, undecided = phase1(profile, rule, unique)
        report.confirmed_phase1, report.pruned_phase1 = set(confirmed), set(pruned)
        for c in confirmed:
            report.decide(c, "phase1", CONFIRMED, t0)
        for c in pruned:
            report.decide(c, "phase1", PRUNED, t0)
        report.phase_times["phase1"] = time.perf_counter() - t

        t = time.perf_counter()
        known = set(confirmed)
        left = set(undecided)
        for c in sorted(undecided):
            if c not in left:
                continue
            T = phase2_try_completion(profile, rule, c, known, unique)
            if T is None:
                continue
            # every winner of the completion is a possible winner too
            for x in sorted(winners(rule, T, unique) & left):
                left.discard(x)
                known.add(x)
                report.confirmed_phase2.add(x)
                report.decide(x, "phase2", CONFIRMED, t0)
        report.phase_times["phase2"] = time.perf_counter() - t

        report.undecided_into_phase3 = set(left)
        if left:
            _run_ilp(profile, rule, sorted(left), unique, report, deadline, t0, threads)
    report.check()
    return report.possible, report
