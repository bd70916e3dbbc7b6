"""Brute-force necessary/possible winners by enumerating completions.

Only for small instances.  Each vote's completions are enumerated and turned
into score vectors; profile totals are then combined vote by vote.  Totals
are packed into single integers (one digit per candidate in base
``n * max_score + 1``) so identical partial sums collapse with ``np.unique``.
"""

from __future__ import annotations

import numpy as np

from .orders import DEFAULT_ENUMERATION_BOUND, PartialOrder, PartialProfile, enumerate_completions
from .rules import ScoringRule, score_vector


def completion_score_vectors(P: PartialOrder, rule: ScoringRule, max_m: int = DEFAULT_ENUMERATION_BOUND) -> np.ndarray:
    """Distinct per-candidate score vectors over all completions of ``P``."""
    s = score_vector(rule, P.m)
    rows = {tuple(s[T.positions()].tolist()) for T in enumerate_completions(P, max_m)}
    return np.array(sorted(rows), dtype=np.int64)


def reachable_totals(profile: PartialProfile, rule: ScoringRule, max_m: int = DEFAULT_ENUMERATION_BOUND) -> np.ndarray:
    """All distinct total-score vectors over completions of ``profile``, shape ``(k, m)``."""
    m, n = profile.m, profile.n
    base = n * int(score_vector(rule, m).max()) + 1
    weights = base ** np.arange(m - 1, -1, -1, dtype=object)
    if base ** m >= 2**62:
        raise OverflowError("instance too large for packed totals")
    weights = weights.astype(np.int64)
    codes = np.zeros(1, dtype=np.int64)
    for P in profile:
        vote = completion_score_vectors(P, rule, max_m) @ weights
        codes = np.unique((codes[:, None] + vote[None, :]).ravel())
    digits = np.empty((codes.size, m), dtype=np.int64)
    rest = codes.copy()
    for j in range(m - 1, -1, -1):
        rest, digits[:, j] = np.divmod(rest, base)
    return digits


def brute_force_winners(
    profile: PartialProfile, rule: ScoringRule, unique: bool = False, max_m: int = DEFAULT_ENUMERATION_BOUND
) -> tuple[frozenset[int], frozenset[int]]:
    """Return ``(necessary winners, possible winners)``."""
    totals = reachable_totals(profile, rule, max_m)
    top = totals.max(axis=1, keepdims=True)
    is_top = totals == top
    if unique:
        is_top &= is_top.sum(axis=1, keepdims=True) == 1
    nw = frozenset(np.flatnonzero(is_top.all(axis=0)).tolist())
    pw = frozenset(np.flatnonzero(is_top.any(axis=0)).tolist())
    return nw, pw


def brute_force_nw(profile, rule, unique=False) -> frozenset[int]:
    return brute_force_winners(profile, rule, unique)[0]


def brute_force_pw(profile, rule, unique=False) -> frozenset[int]:
    return brute_force_winners(profile, rule, unique)[1]
