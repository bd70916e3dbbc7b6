"""Lower bounds on weighted score differences over all completions.

For weights ``lam`` on opponents of ``w``, every completion satisfies::

    sum_i lam_i * (score_i - score_w)  >=  sum_l  min over completions of vote l

and the per-vote minimum is a linear cost over positions.  If the right-hand
side exceeds ``sum_i lam_i * rhs_i`` no completion meets all the rows
``score_i - score_w <= rhs_i`` at once, even when each row alone can be met.
The weights are tuned by projected subgradient ascent.
"""

from __future__ import annotations

import time

import numpy as np
from scipy.optimize import linear_sum_assignment

# exact dynamic programme over down-sets while n * 2**m * m stays below this
_DP_CELLS = 2**24
_INF = np.inf


class VoteMinimiser:
    """``min sum_x coef[x] * a[pos_x]`` over the linear extensions of each vote.

    Exact (a dynamic programme over sets of already placed candidates) for
    small ``m``; otherwise the relaxation that only keeps every candidate
    inside its feasible rank interval, solved as an assignment problem.
    """

    def __init__(self, rel: np.ndarray):
        self.rel = np.asarray(rel, dtype=bool)
        n, m, _ = self.rel.shape
        self.n, self.m = n, m
        self.exact = n * (1 << m) * m <= _DP_CELLS
        if self.exact:
            self._prepare_dp()
        else:
            self.lo = self.rel.sum(axis=1)  # 0-based earliest rank
            self.hi = m - 1 - self.rel.sum(axis=2)

    def _prepare_dp(self) -> None:
        n, m = self.n, self.m
        bits = 1 << np.arange(m)
        anc = (self.rel * bits[:, None]).sum(axis=1)  # (n, m) ancestor bitmask of each candidate
        masks = np.arange(1 << m)
        pop = np.zeros(1 << m, dtype=np.int64)
        for x in range(m):
            pop += (masks >> x) & 1
        self.layers = []
        for k in range(m):
            src = masks[pop == k]
            steps = []
            for x in range(m):
                free = ((src >> x) & 1) == 0
                s_x = src[free]
                ok = (s_x[None, :] & anc[:, x, None]) == anc[:, x, None]
                steps.append((x, s_x, s_x | (1 << x), ok))
            self.layers.append(steps)

    def solve(self, coef: np.ndarray, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-vote minima ``(n,)`` and minimising 0-based positions ``(n, m)``."""
        return self._solve_dp(coef, a) if self.exact else self._solve_assignment(coef, a)

    def _solve_dp(self, coef, a):
        n, m = self.n, self.m
        dp = np.full((n, 1 << m), _INF)
        dp[:, 0] = 0.0
        arg = np.zeros((n, 1 << m), dtype=np.int8)
        for k, steps in enumerate(self.layers):
            for x, src, dst, ok in steps:
                v = np.where(ok, dp[:, src] + coef[x] * a[k], _INF)
                cur = dp[:, dst]
                better = v < cur
                dp[:, dst] = np.where(better, v, cur)
                arg[:, dst] = np.where(better, x, arg[:, dst])
        pos = np.empty((n, m), dtype=np.int64)
        mask = np.full(n, (1 << m) - 1)
        rows = np.arange(n)
        for k in range(m - 1, -1, -1):
            x = arg[rows, mask].astype(np.int64)
            pos[rows, x] = k
            mask ^= 1 << x
        return dp[:, -1], pos

    def _solve_assignment(self, coef, a):
        n, m = self.n, self.m
        ranks = np.arange(m)
        base = coef[:, None] * a[None, :]
        big = np.abs(base).max() * m + 1.0
        vals = np.empty(n)
        pos = np.empty((n, m), dtype=np.int64)
        for l in range(n):
            allowed = (ranks[None, :] >= self.lo[l][:, None]) & (ranks[None, :] <= self.hi[l][:, None])
            cost = np.where(allowed, base, big)
            rows, cols = linear_sum_assignment(cost)
            pos[l, rows] = cols
            vals[l] = base[rows, cols].sum()
        return vals, pos


def best_weights(minimiser: VoteMinimiser, a: np.ndarray, w: int, members: np.ndarray, rhs: np.ndarray,
                 lam0: np.ndarray | None = None, iters: int = 40, deadline: float = _INF):
    """Subgradient search for weights proving the rows infeasible.

    Returns ``(lam, margin, per_vote)`` for the best weights found, where
    ``margin = sum_l per_vote[l] - lam @ rhs``; a positive margin is a proof
    of infeasibility.  ``lam`` sums to 1.
    """
    k = members.size
    lam = np.full(k, 1.0 / k) if lam0 is None else lam0 / lam0.sum()
    m = minimiser.m
    a = np.asarray(a, dtype=float)
    best = (lam, -_INF, None)
    for it in range(iters):
        coef = np.zeros(m)
        coef[members] = lam
        coef[w] -= lam.sum()
        per_vote, pos = minimiser.solve(coef, a)
        margin = per_vote.sum() - lam @ rhs
        if margin > best[1]:
            best = (lam.copy(), margin, per_vote)
        if margin > 1e-9 or time.perf_counter() > deadline:
            break
        scores = a[pos].sum(axis=0)
        g = scores[members] - scores[w] - rhs
        top = np.abs(g).max()
        if top == 0:
            break
        lam = np.maximum(lam + (0.5 / np.sqrt(it + 1)) * g / top, 0.0)
        if lam.sum() == 0:
            lam = np.full(k, 1.0 / k)
        lam /= lam.sum()
    return best
