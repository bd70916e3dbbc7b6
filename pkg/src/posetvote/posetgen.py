"""Random rankings and partial orders, exact probabilities, synthetic profiles.

* RIM: insert the items of a reference ranking one by one at random
  positions; Mallows is the special case with geometric insertion weights.
* RSM: repeatedly select an item from the reference listing and, for each
  item not yet selected, emit a preference for the selected one with
  probability ``p(i)``; the result is the transitive closure.

Randomness comes from ``numpy.random.SeedSequence``: a seed is split into a
parameter stream (reference rankings, per-model draws) and one child stream
per voter, so a profile is a pure function of its arguments and the seed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .orders import PartialOrder, PartialProfile, Ranking, TotalProfile, kendall_tau, transitive_closure

NUM_COMPONENTS = 3
DEFAULT_PHI = 0.5
_ROW_TOL = 1e-9


def _as_order(sigma) -> np.ndarray:
    return np.asarray(sigma.order if isinstance(sigma, Ranking) else sigma, dtype=np.int64)


def _draw_rows(cum: np.ndarray, support: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One 0-based column per row of a row-stochastic matrix given its cumulative sums."""
    u = rng.random(cum.shape[0])
    j = (cum < u[:, None]).sum(axis=1)
    return np.minimum(j, support - 1)


# ------------------------------------------------------------------------- RIM


def check_insertion_matrix(Pi: np.ndarray) -> None:
    Pi = np.asarray(Pi, dtype=float)
    m = Pi.shape[0]
    if Pi.shape != (m, m) or (Pi < 0).any() or (Pi > 1).any():
        raise ValueError("insertion matrix must be square with entries in [0, 1]")
    if np.triu(Pi, 1).any():
        raise ValueError("row i of an insertion matrix is supported on positions 1..i")
    if not np.allclose(Pi.sum(axis=1), 1.0, atol=_ROW_TOL, rtol=0):
        raise ValueError("insertion matrix rows must sum to 1")


def mallows_pi_rim(m: int, phi: float) -> np.ndarray:
    """Insertion matrix under which RIM samples Mallows(phi): ``Pi[i, j] ~ phi**(i - j)``."""
    if not 0 <= phi <= 1:
        raise ValueError("phi must lie in [0, 1]")
    Pi = np.zeros((m, m))
    for i in range(1, m + 1):
        w = phi ** (i - np.arange(1, i + 1, dtype=float))
        Pi[i - 1, :i] = w / w.sum()
    return Pi


def rim_sample(sigma, Pi: np.ndarray, rng: np.random.Generator) -> Ranking:
    """Insert ``sigma[i]`` at 1-based position ``j`` with probability ``Pi[i, j]``."""
    order = _as_order(sigma)
    m = order.size
    cum = np.cumsum(Pi, axis=1)
    pos = _draw_rows(cum, np.arange(1, m + 1), rng)
    tau: list[int] = []
    for item, j in zip(order.tolist(), pos.tolist()):
        tau.insert(j, item)
    return Ranking(tuple(tau))


def rim_prob(tau, sigma, Pi: np.ndarray) -> float:
    """Probability that RIM(sigma, Pi) outputs ``tau`` (its insertion path is unique)."""
    t, order = _as_order(tau), _as_order(sigma)
    where = np.empty(t.size, dtype=np.int64)
    where[t] = np.arange(t.size)
    prob = 1.0
    for i in range(order.size):
        # position of sigma[i] among sigma[:i+1] once laid out as in tau
        j = int((where[order[:i]] < where[order[i]]).sum())
        prob *= Pi[i, j]
    return float(prob)


def mallows_normaliser(m: int, phi: float) -> float:
    return math.prod(sum(phi**k for k in range(i)) for i in range(1, m + 1))


def mallows_prob(tau, sigma, phi: float) -> float:
    """``phi ** KT(sigma, tau) / Z``."""
    m = len(_as_order(sigma))
    return phi ** kendall_tau(tuple(_as_order(sigma)), tuple(_as_order(tau))) / mallows_normaliser(m, phi)


def sample_mallows(sigma, phi: float, rng: np.random.Generator) -> Ranking:
    order = _as_order(sigma)
    return rim_sample(order, mallows_pi_rim(order.size, phi), rng)


# ------------------------------------------------------------------------- RSM


def check_selection_matrix(Pi: np.ndarray) -> None:
    Pi = np.asarray(Pi, dtype=float)
    m = Pi.shape[0]
    if Pi.shape != (m, m) or (Pi < 0).any() or (Pi > 1).any():
        raise ValueError("selection matrix must be square with entries in [0, 1]")
    if np.tril(np.fliplr(Pi), -1).any():
        raise ValueError("row i of a selection matrix is supported on its first m - i + 1 entries")
    if not np.allclose(Pi.sum(axis=1), 1.0, atol=_ROW_TOL, rtol=0):
        raise ValueError("selection matrix rows must sum to 1")


def rsm_pi_mallows(m: int, phi: float) -> np.ndarray:
    """Selection matrix under which RSM with ``p = 1`` is Mallows(phi): ``Pi[i, j] ~ phi**(j - 1)``."""
    if not 0 <= phi <= 1:
        raise ValueError("phi must lie in [0, 1]")
    Pi = np.zeros((m, m))
    for i in range(1, m + 1):
        w = phi ** np.arange(m - i + 1, dtype=float)
        Pi[i - 1, : m - i + 1] = w / w.sum()
    return Pi


def uniform_selection(m: int) -> np.ndarray:
    Pi = np.zeros((m, m))
    for i in range(m):
        Pi[i, : m - i] = 1.0 / (m - i)
    return Pi


@dataclass(frozen=True, eq=False)
class RsmParams:
    """Reference ranking, selection matrix and per-step preference probabilities (length ``m - 1``)."""

    sigma: Ranking
    Pi: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        sigma = self.sigma if isinstance(self.sigma, Ranking) else Ranking(tuple(self.sigma))
        Pi = np.asarray(self.Pi, dtype=float)
        p = np.asarray(self.p, dtype=float).reshape(-1)
        m = sigma.m
        if Pi.shape != (m, m):
            raise ValueError(f"selection matrix must be {m}x{m}")
        check_selection_matrix(Pi)
        if p.size != max(m - 1, 0):
            raise ValueError(f"p must have length m - 1 = {m - 1}")
        if (p < 0).any() or (p > 1).any():
            raise ValueError("p entries must lie in [0, 1]")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "Pi", Pi)
        object.__setattr__(self, "p", p)

    @property
    def m(self) -> int:
        return self.sigma.m


def _selection_sequence(params: RsmParams, rng: np.random.Generator) -> list[int]:
    m = params.m
    if m == 0:
        return []
    cols = _draw_rows(np.cumsum(params.Pi, axis=1), np.arange(m, 0, -1), rng)
    remaining = list(params.sigma.order)
    return [remaining.pop(j) for j in cols.tolist()]


def rsm_sample(params: RsmParams, rng: np.random.Generator) -> PartialOrder:
    """One partial order from RSM(sigma, Pi, p)."""
    m = params.m
    seq = np.array(_selection_sequence(params, rng), dtype=np.int64)
    # in selection coordinates the pair (i, k), i < k, is emitted with probability p[i]
    steps = np.zeros(m)
    steps[: m - 1] = params.p
    emit = np.triu(rng.random((m, m)) < steps[:, None], 1)
    closed = transitive_closure(emit)
    rel = np.zeros((m, m), dtype=bool)
    rel[np.ix_(seq, seq)] = closed
    return PartialOrder(rel, check=False)


def rsm_ranking_prob(tau, params: RsmParams) -> float:
    """Probability of the total order ``tau`` when every pair is emitted (``p == 1``)."""
    if not np.all(params.p == 1.0):
        raise ValueError("ranking probabilities need p == 1 at every step")
    return float(_path_prob(_as_order(tau).tolist(), params))


def _path_prob(seq: Sequence[int], params: RsmParams) -> float:
    remaining = list(params.sigma.order)
    prob = 1.0
    for i, item in enumerate(seq):
        j = remaining.index(item)
        prob *= params.Pi[i, j]
        remaining.pop(j)
    return prob


def _close_bits(rows: list[int]) -> tuple[int, ...]:
    m = len(rows)
    rows = rows[:]
    for k in range(m):
        bit = 1 << k
        for i in range(m):
            if rows[i] & bit:
                rows[i] |= rows[k]
    return tuple(rows)


def _order_bits(Q: PartialOrder) -> tuple[int, ...]:
    return tuple(sum(1 << int(j) for j in np.flatnonzero(row)) for row in Q.relation)


def rsm_outcome_distribution(params: RsmParams, max_m: int = 5) -> dict[tuple[int, ...], float]:
    """Every poset RSM can output, keyed by closed row bitmasks, with its probability.

    Enumerates each derivation, i.e. a selection sequence together with an
    add/skip decision for every pair it offers.
    """
    m = params.m
    if m > max_m:
        raise ValueError(f"exhaustive derivation enumeration is limited to m <= {max_m}")
    out: dict[tuple[int, ...], float] = {}
    for seq in itertools.permutations(range(m)):
        path = _path_prob(seq, params)
        if path == 0.0:
            continue
        offered = [(seq[i], seq[k], params.p[i]) for i in range(m) for k in range(i + 1, m)]
        for mask in range(1 << len(offered)):
            prob = path
            rows = [0] * m
            for bit, (a, b, q) in enumerate(offered):
                if mask >> bit & 1:
                    prob *= q
                    rows[a] |= 1 << b
                else:
                    prob *= 1.0 - q
            if prob == 0.0:
                continue
            key = _close_bits(rows)
            out[key] = out.get(key, 0.0) + prob
    return out


def rsm_poset_prob_bruteforce(Q: PartialOrder, params: RsmParams) -> float:
    """Probability of ``Q`` summed over all derivations whose closure is exactly ``Q`` (m <= 5)."""
    if Q.m != params.m:
        raise ValueError("poset and model disagree on m")
    return rsm_outcome_distribution(params).get(_order_bits(Q), 0.0)


def rsm_poset_prob(Q: PartialOrder, params: RsmParams, max_m: int = 8) -> float:
    """Probability of ``Q`` as a sum over its linear extensions.

    A derivation yields ``Q`` iff its selection sequence extends ``Q``, it
    emits every cover pair of ``Q`` and skips every pair outside ``Q``; the
    other pairs of ``Q`` are free.
    """
    from .orders import enumerate_completions

    rel = Q.relation
    covers = np.zeros_like(rel)
    for a, b in Q.covers():
        covers[a, b] = True
    total = 0.0
    for T in enumerate_completions(Q, max_m):
        seq = T.order
        prob = _path_prob(seq, params)
        if prob == 0.0:
            continue
        for i, a in enumerate(seq[:-1]):
            later = list(seq[i + 1:])
            q = params.p[i]
            n_cover = int(covers[a, later].sum())
            n_out = len(later) - int(rel[a, later].sum())
            prob *= q**n_cover * (1.0 - q) ** n_out
        total += prob
    return total


def gehrlein_method1(m: int, p_const: float, rng: np.random.Generator) -> PartialOrder:
    """Each pair ordered independently with probability ``p_const`` along a uniform random ranking."""
    params = RsmParams(Ranking(tuple(range(m))), uniform_selection(m), np.full(max(m - 1, 0), float(p_const)))
    return rsm_sample(params, rng)


# ------------------------------------------------------------------- mixtures


@dataclass(frozen=True)
class MixtureModel:
    """Weighted components; ``assign`` maps voters to components deterministically."""

    weights: tuple[float, ...]
    components: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.weights) != len(self.components) or not len(self.weights):
            raise ValueError("need one weight per component")
        if (w < 0).any() or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("mixture weights must be non-negative and sum to 1")

    @classmethod
    def equal(cls, components: Sequence) -> "MixtureModel":
        k = len(components)
        return cls(tuple([1.0 / k] * k), tuple(components))

    def assign(self, n: int) -> np.ndarray:
        """Component index per voter; round-robin when the weights are equal."""
        k = len(self.weights)
        w = np.asarray(self.weights)
        if np.allclose(w, w[0]):
            return np.arange(n) % k
        counts = np.floor(w * n).astype(int)
        short = n - counts.sum()
        counts[np.argsort(-(w * n - counts), kind="stable")[:short]] += 1
        return np.repeat(np.arange(k), counts)


def _streams(seed, n: int) -> tuple[np.random.Generator, list[np.random.Generator]]:
    root = np.random.SeedSequence(seed)
    param_seq, voter_seq = root.spawn(2)
    return np.random.default_rng(param_seq), [np.random.default_rng(s) for s in voter_seq.spawn(n)]


def _mallows_rankings(m: int, n: int, phi: float, param_rng, voters) -> np.ndarray:
    """``(n, m)`` rankings from an equal mixture of three Mallows models with random centres."""
    mix = MixtureModel.equal([param_rng.permutation(m) for _ in range(NUM_COMPONENTS)])
    Pi = mallows_pi_rim(m, phi)
    comp = mix.assign(n)
    return np.array([rim_sample(mix.components[k], Pi, voters[l]).order for l, k in enumerate(comp)],
                    dtype=np.int64).reshape(n, m)


def _chain_relation(chain: np.ndarray, m: int) -> np.ndarray:
    rel = np.zeros((m, m), dtype=bool)
    k = chain.size
    if k > 1:
        ii, jj = np.triu_indices(k, 1)
        rel[chain[ii], chain[jj]] = True
    return rel


def gen_mallows_profile(m: int, n: int, seed, phi: float = DEFAULT_PHI) -> TotalProfile:
    """Total orders from an equal mixture of three Mallows models with random centres."""
    param_rng, voters = _streams(seed, n)
    return TotalProfile(_mallows_rankings(m, n, phi, param_rng, voters))


def gen_partial_chains_profile(m: int, n: int, seed, phi: float = DEFAULT_PHI) -> PartialProfile:
    """Mallows-mixture rankings with ``d ~ U{0..m-2}`` random candidates dropped from each."""
    param_rng, voters = _streams(seed, n)
    base = _mallows_rankings(m, n, phi, param_rng, voters)
    rel = np.zeros((n, m, m), dtype=bool)
    for l, rng in enumerate(voters):
        d = int(rng.integers(0, m - 1)) if m >= 2 else 0
        drop = rng.choice(m, size=d, replace=False) if d else np.empty(0, dtype=np.int64)
        rel[l] = _chain_relation(base[l][~np.isin(base[l], drop)], m)
    return PartialProfile(rel, check=False)


def gen_partitioned_profile(m: int, n: int, seed, phi: float = DEFAULT_PHI, return_cuts: bool = False):
    """Mallows-mixture rankings cut into ``q ~ U{2..m}`` ordered blocks.

    A cut at 1-based position ``x`` starts a new block at the ``x``-th item.
    With ``return_cuts`` the sorted cut positions of every voter are returned too.
    """
    param_rng, voters = _streams(seed, n)
    base = _mallows_rankings(m, n, phi, param_rng, voters)
    rel = np.zeros((n, m, m), dtype=bool)
    cuts_out = []
    for l, rng in enumerate(voters):
        if m >= 2:
            q = int(rng.integers(2, m + 1))
            cuts = np.sort(rng.choice(np.arange(2, m + 1), size=q - 1, replace=False))
        else:
            cuts = np.empty(0, dtype=np.int64)
        block = np.zeros(m, dtype=np.int64)
        block[base[l]] = np.searchsorted(cuts, np.arange(1, m + 1), side="right")
        rel[l] = block[:, None] < block[None, :]
        cuts_out.append(tuple(cuts.tolist()))
    profile = PartialProfile(rel, check=False)
    return (profile, cuts_out) if return_cuts else profile


def gen_rsm_mix_profile(m: int, n: int, seed, phi: float = DEFAULT_PHI) -> PartialProfile:
    """Equal mixture of three RSMs with Mallows(phi) selection, random centres and ``p ~ U[0,1]`` per step."""
    param_rng, voters = _streams(seed, n)
    Pi = rsm_pi_mallows(m, phi)
    comps = [RsmParams(Ranking(tuple(param_rng.permutation(m))), Pi, param_rng.random(max(m - 1, 0)))
             for _ in range(NUM_COMPONENTS)]
    mix = MixtureModel.equal(comps)
    comp = mix.assign(n)
    rel = np.empty((n, m, m), dtype=bool)
    for l, k in enumerate(comp):
        rel[l] = rsm_sample(mix.components[k], voters[l]).relation
    return PartialProfile(rel, check=False)


GENERATORS = {
    "chains": gen_partial_chains_profile,
    "partitioned": gen_partitioned_profile,
    "rsm-mix": gen_rsm_mix_profile,
    "mallows": lambda m, n, seed, phi=DEFAULT_PHI: gen_mallows_profile(m, n, seed, phi).to_partial_profile(),
}


# ------------------------------------------------------------------ likelihood


def rsm_conditional(Pi: np.ndarray, p) -> Callable[[Ranking, PartialOrder], float]:
    """``(reference, observed) -> Pr(observed | RSM(reference, Pi, p))``."""
    def prob(reference, observed: PartialOrder) -> float:
        return rsm_poset_prob(observed, RsmParams(reference, Pi, p))
    return prob


def constant_p_conditional(m: int, p_const: float) -> Callable[[Ranking, PartialOrder], float]:
    """Like :func:`rsm_conditional` with uniform selection and one ``p`` for every step."""
    return rsm_conditional(uniform_selection(m), np.full(max(m - 1, 0), float(p_const)))


def nll(model: Callable[[Ranking, PartialOrder], float], observations: Iterable[tuple]) -> float:
    """Mean negative log-probability of ``(reference, observed)`` pairs under ``model``."""
    logs = []
    for reference, observed in observations:
        q = model(reference, observed)
        logs.append(-math.log(q) if q > 0 else math.inf)
    if not logs:
        raise ValueError("no observations")
    return float(np.mean(logs))
