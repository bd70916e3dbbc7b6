"""Positional scoring rules."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .orders import TotalProfile

ELLIPSIS = "..."


@dataclass(frozen=True)
class ScoringRule:
    """A family of non-increasing integer score vectors, one per ``m``.

    ``kind`` is one of ``plurality``, ``veto``, ``approval`` (with ``t``),
    ``borda`` or ``custom``.  A custom rule is a token template such as
    ``(2, 1, "...", 0)``: ``"..."`` turns the value before it into a run of
    zero or more copies, sized so the vector has length ``m``.  Without an
    ellipsis the template only applies to ``m == len(template)``.
    """

    kind: str
    t: int = 0
    template: tuple = ()

    def __post_init__(self):
        if self.kind not in ("plurality", "veto", "approval", "borda", "custom"):
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if self.kind == "approval" and self.t < 1:
            raise ValueError("t-approval needs t >= 1")
        if self.kind == "custom":
            if not self.template or self.template[0] == ELLIPSIS:
                raise ValueError("custom template must start with a value")
            if sum(tok == ELLIPSIS for tok in self.template) > 1:
                raise ValueError("at most one '...' in a custom template")

    @classmethod
    def plurality(cls) -> "ScoringRule":
        return cls("plurality")

    @classmethod
    def veto(cls) -> "ScoringRule":
        return cls("veto")

    @classmethod
    def approval(cls, t: int) -> "ScoringRule":
        return cls("approval", t=t)

    @classmethod
    def borda(cls) -> "ScoringRule":
        return cls("borda")

    @classmethod
    def custom(cls, *tokens) -> "ScoringRule":
        if len(tokens) == 1 and not isinstance(tokens[0], (int, str)):
            tokens = tuple(tokens[0])
        return cls("custom", template=tuple(tok if tok == ELLIPSIS else int(tok) for tok in tokens))

    @property
    def name(self) -> str:
        if self.kind == "approval":
            return f"approval:{self.t}"
        if self.kind == "custom":
            return "custom:" + ",".join(str(tok) for tok in self.template)
        return self.kind

    def __str__(self) -> str:
        return self.name

    def score_vector(self, m: int) -> np.ndarray:
        return _score_vector(self, m).copy()


@lru_cache(maxsize=None)
def _score_vector(rule: ScoringRule, m: int) -> np.ndarray:
    if m < 1:
        raise ValueError("m must be positive")
    if rule.kind == "plurality":
        v = [1] + [0] * (m - 1)
    elif rule.kind == "veto":
        v = [1] * (m - 1) + [0]
    elif rule.kind == "approval":
        t = min(rule.t, m)
        v = [1] * t + [0] * (m - t)
    elif rule.kind == "borda":
        v = list(range(m - 1, -1, -1))
    else:
        v = _expand_template(rule.template, m)
    arr = np.asarray(v, dtype=np.int64)
    if (arr < 0).any() or (np.diff(arr) > 0).any():
        raise ValueError(f"{rule.name} is not a non-increasing non-negative vector for m={m}: {v}")
    arr.flags.writeable = False
    return arr


def _expand_template(template: tuple, m: int) -> list[int]:
    if ELLIPSIS not in template:
        if len(template) != m:
            raise ValueError(f"custom vector has length {len(template)}, profile has m={m}")
        return list(template)
    k = template.index(ELLIPSIS)
    head, value, tail = list(template[:k - 1]), template[k - 1], list(template[k + 1:])
    fill = m - len(head) - len(tail)
    if fill < 0:
        raise ValueError(f"custom template {template} needs m >= {len(head) + len(tail)}")
    return head + [value] * fill + tail


def score_vector(rule: ScoringRule, m: int) -> np.ndarray:
    """Scores for positions ``1..m`` (index 0 is the top position)."""
    return _score_vector(rule, m)


def total_score(rule: ScoringRule, m: int, n: int) -> int:
    """Sum of all candidates' scores in any complete profile of ``n`` votes."""
    return int(n * _score_vector(rule, m).sum())


def profile_scores(rule: ScoringRule, T: TotalProfile) -> np.ndarray:
    s = _score_vector(rule, T.m)
    return s[T.positions()].sum(axis=0)


def winners(rule: ScoringRule, T: TotalProfile, unique: bool = False) -> frozenset[int]:
    """Co-winners (all top scorers), or the single strict top scorer if ``unique``."""
    scores = profile_scores(rule, T)
    top = np.flatnonzero(scores == scores.max())
    if unique and len(top) > 1:
        return frozenset()
    return frozenset(top.tolist())


def parse_rule(text: str) -> ScoringRule:
    """Parse ``plurality | veto | approval:<t> | borda | custom:<s1,s2,...>``."""
    key = text.strip().lower()
    if key in ("plurality", "veto", "borda"):
        return ScoringRule(key)
    kind, _, arg = key.partition(":")
    if kind in ("approval", "t-approval") and arg:
        return ScoringRule.approval(int(arg))
    if kind == "custom" and arg:
        tokens = [tok.strip() for tok in arg.split(",") if tok.strip()]
        return ScoringRule.custom(*(ELLIPSIS if tok in (ELLIPSIS, "…") else int(tok) for tok in tokens))
    raise ValueError(f"cannot parse scoring rule {text!r}")
