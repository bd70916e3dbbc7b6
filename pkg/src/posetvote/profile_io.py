"""Profile text format and ingestion of rating and pairwise-comparison tables.

Profile documents look like::

    # poset-profile v1
    candidates: 4
    voters: 2
    names: a,b,c,d
    0: 0>1,1>2
    1:

Each voter line lists preference pairs by candidate index; the writer emits
the cover pairs of each vote in sorted order, the reader accepts any pairs
and closes them transitively.
"""

from __future__ import annotations

import csv
import io
import os
from typing import Iterable, TextIO

import numpy as np

from .orders import CycleError, PartialProfile, _find_cycle, transitive_closure

MAGIC = "# poset-profile v1"


class ProfileSyntaxError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _read_text(source) -> str:
    if hasattr(source, "read"):
        return source.read()
    with open(source, encoding="utf-8") as fh:
        return fh.read()


def parse_profile(source: str | os.PathLike | TextIO) -> PartialProfile:
    """Parse a profile document from a path or file object."""
    return loads_profile(_read_text(source))


def loads_profile(text: str) -> PartialProfile:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise ProfileSyntaxError(f"expected header {MAGIC!r}", 1)
    header: dict[str, tuple[str, int]] = {}
    votes: dict[int, tuple[list[tuple[int, int]], int]] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ProfileSyntaxError(f"expected 'key: value' or '<voter>: pairs', got {line!r}", lineno)
        key, value = key.strip(), value.strip()
        if key in ("candidates", "voters", "names"):
            if key in header:
                raise ProfileSyntaxError(f"duplicate {key!r} header", lineno)
            header[key] = (value, lineno)
            continue
        if not key.isdigit():
            raise ProfileSyntaxError(f"unknown key {key!r}", lineno)
        voter = int(key)
        if voter in votes:
            raise ProfileSyntaxError(f"voter {voter} appears twice", lineno)
        pairs = []
        for tok in filter(None, (t.strip() for t in value.split(","))):
            a, gt, b = tok.partition(">")
            if not gt or not a.strip().isdigit() or not b.strip().isdigit():
                raise ProfileSyntaxError(f"bad pair {tok!r}", lineno)
            pairs.append((int(a), int(b)))
        votes[voter] = (pairs, lineno)
    for key in ("candidates", "voters"):
        if key not in header:
            raise ProfileSyntaxError(f"missing {key!r} header")
    try:
        m, n = int(header["candidates"][0]), int(header["voters"][0])
    except ValueError as exc:
        raise ProfileSyntaxError(f"non-integer size: {exc}") from None
    if m < 1 or n < 1:
        raise ProfileSyntaxError("need at least one candidate and one voter")
    names = None
    if "names" in header:
        value, lineno = header["names"]
        names = [x.strip() for x in value.split(",")]
        if len(names) != m:
            raise ProfileSyntaxError(f"{len(names)} names for {m} candidates", lineno)
    if sorted(votes) != list(range(n)):
        raise ProfileSyntaxError(f"voter ids must be 0..{n - 1}, each exactly once")
    adj = np.zeros((n, m, m), dtype=bool)
    for voter, (pairs, lineno) in votes.items():
        for a, b in pairs:
            if not (0 <= a < m and 0 <= b < m):
                raise ProfileSyntaxError(f"candidate index out of range in {a}>{b}", lineno)
            if a == b:
                raise CycleError([a], voter=voter)
            adj[voter, a, b] = True
    return _closed_profile(adj, names)


def _closed_profile(adj: np.ndarray, names=None) -> PartialProfile:
    closed = transitive_closure(adj)
    cyclic = np.flatnonzero(closed.diagonal(axis1=1, axis2=2).any(axis=1))
    if cyclic.size:
        l = int(cyclic[0])
        raise CycleError(_find_cycle(adj[l]), voter=l)
    return PartialProfile(closed, names, check=False)


def dumps_profile(profile: PartialProfile) -> str:
    out = [MAGIC, f"candidates: {profile.m}", f"voters: {profile.n}"]
    if profile.names is not None:
        out.append("names: " + ",".join(profile.names))
    for l, P in enumerate(profile):
        out.append(f"{l}: " + ",".join(f"{a}>{b}" for a, b in sorted(P.covers())))
    return "\n".join(line.rstrip() for line in out) + "\n"


def write_profile(profile: PartialProfile, destination: str | os.PathLike | TextIO | None = None) -> str:
    """Serialise ``profile``; also writes it to ``destination`` when given."""
    text = dumps_profile(profile)
    if destination is not None:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    return text


# ------------------------------------------------------------------ ingestion


def read_table(source, columns: tuple[str, ...]) -> list[dict[str, str]]:
    """Rows of a headered UTF-8 CSV, checking that ``columns`` are present."""
    text = _read_text(source)
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in columns if c not in (reader.fieldnames or [])]
    if missing:
        raise ValueError(f"CSV lacks column(s) {', '.join(missing)}")
    return list(reader)


def _rows(table, columns):
    for k, row in enumerate(table):
        if isinstance(row, dict):
            yield k, tuple(row[c] for c in columns)
        else:
            yield k, tuple(row)


def ingest_ratings(table: Iterable) -> PartialProfile:
    """One vote per user ordering its rated items by rating; ties and unrated items stay incomparable.

    ``table`` holds ``(user, item, rating)`` rows (tuples or dicts).  Users
    keep their order of first appearance; candidates are the distinct items
    in sorted order and become the profile's names.
    """
    users: dict[str, dict[str, float]] = {}
    items: set[str] = set()
    for k, (user, item, rating) in _rows(table, ("user", "item", "rating")):
        try:
            value = float(rating)
        except (TypeError, ValueError):
            raise ValueError(f"row {k + 1}: rating {rating!r} is not a number") from None
        users.setdefault(str(user), {})[str(item)] = value
        items.add(str(item))
    if not users:
        raise ValueError("no ratings to ingest")
    names = sorted(items)
    index = {x: i for i, x in enumerate(names)}
    m = len(names)
    rel = np.zeros((len(users), m, m), dtype=bool)
    for l, ratings in enumerate(users.values()):
        r = np.full(m, np.nan)
        for item, value in ratings.items():
            r[index[item]] = value
        rel[l] = r[:, None] > r[None, :]  # comparisons with NaN are False
    return PartialProfile(rel, names, check=False)


def ingest_pairwise(table: Iterable, threshold: float = 0.0) -> tuple[PartialProfile, list[str]]:
    """Votes from ``(user, a, b, preferred, confidence)`` rows with ``confidence >= threshold``.

    Candidates are all items mentioned anywhere in the table, so the
    candidate set does not depend on ``threshold``.  Users whose kept pairs
    contain a cycle are dropped and returned separately.
    """
    kept: dict[str, list[tuple[str, str]]] = {}
    items: set[str] = set()
    for k, (user, a, b, preferred, conf) in _rows(table, ("user", "a", "b", "preferred", "confidence")):
        a, b, preferred, user = str(a), str(b), str(preferred), str(user)
        if preferred not in (a, b):
            raise ValueError(f"row {k + 1}: preferred item {preferred!r} is neither {a!r} nor {b!r}")
        items.update((a, b))
        pairs = kept.setdefault(user, [])
        if float(conf) >= threshold:
            pairs.append((preferred, b if preferred == a else a))
    if not kept:
        raise ValueError("no comparisons to ingest")
    names = sorted(items)
    index = {x: i for i, x in enumerate(names)}
    m = len(names)
    users = list(kept)
    adj = np.zeros((len(users), m, m), dtype=bool)
    for l, user in enumerate(users):
        for win, lose in kept[user]:
            adj[l, index[win], index[lose]] = True
    closed = transitive_closure(adj)
    cyclic = closed.diagonal(axis1=1, axis2=2).any(axis=1)
    dropped = [u for u, bad in zip(users, cyclic) if bad]
    if cyclic.all():
        raise ValueError("every user's comparisons are cyclic")
    return PartialProfile(closed[~cyclic], names, check=False), dropped
