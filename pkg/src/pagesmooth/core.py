"""Request sequences, edit distance, perturbation neighborhoods and phases."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

Seq = tuple[int, ...]

DEFAULT_NEIGHBORHOOD_CAP = 2_000_000


class BudgetExceeded(RuntimeError):
    """An enumeration grew past its configured cap."""


@dataclass(frozen=True)
class CacheConfig:
    k: int
    i: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"cache size must be positive, got k={self.k}")
        if not 0 <= self.i < self.k:
            raise ValueError(f"smoothing parameter must satisfy 0 <= i < k, got i={self.i}, k={self.k}")


@dataclass(frozen=True)
class PhasePartition:
    boundaries: tuple[int, ...]
    phase_count: int
    last_phase_distinct: int

    def phases(self, s: Sequence[int]) -> list[Seq]:
        ends = self.boundaries[1:] + (len(s),)
        return [tuple(s[a:b]) for a, b in zip(self.boundaries, ends)]


def as_seq(s: Iterable[int]) -> Seq:
    out = tuple(int(p) for p in s)
    for p in out:
        if p < 0:
            raise ValueError(f"page ids must be non-negative, got {p}")
    return out


def edit_distance(a: Sequence[int], b: Sequence[int]) -> int:
    """Levenshtein distance with unit-cost insertions, deletions and substitutions."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def _single_edits(s: Seq, alphabet: Sequence[int]) -> set[Seq]:
    out = set()
    n = len(s)
    for j in range(n):
        out.add(s[:j] + s[j + 1:])
        for p in alphabet:
            if p != s[j]:
                out.add(s[:j] + (p,) + s[j + 1:])
    for j in range(n + 1):
        for p in alphabet:
            out.add(s[:j] + (p,) + s[j:])
    return out


def neighborhood(s: Sequence[int], delta: int, alphabet: Iterable[int],
                 cap: int = DEFAULT_NEIGHBORHOOD_CAP) -> set[Seq]:
    """All sequences over ``alphabet`` within edit distance ``delta`` of ``s``.

    The result is built by ``delta`` rounds of single edits (deduplicated by
    value) and then filtered through :func:`edit_distance`. Raises
    :class:`BudgetExceeded` if the set grows beyond ``cap``.
    """
    alphabet = sorted(set(alphabet))
    if not alphabet:
        raise ValueError("alphabet must be non-empty")
    if delta < 1:
        raise ValueError("delta must be at least 1")
    s = tuple(s)
    seen = {s}
    frontier = {s}
    for _ in range(delta):
        nxt = set()
        for t in frontier:
            for u in _single_edits(t, alphabet):
                if u not in seen:
                    nxt.add(u)
        seen |= nxt
        if len(seen) > cap:
            raise BudgetExceeded(f"neighborhood exceeds cap of {cap} sequences")
        frontier = nxt
    return {t for t in seen if edit_distance(s, t) <= delta}


def phase_partition(s: Sequence[int], k: int) -> PhasePartition:
    """Split ``s`` into maximal phases of at most ``k`` distinct pages."""
    if k < 1:
        raise ValueError("k must be positive")
    if not s:
        return PhasePartition((), 0, 0)
    boundaries = [0]
    current: set[int] = set()
    for j, p in enumerate(s):
        if p not in current and len(current) == k:
            boundaries.append(j)
            current = set()
        current.add(p)
    return PhasePartition(tuple(boundaries), len(boundaries), len(current))


def canonical_renaming(s: Sequence[int]) -> Seq:
    """Rename pages to 0, 1, 2, ... in order of first occurrence."""
    names: dict[int, int] = {}
    return tuple(names.setdefault(p, len(names)) for p in s)


def canonical_sequences(alphabet_size: int, max_len: int):
    """Yield every sequence of length <= max_len up to page renaming.

    Sequences are restricted-growth strings: page j may appear only after
    pages 0..j-1 have appeared. Each renaming class is produced once.
    """
    def grow(prefix: list[int], used: int):
        yield tuple(prefix)
        if len(prefix) == max_len:
            return
        for p in range(min(used + 1, alphabet_size)):
            prefix.append(p)
            yield from grow(prefix, max(used, p + 1))
            prefix.pop()

    yield from grow([], 0)


def format_sequence(s: Sequence[int]) -> str:
    return ",".join(str(p) for p in s)


def parse_sequence(line: str) -> Seq:
    line = line.strip()
    if not line:
        return ()
    return as_seq(int(tok) for tok in line.split(","))


def read_corpus(path) -> list[Seq]:
    with open(path) as fh:
        return [parse_sequence(line) for line in fh]


def write_corpus(path, corpus: Iterable[Sequence[int]]) -> None:
    with open(path, "w") as fh:
        for s in corpus:
            fh.write(format_sequence(s) + "\n")
