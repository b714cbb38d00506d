"""Exact state-distribution engines for randomized policies.

Every engine keeps a map from a canonical cache state to an exact
``Fraction`` probability and evolves it request by request. States always
have ``k`` slots; unused slots hold the ``EMPTY`` sentinel.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..core import BudgetExceeded, CacheConfig

EMPTY = -1
DEFAULT_STATE_CAP = 1_000_000

Distribution = dict


@dataclass
class ExpectedMisses:
    per_request: list = field(default_factory=list)

    @property
    def value(self) -> Fraction:
        return sum(self.per_request, Fraction(0))

    def write_csv(self, path, s: Sequence[int]) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "page", "miss_probability", "miss_probability_decimal"])
            for j, (p, q) in enumerate(zip(s, self.per_request)):
                q = Fraction(q)
                w.writerow([j, p, f"{q.numerator}/{q.denominator}", f"{float(q):.12g}"])


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))


def _slot_key(p: int):
    return (p == EMPTY, p)


def _canon_slots(slots) -> tuple:
    return tuple(sorted(slots, key=_slot_key))


class _Engine:
    """Shared driver: subclasses define ``initial`` and ``transitions``."""

    demand = False

    def __init__(self, k: int, cap: int = DEFAULT_STATE_CAP):
        if k < 1:
            raise ValueError("k must be positive")
        self.k = k
        self.cap = cap

    def initial(self) -> Distribution:
        return {(EMPTY,) * self.k: Fraction(1)}

    def transitions(self, state: tuple, p: int):
        """Yield (next_state, probability, missed) triples."""
        raise NotImplementedError

    def step(self, dist: Distribution, p: int) -> tuple[Distribution, Fraction]:
        if p < 0:
            raise ValueError(f"page ids must be non-negative, got {p}")
        out: dict = {}
        miss = Fraction(0)
        for state, w in dist.items():
            for nxt, q, missed in self.transitions(state, p):
                mass = w * q
                out[nxt] = out.get(nxt, 0) + mass
                if missed:
                    miss += mass
        if len(out) > self.cap:
            raise BudgetExceeded(f"state distribution exceeds cap of {self.cap} states")
        return out, miss

    def run(self, s: Sequence[int]) -> tuple[ExpectedMisses, Distribution]:
        dist = self.initial()
        em = ExpectedMisses()
        for p in s:
            dist, q = self.step(dist, p)
            em.per_request.append(q)
        return em, dist

    def missing_probability(self, dist: Distribution, p: int) -> Fraction:
        return sum((w for st, w in dist.items() if p not in st), Fraction(0))


class RandomEngine(_Engine):
    """Random eviction over an unordered multiset of slots.

    Non-demand (the default): on a fault each of the ``k`` slots, EMPTY or
    not, is overwritten with probability 1/k. With ``demand=True`` an EMPTY
    slot is filled first and a uniform victim is chosen only when full.
    """

    def __init__(self, k: int, demand: bool = False, cap: int = DEFAULT_STATE_CAP):
        super().__init__(k, cap)
        self.demand = demand

    def transitions(self, state, p):
        if p in state:
            yield state, Fraction(1), False
            return
        if self.demand and EMPTY in state:
            j = state.index(EMPTY)
            yield _canon_slots(state[:j] + (p,) + state[j + 1:]), Fraction(1), True
            return
        q = Fraction(1, self.k)
        for j in range(self.k):
            yield _canon_slots(state[:j] + (p,) + state[j + 1:]), q, True


class LRURandomEngine(_Engine):
    """LRU-Random: the i-th oldest slot is evicted with probability 1/(i*H_k).

    States list pages from most to least recently used; EMPTY slots sit at
    the old end and behave like never-requested pages.
    """

    def __init__(self, k: int, demand: bool = False, cap: int = DEFAULT_STATE_CAP):
        super().__init__(k, cap)
        self.demand = demand
        hk = harmonic(k)
        # law[pos]: eviction probability of the slot at recency position pos
        self.law = [1 / ((k - pos) * hk) for pos in range(k)]

    def transitions(self, state, p):
        if p in state:
            j = state.index(p)
            yield (p,) + state[:j] + state[j + 1:], Fraction(1), False
            return
        if self.demand and EMPTY in state:
            yield (p,) + state[:-1], Fraction(1), True
            return
        for pos, q in enumerate(self.law):
            yield (p,) + state[:pos] + state[pos + 1:], q, True


class MarkEngine(_Engine):
    """Full enumeration of Mark: states are (cached, marked) frozenset pairs."""

    def initial(self):
        return {(frozenset(), frozenset()): Fraction(1)}

    def transitions(self, state, p):
        cached, marked = state
        if p in cached:
            yield (cached, marked | {p}), Fraction(1), False
            return
        if len(cached) < self.k:
            yield (cached | {p}, marked | {p}), Fraction(1), True
            return
        unmarked = cached - marked
        if not unmarked:
            marked = frozenset()
            unmarked = cached
        q = Fraction(1, len(unmarked))
        for victim in unmarked:
            yield ((cached - {victim}) | {p}, marked | {p}), q, True

    def missing_probability(self, dist, p):
        return sum((w for (cached, _), w in dist.items() if p not in cached), Fraction(0))


class EOAEngine(_Engine):
    """Evict-on-access as a slot lottery.

    Every request picks one of the ``k`` slots uniformly. On a fault the
    requested page overwrites that slot. On a hit the chosen slot is emptied
    unless it holds the requested page. So each other cached page survives a
    request with probability exactly 1 - 1/k.
    """

    def transitions(self, state, p):
        q = Fraction(1, self.k)
        hit = p in state
        for j in range(self.k):
            if hit:
                if state[j] == p:
                    yield state, q, False
                else:
                    yield _canon_slots(state[:j] + (EMPTY,) + state[j + 1:]), q, False
            else:
                yield _canon_slots(state[:j] + (p,) + state[j + 1:]), q, True


def expected_random(cfg: CacheConfig, s: Sequence[int], demand: bool = False,
                    cap: int = DEFAULT_STATE_CAP) -> ExpectedMisses:
    return RandomEngine(cfg.k, demand, cap).run(s)[0]


def expected_lru_random(cfg: CacheConfig, s: Sequence[int], demand: bool = False,
                        cap: int = DEFAULT_STATE_CAP) -> ExpectedMisses:
    return LRURandomEngine(cfg.k, demand, cap).run(s)[0]


def enumerate_mark(cfg: CacheConfig, s: Sequence[int], cap: int = DEFAULT_STATE_CAP) -> ExpectedMisses:
    return MarkEngine(cfg.k, cap).run(s)[0]


def enumerate_eoa(cfg: CacheConfig, s: Sequence[int], cap: int = DEFAULT_STATE_CAP) -> ExpectedMisses:
    return EOAEngine(cfg.k, cap).run(s)[0]
