"""Deterministic paging policies with per-request traces.

LRU, FIFO, FWF and Belady start from an empty cache and count compulsory
misses. Det-Step-LRU starts full of sentinel pages with negative ids.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence, Union

from .core import BudgetExceeded, CacheConfig

INF = math.inf


class DetPolicyKind(enum.Enum):
    LRU = "lru"
    FIFO = "fifo"
    FWF = "fwf"
    BELADY = "belady"


@dataclass(frozen=True)
class DetStepLRU:
    """Det-Step-LRU with the set ``ages`` of initially cached window ages."""

    ages: frozenset

    def __init__(self, ages):
        object.__setattr__(self, "ages", frozenset(ages))

    def validate(self, cfg: CacheConfig) -> None:
        k, i = cfg.k, cfg.i
        window = set(range(k - i, k + i))
        if len(self.ages) != i or not self.ages <= window:
            raise ValueError(f"ages {sorted(self.ages)} must be an {i}-subset of {sorted(window)}")


Policy = Union[DetPolicyKind, DetStepLRU]


@dataclass(frozen=True)
class Flush:
    """FWF emptied the whole cache; ``pages`` lists what was dropped."""

    pages: tuple

    def __str__(self):
        return "FLUSH"


Eviction = Union[int, Flush, None]


@dataclass
class TraceResult:
    miss_flags: list = field(default_factory=list)
    evictions: list = field(default_factory=list)
    final_state: list = field(default_factory=list)

    @property
    def miss_count(self) -> int:
        return sum(self.miss_flags)


class LRUCache:
    """Recency list, most recent first."""

    def __init__(self, k: int):
        self.k = k
        self.order: list[int] = []

    def request(self, p: int) -> tuple[bool, Eviction]:
        if p in self.order:
            self.order.remove(p)
            self.order.insert(0, p)
            return False, None
        victim = self.order.pop() if len(self.order) == self.k else None
        self.order.insert(0, p)
        return True, victim

    def state(self) -> list[int]:
        return list(self.order)


class FIFOCache:
    """Queue listed last-in first; hits leave the order untouched."""

    def __init__(self, k: int):
        self.k = k
        self.order: list[int] = []

    def request(self, p: int) -> tuple[bool, Eviction]:
        if p in self.order:
            return False, None
        victim = self.order.pop() if len(self.order) == self.k else None
        self.order.insert(0, p)
        return True, victim

    def state(self) -> list[int]:
        return list(self.order)


class FWFCache:
    def __init__(self, k: int):
        self.k = k
        self.order: list[int] = []

    def request(self, p: int) -> tuple[bool, Eviction]:
        if p in self.order:
            return False, None
        victim: Eviction = None
        if len(self.order) == self.k:
            victim = Flush(tuple(self.order))
            self.order = []
        self.order.insert(0, p)
        return True, victim

    def state(self) -> list[int]:
        return list(self.order)


class DetStepLRUCache:
    """Det-Step-LRU over an explicit recency stack.

    The stack initially holds ``k + i`` sentinels (ids -1, -2, ...) at ages
    0..k+i-1; those at ages 0..k-i-1 and at the ages in ``D`` are cached.
    Sentinels are never requested, so they only age.
    """

    def __init__(self, cfg: CacheConfig, kind: DetStepLRU):
        kind.validate(cfg)
        self.k, self.i = cfg.k, cfg.i
        depth = self.k + self.i
        self.stack: list[int] = [-(a + 1) for a in range(depth)]
        keep = set(range(self.k - self.i)) | set(kind.ages)
        self.cached: set[int] = {self.stack[a] for a in keep}

    def age(self, p: int) -> float:
        try:
            return self.stack.index(p)
        except ValueError:
            return INF

    def request(self, p: int) -> tuple[bool, Eviction]:
        if p < 0:
            raise ValueError(f"page {p} is a reserved sentinel and may not be requested")
        k, i = self.k, self.i
        a = self.age(p)
        miss = p not in self.cached
        victim = None
        if miss:
            upper = self.stack[k + i - 1]
            if a >= k + i and upper in self.cached:
                victim = upper
            else:
                victim = self.stack[k - i - 1]
            self.cached.remove(victim)
            self.cached.add(p)
        if a != INF:
            del self.stack[a]
        self.stack.insert(0, p)
        return miss, victim

    def cached_ages(self) -> frozenset:
        return frozenset(a for a, q in enumerate(self.stack) if q in self.cached)

    def state(self) -> list[int]:
        return [q for q in self.stack if q in self.cached]


def make_cache(kind: Policy, cfg: CacheConfig):
    if isinstance(kind, DetStepLRU):
        return DetStepLRUCache(cfg, kind)
    if kind is DetPolicyKind.LRU:
        return LRUCache(cfg.k)
    if kind is DetPolicyKind.FIFO:
        return FIFOCache(cfg.k)
    if kind is DetPolicyKind.FWF:
        return FWFCache(cfg.k)
    raise ValueError(f"{kind} has no online cache; it needs the whole sequence")


def _simulate_belady(k: int, s: Sequence[int]) -> TraceResult:
    n = len(s)
    # next_use[j]: index of the next request to s[j] after j
    next_use = [INF] * n
    last: dict[int, int] = {}
    for j in range(n - 1, -1, -1):
        next_use[j] = last.get(s[j], INF)
        last[s[j]] = j
    upcoming: dict[int, float] = {}
    cache: list[int] = []
    out = TraceResult()
    for j, p in enumerate(s):
        if p in upcoming:
            out.miss_flags.append(False)
            out.evictions.append(None)
        else:
            victim = None
            if len(cache) == k:
                victim = max(cache, key=lambda q: (upcoming[q], -q))
                cache.remove(victim)
                del upcoming[victim]
            cache.append(p)
            out.miss_flags.append(True)
            out.evictions.append(victim)
        upcoming[p] = next_use[j]
    out.final_state = list(cache)
    return out


def simulate(kind: Policy, cfg: CacheConfig, s: Sequence[int]) -> TraceResult:
    if kind is DetPolicyKind.BELADY:
        return _simulate_belady(cfg.k, s)
    cache = make_cache(kind, cfg)
    out = TraceResult()
    for p in s:
        miss, victim = cache.request(p)
        out.miss_flags.append(miss)
        out.evictions.append(victim)
    out.final_state = cache.state()
    return out


def misses(kind: Policy, cfg: CacheConfig, s: Sequence[int]) -> int:
    return simulate(kind, cfg, s).miss_count


def evicted_on_last(t: TraceResult) -> Eviction:
    if not t.miss_flags:
        raise ValueError("trace is empty")
    return t.evictions[-1]


def brute_force_opt(cfg: CacheConfig, s: Sequence[int], cap: int = 1_000_000) -> int:
    """Fewest misses over every offline demand-paging eviction strategy.

    Exhaustive search over eviction choices, memoized on (position, cache
    content). Independent of Belady's farthest-in-future rule.
    """
    k = cfg.k
    s = tuple(s)
    memo: dict[tuple[int, frozenset], int] = {}

    def best(j: int, cache: frozenset) -> int:
        if j == len(s):
            return 0
        key = (j, cache)
        if key in memo:
            return memo[key]
        if len(memo) >= cap:
            raise BudgetExceeded(f"eviction search exceeds cap of {cap} states")
        p = s[j]
        if p in cache:
            val = best(j + 1, cache)
        elif len(cache) < k:
            val = 1 + best(j + 1, cache | {p})
        else:
            val = 1 + min(best(j + 1, (cache - {q}) | {p}) for q in cache)
        memo[key] = val
        return val

    return best(0, frozenset())


def ages(s: Sequence[int]) -> list[float]:
    """Age of each requested page at the moment of its request."""
    stack: list[int] = []
    out = []
    for p in s:
        if p in stack:
            a = stack.index(p)
            del stack[a]
            out.append(a)
        else:
            out.append(INF)
        stack.insert(0, p)
    return out


def step_lru_instances(cfg: CacheConfig) -> list[DetStepLRU]:
    k, i = cfg.k, cfg.i
    return [DetStepLRU(d) for d in combinations(range(k - i, k + i), i)]


def write_trace_csv(path, s: Sequence[int], t: TraceResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "page", "miss", "evicted"])
        for j, (p, m, e) in enumerate(zip(s, t.miss_flags, t.evictions)):
            w.writerow([j, p, int(m), "" if e is None else str(e)])
