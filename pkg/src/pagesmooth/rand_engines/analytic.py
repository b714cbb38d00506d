"""Closed-form per-request miss probabilities.

Mark is priced by phase bookkeeping, EOA by raw reuse distance, and
Smoothed-LRU / Step-LRU by page age. ``smoothed_lru_ensemble`` reaches the
same numbers through averaging deterministic Det-Step-LRU runs instead.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, inf
from typing import Sequence

from ..core import CacheConfig, phase_partition
from ..det_policies import ages, simulate, step_lru_instances
from .distributions import ExpectedMisses


def expected_mark(cfg: CacheConfig, s: Sequence[int]) -> ExpectedMisses:
    """Mark's expected misses.

    Within a phase a marked page costs 0 and a new page costs 1. The j-th
    distinct old page costs n_j/(k-j+1), where n_j counts new pages seen so
    far in the phase. Old pages are those of the previous phase; in the first
    phase every page is new.
    """
    k = cfg.k
    part = phase_partition(s, k)
    em = ExpectedMisses()
    old: set = set()
    for phase in part.phases(s):
        marked: set = set()
        new_count = 0
        old_served = 0
        for p in phase:
            if p in marked:
                em.per_request.append(Fraction(0))
            elif p in old:
                old_served += 1
                em.per_request.append(Fraction(new_count, k - old_served + 1))
            else:
                new_count += 1
                em.per_request.append(Fraction(1))
            marked.add(p)
        old = marked
    return em


def reuse_distances(s: Sequence[int]) -> list[float]:
    """Requests since the previous request to the same page (inf if none)."""
    last: dict = {}
    out = []
    for j, p in enumerate(s):
        out.append(j - last[p] - 1 if p in last else inf)
        last[p] = j
    return out


def expected_eoa(cfg: CacheConfig, s: Sequence[int]) -> ExpectedMisses:
    keep = 1 - Fraction(1, cfg.k)
    em = ExpectedMisses()
    for d in reuse_distances(s):
        em.per_request.append(Fraction(1) if d == inf else 1 - keep ** d)
    return em


def smoothed_lru_hit_prob(age, cfg: CacheConfig) -> Fraction:
    k, i = cfg.k, cfg.i
    if age < k - i:
        return Fraction(1)
    if age < k + i:
        return Fraction(k + i - age, 2 * i + 1)
    return Fraction(0)


def step_lru_hit_prob(age, cfg: CacheConfig) -> Fraction:
    k, i = cfg.k, cfg.i
    if age < k - i:
        return Fraction(1)
    if age < k + i:
        return Fraction(1, 2)
    return Fraction(0)


def _age_engine(hit_prob, cfg, s) -> ExpectedMisses:
    return ExpectedMisses([1 - hit_prob(a, cfg) for a in ages(s)])


def expected_smoothed_lru(cfg: CacheConfig, s: Sequence[int]) -> ExpectedMisses:
    return _age_engine(smoothed_lru_hit_prob, cfg, s)


def expected_step_lru(cfg: CacheConfig, s: Sequence[int]) -> ExpectedMisses:
    return _age_engine(step_lru_hit_prob, cfg, s)


def step_lru_ensemble(cfg: CacheConfig, s: Sequence[int], cap: int = 100_000) -> ExpectedMisses:
    """Uniform average of Det-Step-LRU over every admissible age set D."""
    n = comb(2 * cfg.i, cfg.i)
    if n > cap:
        raise ValueError(f"{n} Det-Step-LRU instances exceed the cap of {cap}")
    totals = [0] * len(s)
    for kind in step_lru_instances(cfg):
        for j, m in enumerate(simulate(kind, cfg, s).miss_flags):
            totals[j] += m
    return ExpectedMisses([Fraction(t, n) for t in totals])


def smoothed_lru_ensemble(cfg: CacheConfig, s: Sequence[int], cap: int = 100_000) -> ExpectedMisses:
    """Smoothed-LRU as the mixture (Step_0 + 2*Step_1 + ... + 2*Step_i)/(2i+1)."""
    k, i = cfg.k, cfg.i
    per = [Fraction(0)] * len(s)
    for j in range(i + 1):
        weight = Fraction(1 if j == 0 else 2, 2 * i + 1)
        part = step_lru_ensemble(CacheConfig(k, j), s, cap)
        per = [a + weight * b for a, b in zip(per, part.per_request)]
    return ExpectedMisses(per)
