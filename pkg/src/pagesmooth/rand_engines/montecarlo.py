"""Seeded Monte Carlo simulation of the randomized policies.

Trial ``t`` draws from its own PCG64 stream seeded by
``SeedSequence(seed, spawn_key=(t,))``, so any trial can be replayed alone
and results do not depend on how trials are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from ..core import CacheConfig
from ..det_policies import DetStepLRU, DetStepLRUCache
from .distributions import EMPTY, harmonic

GENERATOR_FAMILY = "numpy PCG64, SeedSequence(seed, spawn_key=(trial,))"


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    trials: int
    seed: int
    generator: str = GENERATOR_FAMILY


def _random(k, s, u, demand):
    slots = [EMPTY] * k
    misses = 0
    for j, p in enumerate(s):
        if p in slots:
            continue
        misses += 1
        if demand and EMPTY in slots:
            slots[slots.index(EMPTY)] = p
        else:
            slots[int(u[j] * k)] = p
    return misses


def _lru_random(k, s, u, demand, cdf):
    order = [EMPTY] * k  # most recent first
    misses = 0
    for j, p in enumerate(s):
        if p in order:
            order.remove(p)
            order.insert(0, p)
            continue
        misses += 1
        if demand and EMPTY in order:
            order.pop()
        else:
            pos = int(np.searchsorted(cdf, u[j], side="right"))
            del order[min(pos, k - 1)]
        order.insert(0, p)
    return misses


def _mark(k, s, u):
    cached: list[int] = []
    marked: set = set()
    misses = 0
    for j, p in enumerate(s):
        if p in cached:
            marked.add(p)
            continue
        misses += 1
        if len(cached) == k:
            unmarked = [q for q in cached if q not in marked]
            if not unmarked:
                marked = set()
                unmarked = list(cached)
            cached.remove(unmarked[int(u[j] * len(unmarked))])
        cached.append(p)
        marked.add(p)
    return misses


def _eoa(k, s, u):
    slots = [EMPTY] * k
    misses = 0
    for j, p in enumerate(s):
        slot = int(u[j] * k)
        if p in slots:
            if slots[slot] != p:
                slots[slot] = EMPTY
        else:
            misses += 1
            slots[slot] = p
    return misses


def _step_lru(cfg, s, instance_draw):
    windows = list(combinations(range(cfg.k - cfg.i, cfg.k + cfg.i), cfg.i))
    kind = DetStepLRU(windows[int(instance_draw * len(windows))])
    cache = DetStepLRUCache(cfg, kind)
    return sum(cache.request(p)[0] for p in s)


def _smoothed_lru(cfg, s, u0, u1):
    i = cfg.i
    # level 0 has weight 1, levels 1..i weight 2 each, out of 2i+1
    slot = int(u0 * (2 * i + 1))
    level = (slot + 1) // 2
    return _step_lru(CacheConfig(cfg.k, level), s, u1)


POLICIES = ("random", "random-demand", "lru-random", "lru-random-demand",
            "mark", "eoa", "step-lru", "smoothed-lru")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def run_trial(policy: str, cfg: CacheConfig, s: Sequence[int], seed: int, trial: int) -> int:
    if policy not in POLICIES:
        raise ValueError(f"unknown policy tag {policy!r}; expected one of {', '.join(POLICIES)}")
    k = cfg.k
    u = trial_rng(seed, trial).random(len(s) + 2)
    if policy in ("random", "random-demand"):
        return _random(k, s, u, policy == "random-demand")
    if policy in ("lru-random", "lru-random-demand"):
        hk = float(harmonic(k))
        probs = [1 / ((k - pos) * hk) for pos in range(k)]
        return _lru_random(k, s, u, policy == "lru-random-demand", np.cumsum(probs))
    if policy == "mark":
        return _mark(k, s, u)
    if policy == "eoa":
        return _eoa(k, s, u)
    if policy == "step-lru":
        return _step_lru(cfg, s, u[-1])
    return _smoothed_lru(cfg, s, u[-2], u[-1])


def monte_carlo(policy: str, cfg: CacheConfig, s: Sequence[int], trials: int, seed: int) -> Estimate:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    s = tuple(s)
    counts = np.array([run_trial(policy, cfg, s, seed, t) for t in range(trials)], dtype=float)
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return Estimate(mean, stderr, trials, seed)
