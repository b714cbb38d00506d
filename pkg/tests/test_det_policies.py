from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import all_sequences, distinct_since, fifo_final, fifo_misses, fwf_misses, lru_misses, opt_misses
from pagesmooth.core import CacheConfig
from pagesmooth.det_policies import (
    DetPolicyKind,
    DetStepLRU,
    DetStepLRUCache,
    Flush,
    ages,
    brute_force_opt,
    evicted_on_last,
    misses,
    simulate,
    step_lru_instances,
    write_trace_csv,
)
from pagesmooth.rand_engines import expected_step_lru, step_lru_ensemble

LRU, FIFO, FWF, BELADY = DetPolicyKind.LRU, DetPolicyKind.FIFO, DetPolicyKind.FWF, DetPolicyKind.BELADY
seqs = st.lists(st.integers(0, 4), max_size=12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_simple_policies_match_oracles(k):
    cfg = CacheConfig(k)
    for s in all_sequences(range(4), 5):
        assert misses(LRU, cfg, s) == lru_misses(k, s)
        assert misses(FIFO, cfg, s) == fifo_misses(k, s)
        assert misses(FWF, cfg, s) == fwf_misses(k, s)


@given(seqs, st.integers(1, 3))
def test_belady_is_optimal(s, k):
    cfg = CacheConfig(k)
    assert misses(BELADY, cfg, s) == brute_force_opt(cfg, s)
    if len(s) <= 8:
        assert brute_force_opt(cfg, s) == opt_misses(k, s)


@given(seqs, st.integers(1, 3))
def test_no_policy_beats_belady(s, k):
    cfg = CacheConfig(k)
    opt = misses(BELADY, cfg, s)
    for kind in (LRU, FIFO, FWF):
        assert misses(kind, cfg, s) >= opt


def test_fifo_reversed_configurations():
    cfg = CacheConfig(2)
    assert simulate(FIFO, cfg, [2, 1]).final_state == [1, 2]
    assert simulate(FIFO, cfg, [1, 2, 1]).final_state == [2, 1]


@given(seqs)
def test_fifo_final_state_matches_oracle(s):
    assert simulate(FIFO, CacheConfig(3), s).final_state == fifo_final(3, s)


def test_fwf_flush_and_small_counts():
    cfg = CacheConfig(2)
    t = simulate(FWF, cfg, [1, 2, 3, 1])
    assert t.miss_count == 4
    assert isinstance(t.evictions[2], Flush) and str(t.evictions[2]) == "FLUSH"
    assert set(t.evictions[2].pages) == {1, 2}
    assert misses(BELADY, cfg, [1, 2, 3, 1]) == 3
    assert misses(LRU, cfg, [1, 2, 3, 1]) == 4


def test_belady_tie_break_and_eviction_report():
    # 1 and 2 are never requested again; the smaller id goes
    t = simulate(BELADY, CacheConfig(2), [1, 2, 3])
    assert evicted_on_last(t) == 1
    assert evicted_on_last(simulate(LRU, CacheConfig(2), [1, 2, 1])) is None


def test_brute_force_budget():
    from pagesmooth.core import BudgetExceeded

    with pytest.raises(BudgetExceeded):
        brute_force_opt(CacheConfig(3), list(range(10)) * 3, cap=20)


def test_ages():
    assert ages([1, 2, 1, 1, 3, 2]) == [float("inf"), float("inf"), 1, 0, float("inf"), 2]


@given(seqs)
def test_ages_count_distinct_pages(s):
    got = ages(s)
    for j in range(len(s)):
        want = distinct_since(s, j)
        assert got[j] == (float("inf") if want is None else want)


def test_det_step_lru_validation():
    cfg = CacheConfig(4, 2)
    DetStepLRU({2, 5}).validate(cfg)
    with pytest.raises(ValueError):
        DetStepLRU({1, 5}).validate(cfg)
    with pytest.raises(ValueError):
        DetStepLRU({2}).validate(cfg)
    assert len(step_lru_instances(cfg)) == 6


def test_det_step_lru_keeps_young_pages_and_window():
    cfg = CacheConfig(4, 1)
    cache = DetStepLRUCache(cfg, DetStepLRU({4}))
    for p in [1, 2, 3, 4, 5, 6, 1]:
        cache.request(p)
        assert len(cache.state()) == cfg.k
        young = {a for a in cache.cached_ages() if a < cfg.k - cfg.i}
        assert young == set(range(cfg.k - cfg.i))


@given(st.lists(st.integers(0, 6), max_size=14), st.sampled_from([(2, 1), (3, 1), (3, 2), (4, 2)]))
def test_step_lru_mixture_matches_age_formula(s, ki):
    cfg = CacheConfig(*ki)
    assert step_lru_ensemble(cfg, s).value == expected_step_lru(cfg, s).value


@given(seqs)
def test_lru_is_step_lru_with_empty_window(s):
    cfg = CacheConfig(3, 0)
    assert step_lru_ensemble(cfg, s).value == Fraction(misses(LRU, cfg, s))


def test_trace_csv(tmp_path):
    t = simulate(FWF, CacheConfig(2), [1, 2, 3])
    path = tmp_path / "trace.csv"
    write_trace_csv(path, [1, 2, 3], t)
    rows = path.read_text().strip().splitlines()
    assert len(rows) == 4
    assert "FLUSH" in rows[-1]
