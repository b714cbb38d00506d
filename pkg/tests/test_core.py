from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_sequences, edit_distance_rec, neighborhood_brute
from pagesmooth.core import (
    BudgetExceeded,
    CacheConfig,
    canonical_renaming,
    canonical_sequences,
    edit_distance,
    format_sequence,
    neighborhood,
    parse_sequence,
    phase_partition,
    read_corpus,
    write_corpus,
)

seqs = st.lists(st.integers(0, 3), max_size=8)


def test_cache_config_validation():
    assert CacheConfig(3, 2).i == 2
    with pytest.raises(ValueError):
        CacheConfig(0)
    with pytest.raises(ValueError):
        CacheConfig(3, 3)
    with pytest.raises(ValueError):
        CacheConfig(3, -1)


@pytest.mark.parametrize("a, b, d", [
    ((), (), 0),
    ((1, 2, 3), (), 3),
    ((1, 2, 3), (1, 3), 1),
    ((1, 2, 3), (3, 2, 1), 2),
    ((2, 1), (1, 2, 1), 1),
])
def test_edit_distance_examples(a, b, d):
    assert edit_distance(a, b) == d


@given(seqs, seqs)
def test_edit_distance_matches_recursion(a, b):
    assert edit_distance(a, b) == edit_distance_rec(a, b)


@given(seqs, seqs, seqs)
def test_edit_distance_is_a_metric(a, b, c):
    assert edit_distance(a, b) == edit_distance(b, a)
    assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)
    assert (edit_distance(a, b) == 0) == (a == b)


@pytest.mark.parametrize("delta", [1, 2])
def test_neighborhood_equals_brute_force(delta):
    for s in all_sequences(range(2), 3):
        assert neighborhood(s, delta, range(2)) == neighborhood_brute(s, delta, range(2))


def test_neighborhood_small_example():
    assert neighborhood([1], 1, {1, 2}) == {(), (1,), (2,), (1, 1), (1, 2), (2, 1)}


def test_neighborhood_budget_and_bad_args():
    with pytest.raises(BudgetExceeded):
        neighborhood(range(6), 2, range(6), cap=50)
    with pytest.raises(ValueError):
        neighborhood([1], 0, [1])
    with pytest.raises(ValueError):
        neighborhood([1], 1, [])


def test_phase_partition_example():
    part = phase_partition([1, 2, 1, 3, 4, 3, 1], 2)
    assert part.boundaries == (0, 3, 6)
    assert part.phases([1, 2, 1, 3, 4, 3, 1]) == [(1, 2, 1), (3, 4, 3), (1,)]
    assert part.phase_count == 3 and part.last_phase_distinct == 1
    assert phase_partition([], 3).phase_count == 0


@given(seqs, st.integers(1, 3))
def test_phases_are_maximal(s, k):
    part = phase_partition(s, k)
    phases = part.phases(s)
    assert sum(map(len, phases)) == len(s)
    for n, phase in enumerate(phases):
        assert len(set(phase)) <= k
        if n + 1 < len(phases):
            # the next phase starts with a (k+1)-th distinct page
            assert len(set(phase) | {phases[n + 1][0]}) == k + 1


def test_canonical_sequences_cover_every_class():
    for size, n in [(2, 5), (3, 5)]:
        classes = {canonical_renaming(s) for s in all_sequences(range(size), n)}
        produced = list(canonical_sequences(size, n))
        assert len(produced) == len(set(produced))
        assert set(produced) == classes


@given(seqs)
def test_canonical_renaming_idempotent(s):
    c = canonical_renaming(s)
    assert canonical_renaming(c) == c
    assert len(set(c)) == len(set(s))


def test_corpus_round_trip(tmp_path):
    corpus = [(), (0,), (3, 1, 4, 1, 5)] + list(product(range(2), repeat=3))
    path = tmp_path / "corpus.txt"
    write_corpus(path, corpus)
    assert read_corpus(path) == corpus
    assert parse_sequence(format_sequence((7, 8))) == (7, 8)
