from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

import oracles
from pagesmooth.audit import (
    BoundSpec,
    check_competitive,
    composition_check,
    conjecture_probe,
    edit_cases,
    exhaustive_smoothness,
    format_report,
    lru_random_distance_fixpoint,
    lru_random_edit_bound,
    make_evaluator,
    table_bound,
    transport,
    verify_witness,
)
from pagesmooth.core import BudgetExceeded, CacheConfig, canonical_sequences
from pagesmooth.rand_engines import expected_lru_random


def brute_worst_increase(count, alphabet, max_len, delta):
    """Worst increase over every sequence, no renaming shortcut."""
    worst = None
    for s in oracles.all_sequences(range(alphabet), max_len):
        base = count(s)
        for t in oracles.neighborhood_brute(s, delta, range(alphabet)):
            inc = count(t) - base
            worst = inc if worst is None else max(worst, inc)
    return worst


@pytest.mark.parametrize("tag, oracle", [
    ("lru", lambda s: oracles.lru_misses(2, s)),
    ("fifo", lambda s: oracles.fifo_misses(2, s)),
    ("fwf", lambda s: oracles.fwf_misses(2, s)),
    ("belady", lambda s: oracles.opt_misses(2, s)),
])
def test_canonical_audit_matches_brute_force(tag, oracle):
    report = exhaustive_smoothness(make_evaluator(tag, 2), 2, 3, 4, 1, policy=tag)
    assert report.worst_increase == brute_worst_increase(oracle, 3, 4, 1)
    assert verify_witness(report, make_evaluator(tag, 2))


def test_canonical_audit_matches_brute_force_randomized():
    ev = make_evaluator("random", 2)
    report = exhaustive_smoothness(ev, 2, 3, 3, 1)
    assert report.worst_increase == brute_worst_increase(lambda s: oracles.random_expected(2, s), 3, 3, 1)


@pytest.mark.parametrize("tag, max_len, want", [("lru", 6, 3), ("belady", 6, 2), ("fwf", 7, 4)])
def test_tight_rows(tag, max_len, want):
    report = exhaustive_smoothness(make_evaluator(tag, 2), 2, 3, max_len, 1, table_bound(tag, 2), tag)
    assert report.worst_increase == want
    assert report.verdict == "tight"
    good, bad, m, m2 = report.witness
    assert m2 - m == want
    assert verify_witness(report, make_evaluator(tag, 2))


@pytest.mark.parametrize("tag, k, i", [("lru", 3, 0), ("fwf", 3, 0), ("belady", 3, 0), ("random", 2, 0),
                                       ("eoa", 2, 0), ("eoa", 3, 0), ("smoothed-lru", 3, 1),
                                       ("smoothed-lru", 2, 1), ("mark", 2, 0), ("fifo", 2, 0),
                                       ("random-demand", 2, 0)])
def test_known_bounds_never_violated(tag, k, i):
    report = exhaustive_smoothness(make_evaluator(tag, k, i), k, k + 1, 5, 1, table_bound(tag, k, i), tag)
    assert report.verdict in ("holds", "tight")


def test_delta_two_and_report_export():
    report = exhaustive_smoothness(make_evaluator("lru", 2), 2, 3, 4, 2, table_bound("lru", 2), "lru")
    assert report.worst_increase <= 6
    d = report.to_dict()
    assert d["bound"]["beta"]["fraction"] == "6/1"
    assert d["verdict"] == report.verdict
    assert "verdict" in format_report(report)


def test_ratio_uses_one_for_zero_baselines():
    report = exhaustive_smoothness(make_evaluator("lru", 2), 2, 2, 2, 1)
    # from the empty sequence one insertion costs a miss
    assert report.worst_ratio >= 1
    assert report.ratio_witness[2] >= 0


def test_budget_and_unknown_tag():
    with pytest.raises(BudgetExceeded):
        exhaustive_smoothness(make_evaluator("lru", 2), 2, 3, 5, 1, budget=10)
    with pytest.raises(ValueError):
        make_evaluator("clock", 2)


def test_verdict_classification():
    tight = BoundSpec(lambda d: Fraction(1), lambda d: Fraction(3) * d)
    loose = BoundSpec(lambda d: Fraction(1), lambda d: Fraction(4) * d)
    low = BoundSpec(lambda d: Fraction(1), lambda d: Fraction(2) * d)
    ev = make_evaluator("lru", 2)
    assert exhaustive_smoothness(ev, 2, 3, 5, 1, tight).verdict == "tight"
    assert exhaustive_smoothness(ev, 2, 3, 5, 1, loose).verdict == "holds"
    assert exhaustive_smoothness(ev, 2, 3, 5, 1, low).verdict == "violated"
    assert exhaustive_smoothness(ev, 2, 3, 3, 1).verdict == "no bound"


def test_check_competitive_examples():
    rng = np.random.default_rng(3)
    corpus = [tuple(rng.integers(0, 6, size=25)) for _ in range(40)]
    assert check_competitive("lru", 3, 3, corpus, 3) == []
    assert check_competitive("fwf", 1, 0, [(1, 2, 3, 1)], 2) == [((1, 2, 3, 1), Fraction(4), 3)]
    assert check_competitive("lru-random", 2, 0, canonical_sequences(3, 7), 2) == []


def test_composition():
    for tag, beta in (("lru", 3), ("belady", 2)):
        ev = make_evaluator(tag, 2)
        assert composition_check(ev, 2, 3, 5, beta, 2)
        assert composition_check(ev, 2, 3, 5, beta, 1)
    with pytest.raises(ValueError):
        composition_check(make_evaluator("lru", 2), 2, 3, 5, 1, 2)


class TestLRURandomTable:
    WANT = {(0, 1): Fraction(0), (0, 2): Fraction(3, 2), (1, 0): Fraction(1, 2),
            (1, 2): Fraction(3, 2), (2, 0): Fraction(2), (2, 1): Fraction(2)}

    def test_fixpoint_values(self):
        table = lru_random_distance_fixpoint()
        assert table.entries == self.WANT
        assert table.exact
        assert table((5, 7), (7, 5)) == Fraction(1, 2)
        assert table((0, 1), (2, 3)) is None

    def test_fixpoint_only_for_two_slots(self):
        with pytest.raises(ValueError):
            lru_random_distance_fixpoint(k=3)
        with pytest.raises(BudgetExceeded):
            lru_random_distance_fixpoint(tolerance=Fraction(0), max_iterations=3)

    @staticmethod
    def _successors(state, p):
        # most recent first; on a fault the older page goes with probability 2/3
        if p in state:
            return {(p,) + tuple(x for x in state if x != p): 1.0}
        return {(p, state[0]): 2 / 3, (p, state[1]): 1 / 3}

    @staticmethod
    def _lp_transport(left, right, cost):
        ls, rs = list(left), list(right)
        c, bounds = [], []
        for a in ls:
            for b in rs:
                v = cost(a, b)
                c.append(1e6 if v is None else float(v))
                bounds.append((0, None))
        a_eq, b_eq = [], []
        for n, a in enumerate(ls):
            a_eq.append([1.0 if m // len(rs) == n else 0.0 for m in range(len(c))])
            b_eq.append(left[a])
        for n, b in enumerate(rs):
            a_eq.append([1.0 if m % len(rs) == n else 0.0 for m in range(len(c))])
            b_eq.append(right[b])
        return linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=bounds).fun

    def test_table_satisfies_equation_with_lp_transport(self):
        table = lru_random_distance_fixpoint()
        s = (0, 1)
        for t, d in self.WANT.items():
            best = 0.0
            for p in range(4):
                f = (p not in t) - (p not in s)
                w = self._lp_transport(self._successors(s, p), self._successors(t, p), table)
                best = max(best, f + w)
            assert best == pytest.approx(float(d), abs=1e-9)

    def test_transport_endpoints(self):
        left = [((0,), Fraction(1, 2)), ((1,), Fraction(1, 2))]
        right = [((0,), Fraction(1, 3)), ((1,), Fraction(2, 3))]
        cost = lambda a, b: Fraction(0) if a == b else Fraction(1)
        assert transport(left, right, cost) == Fraction(1, 6)
        assert transport([((0,), Fraction(1))], right, cost) == Fraction(2, 3)

    def test_edit_cases(self):
        cases = {(c.bad_request, c.good_request): c for c in edit_cases()}
        assert cases[(1, None)].bound == Fraction(1, 2)
        assert cases[(None, 2)].bound == Fraction(2, 3)
        assert cases[(2, None)].bound == Fraction(17, 6)
        assert cases[(2, 3)].bound == Fraction(2)
        assert cases[(2, None)].kind == "insertion" and cases[(None, 2)].kind == "deletion"
        assert lru_random_edit_bound() == Fraction(17, 6)

    def test_edit_bound_covers_exhaustive_audit(self):
        report = exhaustive_smoothness(make_evaluator("lru-random", 2), 2, 3, 5, 1)
        assert report.worst_increase <= Fraction(17, 6)


def test_conjecture_probe():
    rows = conjecture_probe((2, 3), max_len=4)
    assert rows[0]["k"] == 2 and rows[0]["worst_increase"] <= Fraction(17, 6)
    assert rows[1]["worst_increase"] > 0
    assert expected_lru_random(CacheConfig(2), ()).value == 0
    sampled = conjecture_probe((3,), max_len=5, samples=20, seed=1)
    assert sampled[0]["bases"] == 20
    with pytest.raises(ValueError):
        conjecture_probe((5,))
