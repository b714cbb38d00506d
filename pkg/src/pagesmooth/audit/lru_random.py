"""Distance table and one-edit bound for LRU-Random with two cache slots.

A state lists the cached pages from most to least recently used. For a pair
(s, t), d(s, t) bounds how many more misses LRU-Random can take from t than
from s on any common continuation. It is the least solution of

    d(s, t) >= max_p  f_p(s, t) + W(D_p(s), D_p(t))

where f_p is the miss on t minus the miss on s, D_p is the successor
distribution and W is the cheapest transfer of probability mass between the
two successor distributions with per-pair cost d.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..core import BudgetExceeded, CacheConfig, canonical_sequences, neighborhood
from ..rand_engines import LRURandomEngine, expected_lru_random, harmonic

K = 2
BASE = (0, 1)
PAGES = (0, 1, 2, 3)
NONE = None  # the empty request

_ENGINE = LRURandomEngine(K)


def canonical_key(s: tuple, t: tuple) -> tuple:
    """Rename so that s becomes [0 1]; return t under that renaming."""
    names = {p: n for n, p in enumerate(s)}
    for p in t:
        names.setdefault(p, len(names))
    return tuple(names[p] for p in t)


def table_keys() -> list[tuple]:
    """The six second states (relative to [0 1]) sharing at least one page."""
    keys = []
    for a in range(3):
        for b in range(3):
            if a != b and (a in BASE or b in BASE):
                keys.append((a, b))
    return keys


@dataclass
class DistanceTable:
    entries: dict  # second state relative to [0 1] -> Fraction
    iterations: int = 0
    exact: bool = True

    def __call__(self, s: tuple, t: tuple) -> Optional[Fraction]:
        """d(s, t), or None for disjoint states (no entry)."""
        return self.entries.get(canonical_key(s, t))

    def rows(self) -> list[tuple]:
        return [(BASE, key, self.entries[key]) for key in sorted(self.entries)]


def successors(state: tuple, p) -> list[tuple]:
    """(next state, probability, miss) for one request; ``None`` leaves the state alone."""
    if p is NONE:
        return [(state, Fraction(1), False)]
    out: dict = {}
    miss = False
    for nxt, q, m in _ENGINE.transitions(state, p):
        out[nxt] = out.get(nxt, Fraction(0)) + q
        miss = m
    return [(nxt, q, miss) for nxt, q in out.items()]


def _couplings(left: list, right: list):
    """Vertices of the transport polytope between two supports of size <= 2.

    ``left`` and ``right`` are [(state, weight)]. Each vertex is a list of
    (left state, right state, mass). With one side a point mass the plan is
    forced; for 2x2 the single free mass is linear in cost, so its two
    endpoints suffice.
    """
    if len(left) == 1:
        return [[(left[0][0], t, w) for t, w in right]]
    if len(right) == 1:
        return [[(s, right[0][0], w) for s, w in left]]
    if len(left) != 2 or len(right) != 2:
        raise ValueError("transport is only enumerated for supports of size at most 2")
    (s0, w0), (s1, w1) = left
    (t0, v0), (t1, v1) = right
    lo, hi = max(Fraction(0), w0 - v1), min(w0, v0)
    plans = []
    for x in sorted({lo, hi}):
        plans.append([(s0, t0, x), (s0, t1, w0 - x), (s1, t0, v0 - x), (s1, t1, w1 - v0 + x)])
    return plans


def _plan_cost(plan, cost) -> Optional[Fraction]:
    total = Fraction(0)
    for s, t, w in plan:
        if w == 0:
            continue
        c = cost(s, t)
        if c is None:
            return None
        total += w * c
    return total


def transport(left: list, right: list, cost) -> Fraction:
    """Cheapest transfer between two small distributions under ``cost``."""
    best = None
    for plan in _couplings(left, right):
        c = _plan_cost(plan, cost)
        if c is not None and (best is None or c < best):
            best = c
    if best is None:
        raise ValueError("no admissible transport plan")
    return best


def _miss(state, p) -> int:
    return 0 if p is NONE or p in state else 1


def _apply(table: dict, s: tuple, t: tuple) -> Fraction:
    """One application of the monotone operator at the pair (s, t)."""

    def cost(a, b):
        return table.get(canonical_key(a, b))

    best = Fraction(0)  # an empty continuation contributes nothing
    for p in PAGES:
        f = _miss(t, p) - _miss(s, p)
        left = [(x, w) for x, w, _ in successors(s, p)]
        right = [(x, w) for x, w, _ in successors(t, p)]
        best = max(best, f + transport(left, right, cost))
    return best


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination over the rationals."""
    n = len(rhs)
    a = [row[:] + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def _policy_solution(table: dict) -> Optional[dict]:
    """Exact fixpoint of the linear system picked out by the current argmaxes.

    Each entry fixes its maximizing request and cheapest plan under
    ``table``; the resulting linear system is solved exactly. Returns None
    if the solution is not a fixpoint of the full operator.
    """
    keys = sorted(table)
    index = {key: n for n, key in enumerate(keys)}
    matrix, rhs = [], []

    def cost(a, b):
        return table.get(canonical_key(a, b))

    for key in keys:
        row = [Fraction(0)] * len(keys)
        row[index[key]] += 1
        best, best_terms, best_const = Fraction(0), [], Fraction(0)
        for p in PAGES:
            f = _miss(key, p) - _miss(BASE, p)
            left = [(x, w) for x, w, _ in successors(BASE, p)]
            right = [(x, w) for x, w, _ in successors(key, p)]
            cheapest = None
            for plan in _couplings(left, right):
                c = _plan_cost(plan, cost)
                if c is not None and (cheapest is None or c < cheapest[0]):
                    cheapest = (c, plan)
            if cheapest is not None and f + cheapest[0] > best:
                best, best_const = f + cheapest[0], Fraction(f)
                best_terms = [(canonical_key(a, b), w) for a, b, w in cheapest[1] if w]
        for ref, w in best_terms:
            row[index[ref]] -= w
        matrix.append(row)
        rhs.append(best_const)
    try:
        values = _solve(matrix, rhs)
    except StopIteration:
        return None
    candidate = dict(zip(keys, values))
    if any(v < 0 for v in values):
        return None
    if all(_apply(candidate, BASE, key) == candidate[key] for key in keys):
        return candidate
    return None


def lru_random_distance_fixpoint(k: int = 2, tolerance=Fraction(1, 10**12),
                                 max_iterations: int = 10_000) -> DistanceTable:
    """Least fixpoint of the distance inequality by Kleene iteration from zero.

    Iteration stops when no entry changes (exact convergence) or when the
    largest change drops to ``tolerance``. In the second case the limit is
    recovered exactly from the linear system of the final maximizers and
    checked to be a fixpoint.
    """
    if k != K:
        raise ValueError("the distance table is only defined for k=2")
    keys = table_keys()
    table = {key: Fraction(0) for key in keys}
    for it in range(1, max_iterations + 1):
        new = {key: _apply(table, BASE, key) for key in keys}
        for key in keys:
            if new[key] < table[key]:
                raise RuntimeError("Kleene iteration decreased an entry")
        change = max(new[key] - table[key] for key in keys)
        table = new
        if change == 0:
            return DistanceTable(table, it, True)
        if change <= tolerance:
            exact = _policy_solution(table)
            if exact is not None:
                return DistanceTable(exact, it, True)
            return DistanceTable(table, it, False)
    raise BudgetExceeded(f"Kleene iteration did not converge in {max_iterations} steps")


# --- one-edit bound -----------------------------------------------------------

@dataclass(frozen=True)
class EditCase:
    bad_request: Optional[int]
    good_request: Optional[int]
    immediate: int
    bound: Fraction

    @property
    def kind(self) -> str:
        if self.good_request is NONE:
            return "insertion"
        if self.bad_request is NONE:
            return "deletion"
        return "substitution"


def _pair_bound(good: list, bad: list, table: DistanceTable) -> Fraction:
    """Bound on future extra misses from a mixture of state pairs.

    Either charge each coupled pair its table distance, or look one request
    ahead and charge f_p plus the cheapest transfer of successors. The
    coupling is chosen first; the lookahead request is shared by both sides.
    """
    def cost(a, b):
        return table(a, b)

    best = None
    for plan in _couplings(good, bad):
        plan = [(a, b, w) for a, b, w in plan if w]
        direct = _plan_cost(plan, cost)
        ahead = Fraction(0)
        for p in PAGES:
            total = Fraction(0)
            for a, b, w in plan:
                left = [(x, q) for x, q, _ in successors(a, p)]
                right = [(x, q) for x, q, _ in successors(b, p)]
                try:
                    total += w * (_miss(b, p) - _miss(a, p) + transport(left, right, cost))
                except ValueError:
                    total = None
                    break
            if total is None:
                ahead = None
                break
            ahead = max(ahead, total)
        options = [v for v in (direct, ahead) if v is not None]
        if options:
            value = min(options)
            best = value if best is None else min(best, value)
    if best is None:
        raise ValueError("no admissible coupling")
    return best


def edit_cases(table: Optional[DistanceTable] = None) -> list[EditCase]:
    """Every single edit at state [0 1] with its mechanical bound.

    The bad side issues ``bad_request`` where the good side issues
    ``good_request``; None stands for no request. Pages 2 and 3 are absent
    from the cache, so together with 0 and 1 they cover every edit up to
    renaming.
    """
    if table is None:
        table = lru_random_distance_fixpoint()
    out = []
    choices = (NONE,) + PAGES
    for a in choices:
        for b in choices:
            if a == b:
                continue
            immediate = _miss(BASE, a) - _miss(BASE, b)
            bad = [(x, w) for x, w, _ in successors(BASE, a)]
            good = [(x, w) for x, w, _ in successors(BASE, b)]
            out.append(EditCase(a, b, immediate, immediate + _pair_bound(good, bad, table)))
    return out


def lru_random_edit_bound(k: int = 2, table: Optional[DistanceTable] = None) -> Fraction:
    """Largest one-edit increase in expected misses the case analysis allows."""
    if k != K:
        raise ValueError("the edit bound is only derived for k=2")
    return max(case.bound for case in edit_cases(table))


# --- exploratory probe ----------------------------------------------------------

def conjecture_probe(ks=(2, 3, 4), max_len: int = 6, samples: Optional[int] = None,
                     seed: int = 0, budget: int = 2_000_000) -> list[dict]:
    """Largest observed one-edit increase of LRU-Random per cache size.

    Base sequences use an alphabet of k+1 pages. With ``samples`` set, that
    many base sequences are drawn uniformly from the canonical ones instead
    of scanning them all. Purely descriptive.
    """
    rows = []
    for k in ks:
        if k > 4:
            raise ValueError("the probe is limited to k <= 4")
        cfg = CacheConfig(k)
        alphabet = k + 1
        bases = list(canonical_sequences(alphabet, max_len))
        if samples is not None and samples < len(bases):
            bases = random.Random(seed + k).sample(bases, samples)
        cache: dict = {}

        def value(s):
            if s not in cache:
                cache[s] = expected_lru_random(cfg, s).value
            return cache[s]

        worst, witness, checked = Fraction(0), ((), ()), 0
        for s in bases:
            base = value(s)
            for t in neighborhood(s, 1, range(alphabet)):
                checked += 1
                if checked > budget:
                    raise BudgetExceeded(f"probe exceeds budget of {budget} pairs")
                inc = value(t) - base
                if inc > worst:
                    worst, witness = inc, (s, t)
        rows.append({"k": k, "alphabet": alphabet, "max_len": max_len, "bases": len(bases),
                     "pairs": checked, "worst_increase": worst, "witness": witness,
                     "h_k_squared": harmonic(k) ** 2})
    return rows
