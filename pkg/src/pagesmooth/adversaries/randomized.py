"""Sequence pairs that defeat randomized policies."""

from __future__ import annotations

from fractions import Fraction

from ..core import CacheConfig, phase_partition
from ..rand_engines import harmonic
from ..rand_engines.analytic import expected_mark
from ..rand_engines.layers import layer_trace
from .pairs import SequencePair


def gen_random_pair(k: int, delta: int, n: int) -> SequencePair:
    """``S`` then delta copies of ``S``; the bad side puts a fresh page before each copy.

    ``S`` is the k pages 0..k-1 cycled n times. Each fresh page knocks a
    resident page out and costs about k+1 extra misses before the cache
    settles again.
    """
    block = list(range(k)) * n
    good = list(block)
    bad = list(block)
    for r in range(delta):
        good += block
        bad += [k + r] + block
    keep = 1 - Fraction(1, k)
    return SequencePair(
        "random", k, good, bad, delta, params={"delta": delta, "n": n},
        predicted={"difference_limit": Fraction(delta * (k + 1)),
                   "geometric_tail": delta * k * keep ** n},
    )


def _phase_pattern(s, k) -> list[str]:
    part = phase_partition(s, k)
    prev: set = set()
    out = []
    for phase in part.phases(s):
        out.append("".join("o" if p in prev else "n" for p in phase))
        prev = set(phase)
    return out


def gen_mark_pair(k: int, ell: int, phases: int) -> SequencePair:
    """Distance-1 pair whose phase boundaries drift apart by ell-1 requests.

    From the third phase on, each bad phase requests ell new pages then k-ell
    old ones, and each good phase requests 1 new, k-ell+1 old, then ell-2 new.
    """
    if not 2 <= ell <= k:
        raise ValueError(f"need 2 <= ell <= k, got ell={ell}, k={k}")
    if phases < 1:
        raise ValueError("phases must be at least 1")
    x = list(range(k + 1))                    # x_0..x_k
    y = [None] + list(range(k + 1, 2 * k + 1))  # y_1..y_k
    next_id = [2 * k + 1]

    def fresh(count):
        out = list(range(next_id[0], next_id[0] + count))
        next_id[0] += count
        return out

    if ell < k:
        good = (x[1:k + 1] + x[1:ell] + [y[1], x[1]] + y[2:k - ell + 1] + y[k - ell + 1:k]
                + [y[k]] + y[1:k - ell + 1] + x[1:ell] + [x[ell]])
        prev_phase = [y[k]] + y[1:k - ell + 1] + x[1:ell]
        leading = x[1:ell]
        last_new = x[ell]
    else:
        z = fresh(k)
        good = x[1:k + 1] + x[1:k - 1] + [y[1]] + z
        prev_phase = [y[1]] + z[:k - 1]
        leading = z[:k - 1]
        last_new = z[k - 1]
    for _ in range(phases):
        carried = [p for p in prev_phase if p not in leading]
        carried = carried[1:] + carried[:1]
        new = fresh(ell - 1)
        good += carried + new
        prev_phase = [last_new] + carried + new[:ell - 2]
        leading = [carried[-1]] + new[:ell - 2]
        last_new = new[-1]
    bad = [x[0]] + good

    bad_phase = "n" * ell + "o" * (k - ell)
    good_phase = "n" + "o" * (k - ell + 1) + "n" * (ell - 2)
    for label, seq, want in (("bad", bad, bad_phase), ("good", good, good_phase)):
        pattern = _phase_pattern(seq, k)
        for h, got in enumerate(pattern[2:-1], start=3):
            if got != want:
                raise RuntimeError(f"mark pair k={k} ell={ell}: {label} phase {h} is {got}, expected {want}")

    cfg = CacheConfig(k)
    hk = harmonic(k)
    measured = {}
    for label, seq in (("good", good), ("bad", bad)):
        per = expected_mark(cfg, seq).per_request
        part = phase_partition(seq, k)
        measured[f"{label}_setup"] = sum(per[:part.boundaries[2]], Fraction(0))
    return SequencePair(
        "mark", k, good, bad, 1, params={"ell": ell, "phases": phases},
        predicted={"bad_phase": ell * (1 + hk - harmonic(ell)),
                   "good_phase": ell - 1 + hk - harmonic(ell - 1),
                   "steady_from_phase": 3},
        extra=measured,
    )


def mark_phase_costs(seq, k: int) -> list[Fraction]:
    """Mark's expected misses summed per phase."""
    per = expected_mark(CacheConfig(k), seq).per_request
    part = phase_partition(seq, k)
    ends = part.boundaries[1:] + (len(seq),)
    return [sum(per[a:b], Fraction(0)) for a, b in zip(part.boundaries, ends)]


def gen_eoa_pair(k: int, m: int, delta: int) -> SequencePair:
    """Blocks rho + reversed(rho); the bad side adds a fresh page in the middle.

    Each repetition uses its own fresh page so that it always misses.
    """
    rho = list(range(m))
    good, bad = [], []
    for r in range(delta):
        good += rho + rho[::-1]
        bad += rho + [m + r] + rho[::-1]
    keep = 1 - Fraction(1, k)
    closed = delta * (1 + Fraction(k, 2 * k - 1) * (1 - keep ** (2 * m)))
    return SequencePair(
        "eoa", k, good, bad, delta, params={"m": m, "delta": delta},
        predicted={"difference": closed, "difference_limit": delta * (1 + Fraction(k, 2 * k - 1))},
    )


def gen_smoothed_lru_pair(k: int, i: int, delta: int) -> SequencePair:
    run = list(range(1, k + i + 1))
    x, y = k + i + 1, k + i + 2
    good = (run + run + [y]) * delta
    bad = (run + [x] + run + [y]) * delta
    return SequencePair(
        "smoothed-lru", k, good, bad, delta, params={"i": i, "delta": delta},
        predicted={"difference": delta * (Fraction(k + i, 2 * i + 1) + 1)},
    )


def gen_randomized_demand_lower(engine, k: int, loop_cap: int = 100_000) -> SequencePair:
    """Adaptive adversary against an exact randomized demand-paging engine.

    The adversary watches each page's probability of being absent from the
    cache. After touching k+1 pages it spends k-1 subphases mostly re-requesting
    marked pages that are likely absent, each subphase collecting at least
    1/u expected misses (u = unmarked pages left) before marking one more
    page. The single page never marked appears only once; deleting it gives
    a sequence over k pages.
    """
    if not hasattr(engine, "missing_probability") or not hasattr(engine, "step"):
        raise TypeError("engine must expose exact per-page absence probabilities")
    if not getattr(engine, "demand", False):
        raise ValueError("the adversary needs a demand-paging engine")
    if engine.k != k:
        raise ValueError("engine cache size does not match k")
    pages = list(range(k + 1))
    dist = engine.initial()
    bad: list[int] = []
    expected = Fraction(0)

    def request(p):
        nonlocal dist, expected
        dist, q = engine.step(dist, p)
        bad.append(p)
        expected += q
        return q

    def absent(p):
        return engine.missing_probability(dist, p)

    for p in pages:
        request(p)
    first = max(pages, key=lambda p: (absent(p), -p))
    request(first)
    marked = [first]
    for _ in range(k - 1):
        unmarked = [p for p in pages if p not in marked]
        u = len(unmarked)
        p_marked = sum((absent(p) for p in marked), Fraction(0))
        if p_marked > 0:
            lead = max(marked, key=lambda p: (absent(p), -p))
            eps = absent(lead)
            cost = request(lead)
            loops = 0
            while cost < Fraction(1, u) and sum((absent(p) for p in marked), Fraction(0)) > eps:
                lead = max(marked, key=lambda p: (absent(p), -p))
                cost += request(lead)
                loops += 1
                if loops > loop_cap:
                    raise RuntimeError("subphase loop exceeded its iteration cap")
        pick = max(unmarked, key=lambda p: (absent(p), -p))
        request(pick)
        marked.append(pick)
    (left_out,) = [p for p in pages if p not in marked]
    position = bad.index(left_out)
    good = bad[:position] + bad[position + 1:]
    return SequencePair(
        "randomized-demand-lower", k, good, bad, 1,
        params={"engine": type(engine).__name__},
        predicted={"bad_misses_lower": k + harmonic(k) + Fraction(1, k),
                   "good_misses": Fraction(k),
                   "bad_misses": expected},
    )


def gen_partition_equitable_pair(k: int) -> SequencePair:
    """Prefixes with distinct layer shapes plus one self-similar extension block.

    Pages 0..k-1 are the numbered pages, k plays x and k+1 plays y. The bad
    prefix reveals every page; the good prefix leaves three pages in L_k.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if k == 2:
        bad_prefix = [4, 3, 2, 1, 0]
        good_prefix = [3, 2, 1, 0]
        block = [4, 5, 6, 7, 1, 4, 7, 0, 2]
    else:
        x, y = k, k + 1
        down = list(range(k - 1, -1, -1))
        bad_prefix = [y, x] + down + down
        good_prefix = [y, x] + down + down[1:]
        block = [x] + list(range(k - 2)) + [y, k - 1] + list(range(k - 3, -1, -1))
    good = good_prefix + block
    bad = bad_prefix + block
    return SequencePair(
        "partition-equitable", k, good, bad, 1, params={},
        extra={
            "good_prefix": good_prefix,
            "bad_prefix": bad_prefix,
            "block": block,
            "good_layers": layer_trace(good, k),
            "bad_layers": layer_trace(bad, k),
        },
    )
