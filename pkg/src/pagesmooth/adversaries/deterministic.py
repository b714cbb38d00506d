"""Sequence pairs that defeat deterministic policies."""

from __future__ import annotations

import heapq
from collections import Counter, deque
from functools import lru_cache

from ..core import BudgetExceeded, CacheConfig
from ..det_policies import DetPolicyKind, FIFOCache, make_cache, simulate
from .pairs import SequencePair

_ADAPTIVE_KINDS = (DetPolicyKind.LRU, DetPolicyKind.FIFO)


def gen_det_demand_lower(kind: DetPolicyKind, cfg: CacheConfig, delta: int) -> SequencePair:
    """Request k+1 pages, then keep requesting whatever was just evicted.

    The bad sequence faults on every request. The good sequence drops every
    request to the least requested page (smallest id on ties), leaving k
    distinct pages.
    """
    if kind not in _ADAPTIVE_KINDS:
        raise ValueError(f"{kind} is not an online demand-paging policy this adversary can drive")
    if delta < 0:
        raise ValueError("delta must be non-negative")
    k = cfg.k
    cache = make_cache(kind, cfg)
    bad = []
    victim = None
    for p in range(k + 1):
        bad.append(p)
        _, victim = cache.request(p)
    while len(bad) < k + delta * (k + 1):
        bad.append(victim)
        miss, victim = cache.request(victim)
        assert miss
    counts = Counter(bad)
    rare = min(range(k + 1), key=lambda p: (counts[p], p))
    good = [p for p in bad if p != rare]
    return SequencePair(
        f"det-demand-lower-{kind.value}", k, good, bad, counts[rare],
        params={"policy": kind.value, "delta": delta},
        predicted={"good_misses": k, "bad_misses": len(bad)},
    )


def gen_opt_pair(k: int, delta: int) -> SequencePair:
    block = list(range(1, k + 1)) * 2
    x = k + 1
    good = block * (delta + 1)
    bad = (block + [x]) * delta + block
    return SequencePair(
        "opt", k, good, bad, delta, params={"delta": delta},
        predicted={"good_misses": k, "bad_misses_lower": k + 2 * delta},
    )


def gen_fwf_pair(k: int, delta: int) -> SequencePair:
    xs = list(range(1, k + 1))
    good = xs * (2 * delta + 1)
    bad = xs + ([k + 1] + xs + xs) * delta
    return SequencePair(
        "fwf", k, good, bad, delta, params={"delta": delta},
        predicted={"good_misses": k, "bad_misses": k + 2 * delta * k},
    )


# --- FIFO -------------------------------------------------------------------

def _fifo_state(k: int, s) -> list[int]:
    return simulate(DetPolicyKind.FIFO, CacheConfig(k), s).final_state


def _is_reversed(a, b) -> bool:
    return list(a) == list(reversed(b))


def _d_prime(k: int, i: int, j: int) -> list[int]:
    """[k..j+1, i, j..i+1, i-1..1]: the reversal of [1..k] with i moved up."""
    return (list(range(k, j, -1)) + [i] + list(range(j, i, -1)) + list(range(i - 1, 0, -1)))


def _match_case(straight, other):
    """Rename ``straight`` to [1..k] and find (i, j) with other = d'(i, j)."""
    k = len(straight)
    rename = {p: n + 1 for n, p in enumerate(straight)}
    q = [rename[p] for p in other]
    for i in range(1, k):
        for j in range(i + 1, k + 1):
            if q == _d_prime(k, i, j):
                return i, j
    return None


def _case_of(k: int, i: int, j: int) -> int:
    if 1 < i < j < k:
        return 1
    if i == 1 and j < k - 1:
        return 2
    if i == 1 and j == k - 1:
        return 3
    if i == 1 and j == k:
        return 5
    return 4


def _case_suffix(k: int, i: int, j: int, name, fresh) -> list[int]:
    """Suffix for cases 1, 2, 3 and 5.

    ``name`` maps the renamed pages 1..k to real ids and ``fresh`` hands out
    pages requested nowhere before.
    """
    case = _case_of(k, i, j)
    if case == 1:
        v, w = fresh(), fresh()
        body = ([v] + [name(p) for p in range(k, i, -1)] + [name(p) for p in range(1, i)] + [w]
                + [name(p) for p in range(i + 1, k + 1)] + [v] + [name(p) for p in range(1, i - 1)])
    elif case == 2:
        y = fresh()
        body = [y] + [name(p) for p in range(2, j + 1)] + [name(1)] + [name(p) for p in range(j + 1, k)]
    elif case == 3:
        x, y, z = fresh(), fresh(), fresh()
        body = [x] + [name(p) for p in range(2, k)] + [y, z, x] + [name(p) for p in range(1, k - 2)]
    elif case == 5:
        x = fresh()
        body = [x] + [name(p) for p in range(2, k)]
    else:
        raise ValueError("case 4 is handled by exchanging the two prefixes")
    return body


def _pad_with_extra_page(k: int, good, bad, x: int):
    """Lift a size-(k-1) pair to size k by keeping page x resident.

    x is requested at the start (after bad's leading extra request) and
    again, in both sequences, whenever either cache has just evicted it.
    """
    head = list(bad[: len(bad) - len(good)])
    assert list(bad[len(head):]) == list(good)
    cg, cb = FIFOCache(k), FIFOCache(k)
    new_good, new_bad = [], []
    for p in head:
        new_bad.append(p)
        cb.request(p)
    for p in [x] + list(good):
        new_good.append(p)
        new_bad.append(p)
        _, eg = cg.request(p)
        _, eb = cb.request(p)
        if x in (eg, eb):
            new_good.append(x)
            new_bad.append(x)
            cg.request(x)
            cb.request(x)
    return new_good, new_bad


def _fifo_step(c: tuple, p: int, k: int) -> tuple:
    return c if p in c else ((p,) + c)[:k]


def _canon_pair(a: tuple, b: tuple):
    names: dict = {}
    for p in a + b:
        names.setdefault(p, len(names))
    return tuple(names[p] for p in a), tuple(names[p] for p in b), names


def _repair_search(k: int, cg, cb, fresh, cap: int = 3_000_000) -> list[int]:
    """Shortest suffix driving two FIFO configurations to mutual reversal.

    Breadth-first over configuration pairs up to renaming. Pages cached by
    both are hits and change nothing, so the only useful requests are pages
    cached by exactly one side or a page cached by neither.
    """
    start = _canon_pair(tuple(cg), tuple(cb))[:2]
    parent = {start: None}
    queue = deque([start])
    goal = None
    while queue:
        st = queue.popleft()
        a, b = st
        if a == b[::-1]:
            goal = st
            break
        for p in sorted(set(a) ^ set(b)) + [len(set(a) | set(b))]:
            nxt = _canon_pair(_fifo_step(a, p, k), _fifo_step(b, p, k))[:2]
            if nxt not in parent:
                parent[nxt] = (st, p)
                queue.append(nxt)
        if len(parent) > cap:
            raise BudgetExceeded(f"FIFO repair search exceeds {cap} states")
    if goal is None:
        raise RuntimeError("FIFO repair search found no suffix")
    actions = []
    while parent[goal] is not None:
        goal, p = parent[goal]
        actions.append(p)
    actions.reverse()
    # replay on real page ids
    real_g, real_b = tuple(cg), tuple(cb)
    out = []
    for p in actions:
        _, _, names = _canon_pair(real_g, real_b)
        back = {v: q for q, v in names.items()}
        q = back[p] if p in back else fresh()
        out.append(q)
        real_g, real_b = _fifo_step(real_g, q, k), _fifo_step(real_b, q, k)
    return out


@lru_cache(maxsize=None)
def _fifo_pair_sequences(k: int):
    if k == 2:
        return (2, 1), (1, 2, 1), ()
    if k == 3:
        base = (2, 3, 1, 4, 2, 1, 5, 1, 4)
        return base, (1,) + base, ()
    good, bad, log = _fifo_pair_sequences(k - 1)
    log = list(log)
    counter = [max(bad) + 1]

    def fresh():
        counter[0] += 1
        return counter[0] - 1

    good, bad = _pad_with_extra_page(k, good, bad, fresh())
    for _ in range(16):
        cg, cb = _fifo_state(k, good), _fifo_state(k, bad)
        if _is_reversed(cg, cb):
            return tuple(good), tuple(bad), tuple(log)
        chosen = None
        # the bad configuration plays the straight role unless that lands in
        # case 4, which is served by exchanging the roles of the two prefixes
        for straight, other, exchanged in ((cb, cg, False), (cg, cb, True)):
            m = _match_case(straight, other)
            if m is not None and _case_of(k, *m) != 4:
                chosen = (straight, m, exchanged)
                break
        if chosen is None:
            suffix = _repair_search(k, cg, cb, fresh)
            log.append({"k": k, "case": "search", "length": len(suffix)})
            good = list(good) + suffix
            bad = list(bad) + suffix
            continue
        straight, (i, j), exchanged = chosen
        suffix = _case_suffix(k, i, j, lambda n: straight[n - 1], fresh)
        log.append({"k": k, "case": _case_of(k, i, j), "i": i, "j": j, "exchanged": exchanged})
        good = list(good) + suffix
        bad = list(bad) + suffix
    raise RuntimeError(f"FIFO construction for k={k} did not converge")


@lru_cache(maxsize=None)
def _cheapest_fifo_pair(k: int, cap: int = 2_000_000):
    """Distance-1 pair reaching reversed configurations with the fewest good-side misses.

    Dijkstra over configuration pairs up to renaming, ordered by (good misses,
    length). Until the bad side's extra request both sides share one
    configuration; that request is an action of its own.
    """
    start = ((), (), False)
    best = {start: (0, 0)}
    parent: dict = {start: None}
    heap = [(0, 0, start)]
    goal = None
    while heap:
        g, n, node = heapq.heappop(heap)
        if best[node] != (g, n):
            continue
        a, b, inserted = node
        if inserted and len(a) == k and a == b[::-1]:
            goal = node
            break
        pages = sorted(set(a) | set(b)) + [len(set(a) | set(b))]
        moves = [(p, True, _fifo_step(a, p, k), _fifo_step(b, p, k), inserted) for p in pages]
        if not inserted:
            moves += [(p, False, a, _fifo_step(b, p, k), True) for p in pages]
        for p, both, a2, b2, ins2 in moves:
            ca, cb, _ = _canon_pair(a2, b2)
            nxt = (ca, cb, ins2)
            val = (g + (both and p not in a), n + 1)
            if nxt not in best or val < best[nxt]:
                best[nxt] = val
                parent[nxt] = (node, p, both)
                heapq.heappush(heap, (val[0], val[1], nxt))
        if len(best) > cap:
            raise BudgetExceeded(f"FIFO pair search exceeds {cap} states")
    if goal is None:
        raise RuntimeError(f"no FIFO pair found for k={k}")
    actions = []
    while parent[goal] is not None:
        goal, p, both = parent[goal]
        actions.append((p, both))
    actions.reverse()
    # replay with real page ids
    a, b = (), ()
    good, bad = [], []
    nxt_id = 1
    for p, both in actions:
        _, _, names = _canon_pair(a, b)
        back = {v: q for q, v in names.items()}
        if p in back:
            q = back[p]
        else:
            q, nxt_id = nxt_id, nxt_id + 1
        bad.append(q)
        b = _fifo_step(b, q, k)
        if both:
            good.append(q)
            a = _fifo_step(a, q, k)
    return tuple(good), tuple(bad)


def gen_fifo_pair(k: int, method: str = "recursive") -> SequencePair:
    """Distance-1 pair leaving FIFO in mutually reversed configurations.

    ``method="recursive"`` grows the pair from the k=2 and k=3 base cases by
    padding and case suffixes. ``method="search"`` returns the pair with the
    fewest good-side misses found by exhaustive search (practical up to
    k=7); its shorter prefix lets the extension rounds dominate sooner.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if method == "recursive":
        good, bad, log = _fifo_pair_sequences(k)
        log = list(log)
    elif method == "search":
        good, bad = _cheapest_fifo_pair(k)
        log = [{"k": k, "case": "cheapest", "length": len(good)}]
    else:
        raise ValueError(f"unknown method {method!r}")
    cg, cb = _fifo_state(k, good), _fifo_state(k, bad)
    if not _is_reversed(cg, cb):
        raise RuntimeError(f"FIFO construction for k={k} failed validation: {cg} vs {cb}")
    return SequencePair("fifo", k, good, bad, 1, params={"method": method},
                        extra={"good_config": cg, "bad_config": cb, "steps": log})


def gen_fifo_extension(k: int, rounds: int, start=None) -> list[int]:
    """Rounds that cost 1 miss from ``start`` and k misses from its reversal.

    ``start`` is the cheap side's configuration (last-in first); it defaults
    to the good configuration of :func:`gen_fifo_pair`. Each round requests
    a page cached by neither side, then the k-1 most recently inserted pages
    of ``start``. Afterwards the two configurations are again reversals of
    each other, so rounds chain.
    """
    if start is None:
        pair = gen_fifo_pair(k)
        start = pair.extra["good_config"]
        outside = max(pair.good + pair.bad) + 1
    else:
        outside = max(start) + 1
    config = list(start)
    if len(config) != k:
        raise ValueError("start configuration must hold k pages")
    out = []
    for _ in range(rounds):
        out += [outside] + config[:k - 1]
        config, outside = [outside] + config[:k - 1], config[k - 1]
    return out
