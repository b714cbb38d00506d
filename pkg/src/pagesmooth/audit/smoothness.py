"""Exhaustive smoothness audits and competitiveness checks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from ..core import BudgetExceeded, CacheConfig, canonical_sequences, edit_distance, neighborhood
from ..det_policies import DetPolicyKind, misses
from ..rand_engines import (
    expected_eoa,
    expected_lru_random,
    expected_mark,
    expected_random,
    expected_smoothed_lru,
    expected_step_lru,
    harmonic,
)

Evaluator = Callable[[Sequence[int]], Union[int, Fraction]]

DEFAULT_BUDGET = 5_000_000

POLICY_TAGS = ("lru", "fifo", "fwf", "belady", "opt", "random", "random-demand", "lru-random",
               "lru-random-demand", "mark", "eoa", "smoothed-lru", "step-lru")


def make_evaluator(tag: str, k: int, i: int = 0) -> Evaluator:
    """Miss count (or exact expected miss count) of a policy, by tag."""
    cfg = CacheConfig(k, i)
    det = {"lru": DetPolicyKind.LRU, "fifo": DetPolicyKind.FIFO, "fwf": DetPolicyKind.FWF,
           "belady": DetPolicyKind.BELADY, "opt": DetPolicyKind.BELADY}
    if tag in det:
        kind = det[tag]
        return lambda s: misses(kind, cfg, s)
    engines = {
        "random": lambda s: expected_random(cfg, s).value,
        "random-demand": lambda s: expected_random(cfg, s, demand=True).value,
        "lru-random": lambda s: expected_lru_random(cfg, s).value,
        "lru-random-demand": lambda s: expected_lru_random(cfg, s, demand=True).value,
        "mark": lambda s: expected_mark(cfg, s).value,
        "eoa": lambda s: expected_eoa(cfg, s).value,
        "smoothed-lru": lambda s: expected_smoothed_lru(cfg, s).value,
        "step-lru": lambda s: expected_step_lru(cfg, s).value,
    }
    if tag not in engines:
        raise ValueError(f"unknown policy {tag!r}; expected one of {', '.join(POLICY_TAGS)}")
    return engines[tag]


@dataclass(frozen=True)
class BoundSpec:
    """A(s') <= alpha(delta) * A(s) + beta(delta) for all pairs within distance delta."""

    alpha: Callable[[int], Fraction]
    beta: Callable[[int], Fraction]
    kind: str = "upper"
    label: str = ""


def additive(per_edit: Fraction, label: str) -> BoundSpec:
    return BoundSpec(lambda d: Fraction(1), lambda d: per_edit * d, "upper", label)


def table_bound(tag: str, k: int, i: int = 0) -> Optional[BoundSpec]:
    """Known smoothness upper bound for a policy, or None."""
    hk = harmonic(k)
    if tag == "lru":
        return additive(Fraction(k + 1), "(1, delta(k+1))")
    if tag == "fwf":
        return additive(Fraction(2 * k), "(1, 2 delta k)")
    if tag in ("belady", "opt"):
        return additive(Fraction(2), "(1, 2 delta)")
    if tag == "random":
        return additive(Fraction(k + 1), "(1, delta(k+1))")
    if tag == "eoa":
        return additive(1 + Fraction(k, 2 * k - 1), "(1, delta(1 + k/(2k-1)))")
    if tag == "smoothed-lru":
        return additive(Fraction(k + i, 2 * i + 1) + 1, "(1, delta((k+i)/(2i+1) + 1))")
    if tag == "lru-random" and k == 2:
        return additive(Fraction(17, 6), "(1, 17 delta / 6)")
    if tag in ("fifo", "random-demand"):
        return BoundSpec(lambda d: Fraction(k), lambda d: Fraction(2 * d * k), "upper", "(k, 2 delta k)")
    if tag == "mark":
        return BoundSpec(lambda d: 2 * hk - 1, lambda d: d * (4 * hk - 2), "upper",
                         "(2H_k - 1, delta(4H_k - 2))")
    return None


@dataclass
class SmoothnessReport:
    policy: str
    k: int
    alphabet_size: int
    max_len: int
    delta: int
    worst_increase: Fraction
    witness: tuple
    worst_ratio: Fraction
    ratio_witness: tuple
    worst_excess: Optional[Fraction] = None
    bound: Optional[BoundSpec] = None
    pairs_checked: int = 0

    @property
    def verdict(self) -> str:
        if self.bound is None:
            return "no bound"
        beta = self.bound.beta(self.delta)
        if self.worst_excess > beta:
            return "violated"
        if self.worst_excess == beta:
            return "tight"
        return "holds"

    def to_dict(self) -> dict:
        def frac(x):
            x = Fraction(x)
            return {"fraction": f"{x.numerator}/{x.denominator}", "decimal": float(x)}

        good, bad, m, m2 = self.witness
        rg, rb, rm, rm2 = self.ratio_witness
        out = {
            "policy": self.policy,
            "k": self.k,
            "alphabet_size": self.alphabet_size,
            "max_len": self.max_len,
            "delta": self.delta,
            "pairs_checked": self.pairs_checked,
            "worst_increase": frac(self.worst_increase),
            "witness": {"good": list(good), "bad": list(bad), "good_misses": frac(m), "bad_misses": frac(m2)},
            "worst_ratio": frac(self.worst_ratio),
            "ratio_witness": {"good": list(rg), "bad": list(rb), "good_misses": frac(rm), "bad_misses": frac(rm2)},
            "verdict": self.verdict,
        }
        if self.bound is not None:
            out["bound"] = {"label": self.bound.label, "alpha": frac(self.bound.alpha(self.delta)),
                            "beta": frac(self.bound.beta(self.delta))}
            out["worst_excess"] = frac(self.worst_excess)
        return out


def exhaustive_smoothness(evaluator: Evaluator, k: int, alphabet_size: int, max_len: int, delta: int,
                          bound: Optional[BoundSpec] = None, policy: str = "",
                          budget: int = DEFAULT_BUDGET) -> SmoothnessReport:
    """Worst change in misses over every pair within edit distance ``delta``.

    Base sequences run over every length up to ``max_len`` and are taken one
    per renaming class. Their neighbours range over the full alphabet. The
    ratio is A(s')/max(A(s), 1).
    """
    alphabet = range(alphabet_size)
    cache: dict = {}

    def value(s):
        v = cache.get(s)
        if v is None:
            v = cache[s] = Fraction(evaluator(s))
        return v

    alpha = bound.alpha(delta) if bound is not None else Fraction(1)
    worst = worst_ratio = worst_excess = None
    witness = ratio_witness = None
    checked = 0
    for s in canonical_sequences(alphabet_size, max_len):
        base = value(s)
        for t in neighborhood(s, delta, alphabet):
            checked += 1
            if checked > budget:
                raise BudgetExceeded(f"audit exceeds budget of {budget} pairs")
            other = value(t)
            inc = other - base
            if worst is None or inc > worst:
                worst, witness = inc, (s, t, base, other)
            ratio = other / max(base, Fraction(1))
            if worst_ratio is None or ratio > worst_ratio:
                worst_ratio, ratio_witness = ratio, (s, t, base, other)
            excess = other - alpha * base
            if worst_excess is None or excess > worst_excess:
                worst_excess = excess
    return SmoothnessReport(policy, k, alphabet_size, max_len, delta, worst, witness, worst_ratio,
                            ratio_witness, worst_excess, bound, checked)


def audit_policy(tag: str, k: int, alphabet_size: int, max_len: int, delta: int, i: int = 0,
                 budget: int = DEFAULT_BUDGET) -> SmoothnessReport:
    return exhaustive_smoothness(make_evaluator(tag, k, i), k, alphabet_size, max_len, delta,
                                 bound=table_bound(tag, k, i), policy=tag, budget=budget)


def check_competitive(policy: Union[str, Evaluator], c, beta, corpus: Iterable[Sequence[int]],
                      k: int, i: int = 0) -> list[tuple]:
    """Sequences where A(s) > c * OPT(s) + beta, with OPT from Belady."""
    evaluator = make_evaluator(policy, k, i) if isinstance(policy, str) else policy
    cfg = CacheConfig(k)
    c, beta = Fraction(c), Fraction(beta)
    out = []
    for s in corpus:
        s = tuple(s)
        a = Fraction(evaluator(s))
        opt = misses(DetPolicyKind.BELADY, cfg, s)
        if a > c * opt + beta:
            out.append((s, a, opt))
    return out


def composition_check(evaluator: Evaluator, k: int, alphabet_size: int, max_len: int, beta1,
                      delta: int, budget: int = DEFAULT_BUDGET) -> bool:
    """Whether the delta-edit worst increase stays within delta * beta1."""
    beta1 = Fraction(beta1)
    one = exhaustive_smoothness(evaluator, k, alphabet_size, max_len, 1, budget=budget)
    if one.worst_increase > beta1:
        raise ValueError(f"one-edit worst increase {one.worst_increase} already exceeds beta1={beta1}")
    if delta == 1:
        return True
    many = exhaustive_smoothness(evaluator, k, alphabet_size, max_len, delta, budget=budget)
    return many.worst_increase <= delta * beta1


def verify_witness(report: SmoothnessReport, evaluator: Evaluator) -> bool:
    s, t, m, m2 = report.witness
    return (edit_distance(s, t) <= report.delta and Fraction(evaluator(s)) == m
            and Fraction(evaluator(t)) == m2)


def format_report(report: SmoothnessReport) -> str:
    d = report.to_dict()
    w = d["witness"]
    lines = [
        f"policy           {report.policy}",
        f"space            k={report.k} alphabet={report.alphabet_size} max_len={report.max_len} delta={report.delta}",
        f"pairs checked    {report.pairs_checked}",
        f"worst increase   {d['worst_increase']['fraction']} ({d['worst_increase']['decimal']:.6g})",
        f"witness          {w['good']} -> {w['bad']}  misses {w['good_misses']['fraction']} -> {w['bad_misses']['fraction']}",
        f"worst ratio      {d['worst_ratio']['fraction']} ({d['worst_ratio']['decimal']:.6g})",
    ]
    if report.bound is not None:
        lines.append(f"bound            {report.bound.label} -> alpha={d['bound']['alpha']['fraction']} "
                     f"beta={d['bound']['beta']['fraction']}")
    lines.append(f"verdict          {report.verdict}")
    return "\n".join(lines)
