"""Command-line experiment runner.

Subcommands: audit, pairs, curves, table1, mc-check, fixpoint. Settings come
from an optional JSON config file; command-line flags override it. Every
report embeds the resolved config and the package version.

Exit status: 0 on success, 2 for an invalid configuration, 3 when a search
exceeds its budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Optional

from . import __version__
from .adversaries import (
    gen_det_demand_lower,
    gen_eoa_pair,
    gen_fifo_extension,
    gen_fifo_pair,
    gen_fwf_pair,
    gen_mark_pair,
    gen_opt_pair,
    gen_partition_equitable_pair,
    gen_random_pair,
    gen_randomized_demand_lower,
    gen_smoothed_lru_pair,
)
from .audit import (
    POLICY_TAGS,
    audit_policy,
    edit_cases,
    format_report,
    lru_random_distance_fixpoint,
    lru_random_edit_bound,
    make_evaluator,
    table_bound,
)
from .core import BudgetExceeded, CacheConfig, format_sequence, parse_sequence
from .det_policies import DetPolicyKind, simulate
from .rand_engines import LRURandomEngine, RandomEngine, monte_carlo, smoothed_lru_hit_prob, step_lru_hit_prob
from .rand_engines.montecarlo import GENERATOR_FAMILY, POLICIES as MC_POLICIES

EXIT_INVALID = 2
EXIT_BUDGET = 3

FAMILIES = ("det-demand", "opt", "fwf", "fifo", "fifo-search", "random", "mark", "eoa", "smoothed-lru",
            "randomized-demand", "partition-equitable")
FORMATS = ("json", "csv", "text")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str = ""
    policy: str = "lru"
    family: str = "fifo"
    k: int = 2
    i: int = 0
    delta: int = 1
    ell: int = 2
    m: int = 20
    n: int = 50
    phases: int = 10
    rounds: int = 0
    alphabet: int = 3
    max_len: int = 6
    trials: int = 10_000
    seed: Optional[int] = None
    sequence: str = ""
    output: Optional[str] = None
    format: str = "json"

    def validate(self) -> None:
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.k >= 1, "k must be at least 1")
        need(0 <= self.i < self.k, "i must satisfy 0 <= i < k")
        need(self.delta >= 0, "delta must be non-negative")
        need(self.alphabet >= 1, "alphabet must be at least 1")
        need(self.max_len >= 0, "max-len must be non-negative")
        need(self.trials >= 1, "trials must be at least 1")
        need(self.m >= 1 and self.n >= 1 and self.phases >= 1, "m, n and phases must be positive")
        need(self.rounds >= 0, "rounds must be non-negative")
        need(self.format in FORMATS, f"format must be one of {', '.join(FORMATS)}")
        if self.experiment == "audit":
            need(self.policy in POLICY_TAGS, f"audit policy must be one of {', '.join(POLICY_TAGS)}")
            need(self.delta >= 1, "audit needs delta >= 1")
        if self.experiment == "pairs":
            need(self.family in FAMILIES, f"family must be one of {', '.join(FAMILIES)}")
        if self.experiment == "mc-check":
            need(self.seed is not None, "mc-check needs an explicit --seed")
            need(self.policy in MC_POLICIES, f"mc-check policy must be one of {', '.join(MC_POLICIES)}")
            need(bool(self.sequence.strip()), "mc-check needs --sequence")


def _frac(x) -> dict:
    x = Fraction(x)
    return {"fraction": f"{x.numerator}/{x.denominator}", "decimal": float(x)}


def _plain(x):
    if isinstance(x, Fraction):
        return _frac(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_plain(v) for v in x)
    return x


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _header(cfg: ExperimentConfig) -> dict:
    return {"tool": "pagesmooth", "version": __version__, "config": asdict(cfg)}


def _emit(cfg: ExperimentConfig, text: str) -> None:
    if cfg.output:
        write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text)


def _csv_text(cfg: ExperimentConfig, header: list, rows: list) -> str:
    buf = io.StringIO()
    buf.write(f"# {json.dumps(_header(cfg), sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _text_table(header: list, rows: list) -> str:
    cells = [[str(c) for c in header]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[n]) for r in cells) for n in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _json_text(cfg: ExperimentConfig, result) -> str:
    return json.dumps({**_header(cfg), "result": _plain(result)}, indent=2, sort_keys=True) + "\n"


# --- subcommands -----------------------------------------------------------------

def run_audit(cfg: ExperimentConfig) -> str:
    report = audit_policy(cfg.policy, cfg.k, cfg.alphabet, cfg.max_len, cfg.delta, cfg.i)
    if cfg.format == "json":
        return _json_text(cfg, report.to_dict())
    if cfg.format == "text":
        return f"# {json.dumps(_header(cfg), sort_keys=True)}\n" + format_report(report) + "\n"
    d = report.to_dict()
    row = [cfg.policy, cfg.k, cfg.alphabet, cfg.max_len, cfg.delta, d["pairs_checked"],
           d["worst_increase"]["fraction"], d["worst_increase"]["decimal"],
           format_sequence(d["witness"]["good"]), format_sequence(d["witness"]["bad"]), d["verdict"]]
    return _csv_text(cfg, ["policy", "k", "alphabet", "max_len", "delta", "pairs", "worst_increase",
                           "worst_increase_decimal", "good", "bad", "verdict"], [row])


def _family_pair(cfg: ExperimentConfig):
    k = cfg.k
    fam = cfg.family
    if fam == "det-demand":
        kind = DetPolicyKind(cfg.policy) if cfg.policy in ("lru", "fifo") else None
        if kind is None:
            raise ConfigError("det-demand pairs need --policy lru or fifo")
        return gen_det_demand_lower(kind, CacheConfig(k), cfg.delta), cfg.policy
    if fam == "opt":
        return gen_opt_pair(k, cfg.delta), "belady"
    if fam == "fwf":
        return gen_fwf_pair(k, cfg.delta), "fwf"
    if fam in ("fifo", "fifo-search"):
        pair = gen_fifo_pair(k, "search" if fam == "fifo-search" else "recursive")
        if cfg.rounds:
            ext = gen_fifo_extension(k, cfg.rounds, start=pair.extra["good_config"])
            pair.good = pair.good + tuple(ext)
            pair.bad = pair.bad + tuple(ext)
            pair.params["rounds"] = cfg.rounds
            for side in ("good", "bad"):
                pair.extra[f"{side}_config"] = simulate(DetPolicyKind.FIFO, CacheConfig(k),
                                                        getattr(pair, side)).final_state
        return pair, "fifo"
    if fam == "random":
        return gen_random_pair(k, cfg.delta, cfg.n), "random"
    if fam == "mark":
        return gen_mark_pair(k, cfg.ell, cfg.phases), "mark"
    if fam == "eoa":
        return gen_eoa_pair(k, cfg.m, cfg.delta), "eoa"
    if fam == "smoothed-lru":
        return gen_smoothed_lru_pair(k, cfg.i, cfg.delta), "smoothed-lru"
    if fam == "randomized-demand":
        engines = {"random-demand": RandomEngine, "lru-random-demand": LRURandomEngine}
        if cfg.policy not in engines:
            raise ConfigError("randomized-demand pairs need --policy random-demand or lru-random-demand")
        return gen_randomized_demand_lower(engines[cfg.policy](k, demand=True), k), cfg.policy
    return gen_partition_equitable_pair(k), None


def run_pairs(cfg: ExperimentConfig) -> str:
    pair, tag = _family_pair(cfg)
    record = pair.to_record()
    if tag is not None:
        ev = make_evaluator(tag, cfg.k, cfg.i)
        good, bad = Fraction(ev(pair.good)), Fraction(ev(pair.bad))
        record["measured"] = {"policy": tag, "good_misses": _frac(good), "bad_misses": _frac(bad),
                              "difference": _frac(bad - good)}
    if "good_config" in pair.extra:
        record["final_configs"] = {"good": pair.extra["good_config"], "bad": pair.extra["bad_config"]}
    if "good_layers" in pair.extra:
        record["layers"] = _plain({"good": pair.extra["good_layers"], "bad": pair.extra["bad_layers"]})
    if cfg.format == "text":
        return format_sequence(pair.good) + "\n" + format_sequence(pair.bad) + "\n"
    if cfg.format == "csv":
        return _csv_text(cfg, ["side", "sequence"], [["good", format_sequence(pair.good)],
                                                     ["bad", format_sequence(pair.bad)]])
    record["run"] = _header(cfg)
    return json.dumps(record, sort_keys=True) + "\n"


def run_curves(cfg: ExperimentConfig) -> str:
    c = CacheConfig(cfg.k, cfg.i)
    rows = []
    for age in range(cfg.k + cfg.i + 2):
        lru = Fraction(1) if age < cfg.k else Fraction(0)
        sm = smoothed_lru_hit_prob(age, c)
        st = step_lru_hit_prob(age, c)
        rows.append([age, f"{lru.numerator}/{lru.denominator}", float(lru),
                     f"{sm.numerator}/{sm.denominator}", float(sm),
                     f"{st.numerator}/{st.denominator}", float(st)])
    header = ["age", "lru", "lru_decimal", "smoothed_lru", "smoothed_lru_decimal", "step_lru",
              "step_lru_decimal"]
    if cfg.format == "json":
        return _json_text(cfg, [dict(zip(header, r)) for r in rows])
    if cfg.format == "text":
        return _text_table(header, rows)
    return _csv_text(cfg, header, rows)


def _table1_rows(cfg: ExperimentConfig) -> list[dict]:
    k, delta = cfg.k, cfg.delta
    rows = []

    def audited(tag, max_len, i=0):
        report = audit_policy(tag, k, cfg.alphabet, max_len, delta, i)
        bound = table_bound(tag, k, i)
        return {"policy": tag, "bound": bound.label if bound else "",
                "observed": report.worst_increase, "witness": [list(report.witness[0]), list(report.witness[1])],
                "verdict": report.verdict}

    rows.append(audited("lru", cfg.max_len))
    rows.append(audited("fwf", cfg.max_len + 1))
    rows.append(audited("belady", cfg.max_len))
    fifo = audited("fifo", cfg.max_len)
    fifo_pair = gen_fifo_pair(k, "search")
    ext = gen_fifo_extension(k, 200, start=fifo_pair.extra["good_config"])
    ev = make_evaluator("fifo", k)
    fifo["pair_ratio"] = Fraction(ev(fifo_pair.bad + tuple(ext)), ev(fifo_pair.good + tuple(ext)))
    rows.append(fifo)
    rows.append(audited("random", cfg.max_len))
    eoa = audited("eoa", cfg.max_len)
    pair = gen_eoa_pair(k, cfg.m, delta)
    ev = make_evaluator("eoa", k)
    diff = Fraction(ev(pair.bad)) - Fraction(ev(pair.good))
    eoa["pair_difference"] = diff
    eoa["closed_form_gap"] = abs(diff - pair.predicted["difference"])
    rows.append(eoa)
    if k >= 2:
        rows.append(audited("smoothed-lru", cfg.max_len, i=min(1, k - 1)))
    rows.append(audited("mark", cfg.max_len))
    if k == 2:
        row = audited("lru-random", cfg.max_len)
        row["fixpoint_bound"] = lru_random_edit_bound()
        rows.append(row)
    for name in ("partition", "equitable", "strongly competitive randomized lower bound"):
        rows.append({"policy": name, "bound": "", "observed": None, "witness": None,
                     "verdict": "out of scope"})
    return rows


def run_table1(cfg: ExperimentConfig) -> str:
    rows = _table1_rows(cfg)
    if cfg.format == "json":
        return _json_text(cfg, rows)
    header = ["policy", "bound", "observed", "verdict", "note"]
    flat = []
    for r in rows:
        obs = r["observed"]
        note = ""
        if "pair_ratio" in r:
            note = f"200-round pair ratio {float(r['pair_ratio']):.4f}"
        if "pair_difference" in r:
            note = f"pair difference {float(r['pair_difference']):.6f}, gap to closed form {float(r['closed_form_gap']):.1e}"
        if "fixpoint_bound" in r:
            note = f"case-analysis bound {r['fixpoint_bound']}"
        flat.append([r["policy"], r["bound"], "" if obs is None else str(obs), r["verdict"], note])
    if cfg.format == "text":
        return _text_table(header, flat)
    return _csv_text(cfg, header, flat)


def run_mc_check(cfg: ExperimentConfig) -> str:
    s = parse_sequence(cfg.sequence)
    c = CacheConfig(cfg.k, cfg.i)
    exact = Fraction(make_evaluator(cfg.policy, cfg.k, cfg.i)(s))
    est = monte_carlo(cfg.policy, c, s, cfg.trials, cfg.seed)
    z = (est.mean - float(exact)) / est.stderr if est.stderr > 0 else 0.0
    result = {"sequence": list(s), "exact": exact, "mean": est.mean, "stderr": est.stderr,
              "z": z, "within_3_se": abs(z) <= 3, "trials": est.trials, "seed": est.seed,
              "generator": GENERATOR_FAMILY}
    if cfg.format == "json":
        return _json_text(cfg, result)
    header = ["policy", "exact", "exact_decimal", "mean", "stderr", "z", "within_3_se"]
    row = [cfg.policy, f"{exact.numerator}/{exact.denominator}", float(exact), est.mean, est.stderr, z,
           abs(z) <= 3]
    if cfg.format == "text":
        return _text_table(header, [row])
    return _csv_text(cfg, header, [row])


def run_fixpoint(cfg: ExperimentConfig) -> str:
    table = lru_random_distance_fixpoint()
    cases = edit_cases(table)
    bound = max(c.bound for c in cases)
    if cfg.format == "json":
        return _json_text(cfg, {
            "iterations": table.iterations,
            "table": [{"s": list(s), "t": list(t), "d": d} for s, t, d in table.rows()],
            "edits": [{"kind": c.kind, "bad_request": c.bad_request, "good_request": c.good_request,
                       "bound": c.bound} for c in cases],
            "edit_bound": bound,
        })
    rows = [[format_sequence(s), format_sequence(t), str(d)] for s, t, d in table.rows()]
    if cfg.format == "csv":
        return _csv_text(cfg, ["s", "t", "d"], rows)
    return _text_table(["s", "t", "d"], rows) + f"\none-edit bound: {bound}\n"


RUNNERS = {
    "audit": run_audit,
    "pairs": run_pairs,
    "curves": run_curves,
    "table1": run_table1,
    "mc-check": run_mc_check,
    "fixpoint": run_fixpoint,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pagesmooth", description="Smoothness experiments for paging policies.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file with config fields; flags override it")
        p.add_argument("--policy")
        p.add_argument("--family")
        for flag in ("k", "i", "delta", "ell", "m", "n", "phases", "rounds", "alphabet", "trials", "seed"):
            p.add_argument(f"--{flag}", type=int)
        p.add_argument("--max-len", dest="max_len", type=int)
        p.add_argument("--sequence", help="comma-separated page ids")
        p.add_argument("--output")
        p.add_argument("--format", choices=FORMATS)
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(values, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
    for f in fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    values["experiment"] = args.experiment
    if values.get("experiment") == "table1":
        values.setdefault("format", "text")
    if values.get("experiment") == "curves":
        values.setdefault("format", "csv")
    try:
        cfg = ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        _emit(cfg, RUNNERS[cfg.experiment](cfg))
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ValueError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return 0


if __name__ == "__main__":
    sys.exit(main())
