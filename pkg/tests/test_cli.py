import csv
import json
import subprocess
import sys

import pytest

from pagesmooth import __version__
from pagesmooth.adversaries import read_pairs_jsonl
from pagesmooth.cli import EXIT_BUDGET, EXIT_INVALID, main
from pagesmooth.core import parse_sequence


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_audit_json_report(capsys):
    code, out, _ = run(capsys, "audit", "--policy", "lru", "--k", "2", "--alphabet", "3", "--max-len", "6",
                       "--delta", "1")
    assert code == 0
    report = json.loads(out)
    assert report["result"]["worst_increase"]["fraction"] == "3/1"
    assert report["result"]["verdict"] == "tight"
    assert report["version"] == __version__
    assert report["config"]["policy"] == "lru"


def test_curves_csv(capsys):
    code, out, _ = run(capsys, "curves", "--k", "8", "--i", "4")
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    rows = list(csv.DictReader(lines))
    assert len(rows) == 14
    row = next(r for r in rows if r["age"] == "7")
    assert row["smoothed_lru"] == "5/9"
    assert row["lru"] == "1/1"


def test_pairs_fifo_record(capsys):
    code, out, _ = run(capsys, "pairs", "--family", "fifo", "--k", "3")
    assert code == 0
    rec = json.loads(out)
    assert rec["final_configs"]["good"] == rec["final_configs"]["bad"][::-1]
    assert rec["run"]["config"]["k"] == 3


def test_pairs_file_round_trips(tmp_path, capsys):
    path = tmp_path / "pairs.jsonl"
    assert main(["pairs", "--family", "eoa", "--k", "3", "--m", "4", "--delta", "2", "--output", str(path)]) == 0
    (pair,) = read_pairs_jsonl(path)
    assert pair.declared_distance == 2
    text = tmp_path / "pair.txt"
    assert main(["pairs", "--family", "opt", "--k", "2", "--format", "text", "--output", str(text)]) == 0
    good, bad = [parse_sequence(line) for line in text.read_text().splitlines()]
    assert len(bad) == len(good) + 1
    assert not list(tmp_path.glob(".tmp-*"))


@pytest.mark.parametrize("family, extra", [
    ("det-demand", ["--policy", "fifo"]), ("fwf", []), ("fifo-search", ["--rounds", "3"]), ("random", ["--n", "3"]),
    ("mark", ["--k", "4", "--ell", "2", "--phases", "3"]), ("smoothed-lru", ["--k", "3", "--i", "1"]),
    ("randomized-demand", ["--policy", "random-demand"]), ("partition-equitable", ["--k", "3"]),
])
def test_every_family_runs(capsys, family, extra):
    code, out, err = run(capsys, "pairs", "--family", family, *extra)
    assert code == 0, err
    assert json.loads(out)["declared_distance"] >= 1


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"policy": "fwf", "k": 2, "max_len": 5, "alphabet": 3}))
    code, out, _ = run(capsys, "audit", "--config", str(cfg), "--max-len", "4")
    assert code == 0
    report = json.loads(out)
    assert report["config"]["policy"] == "fwf" and report["config"]["max_len"] == 4


def test_reports_are_byte_reproducible(tmp_path):
    a = tmp_path / "a.json"
    args = ["mc-check", "--policy", "random", "--k", "2", "--sequence", "0,1,2,0", "--trials", "500", "--seed", "3",
            "--output", str(a)]
    assert main(args) == 0
    first = a.read_bytes()
    assert main(args) == 0
    assert a.read_bytes() == first
    result = json.loads(a.read_text())["result"]
    assert result["exact"]["fraction"] == "15/4"


@pytest.mark.parametrize("argv", [
    ["audit", "--policy", "clock"],
    ["audit", "--k", "2", "--i", "2"],
    ["mc-check", "--policy", "random", "--sequence", "0,1"],
    ["pairs", "--family", "mark", "--k", "3", "--ell", "5"],
    ["pairs", "--family", "nope"],
])
def test_invalid_config_exit_code(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_INVALID
    assert "invalid configuration" in err


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "audit", "--config", str(cfg))[0] == EXIT_INVALID
    cfg.write_text("{not json")
    assert run(capsys, "audit", "--config", str(cfg))[0] == EXIT_INVALID


def test_budget_exit_code(capsys, monkeypatch):
    import pagesmooth.audit.smoothness as smoothness

    monkeypatch.setattr(smoothness, "DEFAULT_BUDGET", 5)
    monkeypatch.setattr(smoothness.audit_policy, "__defaults__", (0, 5))
    code, _, err = run(capsys, "audit", "--policy", "lru", "--max-len", "4")
    assert code == EXIT_BUDGET
    assert "budget" in err


def test_fixpoint_and_table1(capsys):
    code, out, _ = run(capsys, "fixpoint")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["edit_bound"]["fraction"] == "17/6"
    assert {r["d"]["fraction"] for r in result["table"]} == {"0/1", "1/2", "3/2", "2/1"}
    code, out, _ = run(capsys, "table1", "--max-len", "5")
    assert code == 0
    assert "lru" in out and "out of scope" in out
    assert "violated" not in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pagesmooth", "curves", "--k", "2", "--i", "1", "--format", "text"],
                          capture_output=True, text=True, check=True)
    assert "smoothed_lru" in proc.stdout
