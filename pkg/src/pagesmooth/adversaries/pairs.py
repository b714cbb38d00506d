from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from ..core import edit_distance


@dataclass
class SequencePair:
    """Two request sequences at a known edit distance.

    ``good`` is the cheap sequence and ``bad`` the expensive one for the
    policy the pair targets. ``predicted`` holds exact values where a closed
    form exists; ``extra`` carries construction details such as layer traces.
    """

    name: str
    k: int
    good: tuple
    bad: tuple
    declared_distance: int
    params: dict = field(default_factory=dict)
    predicted: Optional[dict] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.good = tuple(self.good)
        self.bad = tuple(self.bad)
        actual = edit_distance(self.good, self.bad)
        if actual != self.declared_distance:
            raise AssertionError(
                f"{self.name}: declared distance {self.declared_distance} but edit distance is {actual}")

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "k": self.k,
            "params": self.params,
            "good": list(self.good),
            "bad": list(self.bad),
            "declared_distance": self.declared_distance,
            "predicted": _jsonable(self.predicted),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "SequencePair":
        return cls(rec["name"], rec["k"], rec["good"], rec["bad"], rec["declared_distance"],
                   rec.get("params", {}), rec.get("predicted"))


def _jsonable(x: Any):
    if isinstance(x, Fraction):
        return {"fraction": f"{x.numerator}/{x.denominator}", "decimal": float(x)}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def write_pairs_jsonl(path, pairs: Sequence[SequencePair]) -> None:
    with open(path, "w") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair.to_record(), sort_keys=True) + "\n")


def read_pairs_jsonl(path) -> list[SequencePair]:
    with open(path) as fh:
        return [SequencePair.from_record(json.loads(line)) for line in fh if line.strip()]
