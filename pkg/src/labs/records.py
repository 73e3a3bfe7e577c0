"""Instrumented trial records and their JSON Lines form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Iterator

STATUS_OK = "ok"
STATUS_MEMORY_CAPPED = "memory-capped"

# python attribute -> JSON key
_JSON_KEYS = {
    "solver": "solver",
    "L": "L",
    "seed_init": "seedInit",
    "coord_best": "coordBest",
    "value_best": "valueBest",
    "value_target": "valueTarget",
    "total_steps": "totalSteps",
    "cnt_probe": "cntProbe",
    "cnt_restart": "cntRestart",
    "cnt_trapped": "cntTrapped",
    "runtime_ms": "runtime",
    "is_censored": "isCensored",
    "target_reached": "targetReached",
    "status": "status",
    "params": "params",
}
_FROM_JSON = {v: k for k, v in _JSON_KEYS.items()}


def target_status(value_best: int, target: int) -> int:
    if value_best == target:
        return 1
    if value_best < target:
        return 2
    return 0


@dataclass
class TrialRecord:
    solver: str
    L: int
    seed_init: int
    coord_best: str
    value_best: int
    value_target: int
    total_steps: int
    cnt_probe: int
    cnt_restart: int
    cnt_trapped: int
    runtime_ms: float
    is_censored: int
    target_reached: int
    status: str = STATUS_OK
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = target_status(self.value_best, self.value_target)
        if self.target_reached != expected:
            raise ValueError(
                f"targetReached={self.target_reached} inconsistent with "
                f"valueBest={self.value_best}, target={self.value_target}"
            )
        if self.is_censored and self.target_reached:
            raise ValueError("a censored trial cannot have reached the target")

    def to_dict(self) -> dict:
        return {_JSON_KEYS[f.name]: getattr(self, f.name) for f in fields(self)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, data: dict) -> "TrialRecord":
        unknown = set(data) - set(_FROM_JSON)
        if unknown:
            raise ValueError(f"unknown record fields: {sorted(unknown)}")
        return cls(**{_FROM_JSON[k]: v for k, v in data.items()})

    @classmethod
    def from_json(cls, line: str) -> "TrialRecord":
        return cls.from_dict(json.loads(line))


def write_jsonl(records: Iterable[TrialRecord], path: str | Path, append: bool = False) -> None:
    with open(path, "a" if append else "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def read_jsonl(path: str | Path) -> Iterator[TrialRecord]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield TrialRecord.from_json(line)
            except (ValueError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
