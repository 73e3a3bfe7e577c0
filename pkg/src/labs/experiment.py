"""Batches of seeded solver trials and their summaries."""

from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .records import STATUS_OK, TrialRecord, write_jsonl
from .saw import DEFAULT_MEMORY_CAP, SawConfig, lss_orel
from .tabu import MaTsConfig, lss_ma_ts, lss_rr_ts

SOLVERS = ("saw", "mats", "rrts", "mats8")


@dataclass(frozen=True)
class SolverSpec:
    """Everything needed to run one trial except the seed."""

    solver: str
    L: int
    target: int
    time_limit: float = math.inf
    omega_c: int | None = 8
    skew: bool = True
    probe_limit: int | None = None
    memory_cap: int = DEFAULT_MEMORY_CAP

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if self.solver == "saw" and not self.skew:
            raise ValueError("the self-avoiding walk solver searches skew-symmetric coordinates only")

    def config(self, seed: int):
        if self.solver == "saw":
            return SawConfig(L=self.L, target=self.target, time_limit=self.time_limit,
                             omega_c=self.omega_c, seed=seed, probe_limit=self.probe_limit,
                             memory_cap=self.memory_cap)
        variant = {"mats": "MAts", "rrts": "RRts", "mats8": "MAts_8"}[self.solver]
        return MaTsConfig(L=self.L, target=self.target, time_limit=self.time_limit, seed=seed,
                          variant=variant, skew=self.skew, probe_limit=self.probe_limit)


def run_trial(spec: SolverSpec, seed: int) -> TrialRecord:
    cfg = spec.config(seed)
    if spec.solver == "saw":
        return lss_orel(cfg)
    if spec.solver == "rrts":
        return lss_rr_ts(cfg)
    return lss_ma_ts(cfg)


def _run_pair(args):
    return run_trial(*args)


def run_experiment(spec: SolverSpec, n: int, seed_base: int = 0, workers: int = 1,
                   out: str | Path | None = None, adopt_improved: bool = False) -> list[TrialRecord]:
    """Run trials with seeds seed_base + 0 .. n-1, optionally appending them to a JSONL file.

    With ``adopt_improved`` a trial that beats the target makes its value the
    target of every later trial; this forces serial execution.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    seeds = [seed_base + i for i in range(n)]
    if adopt_improved:
        records = []
        for seed in seeds:
            rec = run_trial(spec, seed)
            records.append(rec)
            if rec.target_reached == 2:
                spec = replace(spec, target=rec.value_best)
    elif workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_pair, [(spec, s) for s in seeds], chunksize=max(1, n // (4 * workers))))
    else:
        records = [run_trial(spec, s) for s in seeds]
    if out is not None:
        write_jsonl(records, out, append=True)
    return records


@dataclass
class ExperimentSummary:
    L: int
    solver: str
    n: int
    hits: int
    hit_ratio: float
    improved: int
    censored: int
    memory_capped: int
    mean_probes: float | None
    mean_runtime_ms: float | None
    mean_walk_length: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(records: Sequence[TrialRecord]) -> ExperimentSummary:
    """Hit counts over all trials; means over uncensored trials only."""
    if not records:
        raise ValueError("no records to summarize")
    keys = {(r.solver, r.L) for r in records}
    if len(keys) != 1:
        raise ValueError(f"records mix several experiments: {sorted(keys)}")
    solver, L = keys.pop()
    done = [r for r in records if not r.is_censored and r.status == STATUS_OK]
    hits = sum(r.target_reached == 1 for r in records)

    def mean(attr):
        return float(np.mean([getattr(r, attr) for r in done])) if done else None

    return ExperimentSummary(
        L=L,
        solver=solver,
        n=len(records),
        hits=hits,
        hit_ratio=hits / len(records),
        improved=sum(r.target_reached == 2 for r in records),
        censored=sum(r.is_censored for r in records),
        memory_capped=sum(r.status != STATUS_OK for r in records),
        mean_probes=mean("cnt_probe"),
        mean_runtime_ms=mean("runtime_ms"),
        mean_walk_length=mean("total_steps"),
    )


def summarize_groups(records: Iterable[TrialRecord]) -> list[ExperimentSummary]:
    groups: dict[tuple[str, int], list[TrialRecord]] = defaultdict(list)
    for r in records:
        groups[(r.solver, r.L)].append(r)
    return [summarize(groups[k]) for k in sorted(groups)]
