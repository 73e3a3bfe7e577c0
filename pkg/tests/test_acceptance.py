"""Acceptance criteria: one PASS/FAIL line per criterion, with measured values."""

import math
import os
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from labs.exact import count_canonic, exhaustive_optimum
from labs.experiment import SolverSpec, run_experiment, summarize
from labs.legendre import grid_search_merit
from labs.records import TrialRecord
from labs.registry import BestKnownRegistry, table_subset, verify_registry
from labs.saw import SawConfig, lss_orel
from labs.sequence import (
    BinarySequence,
    canonicalize,
    compute_correlations,
    energy,
    expand_skew,
    flip_update,
    symmetry_images,
)
from labs.stats import (
    AsymptoticModel,
    fit_exponential_model,
    hit_ratio_predicted,
    hits_predicted,
    pgamma,
    processors_needed,
    solvability_serial,
)
from test_stats import GAMMA_TABLE

REG = BestKnownRegistry.load()
WORKERS = max(1, min(8, os.cpu_count() or 1))


def report(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_oracle_ground_truth():
    t0 = time.perf_counter()
    bad = []
    for L in range(5, 30, 2):
        res = exhaustive_optimum(L)
        row = REG.get(L, True)
        if (res.energy, res.count) != (row.energy, row.count):
            bad.append((L, res.energy, res.count, row.energy, row.count))
    f19 = exhaustive_optimum(19, skew_only=False)
    r21, r19 = exhaustive_optimum(21), exhaustive_optimum(19)
    examples = (r21.energy, r21.count, r19.energy, r19.count, f19.energy) == (26, 1, 33, 2, 29)
    elapsed = time.perf_counter() - t0
    report(1, not bad and examples and elapsed < 10,
           f"odd L 5..29 skew optima and counts match ({len(bad)} mismatches); "
           f"L=21 26/1, L=19 33/2, full L=19 {f19.energy}; {elapsed:.2f}s")


def test_criterion_2_record_verification():
    t0 = time.perf_counter()
    rep = verify_registry(table_subset(REG))
    elapsed = time.perf_counter() - t0
    row241 = next(r for r in rep.rows if r.L == 241)
    ok = rep.ok and len(rep.rows) == 16 and row241.energy == 3600 and elapsed < 1
    report(2, ok, f"{len(rep.rows) - len(rep.failures)}/16 rows verify; "
                  f"L=241 E={row241.energy} F={row241.merit:.4f}; {elapsed:.3f}s")


def test_criterion_3_desk_scale_solvers():
    t0 = time.perf_counter()
    misses = []
    for solver in ("saw", "mats", "rrts"):
        for L in (5, 7, 11, 13, 21, 27, 41, 43):
            recs = run_experiment(SolverSpec(solver, L, REG.target(L)), 50, workers=1)
            hits = summarize(recs).hits
            if hits != 50:
                misses.append((solver, L, hits))
    elapsed = time.perf_counter() - t0
    report(3, not misses and elapsed < 600,
           f"hitO = 50/50 for every (solver, L) except {misses}; {elapsed:.1f}s")


def test_criterion_4_saw_walk_length():
    steps, restarts = [], 0
    for seed in range(1000):
        rec = lss_orel(SawConfig(L=21, target=26, omega_c=None, seed=seed))
        assert rec.target_reached == 1
        steps.append(rec.total_steps)
        restarts += rec.cnt_restart
    mean = float(np.mean(steps))
    half = 1.96 * float(np.std(steps, ddof=1)) / math.sqrt(len(steps))
    report(4, 85 <= mean <= 110 and restarts == 0,
           f"mean walk length {mean:.2f} (95% CI [{mean - half:.1f}, {mean + half:.1f}]), "
           f"restarts {restarts}")


def test_criterion_5_relative_growth():
    Ls = list(range(41, 62, 2))
    t0 = time.perf_counter()
    means = {}
    for solver in ("saw", "mats"):
        pts = []
        for L in Ls:
            recs = run_experiment(SolverSpec(solver, L, REG.target(L)), 100, workers=WORKERS)
            s = summarize(recs)
            assert s.hits == 100 and s.censored == 0
            pts.append((L, s.mean_probes))
        means[solver] = fit_exponential_model(pts)
    b_saw, b_mats = means["saw"].b, means["mats"].b
    ok = b_saw < b_mats and abs(b_saw - 1.1435) <= 0.03 and abs(b_mats - 1.1646) <= 0.03
    report(5, ok, f"b(lssOrel_8)={b_saw:.4f} vs b(lssMAts)={b_mats:.4f} over odd L 41..61, "
                  f"N=100; {time.perf_counter() - t0:.0f}s")


def test_criterion_6_statistics_golden_values():
    diffs = [abs(pgamma(q, a) - v) for q, a, v in GAMMA_TABLE]
    over = [(q, a, v) for (q, a, v), d in zip(GAMMA_TABLE, diffs) if d > 5e-5]
    # hit ratios come from the model mean 0.000032 * 1.1504^149 s; the quoted 10.34928 h
    # differs from it in one digit and is what the published quantile was computed from
    m_model = AsymptoticModel(0.000032, 1.1504, "seconds").predict(149) / 3600
    r1 = hit_ratio_predicted(96, m_model)
    r24 = hit_ratio_predicted(96, m_model, 2.4)
    chain = (round(r1, 7) == 0.9999055 and round(r24, 7) == 0.9789588
             and hits_predicted(100, r24) == 97 and processors_needed(100, r24) == 103
             and processors_needed(100, 0.3365782) == 298
             and processors_needed(100, 0.05607801) == 1784)
    q = solvability_serial(0.99, 100, 10.34928)
    ok = not over and chain and abs(q - 1290.79) <= 0.5
    report(6, ok, f"pgamma: {len(GAMMA_TABLE) - len(over)}/{len(GAMMA_TABLE)} table entries "
                  f"within 5e-5 (max deviation {max(diffs):.1e}, outside: {over}); "
                  f"hitP_r {r1:.7f} / {r24:.7f} (model mean {m_model:.5f} h), hitP 97, "
                  f"N 103/298/1784 {'ok' if chain else 'MISMATCH'}; qgamma {q:.3f} h")


def test_criterion_7_model_fit_recovery():
    t0 = time.perf_counter()
    Ls = (13, 21, 27, 41, 43, 45, 51)
    worst = 0.0
    separated = True
    for seed in range(100):
        rng = np.random.default_rng(seed)
        fits = []
        for a, b in ((500, 1.150), (100, 1.230)):
            pts = [(L, rng.exponential(a * b**L, 100).mean()) for L in Ls]
            fit = fit_exponential_model(pts)
            worst = max(worst, abs(fit.b - b))
            fits.append(fit)
        # separated: each fitted base lies nearer its own model than the other one
        separated &= abs(fits[0].b - 1.150) < abs(fits[0].b - 1.230) and \
            abs(fits[1].b - 1.230) < abs(fits[1].b - 1.150)
    elapsed = time.perf_counter() - t0
    report(7, worst <= 0.02 and separated and elapsed < 5,
           f"100 simulated experiments: worst base error {worst:.4f}, models separated "
           f"{separated}; {elapsed:.2f}s")


def test_criterion_8_legendre():
    p31 = grid_search_merit(31).merit
    large, slowest = {}, 0.0
    for p in (1009, 1013, 1019, 1021, 1031):
        t0 = time.perf_counter()
        large[p] = grid_search_merit(p).merit
        slowest = max(slowest, time.perf_counter() - t0)
    ok = abs(p31 - 6.40667) <= 0.01 and all(6.22 <= f <= 6.35 for f in large.values()) and slowest < 60
    report(8, ok, f"F(31)={p31:.5f}; large p: "
                  + ", ".join(f"{p}:{f:.5f}" for p, f in large.items())
                  + f"; slowest {slowest:.2f}s")


def _naive_corr(s):
    L = len(s)
    return np.array([int(np.dot(s[:L - k], s[k:])) for k in range(1, L)], dtype=np.int64)


def test_criterion_9_property_suites():
    rng = np.random.default_rng(909)
    n = 10_000
    failures = {}

    def bits_of(arr):
        return "".join(map(str, arr.tolist()))

    fail = 0
    for _ in range(n):
        seq = BinarySequence(bits_of(rng.integers(0, 2, rng.integers(2, 65))))
        e = energy(seq)
        fail += any(energy(img) != e for img in symmetry_images(seq))
    failures["energy symmetry"] = fail

    fail = 0
    for _ in range(n):
        L = int(rng.integers(2, 65))
        seq = BinarySequence(bits_of(rng.integers(0, 2, L)))
        C = compute_correlations(seq).corr
        k = np.arange(1, L)
        fail += not (np.all(np.abs(C) <= L - k) and np.all((C - (L - k)) % 2 == 0)
                     and np.array_equal(C, _naive_corr(seq.spins)))
    failures["C_k parity and bounds"] = fail

    fail = 0
    for _ in range(n):
        L = int(rng.integers(2, 65))
        state = compute_correlations(BinarySequence(bits_of(rng.integers(0, 2, L))))
        i = int(rng.integers(1, L + 1))
        new = flip_update(state, i)
        fail += new != compute_correlations(new.seq)
    failures["flip incremental = batch"] = fail

    failures_skew = 0
    for _ in range(n):
        half = bits_of(rng.integers(0, 2, rng.integers(1, 40)))
        C = _naive_corr(expand_skew(half).spins)
        failures_skew += bool(np.any(C[0::2] != 0))  # C[0] is lag 1, so [0::2] are odd lags
    failures["skew odd lags vanish"] = failures_skew

    fail = 0
    for _ in range(n):
        seq = BinarySequence(bits_of(rng.integers(0, 2, rng.integers(2, 65))))
        c = canonicalize(seq).seq
        fail += canonicalize(c).seq != c
        fail += any(canonicalize(img).seq != c for img in symmetry_images(seq))
    failures["canonicalize idempotent and orbit-constant"] = fail

    fail = 0
    for i in range(n):
        v, t = int(rng.integers(0, 2000)), int(rng.integers(0, 2000))
        reached = 1 if v == t else 2 if v < t else 0
        rec = TrialRecord("lssOrel_8", int(rng.integers(1, 300)), int(rng.integers(0, 2**63)),
                          bits_of(rng.integers(0, 2, rng.integers(1, 150))), v, t,
                          int(rng.integers(0, 10**9)), int(rng.integers(1, 10**12)),
                          int(rng.integers(0, 100)), 0, float(rng.random() * 1e6),
                          0 if reached else int(rng.integers(0, 2)), reached,
                          params={"omegaC": int(rng.integers(1, 9))})
        fail += TrialRecord.from_json(rec.to_json()) != rec
    failures["JSONL round trip"] = fail

    total = sum(failures.values())
    report(9, total == 0, f"{n} cases per suite; failures "
                          + ", ".join(f"{k}={v}" for k, v in failures.items()))
