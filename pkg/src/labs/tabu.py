"""Memetic tabu solver (lssMAts) and its restart-only reduction (lssRRts).

Both run over skew-symmetric half coordinates by default; ``skew=False``
searches full-length coordinates instead. Instrumentation mirrors the
self-avoiding walk solver so the two families can be compared on the same
probe counts: every evaluated neighbour costs one probe and every freshly
built individual costs one probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numba import njit

from ._kernels import (
    bits_to_spins,
    corr_full,
    energy_of,
    full_commit,
    full_delta_energy,
    half_to_spins,
    now,
    skew_commit,
    skew_delta_energy,
)
from .records import STATUS_OK, TrialRecord, target_status
from .rng import Xoshiro256, rand_below, rand_float, random_bits, seed_state
from .sequence import MAX_INCREMENTAL_L, SkewHalf

VARIANTS = ("MAts", "RRts", "MAts_8")
CLOCK_STRIDE = 4096

# counters shared between the driver loop and the tabu kernel
_PROBES, _STEPS, _NEXT_CLOCK, _TIMED_OUT = 0, 1, 2, 3


@njit(cache=True)
def _spins_of(bits, L, skew):
    if skew:
        return half_to_spins(bits, L)
    return bits_to_spins(bits)


@njit(cache=True)
def _out_of_budget(ctr, t0, t_lmt, probe_lmt, clock_stride):
    if probe_lmt >= 0 and ctr[_PROBES] >= probe_lmt:
        ctr[_TIMED_OUT] = 1
        return True
    if ctr[_PROBES] >= ctr[_NEXT_CLOCK]:
        ctr[_NEXT_CLOCK] = ctr[_PROBES] + clock_stride
        if now() - t0 >= t_lmt:
            ctr[_TIMED_OUT] = 1
            return True
    return False


@njit(cache=True)
def tabu_run(bits, L, skew, steps, ten_lo, ten_hi, rng, target, ctr, t0, t_lmt,
             probe_lmt, clock_stride, trace):
    """Tabu walk of ``steps`` iterations from ``bits`` (modified in place).

    Returns (best_bits, best_energy). Stops early once the target is reached
    or the budget runs out. ``trace`` (if non-empty) receives the flipped
    index of each iteration.
    """
    n = bits.shape[0]
    s = _spins_of(bits, L, skew)
    C = corr_full(s)
    E = energy_of(C)
    best_bits = bits.copy()
    best_E = E
    tabu_until = np.zeros(n, dtype=np.int64)
    for it in range(steps):
        if best_E <= target:
            break
        if _out_of_budget(ctr, t0, t_lmt, probe_lmt, clock_stride):
            break
        adm_m = -1
        adm_e = np.int64(0)
        adm_ties = 0
        any_m = -1
        any_e = np.int64(0)
        any_ties = 0
        for m in range(n):
            if skew:
                e = skew_delta_energy(s, C, L, m)
            else:
                e = full_delta_energy(s, C, L, m)
            if any_m < 0 or e < any_e:
                any_m = m
                any_e = e
                any_ties = 1
            elif e == any_e:
                any_ties += 1
                if rand_below(rng, any_ties) == 0:
                    any_m = m
            # admissible: not tabu, or tabu but improves this search's best
            if tabu_until[m] <= it or e < best_E:
                if adm_m < 0 or e < adm_e:
                    adm_m = m
                    adm_e = e
                    adm_ties = 1
                elif e == adm_e:
                    adm_ties += 1
                    if rand_below(rng, adm_ties) == 0:
                        adm_m = m
        ctr[_PROBES] += n
        ctr[_STEPS] += 1
        m = adm_m
        if m < 0:
            m = any_m
        if skew:
            E = skew_commit(s, C, L, m)
        else:
            E = full_commit(s, C, L, m)
        bits[m] ^= 1
        tabu_until[m] = it + 1 + ten_lo + rand_below(rng, ten_hi - ten_lo + 1)
        if trace.shape[0] > it:
            trace[it] = m
        if E < best_E:
            best_E = E
            best_bits[:] = bits
    return best_bits, best_E


@njit(cache=True)
def _draw_steps(rng, walk_lo, walk_hi):
    return walk_lo + rand_below(rng, walk_hi - walk_lo + 1)


@njit(cache=True)
def rrts_kernel(L, skew, target, t_lmt, probe_lmt, seed, walk_lo, walk_hi,
                ten_lo, ten_hi, clock_stride):
    n = (L + 1) // 2 if skew else L
    rng = seed_state(np.uint64(seed))
    t0 = now()
    ctr = np.zeros(4, dtype=np.int64)
    no_trace = np.zeros(0, dtype=np.int64)
    best_bits = random_bits(rng, n)
    best_E = energy_of(corr_full(_spins_of(best_bits, L, skew)))
    ctr[_PROBES] = 1
    searches = 0
    while best_E > target:
        if now() - t0 >= t_lmt or (probe_lmt >= 0 and ctr[_PROBES] >= probe_lmt):
            ctr[_TIMED_OUT] = 1
            break
        bits = random_bits(rng, n)
        ctr[_PROBES] += 1
        searches += 1
        steps = _draw_steps(rng, walk_lo, walk_hi)
        cand, e = tabu_run(bits, L, skew, steps, ten_lo, ten_hi, rng, target, ctr, t0,
                           t_lmt, probe_lmt, clock_stride, no_trace)
        if e <= best_E:
            best_E = e
            best_bits[:] = cand
        if ctr[_TIMED_OUT]:
            break
    cens = 1 if (ctr[_TIMED_OUT] and best_E > target) else 0
    return best_bits, best_E, ctr[_STEPS], ctr[_PROBES], searches, 0, now() - t0, cens


@njit(cache=True)
def _tournament(rng, energies):
    a = rand_below(rng, energies.shape[0])
    b = rand_below(rng, energies.shape[0])
    return a if energies[a] <= energies[b] else b


@njit(cache=True)
def mats_kernel(L, skew, target, t_lmt, probe_lmt, seed, popsize, offsize, p_x, p_m,
                walk_lo, walk_hi, ten_lo, ten_hi, clock_stride):
    n = (L + 1) // 2 if skew else L
    rng = seed_state(np.uint64(seed))
    t0 = now()
    ctr = np.zeros(4, dtype=np.int64)
    no_trace = np.zeros(0, dtype=np.int64)

    pop = np.empty((popsize, n), dtype=np.uint8)
    pop_e = np.empty(popsize, dtype=np.int64)
    best_i = 0
    for i in range(popsize):
        pop[i] = random_bits(rng, n)
        pop_e[i] = energy_of(corr_full(_spins_of(pop[i], L, skew)))
        if pop_e[i] < pop_e[best_i]:
            best_i = i
    ctr[_PROBES] = popsize
    best_bits = pop[best_i].copy()
    best_E = pop_e[best_i]

    off = np.empty((offsize, n), dtype=np.uint8)
    off_e = np.empty(offsize, dtype=np.int64)
    all_bits = np.empty((popsize + offsize, n), dtype=np.uint8)
    all_e = np.empty(popsize + offsize, dtype=np.int64)
    searches = 0
    generations = 0
    done = False
    while best_E > target and not done:
        if now() - t0 >= t_lmt or (probe_lmt >= 0 and ctr[_PROBES] >= probe_lmt):
            ctr[_TIMED_OUT] = 1
            break
        filled = 0
        for i in range(offsize):
            if rand_float(rng) < p_x:
                a = _tournament(rng, pop_e)
                b = _tournament(rng, pop_e)
                for j in range(n):
                    off[i, j] = pop[a, j] if rand_below(rng, 2) == 0 else pop[b, j]
            else:
                off[i] = pop[_tournament(rng, pop_e)]
            for j in range(n):
                if rand_float(rng) < p_m:
                    off[i, j] ^= 1
            ctr[_PROBES] += 1
            searches += 1
            steps = _draw_steps(rng, walk_lo, walk_hi)
            cand, e = tabu_run(off[i], L, skew, steps, ten_lo, ten_hi, rng, target, ctr,
                               t0, t_lmt, probe_lmt, clock_stride, no_trace)
            off[i] = cand
            off_e[i] = e
            filled += 1
            if e < best_E:
                best_E = e
                best_bits[:] = cand
            if best_E <= target or ctr[_TIMED_OUT]:
                done = True
                break
        # elitist truncation of pop + offspring
        all_bits[:popsize] = pop
        all_e[:popsize] = pop_e
        all_bits[popsize:popsize + filled] = off[:filled]
        all_e[popsize:popsize + filled] = off_e[:filled]
        order = np.argsort(all_e[:popsize + filled], kind="mergesort")
        for i in range(popsize):
            pop[i] = all_bits[order[i]]
            pop_e[i] = all_e[order[i]]
        generations += 1
    cens = 1 if (ctr[_TIMED_OUT] and best_E > target) else 0
    return best_bits, best_E, ctr[_STEPS], ctr[_PROBES], searches, generations, now() - t0, cens


def tenure_range(n: int) -> tuple[int, int]:
    """Tabu tenure bounds for a search over n free bits."""
    return max(1, math.ceil(n / 10)), max(1, math.ceil(n / 2))


@dataclass
class MaTsConfig:
    L: int
    target: int
    time_limit: float = math.inf
    seed: int = 0
    variant: str = "MAts"
    popsize: int = 100
    offsize: int | None = None
    crossover_prob: float = 0.9
    mutation_prob: float | None = None
    tournament_size: int = 2
    walk_range: tuple[int, int] | None = None
    skew: bool = True
    probe_limit: int | None = None
    tenure: tuple[int, int] | None = field(default=None)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.L < 2 or self.L > MAX_INCREMENTAL_L:
            raise ValueError(f"L={self.L} out of range")
        if self.skew and self.L % 2 == 0:
            raise ValueError(f"skew-symmetric search needs odd L, got {self.L}")
        if self.tournament_size != 2:
            raise ValueError("only binary tournament selection is implemented")
        if self.offsize is None:
            self.offsize = self.popsize
        if self.mutation_prob is None:
            self.mutation_prob = 2.0 / (self.L + 1)
        if self.walk_range is None:
            if self.variant == "MAts_8":
                self.walk_range = (8 * self.half_length, 8 * self.half_length)
            else:
                self.walk_range = (self.L // 2, (3 * self.L) // 2)
        if self.tenure is None:
            self.tenure = tenure_range(self.free_bits)
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} is not a probability")
        lo, hi = self.walk_range
        if not 0 <= lo <= hi:
            raise ValueError(f"empty tabu walk range {self.walk_range}")
        if self.popsize < 1 or self.offsize < 1:
            raise ValueError("population and offspring sizes must be positive")
        if self.time_limit < 0:
            raise ValueError("time_limit must be >= 0")

    @property
    def half_length(self) -> int:
        return (self.L + 1) // 2

    @property
    def free_bits(self) -> int:
        return self.half_length if self.skew else self.L

    @property
    def solver_id(self) -> str:
        prefix = "ss" if self.skew else ""
        return f"l{prefix}{self.variant}"


def _run(config: MaTsConfig):
    seed = np.uint64(config.seed & 0xFFFFFFFFFFFFFFFF)
    probe_lmt = -1 if config.probe_limit is None else int(config.probe_limit)
    lo, hi = config.walk_range
    tlo, thi = config.tenure
    if config.variant == "RRts":
        return rrts_kernel(config.L, config.skew, config.target, float(config.time_limit),
                           probe_lmt, seed, lo, hi, tlo, thi, CLOCK_STRIDE)
    return mats_kernel(config.L, config.skew, config.target, float(config.time_limit),
                       probe_lmt, seed, config.popsize, config.offsize,
                       float(config.crossover_prob), float(config.mutation_prob),
                       lo, hi, tlo, thi, CLOCK_STRIDE)


def run_tabu_solver(config: MaTsConfig) -> TrialRecord:
    best_bits, best_e, steps, probes, searches, gens, elapsed, cens = _run(config)
    best_e = int(best_e)
    params = {
        "variant": config.variant,
        "skew": config.skew,
        "walkRange": list(config.walk_range),
        "tenureRange": list(config.tenure),
        "generations": int(gens),
    }
    if config.variant != "RRts":
        params.update(popsize=config.popsize, offsize=config.offsize,
                      crossoverProb=config.crossover_prob, mutationProb=config.mutation_prob)
    return TrialRecord(
        solver=config.solver_id,
        L=config.L,
        seed_init=int(config.seed),
        coord_best="".join("1" if b else "0" for b in best_bits.tolist()),
        value_best=best_e,
        value_target=int(config.target),
        total_steps=int(steps),
        cnt_probe=int(probes),
        cnt_restart=int(searches),
        cnt_trapped=0,
        runtime_ms=round(float(elapsed) * 1000.0, 3),
        is_censored=int(cens),
        target_reached=target_status(best_e, int(config.target)),
        status=STATUS_OK,
        params=params,
    )


def lss_ma_ts(config: MaTsConfig) -> TrialRecord:
    if config.variant == "RRts":
        raise ValueError("use lss_rr_ts for the RRts variant")
    return run_tabu_solver(config)


def lss_rr_ts(config: MaTsConfig) -> TrialRecord:
    if config.variant != "RRts":
        config = MaTsConfig(**{**config.__dict__, "variant": "RRts", "walk_range": None})
    return run_tabu_solver(config)


class TabuResult(NamedTuple):
    best: str
    energy: int
    probes: int
    flips: tuple[int, ...]


def tabu_search(start: SkewHalf | str, steps: int, rng: Xoshiro256, skew: bool = True,
                tenure: tuple[int, int] | None = None) -> TabuResult:
    """Plain tabu walk from ``start``; ``flips`` lists the 0-based flipped index per step.

    With ``skew`` the start is a half coordinate; otherwise a full sequence.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    text = start.bits if isinstance(start, SkewHalf) else str(start)
    if skew:
        SkewHalf(text)
        L = 2 * len(text) - 1
    else:
        L = len(text)
    bits = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
    tlo, thi = tenure if tenure is not None else tenure_range(len(text))
    ctr = np.zeros(4, dtype=np.int64)
    ctr[_NEXT_CLOCK] = np.iinfo(np.int64).max
    trace = np.full(steps, -1, dtype=np.int64)
    best_bits, best_e = tabu_run(bits.copy(), L, skew, steps, tlo, thi, rng.state, -1, ctr,
                                 0.0, math.inf, -1, CLOCK_STRIDE, trace)
    flips = tuple(int(m) for m in trace if m >= 0)
    return TabuResult("".join("1" if b else "0" for b in best_bits.tolist()),
                      int(best_e), int(ctr[_PROBES]), flips)
