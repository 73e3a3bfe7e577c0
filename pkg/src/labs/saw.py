"""Self-avoiding walk solver over skew-symmetric half coordinates (lssOrel).

A trial is a sequence of contiguous self-avoiding walk segments. Each step
probes every unvisited distance-1 neighbour of the pivot and moves to the
best one (uniform tie-break). A segment ends at the target value, at the
segment length limit ``omega_c * L'`` or at the time limit; the next segment
starts from a fresh random coordinate with an empty visited set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numba import njit

from ._kernels import (
    corr_full,
    energy_of,
    half_to_spins,
    hash_bits,
    now,
    pack_words,
    skew_commit,
    skew_delta_energy,
    table_alloc,
    table_bytes,
    table_contains_flip,
    table_grow,
    table_insert,
    zobrist_table,
)
from .records import STATUS_MEMORY_CAPPED, STATUS_OK, TrialRecord, target_status
from .rng import Xoshiro256, rand_below, random_bits, seed_state, shuffle_inplace
from .sequence import MAX_INCREMENTAL_L, SkewHalf, energy, expand_skew

DEFAULT_OMEGA_C = 8
DEFAULT_MEMORY_CAP = 2 * 1024**3
# probes between two clock reads; a read costs about a microsecond
CLOCK_STRIDE = 4096


@njit(cache=True)
def _best_neighbor(s, C, L, lp, excluded, perm, rng):
    for i in range(lp):
        perm[i] = i
    shuffle_inplace(rng, perm)
    best_m = -1
    best_e = np.int64(0)
    ties = 0
    probes = 0
    for j in range(lp):
        m = perm[j]
        if excluded[m]:
            continue
        e = skew_delta_energy(s, C, L, m)
        probes += 1
        if best_m < 0 or e < best_e:
            best_m = m
            best_e = e
            ties = 1
        elif e == best_e:
            ties += 1
            if rand_below(rng, ties) == 0:
                best_m = m
    return best_m, best_e, probes


@njit(cache=True)
def _pow2_at_least(n):
    cap = 16
    while cap < n:
        cap *= 2
    return cap


@njit(cache=True)
def orel_kernel(L, target, omega_lmt, t_lmt, probe_lmt, seed, start_half,
                max_segments, mem_cap, clock_stride):
    """Run one lssOrel trial. ``omega_lmt < 0`` means unlimited segments."""
    lp = (L + 1) // 2
    W = (lp + 63) // 64
    rng = seed_state(np.uint64(seed))
    zob = zobrist_table(lp)
    t0 = now()

    if start_half.shape[0] == lp:
        bits = start_half.copy()
    else:
        bits = random_bits(rng, lp)
    s = half_to_spins(bits, L)
    C = corr_full(s)
    E = energy_of(C)
    words = pack_words(bits, W)
    h = hash_bits(bits, zob)

    tau = np.int64(1)
    best_bits = bits.copy()
    best_E = E
    omega = np.int64(0)
    rho = 0
    beta = 0
    cens = 0
    status = 0
    bounded = omega_lmt >= 0

    if bounded:
        cap = _pow2_at_least(2 * (omega_lmt + 2))
    else:
        cap = 1024
    keys, hs, used = table_alloc(cap, W)
    perm = np.empty(lp, dtype=np.int64)
    excluded = np.zeros(lp, dtype=np.bool_)
    next_clock = np.int64(0)
    timed_out = False
    segments = 0

    while True:
        # walk.saw
        if E <= best_E:
            best_bits[:] = bits
            best_E = E
        omega_s = np.int64(0)
        used[:] = 0
        count = 1
        table_insert(keys, hs, used, words, h)
        while best_E > target and (not bounded or omega_s < omega_lmt):
            if tau >= next_clock:
                next_clock = tau + clock_stride
                if now() - t0 >= t_lmt:
                    timed_out = True
                    break
            if probe_lmt >= 0 and tau >= probe_lmt:
                timed_out = True
                break
            omega_s += 1
            for m in range(lp):
                excluded[m] = table_contains_flip(keys, hs, used, words, h ^ zob[m], m)
            m, e, probes = _best_neighbor(s, C, L, lp, excluded, perm, rng)
            if m >= 0:
                skew_commit(s, C, L, m)
                E = e
                bits[m] ^= 1
                words[m >> 6] ^= np.uint64(1) << np.uint64(m & 63)
                h ^= zob[m]
                if 2 * (count + 1) > cap:
                    if table_bytes(2 * cap, W) > mem_cap:
                        status = 1
                        break
                    keys, hs, used = table_grow(keys, hs, used)
                    cap *= 2
                table_insert(keys, hs, used, words, h)
                count += 1
                tau += probes
            else:
                # trapped pivot: re-initialize inside the segment
                beta += 1
                bits = random_bits(rng, lp)
                s = half_to_spins(bits, L)
                C = corr_full(s)
                E = energy_of(C)
                words = pack_words(bits, W)
                h = hash_bits(bits, zob)
                used[:] = 0
                count = 1
                table_insert(keys, hs, used, words, h)
                tau += 1
            if E <= best_E:
                best_bits[:] = bits
                best_E = E
        omega += omega_s
        segments += 1
        if status != 0:
            break
        if best_E <= target:
            break
        if timed_out or now() - t0 >= t_lmt or (probe_lmt >= 0 and tau >= probe_lmt):
            cens = 1
            break
        if max_segments > 0 and segments >= max_segments:
            break
        bits = random_bits(rng, lp)
        s = half_to_spins(bits, L)
        C = corr_full(s)
        E = energy_of(C)
        words = pack_words(bits, W)
        h = hash_bits(bits, zob)
        tau += 1
        omega += 1
        rho += 1

    elapsed = now() - t0
    return best_bits, best_E, omega, tau, rho, beta, elapsed, cens, status


def _check_L(L: int) -> None:
    if L < 1 or L % 2 == 0:
        raise ValueError(f"skew-symmetric search needs odd L >= 1, got {L}")
    if L > MAX_INCREMENTAL_L:
        raise ValueError(f"L={L} exceeds the supported maximum {MAX_INCREMENTAL_L}")


def _half_array(half: SkewHalf | str | None, L: int) -> np.ndarray:
    if half is None:
        return np.zeros(0, dtype=np.uint8)
    text = half.bits if isinstance(half, SkewHalf) else SkewHalf(half).bits
    if 2 * len(text) - 1 != L:
        raise ValueError(f"half coordinate of length {len(text)} does not match L={L}")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")


def _bits_text(arr: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in arr.tolist())


@dataclass
class SawConfig:
    L: int
    target: int
    time_limit: float = math.inf
    omega_c: int | None = DEFAULT_OMEGA_C
    seed: int = 0
    memory_cap: int = DEFAULT_MEMORY_CAP
    probe_limit: int | None = None
    start: SkewHalf | str | None = None

    def __post_init__(self):
        _check_L(self.L)
        if self.omega_c is not None and self.omega_c < 1:
            raise ValueError("omega_c must be a positive integer or None (unlimited)")
        if self.time_limit < 0:
            raise ValueError("time_limit must be >= 0")

    @property
    def half_length(self) -> int:
        return (self.L + 1) // 2

    @property
    def omega_lmt(self) -> int | None:
        return None if self.omega_c is None else self.omega_c * self.half_length

    @property
    def solver_id(self) -> str:
        return "lssOrel_U" if self.omega_c is None else f"lssOrel_{self.omega_c}"


def lss_orel(config: SawConfig) -> TrialRecord:
    omega_lmt = -1 if config.omega_lmt is None else config.omega_lmt
    (best_bits, best_e, omega, tau, rho, beta, elapsed, cens, status) = orel_kernel(
        config.L,
        config.target,
        omega_lmt,
        float(config.time_limit),
        -1 if config.probe_limit is None else int(config.probe_limit),
        np.uint64(config.seed & 0xFFFFFFFFFFFFFFFF),
        _half_array(config.start, config.L),
        0,
        int(config.memory_cap),
        CLOCK_STRIDE,
    )
    best_e = int(best_e)
    params = {"omegaC": config.omega_c, "omegaLmt": config.omega_lmt}
    if config.omega_c is None and beta:
        params["trappedUnlimited"] = True
    capped = status == 1
    return TrialRecord(
        solver=config.solver_id,
        L=config.L,
        seed_init=int(config.seed),
        coord_best=_bits_text(best_bits),
        value_best=best_e,
        value_target=int(config.target),
        total_steps=int(omega),
        cnt_probe=int(tau),
        cnt_restart=int(rho),
        cnt_trapped=int(beta),
        runtime_ms=round(float(elapsed) * 1000.0, 3),
        is_censored=0 if capped else int(cens),
        target_reached=target_status(best_e, int(config.target)),
        status=STATUS_MEMORY_CAPPED if capped else STATUS_OK,
        params=params,
    )


class WalkResult(NamedTuple):
    segment_length: int
    best: SkewHalf
    best_energy: int
    cnt_probe: int
    cnt_trapped: int


def walk_saw(start: SkewHalf | str, target: int, time_limit: float = math.inf,
             omega_lmt: int | None = None, seed: int = 0,
             memory_cap: int = DEFAULT_MEMORY_CAP) -> WalkResult:
    """A single walk segment from ``start``; probes include the start evaluation."""
    start = start if isinstance(start, SkewHalf) else SkewHalf(start)
    L = start.full_length
    _check_L(L)
    if omega_lmt is not None and omega_lmt < 0:
        raise ValueError("omega_lmt must be >= 0")
    best_bits, best_e, omega, tau, _rho, beta, _el, _cens, status = orel_kernel(
        L,
        target,
        -1 if omega_lmt is None else omega_lmt,
        float(time_limit),
        -1,
        np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
        _half_array(start, L),
        1,
        int(memory_cap),
        CLOCK_STRIDE,
    )
    if status == 1:
        raise MemoryError(f"visited set exceeded {memory_cap} bytes")
    return WalkResult(int(omega), SkewHalf(_bits_text(best_bits)), int(best_e), int(tau), int(beta))


class PivotStep(NamedTuple):
    pivot: SkewHalf
    energy: int
    probes: int


TRAPPED = None


def new_pivot_saw(pivot: SkewHalf | str, visited: set, rng: Xoshiro256) -> PivotStep | None:
    """Best unvisited neighbour of ``pivot``; returns ``TRAPPED`` (None) if there is none.

    ``visited`` holds half-coordinate strings and must contain the pivot.
    """
    pivot = pivot if isinstance(pivot, SkewHalf) else SkewHalf(pivot)
    if pivot.bits not in visited:
        raise ValueError("pivot must be in the visited set")
    L = pivot.full_length
    lp = len(pivot)
    bits = _half_array(pivot, L)
    s = half_to_spins(bits, L)
    C = corr_full(s)
    excluded = np.zeros(lp, dtype=np.bool_)
    for m in range(lp):
        flipped = pivot.bits[:m] + ("1" if pivot.bits[m] == "0" else "0") + pivot.bits[m + 1:]
        excluded[m] = flipped in visited
    m, e, probes = _best_neighbor(s, C, L, lp, excluded, np.empty(lp, dtype=np.int64), rng.state)
    if m < 0:
        return TRAPPED
    nb = pivot.bits[:m] + ("1" if pivot.bits[m] == "0" else "0") + pivot.bits[m + 1:]
    return PivotStep(SkewHalf(nb), int(e), int(probes))


@dataclass
class WalkState:
    """Pure-Python walk segment; the kernel does the same with a hashed visited set."""

    pivot: SkewHalf
    pivot_energy: int
    visited: set = field(default_factory=set)
    segment_steps: int = 0

    @classmethod
    def start(cls, half: SkewHalf | str) -> "WalkState":
        half = half if isinstance(half, SkewHalf) else SkewHalf(half)
        e = energy(expand_skew(half))
        return cls(half, e, {half.bits}, 0)

    def step(self, rng: Xoshiro256) -> PivotStep | None:
        """Move to the best unvisited neighbour; returns TRAPPED when there is none."""
        nxt = new_pivot_saw(self.pivot, self.visited, rng)
        if nxt is TRAPPED:
            return TRAPPED
        self.pivot = nxt.pivot
        self.pivot_energy = nxt.energy
        self.visited.add(nxt.pivot.bits)
        self.segment_steps += 1
        return nxt
