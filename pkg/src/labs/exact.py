"""Exhaustive oracle: exact optimum and canonic-solution counts for small L.

Only coordinates starting with ``00`` are scanned. Every orbit of the symmetry
group generated by complement, reversal and alternate negation has a member
with that prefix, and the energy is constant on orbits, so the optimum is
never missed. The remaining free bits are walked in Gray-code order so each
step is one incremental flip.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ._kernels import bits_to_spins, corr_full, energy_of, full_commit, half_to_spins, skew_commit
from .sequence import BinarySequence, expand_skew, is_skew_symmetric

MAX_SKEW_FREE = 24  # max L' for a skew scan
MAX_FULL_FREE = 24  # max L for a full scan
_KEEP = 1 << 16


class BudgetExceeded(RuntimeError):
    """The requested scan is larger than the enumeration budget."""


@njit(cache=True)
def _scan(L, skew, bound, keep):
    """Scan all prefix-00 coordinates.

    bound < 0: track the minimum energy and its minimizers.
    bound >= 0: collect every coordinate with energy <= bound.
    Returns (best, count, kept solutions).
    """
    n = (L + 1) // 2 if skew else L
    bits = np.zeros(n, dtype=np.uint8)
    s = half_to_spins(bits, L) if skew else bits_to_spins(bits)
    C = corr_full(s)
    E = energy_of(C)
    sols = np.empty((keep, n), dtype=np.uint8)
    count = 0
    best = E
    if bound < 0 or E <= bound:
        sols[0] = bits
        count = 1
    free = n - 2
    total = np.int64(1) << free
    for i in range(1, total):
        j = 0
        while (i >> j) & 1 == 0:
            j += 1
        m = 2 + j
        if skew:
            E = skew_commit(s, C, L, m)
        else:
            E = full_commit(s, C, L, m)
        bits[m] ^= 1
        if bound < 0:
            if E < best:
                best = E
                count = 0
            if E == best:
                if count < keep:
                    sols[count] = bits
                count += 1
        elif E <= bound:
            if E < best:
                best = E
            if count < keep:
                sols[count] = bits
            count += 1
    return best, count, sols[: min(count, keep)].copy()


@dataclass(frozen=True)
class OracleResult:
    L: int
    skew_only: bool
    energy: int
    solutions: tuple[str, ...]
    skew_count: int
    nonskew_count: int

    @property
    def count(self) -> int:
        return self.skew_count + self.nonskew_count

    @property
    def merit_factor(self) -> float:
        return self.L * self.L / (2.0 * self.energy)


def _check_budget(L: int, skew_only: bool, max_free: int | None) -> None:
    if skew_only:
        if L < 3 or L % 2 == 0:
            raise ValueError(f"skew scan needs odd L >= 3, got {L}")
        n, limit = (L + 1) // 2, MAX_SKEW_FREE if max_free is None else max_free
    else:
        if L < 2:
            raise ValueError(f"full scan needs L >= 2, got {L}")
        n, limit = L, MAX_FULL_FREE if max_free is None else max_free
    if n > limit:
        raise BudgetExceeded(f"L={L} needs {n} free bits, budget is {limit}")


def _collect(L: int, skew_only: bool, bound: int):
    best, count, sols = _scan(L, skew_only, bound, _KEEP)
    if count > _KEEP:
        raise BudgetExceeded(f"{count} solutions exceed the storage limit {_KEEP}")
    seqs = []
    for row in sols:
        text = "".join("1" if b else "0" for b in row.tolist())
        seqs.append(expand_skew(text).bits if skew_only else text)
    return int(best), sorted(seqs)


def exhaustive_optimum(L: int, skew_only: bool = True, max_free: int | None = None) -> OracleResult:
    """Exact minimum energy and its canonic (prefix ``00``) minimizers.

    In skew mode the scan covers skew-symmetric coordinates only; in full mode
    all coordinates, with minimizers split into skew and non-skew ones.
    """
    _check_budget(L, skew_only, max_free)
    best, seqs = _collect(L, skew_only, -1)
    n_skew = sum(is_skew_symmetric(BinarySequence(q)) for q in seqs)
    return OracleResult(L, skew_only, best, tuple(seqs), n_skew, len(seqs) - n_skew)


def count_canonic(L: int, bound: int, skew_only: bool = True, max_free: int | None = None) -> int:
    """Number of canonic coordinates with energy <= bound."""
    if bound < 0:
        raise ValueError("energy bound must be >= 0")
    _check_budget(L, skew_only, max_free)
    _best, count, _ = _scan(L, skew_only, bound, 1)
    return int(count)
