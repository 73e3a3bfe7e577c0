"""Legendre-sequence constructions: rotation, periodic appending, grid search."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .sequence import BinarySequence, correlations_of_spins

SMALL_GRID = ((0.0, 0.5), (0.0, 0.1))
LARGE_GRID = ((0.2, 0.24), (0.055, 0.063))
LARGE_P = 500
# guards floor(r * p) against values like 0.3 * 10 = 2.9999999999999996
_FLOOR_EPS = 1e-9


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def legendre_spins(p: int) -> np.ndarray:
    """+1 at quadratic residues, -1 at non-residues, +1 at index 0."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    spins = -np.ones(p, dtype=np.int64)
    spins[np.unique((np.arange(1, p, dtype=np.int64) ** 2) % p)] = 1
    spins[0] = 1
    return spins


def legendre_sequence(p: int) -> BinarySequence:
    return BinarySequence.from_spins(legendre_spins(p))


def _floor_frac(x: float, p: int) -> int:
    return math.floor(x * p + _FLOOR_EPS)


def rotate_append_spins(spins: np.ndarray, shift: int, extra: int) -> np.ndarray:
    rotated = np.roll(spins, -shift)
    if extra == 0:
        return rotated
    return np.concatenate([rotated, np.resize(rotated, extra)])


def rotate_append(seq: BinarySequence, r: float, t: float) -> BinarySequence:
    """Rotate left by floor(r*p), then append the first floor(t*p) symbols."""
    if not 0 <= r <= 1 or not 0 <= t < 1:
        raise ValueError("r must be in [0, 1] and t in [0, 1)")
    p = len(seq)
    out = rotate_append_spins(seq.spins, _floor_frac(r, p) % p, _floor_frac(t, p))
    return BinarySequence.from_spins(out)


def _energy(spins: np.ndarray) -> int:
    c = correlations_of_spins(spins)
    return int(np.dot(c, c))


@dataclass(frozen=True)
class GridPoint:
    p: int
    r: float
    t: float
    length: int
    energy: int

    @property
    def merit(self) -> float:
        return self.length**2 / (2.0 * self.energy)


def grid_points(p: int, r_range: tuple[float, float], t_range: tuple[float, float]) -> list[GridPoint]:
    """Evaluate every (r, t) on the 1/p lattice inside the two closed ranges."""
    spins = legendre_spins(p)
    shifts = range(math.ceil(r_range[0] * p - _FLOOR_EPS), _floor_frac(r_range[1], p) + 1)
    extras = range(math.ceil(t_range[0] * p - _FLOOR_EPS), _floor_frac(t_range[1], p) + 1)
    if len(shifts) == 0 or len(extras) == 0:
        raise ValueError(f"empty grid for p={p}: r {r_range}, t {t_range}")
    out = []
    for k in shifts:
        rotated = np.roll(spins, -(k % p))
        for j in extras:
            seq = rotated if j == 0 else np.concatenate([rotated, np.resize(rotated, j)])
            out.append(GridPoint(p, k / p, j / p, p + j, _energy(seq)))
    return out


def default_grid(p: int) -> tuple[tuple[float, float], tuple[float, float]]:
    return LARGE_GRID if p >= LARGE_P else SMALL_GRID


@dataclass(frozen=True)
class GridResult:
    merit: float
    r: float
    t: float
    best: GridPoint


def grid_search_merit(p: int, r_range: tuple[float, float] | None = None,
                      t_range: tuple[float, float] | None = None) -> GridResult:
    """Best merit factor over the rotation/append lattice for prime p."""
    dr, dt = default_grid(p)
    pts = grid_points(p, r_range or dr, t_range or dt)
    best = max(pts, key=lambda g: (g.merit, -g.r, -g.t))
    return GridResult(best.merit, best.r, best.t, best)


def grid_csv(points: list[GridPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "r", "t", "L_out", "E", "F"])
    for g in points:
        w.writerow([g.p, f"{g.r:.6f}", f"{g.t:.6f}", g.length, g.energy, f"{g.merit:.5f}"])
    return buf.getvalue()
