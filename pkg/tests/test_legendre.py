import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from labs.legendre import (
    GridPoint,
    default_grid,
    grid_csv,
    grid_points,
    grid_search_merit,
    is_prime,
    legendre_sequence,
    legendre_spins,
    rotate_append,
)
from labs.sequence import BinarySequence, energy, merit_factor, reversal
from oracles import naive_energy

PRIMES = [p for p in range(3, 200) if is_prime(p)]


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_residue_pattern():
    assert legendre_spins(7).tolist() == [1, 1, 1, -1, 1, -1, -1]
    assert legendre_sequence(7).bits == "0001011"
    s5 = legendre_spins(5)
    assert {i for i in range(1, 5) if s5[i] == 1} == {1, 4}
    for bad in (1, 2, 9, 15, 91):
        with pytest.raises(ValueError):
            legendre_sequence(bad)


@pytest.mark.parametrize("p", PRIMES)
def test_residues_match_euler_criterion(p):
    s = legendre_spins(p)
    for a in range(1, p):
        assert s[a] == (1 if pow(a, (p - 1) // 2, p) == 1 else -1)


def test_rotation_identities():
    seq = legendre_sequence(31)
    assert rotate_append(seq, 0, 0) == seq
    assert rotate_append(seq, 1, 0) == seq
    assert rotate_append(seq, 0.5, 0).bits == seq.bits[15:] + seq.bits[:15]
    out = rotate_append(seq, 0.25, 0.1)
    assert len(out) == 31 + 3
    assert out.bits[31:] == out.bits[:3]
    with pytest.raises(ValueError):
        rotate_append(seq, 1.5, 0)


@given(st.sampled_from(PRIMES), st.integers(0, 400), st.integers(0, 400))
@settings(max_examples=500, deadline=None)
def test_grid_energy_matches_direct_evaluation(p, k, j):
    k %= p
    j %= p
    pts = grid_points(p, (k / p, k / p), (j / p, j / p))
    assert len(pts) == 1
    g = pts[0]
    seq = rotate_append(legendre_sequence(p), k / p, j / p)
    assert g.energy == energy(seq) == naive_energy(seq.bits)
    assert g.length == p + j


def test_quarter_rotation_large_prime():
    f = merit_factor(rotate_append(legendre_sequence(1019), 0.25, 0))
    assert 5.7 <= f <= 6.3


def test_p31_best():
    res = grid_search_merit(31)
    assert res.merit == pytest.approx(6.40667, abs=0.01)
    assert res.best.energy == 75
    assert res.best.length == 31


def _brute_best_merit(p, r_max, t_max):
    spins = [1] + [1 if pow(a, (p - 1) // 2, p) == 1 else -1 for a in range(1, p)]
    best = 0.0
    for k in range(int(r_max * p) + 1):
        rot = spins[k:] + spins[:k]
        for j in range(int(t_max * p) + 1):
            seq = rot + rot[:j]
            bits = "".join("0" if v == 1 else "1" for v in seq)
            best = max(best, len(seq) ** 2 / (2 * naive_energy(bits)))
    return best


@pytest.mark.parametrize("p,merit", [(13, 169 / 36), (17, 324 / 98), (19, 361 / 74), (23, 529 / 118)])
def test_small_prime_best(p, merit):
    # exact values fixed from the plain enumeration below
    assert grid_search_merit(p).merit == pytest.approx(merit, rel=1e-12)
    assert _brute_best_merit(p, 0.5, 0.1) == pytest.approx(merit, rel=1e-12)


def test_best_dominates_quarter_rotation():
    for p in (31, 1019):
        quarter = merit_factor(rotate_append(legendre_sequence(p), 0.25, 0))
        grid = grid_search_merit(p, (0.0, 0.5), (0.0, 0.0))
        assert grid.merit >= quarter


@pytest.mark.parametrize("p", [1009, 1013, 1019, 1021, 1031])
def test_large_prime_grid(p):
    t0 = time.perf_counter()
    res = grid_search_merit(p)
    assert 6.22 <= res.merit <= 6.35
    assert time.perf_counter() - t0 < 60


def test_reversal_of_grid_sequence_has_same_merit():
    seq = rotate_append(legendre_sequence(43), 0.2, 0.05)
    assert merit_factor(reversal(seq)) == merit_factor(seq)


def test_empty_grid_and_csv():
    with pytest.raises(ValueError):
        grid_points(31, (0.5, 0.4), (0, 0))
    text = grid_csv([GridPoint(7, 0.0, 0.0, 7, 3)])
    assert text.splitlines() == ["p,r,t,L_out,E,F", "7,0.000000,0.000000,7,3,8.16667"]
