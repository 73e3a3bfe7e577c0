import numpy as np
from hypothesis import given, settings, strategies as st

from labs._kernels import (
    bits_to_spins,
    corr_full,
    energy_of,
    full_commit,
    full_delta_energy,
    half_to_spins,
    hash_bits,
    pack_words,
    skew_commit,
    skew_delta_energy,
    table_alloc,
    table_contains_flip,
    table_grow,
    table_insert,
    zobrist_table,
)
from labs.sequence import BinarySequence, energy, expand_skew
from oracles import naive_energy


def _arr(bits):
    return np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")


def _toggle(bits, i):
    return bits[:i] + ("1" if bits[i] == "0" else "0") + bits[i + 1:]


@given(st.text(alphabet="01", min_size=1, max_size=40), st.data())
@settings(max_examples=2000, deadline=None)
def test_skew_delta_and_commit(half, data):
    L = 2 * len(half) - 1
    s = half_to_spins(_arr(half), L)
    assert BinarySequence.from_spins(s) == expand_skew(half)
    C = corr_full(s)
    m = data.draw(st.integers(0, len(half) - 1))
    expect = energy(expand_skew(_toggle(half, m)))
    assert skew_delta_energy(s, C, L, m) == expect
    assert skew_commit(s, C, L, m) == expect
    assert energy_of(C) == expect
    assert np.array_equal(C, corr_full(s))


@given(st.text(alphabet="01", min_size=2, max_size=40), st.data())
@settings(max_examples=2000, deadline=None)
def test_full_delta_and_commit(bits, data):
    s = bits_to_spins(_arr(bits))
    C = corr_full(s)
    p = data.draw(st.integers(0, len(bits) - 1))
    expect = naive_energy(_toggle(bits, p))
    assert full_delta_energy(s, C, len(bits), p) == expect
    assert full_commit(s, C, len(bits), p) == expect
    assert np.array_equal(C, corr_full(s))


def test_hash_set_membership_and_growth():
    rng = np.random.default_rng(0)
    n = 70  # two words per key
    W = 2
    zob = zobrist_table(n)
    keys, hs, used = table_alloc(16, W)
    stored = set()
    for _ in range(200):
        bits = rng.integers(0, 2, n).astype(np.uint8)
        text = bits.tobytes()
        if text in stored:
            continue
        if 2 * (len(stored) + 1) > used.shape[0]:
            keys, hs, used = table_grow(keys, hs, used)
        table_insert(keys, hs, used, pack_words(bits, W), np.uint64(hash_bits(bits, zob)))
        stored.add(text)
    assert used.sum() == len(stored)
    for text in list(stored)[:50]:
        bits = np.frombuffer(text, dtype=np.uint8).copy()
        words, h = pack_words(bits, W), np.uint64(hash_bits(bits, zob))
        assert table_contains_flip(keys, hs, used, words, h, -1)
        # a toggled key (bit 65 lives in the second word) is a different coordinate
        m = 65
        bits2 = bits.copy()
        bits2[m] ^= 1
        expected = bits2.tobytes() in stored
        assert table_contains_flip(keys, hs, used, words, h ^ zob[m], m) == expected


def test_zobrist_incremental_hash():
    zob = zobrist_table(10)
    bits = np.array([1, 0, 1, 1, 0, 0, 0, 1, 0, 1], dtype=np.uint8)
    h = np.uint64(hash_bits(bits, zob))
    bits[3] ^= 1
    assert hash_bits(bits, zob) == h ^ zob[3]
