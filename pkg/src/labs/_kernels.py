"""Numba kernels shared by the solvers and the exhaustive oracle.

Spins are int64 arrays of +1/-1. ``C`` arrays have length L and hold C_k at
index k (index 0 unused). Under skew-symmetry every odd-lag C_k is zero, so
the skew kernels touch even lags only.
"""

from __future__ import annotations

import time

import numpy as np
from numba import njit, objmode

from .rng import splitmix64_next


@njit(cache=True)
def now():
    with objmode(t="float64"):
        t = time.perf_counter()
    return t


@njit(cache=True)
def half_to_spins(half, L):
    """Expand half bits (uint8, length L') into full skew-symmetric spins."""
    lp = half.shape[0]
    s = np.empty(L, dtype=np.int64)
    for m in range(lp):
        s[m] = 1 - 2 * np.int64(half[m])
    for i in range(1, lp):
        v = s[lp - 1 - i]
        s[lp - 1 + i] = -v if i % 2 == 1 else v
    return s


@njit(cache=True)
def bits_to_spins(bits):
    n = bits.shape[0]
    s = np.empty(n, dtype=np.int64)
    for i in range(n):
        s[i] = 1 - 2 * np.int64(bits[i])
    return s


@njit(cache=True)
def corr_full(s):
    L = s.shape[0]
    C = np.zeros(L, dtype=np.int64)
    for k in range(1, L):
        acc = 0
        for i in range(L - k):
            acc += s[i] * s[i + k]
        C[k] = acc
    return C


@njit(cache=True)
def energy_of(C):
    e = 0
    for k in range(1, C.shape[0]):
        e += C[k] * C[k]
    return e


@njit(cache=True)
def skew_delta_energy(s, C, L, m):
    """Energy after flipping half bit m (0-based) without committing."""
    p = m
    q = L - 1 - m
    e = 0
    sp = s[p]
    sq = s[q]
    for k in range(2, L, 2):
        d = 0
        if p + k < L:
            d += s[p + k]
        if p - k >= 0:
            d += s[p - k]
        d *= sp
        if q != p:
            t = 0
            if q + k < L:
                t += s[q + k]
            if q - k >= 0:
                t += s[q - k]
            d += sq * t
            if q - p == k:
                # the (p, q) product flips twice and is unchanged
                d -= 2 * sp * sq
        c = C[k] - 2 * d
        e += c * c
    return e


@njit(cache=True)
def skew_commit(s, C, L, m):
    p = m
    q = L - 1 - m
    sp = s[p]
    sq = s[q]
    e = 0
    for k in range(2, L, 2):
        d = 0
        if p + k < L:
            d += s[p + k]
        if p - k >= 0:
            d += s[p - k]
        d *= sp
        if q != p:
            t = 0
            if q + k < L:
                t += s[q + k]
            if q - k >= 0:
                t += s[q - k]
            d += sq * t
            if q - p == k:
                d -= 2 * sp * sq
        C[k] -= 2 * d
        e += C[k] * C[k]
    s[p] = -sp
    if q != p:
        s[q] = -sq
    return e


@njit(cache=True)
def full_delta_energy(s, C, L, p):
    e = 0
    sp = s[p]
    for k in range(1, L):
        d = 0
        if p + k < L:
            d += s[p + k]
        if p - k >= 0:
            d += s[p - k]
        c = C[k] - 2 * sp * d
        e += c * c
    return e


@njit(cache=True)
def full_commit(s, C, L, p):
    sp = s[p]
    e = 0
    for k in range(1, L):
        d = 0
        if p + k < L:
            d += s[p + k]
        if p - k >= 0:
            d += s[p - k]
        C[k] -= 2 * sp * d
        e += C[k] * C[k]
    s[p] = -sp
    return e


# --- coordinate keys and the visited set -------------------------------------

@njit(cache=True)
def zobrist_table(n):
    """Fixed per-position hash constants (independent of the trial seed)."""
    z = np.empty(n, dtype=np.uint64)
    x = np.uint64(0x5EED5EED5EED5EED)
    for i in range(n):
        x, v = splitmix64_next(x)
        z[i] = v
    return z


@njit(cache=True)
def pack_words(bits, W):
    words = np.zeros(W, dtype=np.uint64)
    for m in range(bits.shape[0]):
        if bits[m]:
            words[m >> 6] |= np.uint64(1) << np.uint64(m & 63)
    return words


@njit(cache=True)
def hash_bits(bits, zob):
    h = np.uint64(0)
    for m in range(bits.shape[0]):
        if bits[m]:
            h ^= zob[m]
    return h


@njit(cache=True)
def table_alloc(cap, W):
    return (
        np.zeros((cap, W), dtype=np.uint64),
        np.zeros(cap, dtype=np.uint64),
        np.zeros(cap, dtype=np.uint8),
    )


@njit(cache=True)
def table_bytes(cap, W):
    return cap * (8 * W + 9)


@njit(cache=True)
def table_contains_flip(keys, hs, used, words, h, m):
    """Is ``words`` with bit m toggled (hash h) in the table? m < 0: no toggle."""
    mask = used.shape[0] - 1
    W = words.shape[0]
    i = np.int64(h & np.uint64(mask))
    fw = -1
    fb = np.uint64(0)
    if m >= 0:
        fw = m >> 6
        fb = np.uint64(1) << np.uint64(m & 63)
    while used[i]:
        if hs[i] == h:
            same = True
            for w in range(W):
                v = words[w]
                if w == fw:
                    v ^= fb
                if keys[i, w] != v:
                    same = False
                    break
            if same:
                return True
        i = (i + 1) & mask
    return False


@njit(cache=True)
def table_insert(keys, hs, used, words, h):
    mask = used.shape[0] - 1
    i = np.int64(h & np.uint64(mask))
    while used[i]:
        i = (i + 1) & mask
    used[i] = 1
    hs[i] = h
    for w in range(words.shape[0]):
        keys[i, w] = words[w]


@njit(cache=True)
def table_grow(keys, hs, used):
    cap = used.shape[0] * 2
    W = keys.shape[1]
    nk, nh, nu = table_alloc(cap, W)
    for i in range(used.shape[0]):
        if used[i]:
            table_insert(nk, nh, nu, keys[i], hs[i])
    return nk, nh, nu
