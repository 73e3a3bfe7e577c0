"""Portable seedable RNG: xoshiro256** seeded through splitmix64.

The generator state is a ``uint64[4]`` array so the same functions run inside
numba kernels and from plain Python via :class:`Xoshiro256`. Streams are
identical on every platform for a given 64-bit seed.
"""

from __future__ import annotations

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True)
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit(cache=True)
def splitmix64_next(x):
    """Advance a splitmix64 counter; returns (new_counter, output)."""
    x = x + _GOLDEN
    z = x
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return x, z ^ (z >> np.uint64(31))


@njit(cache=True)
def seed_state(seed):
    state = np.empty(4, dtype=np.uint64)
    x = np.uint64(seed)
    for i in range(4):
        x, z = splitmix64_next(x)
        state[i] = z
    return state


@njit(cache=True)
def next_u64(state):
    s0 = state[0]
    s1 = state[1]
    s2 = state[2]
    s3 = state[3]
    result = _rotl(s1 * np.uint64(5), 7) * np.uint64(9)
    t = s1 << np.uint64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3
    return result


@njit(cache=True)
def rand_below(state, n):
    """Unbiased integer in [0, n) by rejection of the low remainder band."""
    un = np.uint64(n)
    threshold = (np.uint64(0) - un) % un
    while True:
        r = next_u64(state)
        if r >= threshold:
            return np.int64(r % un)


@njit(cache=True)
def rand_float(state):
    """Double in [0, 1) with 53 random bits."""
    return np.float64(next_u64(state) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def shuffle_inplace(state, arr):
    for i in range(arr.shape[0] - 1, 0, -1):
        j = rand_below(state, i + 1)
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


@njit(cache=True)
def random_bits(state, n):
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        out[i] = np.uint8(next_u64(state) >> np.uint64(63))
    return out


class Xoshiro256:
    """Python handle on a xoshiro256** stream."""

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self.state = seed_state(np.uint64(self.seed))

    def next_u64(self) -> int:
        return int(next_u64(self.state))

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        return int(rand_below(self.state, n))

    def random(self) -> float:
        return float(rand_float(self.state))

    def bits(self, n: int) -> np.ndarray:
        return random_bits(self.state, n)
