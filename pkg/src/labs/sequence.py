"""Binary sequences, aperiodic autocorrelation energy and the symmetries of LABS.

Bit convention (fixed everywhere in the package): bit ``0`` is the spin
``s = +1`` and bit ``1`` is ``s = -1``. Indices in the public API are 1-based
where they name a sequence position, matching the usual ``s_1 ... s_L``
notation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_INCREMENTAL_L = 4096


class InfiniteMeritFactor(ArithmeticError):
    """Raised when a sequence has zero energy (only possible for L == 1)."""


def _check_bits(bits: str) -> None:
    if not bits:
        raise ValueError("sequence must have length >= 1")
    if bits.strip("01"):
        raise ValueError(f"sequence text must contain only '0'/'1': {bits!r}")


@dataclass(frozen=True)
class BinarySequence:
    bits: str

    def __post_init__(self):
        _check_bits(self.bits)

    @classmethod
    def from_spins(cls, spins) -> "BinarySequence":
        arr = np.asarray(spins)
        if not np.all(np.abs(arr) == 1):
            raise ValueError("spins must be +1/-1")
        return cls("".join("0" if v > 0 else "1" for v in arr.tolist()))

    @classmethod
    def from_array(cls, bits) -> "BinarySequence":
        return cls("".join("1" if b else "0" for b in np.asarray(bits).tolist()))

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return self.bits

    @property
    def length(self) -> int:
        return len(self.bits)

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.bits.encode("ascii"), dtype=np.uint8) - ord("0")

    @property
    def spins(self) -> np.ndarray:
        return (1 - 2 * self.to_array().astype(np.int64)).astype(np.int64)


@dataclass(frozen=True)
class SkewHalf:
    """The free half ``b_1 .. b_{L'}`` of a skew-symmetric sequence, L' = (L+1)/2."""

    bits: str

    def __post_init__(self):
        _check_bits(self.bits)

    @property
    def full_length(self) -> int:
        return 2 * len(self.bits) - 1

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return self.bits


@dataclass(frozen=True)
class RleSolution:
    runs: tuple[int, ...]

    def __post_init__(self):
        if not self.runs:
            raise ValueError("run list is empty")
        if any(int(r) < 1 for r in self.runs):
            raise ValueError("every run must be >= 1")

    @property
    def implied_half_length(self) -> int:
        return sum(self.runs)

    @classmethod
    def parse(cls, text: str) -> "RleSolution":
        parts = [p.strip() for p in text.split(",")]
        if not parts or any(not p for p in parts):
            raise ValueError(f"malformed run list: {text!r}")
        try:
            return cls(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise ValueError(f"malformed run list: {text!r}") from exc

    def __str__(self) -> str:
        return ",".join(str(r) for r in self.runs)


@dataclass
class CorrelationState:
    """A sequence together with its cached C_1..C_{L-1} and energy."""

    seq: BinarySequence
    corr: np.ndarray = field(repr=False)
    energy: int

    def __eq__(self, other):
        if not isinstance(other, CorrelationState):
            return NotImplemented
        return (
            self.seq == other.seq
            and self.energy == other.energy
            and np.array_equal(self.corr, other.corr)
        )


def correlations_of_spins(spins: np.ndarray) -> np.ndarray:
    """C_k for k = 1..L-1 as an int64 vector (index 0 holds C_1)."""
    s = np.asarray(spins, dtype=np.int64)
    n = s.shape[0]
    if n == 1:
        return np.zeros(0, dtype=np.int64)
    full = np.correlate(s, s, mode="full")
    return full[n:].astype(np.int64)


def compute_correlations(seq: BinarySequence) -> CorrelationState:
    corr = correlations_of_spins(seq.spins)
    return CorrelationState(seq=seq, corr=corr, energy=int(np.dot(corr, corr)))


def energy(seq: BinarySequence) -> int:
    corr = correlations_of_spins(seq.spins)
    return int(np.dot(corr, corr))


def merit_factor(seq: BinarySequence) -> float:
    return merit_from_energy(len(seq), energy(seq))


def merit_from_energy(length: int, e: int) -> float:
    if e == 0:
        raise InfiniteMeritFactor(f"zero energy at L={length}")
    return length * length / (2.0 * e)


def flip_update(state: CorrelationState, i: int) -> CorrelationState:
    """Return the state with position ``i`` (1-based) flipped, in O(L).

    For each lag k the two products touching position i change sign, so
    C_k moves by -2*s_i*(s_{i+k} + s_{i-k}) with out-of-range terms dropped.
    """
    n = len(state.seq)
    if n > MAX_INCREMENTAL_L:
        raise ValueError(f"L={n} exceeds the incremental limit {MAX_INCREMENTAL_L}")
    if not 1 <= i <= n:
        raise IndexError(f"flip index {i} out of range 1..{n}")
    s = state.seq.spins
    p = i - 1
    neigh = np.zeros(n - 1, dtype=np.int64)
    right = s[p + 1 :]
    neigh[: right.shape[0]] += right
    left = s[:p][::-1]
    neigh[: left.shape[0]] += left
    corr = state.corr - 2 * s[p] * neigh
    bits = list(state.seq.bits)
    bits[p] = "1" if bits[p] == "0" else "0"
    return CorrelationState(
        seq=BinarySequence("".join(bits)), corr=corr, energy=int(np.dot(corr, corr))
    )


def expand_skew(half: SkewHalf | str) -> BinarySequence:
    """Expand b_1..b_{L'} to the full skew-symmetric sequence of length 2L'-1.

    b_{L'+i} is the complement of b_{L'-i} for odd i and a copy for even i.
    """
    h = half.bits if isinstance(half, SkewHalf) else half
    _check_bits(h)
    lp = len(h)
    tail = []
    for i in range(1, lp):
        b = h[lp - 1 - i]
        tail.append(("1" if b == "0" else "0") if i % 2 else b)
    return BinarySequence(h + "".join(tail))


def skew_half_of(seq: BinarySequence) -> SkewHalf:
    if not is_skew_symmetric(seq):
        raise ValueError("sequence is not skew-symmetric")
    return SkewHalf(seq.bits[: (len(seq) + 1) // 2])


def is_skew_symmetric(seq: BinarySequence) -> bool:
    n = len(seq)
    if n % 2 == 0:
        return False
    lp = (n + 1) // 2
    return expand_skew(seq.bits[:lp]) == seq


def hamming(a: BinarySequence, b: BinarySequence) -> int:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a.bits, b.bits))


def complement(seq: BinarySequence) -> BinarySequence:
    return BinarySequence(seq.bits.translate(str.maketrans("01", "10")))


def reversal(seq: BinarySequence) -> BinarySequence:
    return BinarySequence(seq.bits[::-1])


def alternate(seq: BinarySequence) -> BinarySequence:
    """Negate every second spin (positions 2, 4, ...); C_k -> (-1)^k C_k."""
    return BinarySequence(
        "".join(
            ("1" if b == "0" else "0") if i % 2 else b for i, b in enumerate(seq.bits)
        )
    )


def symmetry_images(seq: BinarySequence) -> tuple[BinarySequence, ...]:
    """Identity, complement, reversal, complement of the reversal."""
    r = reversal(seq)
    return (seq, complement(seq), r, complement(r))


@dataclass(frozen=True)
class Canonic:
    seq: BinarySequence
    in_quadrant_00: bool


def canonicalize(seq: BinarySequence) -> Canonic:
    """Orbit representative: the lexicographically smallest image with prefix 00.

    When no image starts with 00 the smallest image overall is returned with
    ``in_quadrant_00`` False.
    """
    if len(seq) < 2:
        raise ValueError("canonic form needs L >= 2")
    images = sorted({img.bits for img in symmetry_images(seq)})
    for bits in images:
        if bits.startswith("00"):
            return Canonic(BinarySequence(bits), True)
    return Canonic(BinarySequence(images[0]), False)


def rle_encode(half: SkewHalf | str) -> RleSolution:
    """Run lengths of the half coordinate; the first run must be of 0's."""
    h = half.bits if isinstance(half, SkewHalf) else half
    _check_bits(h)
    if h[0] != "0":
        raise ValueError("run-length form starts with a run of 0's")
    runs = []
    count = 1
    for prev, cur in zip(h, h[1:]):
        if cur == prev:
            count += 1
        else:
            runs.append(count)
            count = 1
    runs.append(count)
    return RleSolution(tuple(runs))


def rle_decode(rle: RleSolution | str, half_length: int | None = None) -> SkewHalf:
    if isinstance(rle, str):
        rle = RleSolution.parse(rle)
    if half_length is not None and rle.implied_half_length != half_length:
        raise ValueError(
            f"runs sum to {rle.implied_half_length}, expected half length {half_length}"
        )
    out = []
    for k, run in enumerate(rle.runs):
        out.append(("0" if k % 2 == 0 else "1") * run)
    return SkewHalf("".join(out))
