"""Independent, deliberately naive reference implementations used by the tests."""

import itertools


def spins_of(bits: str) -> list[int]:
    return [1 if b == "0" else -1 for b in bits]


def naive_corr(bits: str) -> list[int]:
    s = spins_of(bits)
    n = len(s)
    return [sum(s[i] * s[i + k] for i in range(n - k)) for k in range(1, n)]


def naive_energy(bits: str) -> int:
    return sum(c * c for c in naive_corr(bits))


def naive_expand(half: str) -> str:
    """Skew expansion written from the 1-based index relation."""
    lp = len(half)
    L = 2 * lp - 1
    b = {i + 1: half[i] for i in range(lp)}
    for i in range(1, lp):
        src = b[lp - i]
        b[lp + i] = ("1" if src == "0" else "0") if i % 2 == 1 else src
    return "".join(b[j] for j in range(1, L + 1))


def brute_optimum(L: int, skew: bool):
    """Minimum energy and all minimizers with prefix 00, by plain enumeration."""
    n = (L + 1) // 2 if skew else L
    best, sols = None, []
    for tail in itertools.product("01", repeat=n - 2):
        coord = "00" + "".join(tail)
        seq = naive_expand(coord) if skew else coord
        e = naive_energy(seq)
        if best is None or e < best:
            best, sols = e, [seq]
        elif e == best:
            sols.append(seq)
    return best, sorted(sols)
