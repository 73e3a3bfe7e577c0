"""Waiting-time models and performance prediction for stochastic solvers.

Runtimes (or probe counts) to reach a target are modelled as exponential
with mean ``m``; a sum of N such runs is gamma distributed. Durations are
unit-agnostic here as long as all arguments share a unit; the CLI works in
seconds.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

_EPS = 1e-15
_TINY = 1e-300


def _check_mean(m: float) -> None:
    if not m > 0 or math.isinf(m):
        raise ValueError(f"mean must be positive and finite, got {m}")


def exp_cdf(tau: float, mean: float) -> float:
    """P(T <= tau) for an exponential waiting time with the given mean."""
    _check_mean(mean)
    if tau < 0:
        raise ValueError("tau must be >= 0")
    return -math.expm1(-tau / mean)


def geometric_cdf(tau: int, p: float) -> float:
    """P(T <= tau) when each trial succeeds independently with probability p."""
    if not 0 < p <= 1:
        raise ValueError(f"p must be in (0, 1], got {p}")
    if tau < 1 or int(tau) != tau:
        raise ValueError("tau must be a positive integer")
    if p == 1:
        return 1.0
    return -math.expm1(tau * math.log1p(-p))


def hit_ratio_predicted(t_lmt: float, mean: float, load_factor: float = 1.0) -> float:
    """Predicted fraction of trials that reach the target within ``t_lmt``.

    A shared machine slows each trial down by ``load_factor``, so only
    ``t_lmt / load_factor`` of effective time is available.
    """
    if load_factor < 1:
        raise ValueError("load_factor must be >= 1")
    if t_lmt < 0:
        raise ValueError("t_lmt must be >= 0")
    return exp_cdf(t_lmt / load_factor, mean)


def hits_predicted(n_trials: int, hit_ratio: float) -> int:
    return math.floor(n_trials * hit_ratio)


def processors_needed(n_c: int, hit_ratio: float) -> int:
    """Processors to launch so that about ``n_c`` of them reach the target."""
    if not 0 < hit_ratio <= 1:
        raise ValueError(f"hit ratio must be in (0, 1], got {hit_ratio}")
    # round off float noise so that exact ratios do not bump the ceiling
    return math.ceil(round(n_c / hit_ratio, 9))


# --- gamma distribution ------------------------------------------------------

def _lower_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(10000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_fraction(a: float, x: float) -> float:
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def pgamma(q: float, shape: float, rate: float = 1.0) -> float:
    """Gamma CDF: the regularized lower incomplete gamma P(shape, q * rate)."""
    if shape <= 0 or rate <= 0:
        raise ValueError("shape and rate must be positive")
    if q < 0:
        raise ValueError("q must be >= 0")
    x = q * rate
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < shape + 1.0:
        return min(1.0, _lower_series(shape, x))
    return max(0.0, 1.0 - _upper_fraction(shape, x))


def _gamma_pdf(x: float, shape: float) -> float:
    return math.exp((shape - 1.0) * math.log(x) - x - math.lgamma(shape))


def qgamma(p: float, shape: float, rate: float = 1.0) -> float:
    """Quantile of the gamma distribution (rate parameterization)."""
    if shape <= 0 or rate <= 0:
        raise ValueError("shape and rate must be positive")
    if not 0 <= p < 1:
        if p == 1:
            raise OverflowError("the gamma quantile at p = 1 is infinite")
        raise ValueError(f"p must be in [0, 1), got {p}")
    if p == 0:
        return 0.0
    lo, hi = 0.0, max(1.0, shape)
    while pgamma(hi, shape) < p:
        lo, hi = hi, 2.0 * hi
    if lo == 0.0:
        # small quantiles: shrink geometrically so the bracket stays relative
        lo = hi
        while lo > 1e-300 and pgamma(lo, shape) >= p:
            lo *= 0.5
    # bisection (geometric while the bracket spans orders of magnitude), then
    # Newton steps kept inside the bracket
    for _ in range(200):
        mid = math.sqrt(lo * hi) if lo > 0 and hi > 4 * lo else 0.5 * (lo + hi)
        if pgamma(mid, shape) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-6 * hi:
            break
    x = 0.5 * (lo + hi)
    for _ in range(50):
        f = pgamma(x, shape) - p
        dens = _gamma_pdf(x, shape)
        if dens <= 0:
            break
        if f < 0:
            lo = max(lo, x)
        else:
            hi = min(hi, x)
        nxt = x - f / dens
        if not lo <= nxt <= hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= 1e-15 * abs(x):
            x = nxt
            break
        x = nxt
    return x / rate


def solvability_serial(p: float, n: int, mean: float) -> float:
    """Time within which N back-to-back runs all finish, with probability p."""
    _check_mean(mean)
    if n < 1:
        raise ValueError("n must be >= 1")
    return qgamma(p, n, 1.0 / mean)


def solvability_single(hit_ratio: float, mean: float) -> float:
    _check_mean(mean)
    return qgamma(hit_ratio, 1, 1.0 / mean)


# --- asymptotic fits ---------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticModel:
    """mean(L) = a * b**L"""

    a: float
    b: float
    unit: str = "probes"

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")
        if not self.b > 1:
            raise ValueError("b must be > 1")
        if self.unit not in ("probes", "seconds"):
            raise ValueError(f"unknown unit {self.unit!r}")

    def predict(self, L: float) -> float:
        return self.a * self.b**L

    def __str__(self) -> str:
        return f"{self.a:.6g}*{self.b:.6g}^L ({self.unit})"


def fit_exponential_model(points: Iterable[tuple[float, float]], unit: str = "probes") -> AsymptoticModel:
    """Least-squares line through (L, log mean)."""
    pts = list(points)
    Ls = np.array([p[0] for p in pts], dtype=float)
    means = np.array([p[1] for p in pts], dtype=float)
    if len(np.unique(Ls)) < 2:
        raise ValueError("need at least two distinct L values")
    if np.any(means <= 0) or not np.all(np.isfinite(means)):
        raise ValueError("means must be positive and finite")
    slope, intercept = np.polyfit(Ls, np.log(means), 1)
    return AsymptoticModel(float(math.exp(intercept)), float(math.exp(slope)), unit)


def ci_rule_of_thumb(mean: float) -> tuple[float, float]:
    """Approximate 95% interval of a sample mean from 100 exponential variates."""
    if mean < 0:
        raise ValueError("mean must be >= 0")
    return 0.8 * mean, 1.2 * mean


def sample_mean_ci(values: Sequence[float], z: float = 1.96) -> tuple[float, float, float]:
    """Mean with a normal-approximation confidence interval."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("no values")
    m = float(arr.mean())
    if arr.size == 1:
        return m, m, m
    half = z * float(arr.std(ddof=1)) / math.sqrt(arr.size)
    return m, m - half, m + half


@dataclass
class PredictionReport:
    L: int
    mean: float
    t_lmt: float
    load_factor: float
    n_trials: int
    n_c: int
    hit_ratio: float
    hits: int
    processors_needed: int
    solvability_single: float
    solvability_serial: float

    def to_dict(self) -> dict:
        return asdict(self)


def predict(model: AsymptoticModel, L: int, t_lmt: float, load_factor: float = 1.0,
            n_trials: int = 100, n_c: int = 100, p_serial: float = 0.99) -> PredictionReport:
    """Everything the waiting-time model says about one instance size."""
    m = model.predict(L)
    r = hit_ratio_predicted(t_lmt, m, load_factor)
    n_proc = processors_needed(n_c, r) if r > 0 else 0
    single = solvability_single(r, m) if r < 1 else math.inf
    return PredictionReport(
        L=L, mean=m, t_lmt=t_lmt, load_factor=load_factor, n_trials=n_trials, n_c=n_c,
        hit_ratio=r, hits=hits_predicted(n_trials, r), processors_needed=n_proc,
        solvability_single=single, solvability_serial=solvability_serial(p_serial, n_trials, m),
    )
