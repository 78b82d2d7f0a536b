"""r-variation seminorms and lambda-jump counts of finite time series.

Samples are complex scalars or fixed-length complex vectors (the Hilbert
space l^2 of the vector index); norms of increments are Euclidean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from . import _backend
from .errors import ParameterError, SizeError

EXHAUSTIVE_MAX_LEN = 14


@dataclass(frozen=True, eq=False)
class TimeSeries:
    times: np.ndarray
    samples: np.ndarray  # shape (T, dim)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).ravel()
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[0] != times.shape[0]:
            raise ParameterError("need exactly one sample per time")
        if np.any(np.diff(times) <= 0):
            raise ParameterError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "samples", np.ascontiguousarray(samples))

    def __len__(self):
        return self.times.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @classmethod
    def from_samples(cls, samples, times=None) -> "TimeSeries":
        samples = np.asarray(samples, dtype=complex)
        if times is None:
            times = np.arange(samples.shape[0], dtype=float)
        return cls(times, samples)

    def __add__(self, other):
        if not np.array_equal(self.times, other.times):
            raise ParameterError("series have different time sets")
        return TimeSeries(self.times, self.samples + other.samples)

    def to_json(self) -> dict:
        return {
            "times": self.times.tolist(),
            "dim": self.dim,
            "samples": [[[float(z.real), float(z.imag)] for z in row] for row in self.samples],
        }

    @classmethod
    def from_json(cls, obj) -> "TimeSeries":
        dim = int(obj["dim"])
        raw = np.asarray(obj["samples"], dtype=float)
        # accept [[re, im], ...] for dim 1 as well as [[[re, im], ...], ...]
        if raw.ndim == 2 and dim == 1:
            raw = raw[:, None, :]
        if raw.ndim != 3 or raw.shape[1] != dim or raw.shape[2] != 2:
            raise ParameterError("samples must be [[re, im] x dim] per time")
        return cls(np.asarray(obj["times"], dtype=float), raw[..., 0] + 1j * raw[..., 1])


def _check_r(r):
    if not r > 1:
        raise ParameterError(f"variation exponent must exceed 1, got {r}")


def variation_seminorm(series: TimeSeries, r: float, backend=None) -> float:
    """Exact V^r by the O(T^2) chain dynamic programme."""
    _check_r(r)
    if len(series) < 2:
        return 0.0
    k = _backend.get(backend)
    return float(k.variation_power(series.samples, float(r))) ** (1.0 / r)


def _subset_tables(series: TimeSeries):
    """Per-subset enumeration helpers for the brute-force oracles.

    Returns the pairwise increment norms and, for every bitmask of indices,
    a boolean table telling whether (i, j) are consecutive members.
    """
    T = len(series)
    if T > EXHAUSTIVE_MAX_LEN:
        raise SizeError(f"exhaustive search limited to {EXHAUSTIVE_MAX_LEN} points, got {T}")
    s = series.samples
    dist = np.linalg.norm(s[None, :, :] - s[:, None, :], axis=-1)
    masks = np.arange(1 << T, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(T)) & 1
    pairs = []
    for i in range(T):
        for j in range(i + 1, T):
            between = ((1 << j) - 1) ^ ((1 << (i + 1)) - 1)
            consecutive = (bits[:, i] & bits[:, j]).astype(bool) & ((masks & between) == 0)
            pairs.append((i, j, consecutive))
    return dist, bits, pairs


def variation_seminorm_exhaustive(series: TimeSeries, r: float) -> float:
    """Brute force over all 2^T subsequences; reference for the DP."""
    _check_r(r)
    dist, bits, pairs = _subset_tables(series)
    total = np.zeros(bits.shape[0])
    for i, j, consecutive in pairs:
        total += np.where(consecutive, dist[i, j] ** r, 0.0)
    return float(total.max()) ** (1.0 / r)


def variation_rows(values, r: float, backend=None) -> np.ndarray:
    """V^r along axis 1 of an array shaped (X, T) or (X, T, dim)."""
    _check_r(r)
    values = np.asarray(values, dtype=complex)
    if values.ndim == 2:
        values = values[:, :, None]
    if values.shape[1] < 2:
        return np.zeros(values.shape[0])
    k = _backend.get(backend)
    return np.asarray(k.variation_batch(np.ascontiguousarray(values), float(r)))


def greedy_jump_count(series: TimeSeries, lam: float, backend=None) -> int:
    """Greedy lambda-jump count started at the first time."""
    if not lam > 0:
        raise ParameterError(f"jump size must be positive, got {lam}")
    return int(_backend.get(backend).greedy_jump_count(series.samples, float(lam)))


def max_jump_count(series: TimeSeries, lam: float, backend=None) -> int:
    """Largest J with t_0 < ... < t_J and every consecutive increment >= lam."""
    if not lam > 0:
        raise ParameterError(f"jump size must be positive, got {lam}")
    return int(_backend.get(backend).max_jump_count(series.samples, float(lam)))


def max_jump_count_exhaustive(series: TimeSeries, lam: float) -> int:
    dist, bits, pairs = _subset_tables(series)
    ok = np.ones(bits.shape[0], dtype=bool)
    for i, j, consecutive in pairs:
        ok &= ~consecutive | (dist[i, j] >= lam)
    sizes = bits.sum(axis=1)
    return int(max(0, sizes[ok].max() - 1))


def sup_via_first_plus_variation(series: TimeSeries, q: float) -> float:
    """|F(t_0)| + V^q(F), an upper bound for sup_t |F(t)|."""
    if len(series) == 0:
        raise SizeError("empty series")
    return float(np.linalg.norm(series.samples[0])) + variation_seminorm(series, q)


# -- the splitting integral from the almost-orthogonality argument ---------

def xi_exponent(r: float, q: float) -> float:
    """(1/2)(1/2 - 1/r) / (1/2 - 1/q)."""
    return 0.5 * (0.5 - 1.0 / r) / (0.5 - 1.0 / q)


def splitting_integral_closed_form(a: float, size_xi: float, r: float, q: float) -> float:
    _check_split(a, size_xi, r, q)
    return a * size_xi ** xi_exponent(r, q) * (1.0 / (1.0 - r / q) + 1.0 / (r / 2.0 - 1.0))


def splitting_integral_quadrature(a: float, size_xi: float, r: float, q: float) -> float:
    """Numerical value of int_0^inf min(|Xi|^(1/2) (a/l)^(r/q), (a/l)^(r/2)) dl.

    The crossing point is located by root finding, not by formula. Each side
    is integrated in logarithmic variables where the power laws become
    exponentials that adaptive quadrature handles well.
    """
    _check_split(a, size_xi, r, q)

    log_a, half_log_xi = math.log(a), 0.5 * math.log(size_xi)

    def log_low(logl):
        return half_log_xi + (r / q) * (log_a - logl)

    def log_high(logl):
        return (r / 2.0) * (log_a - logl)

    def gap(logl):
        return log_low(logl) - log_high(logl)

    lo, hi = log_a - 50.0, log_a + 50.0
    if gap(lo) * gap(hi) > 0:
        log_cross = log_a  # |Xi| = 1: the two curves meet at l = a
    else:
        log_cross = optimize.brentq(gap, lo, hi, xtol=1e-15, rtol=1e-15)

    def integrand(u):  # l = e^(log_cross + u), dl = l du
        logl = log_cross + u
        return math.exp(min(log_low(logl), log_high(logl)) + logl)

    left, _ = integrate.quad(integrand, -np.inf, 0.0, epsabs=0.0, epsrel=1e-12, limit=500)
    right, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=500)
    return left + right


def _check_split(a, size_xi, r, q):
    if not (a > 0 and size_xi >= 1 and 2 < r < q):
        raise ParameterError("need a > 0, |Xi| >= 1 and 2 < r < q")
