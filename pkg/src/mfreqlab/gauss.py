"""Complete Gauss sums S(a/q, b/q) = q^-n sum_{r mod q} e(a |r|^(2d) / q + b.r / q).

Evaluated by direct summation: the compiled kernel histograms the integer
phase (a |r|^(2d) + b.r) mod q, which keeps every phase exact, and the
histogram is paired with the q-th roots of unity.
"""

from __future__ import annotations

import threading
from pathlib import Path

import numpy as np

from . import _backend
from .errors import ParameterError, SizeError

DEFAULT_BUDGET = 10**7


def roots_of_unity(q: int) -> np.ndarray:
    """e(k/q) for k in [0, q), exact at multiples of 1/4."""
    k = np.arange(q)
    out = np.exp(2j * np.pi * k / q)
    exact = {0: 1.0, 1: 1j, 2: -1.0, 3: -1j}
    for k4, val in exact.items():
        if (k4 * q) % 4 == 0:
            out[k4 * q // 4] = val
    return out


def gauss_sum_direct(a: int, q: int, b=(0,), d: int = 1, budget: int = DEFAULT_BUDGET,
                     backend=None) -> complex:
    """Uncached evaluation; ``b`` has one entry per dimension."""
    if q < 1:
        raise ParameterError("q must be >= 1")
    if d < 1:
        raise ParameterError("d must be >= 1")
    b = np.asarray(b, dtype=np.int64).ravel()
    n = b.shape[0]
    if n < 1:
        raise ParameterError("b must have at least one coordinate")
    if q**n > budget:
        raise SizeError(f"q^n = {q ** n} terms exceeds budget {budget}")
    counts = _backend.get(backend).gauss_residue_counts(int(a), np.ascontiguousarray(b % q), int(q), int(d))
    return complex(np.dot(np.asarray(counts, dtype=float), roots_of_unity(q)) / q**n)


class GaussSumCache:
    """Thread-safe memo keyed by (a, b, q, d, n), optionally mirrored to a file.

    File format: one record per line, ``a b_1 .. b_n q d n re im`` in decimal.
    Concurrent writers may both compute a value; the values are identical so
    the last write wins.
    """

    def __init__(self, path=None):
        self._lock = threading.Lock()
        self._data: dict = {}
        self.path = Path(path) if path is not None else None
        if self.path is not None and self.path.exists():
            self.load(self.path)

    def __len__(self):
        return len(self._data)

    def load(self, path) -> None:
        with open(path) as fh:
            for line in fh:
                parts = line.split()
                if not parts:
                    continue
                n = int(parts[-3])
                a = int(parts[0])
                b = tuple(int(v) for v in parts[1 : 1 + n])
                q, d = int(parts[1 + n]), int(parts[2 + n])
                self._data[(a, b, q, d, n)] = complex(float(parts[-2]), float(parts[-1]))

    def get(self, a: int, q: int, b=(0,), d: int = 1, budget: int = DEFAULT_BUDGET) -> complex:
        b = tuple(int(v) % q for v in np.atleast_1d(b))
        key = (int(a) % q, b, int(q), int(d), len(b))
        val = self._data.get(key)
        if val is not None:
            return val
        val = gauss_sum_direct(key[0], q, b, d, budget)
        with self._lock:
            self._data[key] = val
            if self.path is not None:
                with open(self.path, "a") as fh:
                    fh.write(" ".join(str(v) for v in (key[0], *b, q, d, len(b))))
                    fh.write(f" {val.real!r} {val.imag!r}\n")
        return val


_default_cache = GaussSumCache()


def default_cache() -> GaussSumCache:
    return _default_cache


def set_default_cache(cache: GaussSumCache) -> None:
    global _default_cache
    _default_cache = cache


def gauss_sum(a: int, q: int, b=(0,), d: int = 1, n: int | None = None,
              budget: int = DEFAULT_BUDGET) -> complex:
    """S(a/q, b/q) in dimension n = len(b), cached."""
    b = tuple(np.atleast_1d(b).tolist())
    if n is not None and n != len(b):
        if len(b) == 1 and b[0] == 0:
            b = (0,) * n
        else:
            raise ParameterError(f"b has {len(b)} coordinates but n = {n}")
    if q < 1:
        raise ParameterError("q must be >= 1")
    return _default_cache.get(a, q, b, d, budget)


def gauss_sum_point(p, d: int = 1) -> complex:
    """S(alpha, beta) for a RationalFreqPoint."""
    return gauss_sum(p.a, p.q, p.b, d)

