"""Periodic lattice model of Z^n and its dual torus.

Signals live on (Z/NZ)^n stored as numpy arrays of shape ``(N,) * n`` in
row-major order. The forward transform is unnormalized and the inverse
carries ``N**-n``, so ``l2_norm`` is the plain sum of squared moduli and
Plancherel reads ``sum |f|^2 = N^-n sum |F|^2``.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParameterError


@dataclass(frozen=True)
class GridSpec:
    n: int
    N: int

    def __post_init__(self):
        if self.n < 1 or self.n > 3:
            raise ParameterError(f"dimension n must be in 1..3, got {self.n}")
        if self.N < 2 or self.N % 2:
            raise ParameterError(f"side length N must be even and >= 2, got {self.N}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    def positions(self) -> np.ndarray:
        """Centered representatives in (-N/2, N/2]^n, shape ``(n, N, ..., N)``."""
        idx = np.arange(self.N)
        axis = np.where(idx > self.N // 2, idx - self.N, idx)
        return np.stack(np.meshgrid(*([axis] * self.n), indexing="ij"))

    def frequencies(self) -> np.ndarray:
        """Centered dual points k/N in (-1/2, 1/2]^n, shape ``(n, N, ..., N)``."""
        return self.positions() / self.N

    def doubled(self) -> "GridSpec":
        return GridSpec(self.n, 2 * self.N)


def centered(xi):
    """Centered representative of xi mod 1 in (-1/2, 1/2]."""
    xi = np.asarray(xi, dtype=float)
    out = xi - np.floor(xi)
    return np.where(out > 0.5, out - 1.0, out)


class _GridArray:
    __slots__ = ("spec", "values")

    def __init__(self, spec: GridSpec, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != spec.shape:
            if values.size != spec.size:
                raise DimensionError(
                    f"expected {spec.size} values for {spec}, got {values.size}"
                )
            values = values.reshape(spec.shape)
        values.setflags(write=False)
        self.spec = spec
        self.values = values

    def __repr__(self):
        return f"{type(self).__name__}({self.spec})"

    def _check(self, other):
        if other.spec != self.spec:
            raise DimensionError(f"grid mismatch: {self.spec} vs {other.spec}")


class GridSignal(_GridArray):
    """A complex function on the periodic grid (stand-in for f in l^2(Z^n))."""

    __slots__ = ()

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)))

    def lp_norm(self, p: float) -> float:
        a = np.abs(self.values)
        if np.isinf(p):
            return float(a.max())
        return float(np.sum(a**p) ** (1.0 / p))

    def __add__(self, other):
        self._check(other)
        return GridSignal(self.spec, self.values + other.values)

    def scaled(self, c) -> "GridSignal":
        return GridSignal(self.spec, c * self.values)

    def to_json(self) -> dict:
        return signal_to_json(self)

    @classmethod
    def delta(cls, spec: GridSpec, at=None) -> "GridSignal":
        v = np.zeros(spec.shape, dtype=complex)
        idx = tuple(np.mod(at, spec.N)) if at is not None else (0,) * spec.n
        v[idx] = 1.0
        return cls(spec, v)

    @classmethod
    def random(cls, spec: GridSpec, seed: int) -> "GridSignal":
        """Complex Gaussian per grid point (unit variance per component)."""
        rng = np.random.default_rng(seed)
        return cls(spec, rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape))


class Multiplier(_GridArray):
    """Complex values on the dual grid k/N; ``values[k]`` is m(k/N)."""

    __slots__ = ()

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    @classmethod
    def from_function(cls, spec: GridSpec, func) -> "Multiplier":
        """Evaluate ``func`` on centered frequencies (array of shape (n, ...))."""
        return cls(spec, func(spec.frequencies()))


def forward_dft(f: GridSignal) -> Multiplier:
    """F(k) = sum_x f(x) e(-x.k/N)."""
    return Multiplier(f.spec, np.fft.fftn(f.values))


def inverse_dft(F: Multiplier) -> GridSignal:
    """f(x) = N^-n sum_k F(k) e(x.k/N)."""
    return GridSignal(F.spec, np.fft.ifftn(F.values))


def apply_multiplier(m: Multiplier, f: GridSignal) -> GridSignal:
    if m.spec != f.spec:
        raise DimensionError(f"grid mismatch: multiplier {m.spec} vs signal {f.spec}")
    return GridSignal(f.spec, np.fft.ifftn(m.values * np.fft.fftn(f.values)))


def convolution_kernel(m: Multiplier) -> GridSignal:
    """The kernel k with m(D)f = sum_y k(y) f(x - y)."""
    return inverse_dft(m)


def direct_convolution(kernel: GridSignal, f: GridSignal) -> GridSignal:
    """sum_y kernel(y) f(x - y) by explicit O(N^2n) summation."""
    if kernel.spec != f.spec:
        raise DimensionError("grid mismatch")
    spec = f.spec
    out = np.zeros(spec.shape, dtype=complex)
    for y in np.ndindex(*spec.shape):
        w = kernel.values[y]
        if w != 0:
            out += w * np.roll(f.values, shift=y, axis=tuple(range(spec.n)))
    return GridSignal(spec, out)


def translation_multiplier(spec: GridSpec, v) -> Multiplier:
    """m(k/N) = e(-v.k/N); m(D)f = f(. - v)."""
    k = spec.positions()
    phase = sum(int(v[i]) * k[i] for i in range(spec.n))
    return Multiplier(spec, np.exp(-2j * np.pi * phase / spec.N))


# -- serialization --------------------------------------------------------

def signal_to_json(f: _GridArray) -> dict:
    flat = f.values.ravel()
    return {
        "n": f.spec.n,
        "N": f.spec.N,
        "values": [[float(z.real), float(z.imag)] for z in flat],
    }


def signal_from_json(obj, cls=GridSignal):
    spec = GridSpec(int(obj["n"]), int(obj["N"]))
    vals = np.asarray(obj["values"], dtype=float)
    if vals.ndim != 2 or vals.shape[1] != 2:
        raise DimensionError("values must be a list of [re, im] pairs")
    return cls(spec, vals[:, 0] + 1j * vals[:, 1])


_MAGIC = b"MFQG"


def write_signal(f: _GridArray, path) -> None:
    """Binary layout: magic, int32 n, int32 N, then complex128 row-major."""
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(signal_to_json(f)))
        return
    with open(path, "wb") as fh:
        fh.write(_MAGIC + struct.pack("<ii", f.spec.n, f.spec.N))
        fh.write(np.ascontiguousarray(f.values, dtype="<c16").tobytes())


def read_signal(path, cls=GridSignal):
    path = Path(path)
    if path.suffix == ".json":
        return signal_from_json(json.loads(path.read_text()), cls)
    raw = path.read_bytes()
    if raw[:4] != _MAGIC:
        raise ParameterError(f"{path} is not a grid signal file")
    n, N = struct.unpack("<ii", raw[4:12])
    spec = GridSpec(n, N)
    return cls(spec, np.frombuffer(raw[12:], dtype="<c16").copy())
