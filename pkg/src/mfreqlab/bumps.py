"""Smooth bumps on R^n and their lattice inverse transforms.

chi0 is the tensor product of eta(t) = s(2 - 2|t|) with the exp(-1/u)
smooth step s, so it is 1 on [-1/2, 1/2]^n and vanishes off (-1, 1)^n.
Scaled bumps are chi0(A^-1 xi) for a diagonal contraction A.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ResolutionError
from .grid import GridSignal, GridSpec, Multiplier, centered

KINDS = ("chi0", "chi_s", "chi0_tilde", "psi_annulus")


def _B(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def smooth_step(u):
    """s(u) = B(u) / (B(u) + B(1 - u)); 0 for u <= 0, 1 for u >= 1."""
    u = np.asarray(u, dtype=float)
    b0, b1 = _B(u), _B(1.0 - u)
    return b0 / (b0 + b1)


def eta(t):
    return smooth_step(2.0 - 2.0 * np.abs(t))


def chi0(xi):
    """Tensor bump; ``xi`` has the coordinate axis first, shape (n, ...)."""
    xi = np.asarray(xi, dtype=float)
    out = np.ones(xi.shape[1:])
    for comp in xi:
        out = out * eta(comp)
    return out


@dataclass(frozen=True)
class BumpSpec:
    """kind in KINDS; ``scale`` is the diagonal of the contraction A."""

    kind: str
    scale: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown bump kind {self.kind!r}")
        sc = tuple(float(a) for a in self.scale)
        if not sc or any(not (0 < a <= 1) for a in sc):
            raise ParameterError(f"scale entries must lie in (0, 1], got {self.scale}")
        object.__setattr__(self, "scale", sc)

    @property
    def n(self) -> int:
        return len(self.scale)

    @property
    def measure(self) -> float:
        """|U| = |det A|, the volume of A([-1/2, 1/2]^n)."""
        return float(np.prod(self.scale))

    @property
    def support_halfwidth(self) -> float:
        grow = 2.0 if self.kind == "chi0_tilde" else 1.0
        return grow * max(self.scale)

    @property
    def plateau_halfwidth(self) -> float:
        grow = 2.0 if self.kind == "chi0_tilde" else 1.0
        return grow * min(self.scale) / 2.0

    @classmethod
    def chi0(cls, n: int = 1) -> "BumpSpec":
        return cls("chi0", (1.0,) * n)

    @classmethod
    def chi_s(cls, s: int, kappa: int = 10, n: int = 1) -> "BumpSpec":
        """chi0(2^(kappa s) .)."""
        return cls("chi_s", (2.0 ** (-kappa * s),) * n)

    @classmethod
    def chi_s_tilde(cls, s: int, kappa: int = 10, n: int = 1) -> "BumpSpec":
        """chi0_tilde(2^(kappa s) .) with chi0_tilde = chi0(./2)."""
        return cls("chi0_tilde", (2.0 ** (-kappa * s),) * n)

    def tilde(self) -> "BumpSpec":
        return BumpSpec("chi0_tilde", self.scale)


def bump_value(b: BumpSpec, xi):
    """Evaluate the bump at points ``xi`` of shape (n, ...) (or (n,) for one point)."""
    xi = np.asarray(xi, dtype=float)
    single = xi.ndim == 1
    if single:
        xi = xi[:, None]
    if xi.shape[0] != b.n:
        raise ParameterError(f"point dimension {xi.shape[0]} != bump dimension {b.n}")
    scale = np.asarray(b.scale).reshape((b.n,) + (1,) * (xi.ndim - 1))
    u = xi / scale
    if b.kind in ("chi0", "chi_s"):
        out = chi0(u)
    elif b.kind == "chi0_tilde":
        out = chi0(u / 2.0)
    else:
        out = chi0(u) - chi0(2.0 * u)
    return float(out[0]) if single else out


def bump_multiplier(b: BumpSpec, spec: GridSpec, center=None) -> Multiplier:
    """The bump translated to ``center`` (mod 1), sampled on the dual grid."""
    xi = spec.frequencies()
    if center is not None:
        c = np.asarray(center, dtype=float).reshape((spec.n,) + (1,) * spec.n)
        xi = centered(xi - c)
    return Multiplier(spec, bump_value(b, xi))


def check_resolution(b: BumpSpec, spec: GridSpec) -> None:
    if b.n != spec.n:
        raise ParameterError("bump and grid dimensions differ")
    if spec.N * b.plateau_halfwidth < 4:
        raise ResolutionError(
            f"grid N={spec.N} does not resolve bump plateau half-width "
            f"{b.plateau_halfwidth:g} (need N * halfwidth >= 4)"
        )


def phi_from_bump(b: BumpSpec, spec: GridSpec) -> GridSignal:
    """phi(y) = N^-n sum_k chi(k/N) e(y.k/N), the lattice inverse transform."""
    check_resolution(b, spec)
    m = bump_multiplier(b, spec)
    return GridSignal(spec, np.fft.ifftn(m.values))
