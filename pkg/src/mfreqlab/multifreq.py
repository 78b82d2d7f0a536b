"""The variable-coefficient multi-frequency estimate, numerically.

Objects here are the coefficient functions g_beta, a finite family of
translation-invariant operators T_t given by multipliers, and frequency
localized inputs f_beta. ``a1_constant`` computes the best constant of the
windowed almost-orthogonality hypothesis exactly; ``multifreq_apply`` builds
x -> V^q_t(sum_beta g_beta(x) T_t f_beta(x)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bumps import BumpSpec
from .errors import DimensionError, ParameterError
from .grid import GridSignal, GridSpec
from .variation import variation_rows, xi_exponent


@dataclass(frozen=True, eq=False)
class CoefficientField:
    spec: GridSpec
    labels: tuple
    values: np.ndarray  # shape (|Xi|,) + spec.shape

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (len(self.labels),) + self.spec.shape:
            raise DimensionError(
                f"coefficient array {vals.shape} does not match {len(self.labels)} labels on {self.spec}"
            )
        if len(self.labels) < 1:
            raise ParameterError("need at least one label")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class MultiplierFamily:
    """Multipliers m_t for sorted times; ``values`` is (T,) + grid shape, or
    (|Xi|, T) + grid shape when every label gets its own family."""

    spec: GridSpec
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        vals = np.asarray(self.values, dtype=complex)
        if np.any(np.diff(times) <= 0):
            raise ParameterError("times must be strictly increasing")
        T = times.shape[0]
        if vals.shape[-self.spec.n :] != self.spec.shape or vals.shape[-self.spec.n - 1] != T:
            raise DimensionError(f"family values {vals.shape} inconsistent with {T} times on {self.spec}")
        if vals.ndim not in (self.spec.n + 1, self.spec.n + 2):
            raise DimensionError("family values must be shared or per-label")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", vals)

    @property
    def per_label(self) -> bool:
        return self.values.ndim == self.spec.n + 2

    def __len__(self):
        return self.times.shape[0]

    @classmethod
    def from_multipliers(cls, times, multipliers) -> "MultiplierFamily":
        ms = list(multipliers)
        return cls(ms[0].spec, times, np.stack([m.values for m in ms]))


@dataclass(frozen=True, eq=False)
class FrequencyData:
    """Inputs f_beta whose spectra vanish outside U = A([-1/2, 1/2]^n)."""

    spec: GridSpec
    values: np.ndarray  # (|Xi|,) + grid shape
    bump: BumpSpec

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape[1:] != self.spec.shape:
            raise DimensionError("frequency data does not match grid")
        object.__setattr__(self, "values", vals)
        inside = in_U(self.bump, self.spec)
        for f in vals:
            spec_vals = np.abs(np.fft.fftn(f))
            norm = np.sqrt(np.sum(np.abs(f) ** 2))
            if np.any(spec_vals[~inside] > 1e-9 * max(norm, 1e-300)):
                raise ParameterError("an input has spectrum outside U")

    def total_norm(self) -> float:
        """(sum_beta ||f_beta||^2)^(1/2)."""
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)))


def in_U(bump: BumpSpec, spec: GridSpec) -> np.ndarray:
    xi = spec.frequencies()
    half = np.asarray(bump.scale).reshape((spec.n,) + (1,) * spec.n) / 2.0
    return np.all(np.abs(xi) <= half + 1e-12, axis=0)


def _gram_fields(g: CoefficientField, weight: np.ndarray) -> np.ndarray:
    """G[x, b, b'] = sum_y weight(y) conj(g_b(x+y)) g_b'(x+y), all x at once."""
    spec = g.spec
    W = np.conj(np.fft.fftn(weight))
    k = g.size
    G = np.empty((spec.size, k, k), dtype=complex)
    for b in range(k):
        for c in range(b, k):
            h = np.conj(g.values[b]) * g.values[c]
            corr = np.fft.ifftn(W * np.fft.fftn(h)).ravel()
            G[:, b, c] = corr
            G[:, c, b] = np.conj(corr)
    return G


def a1_constant(g: CoefficientField, phi: GridSignal, U_measure: float, method: str = "fft",
                return_argmax: bool = False):
    """max_x sigma_max(M_x) / |U|^(1/2) with M_x[y, b] = phi(y) g_b(x + y).

    ``method``: 'fft' (Gram fields by FFT correlation, default), 'direct'
    (explicit M_x per x) or 'windowed' (direct, rows with |phi| above
    1e-12 * max|phi| only).
    """
    if phi.spec != g.spec:
        raise DimensionError("phi and coefficients live on different grids")
    if not U_measure > 0:
        raise ParameterError("|U| must be positive")
    if not np.any(phi.values):
        return (0.0, None, None) if return_argmax else 0.0
    if method == "fft":
        G = _gram_fields(g, np.abs(phi.values) ** 2)
        eig = np.linalg.eigvalsh(G)[:, -1]
        x = int(np.argmax(eig))
        top = max(float(eig[x]), 0.0)
        if not return_argmax:
            return math.sqrt(top / U_measure)
        w, v = np.linalg.eigh(G[x])
        return math.sqrt(top / U_measure), np.unravel_index(x, g.spec.shape), v[:, -1]
    if method not in ("direct", "windowed"):
        raise ParameterError(f"unknown method {method!r}")
    spec = g.spec
    phi_flat = phi.values.ravel()
    rows = np.arange(spec.size)
    if method == "windowed":
        rows = rows[np.abs(phi_flat) > 1e-12 * np.abs(phi_flat).max()]
    y_idx = np.array(np.unravel_index(rows, spec.shape))
    flat_g = g.values.reshape(g.size, -1)
    best, arg, vec = -1.0, None, None
    for x in np.ndindex(*spec.shape):
        shifted = np.ravel_multi_index(
            tuple((y_idx[i] + x[i]) % spec.N for i in range(spec.n)), spec.shape
        )
        M = phi_flat[rows, None] * flat_g[:, shifted].T
        w, v = np.linalg.eigh(M.conj().T @ M)
        if w[-1] > best:
            best, arg, vec = float(w[-1]), x, v[:, -1]
    val = math.sqrt(max(best, 0.0) / U_measure)
    return (val, arg, vec) if return_argmax else val


def windowed_norm(g: CoefficientField, phi: GridSignal, x, c) -> float:
    """|| sum_b phi(y) g_b(x + y) c_b ||_{l^2_y} evaluated directly."""
    shifted = np.roll(g.values, shift=tuple(-int(v) for v in x), axis=tuple(range(1, g.spec.n + 1)))
    field = np.tensordot(np.asarray(c, dtype=complex), shifted, axes=(0, 0))
    return float(np.sqrt(np.sum(np.abs(phi.values * field) ** 2)))


def apply_family(T: MultiplierFamily, f_values: np.ndarray) -> np.ndarray:
    """(T_t f_b)(x) for all labels b and times t: shape (|Xi|, T) + grid."""
    n = T.spec.n
    axes = tuple(range(-n, 0))
    F = np.fft.fftn(f_values, axes=axes)  # (|Xi|,) + grid
    if T.per_label:
        if T.values.shape[0] != f_values.shape[0]:
            raise DimensionError("per-label family does not match number of inputs")
        prod = T.values * F[:, None]
    else:
        prod = T.values[None] * F[:, None]
    return np.fft.ifftn(prod, axes=axes)


def multifreq_apply(g: CoefficientField, T: MultiplierFamily, F: FrequencyData, q: float = 3.0,
                    backend=None) -> GridSignal:
    """x -> V^q_t( sum_b g_b(x) (T_t f_b)(x) ) as a nonnegative grid signal."""
    if not q > 2:
        raise ParameterError(f"q must exceed 2, got {q}")
    if g.size != F.values.shape[0]:
        raise DimensionError(f"{g.size} coefficients but {F.values.shape[0]} inputs")
    if not (g.spec == T.spec == F.spec):
        raise DimensionError("coefficients, family and inputs live on different grids")
    Tf = apply_family(T, F.values)
    h = np.einsum("b...,bt...->t...", g.values, Tf)
    series = h.reshape(len(T), -1).T  # (X, T)
    v = variation_rows(series, q, backend=backend)
    return GridSignal(g.spec, v.reshape(g.spec.shape))


def theorem1_rhs(q: float, size_xi: int, A1: float, eta: float = 1.0, fnorm: float = 1.0) -> float:
    """(q (log|Xi| + 1) / (q - 2))^(eta + 1) * A1 * fnorm, implicit constant 1."""
    if not q > 2:
        raise ParameterError(f"q must exceed 2, got {q}")
    if size_xi < 1:
        raise ParameterError("|Xi| must be at least 1")
    return (q * (math.log(size_xi) + 1.0) / (q - 2.0)) ** (eta + 1.0) * A1 * fnorm


def optimal_r(q: float, size_xi: int) -> float:
    """The exponent r with r - 2 = (q - 2) / (log|Xi| + 1)."""
    return 2.0 + (q - 2.0) / (math.log(size_xi) + 1.0)


def vr_family_constant(T: MultiplierFamily, r: float, trials: int = 8, seed: int = 0,
                       backend=None) -> float:
    """Random lower bound for sup_f || ||T_t f||_{V^r_t} ||_2 / ||f||_2."""
    if T.per_label:
        raise ParameterError("vr_family_constant takes a shared family")
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if len(T) < 2:
        return 0.0
    best = 0.0
    for i in range(trials):
        f = GridSignal.random(T.spec, seed + i)
        Tf = apply_family(T, f.values[None])[0]
        v = variation_rows(Tf.reshape(len(T), -1).T, r, backend=backend)
        best = max(best, float(np.sqrt(np.sum(v**2))) / f.l2_norm())
    return best


def lemma21_check(g, c, q: float, r: float, weights=None, backend=None):
    """Both sides of the V^q -> V^r transfer inequality on a finite weighted set.

    ``g`` has shape (|Y|, |Xi|), ``c`` has shape (T, |Xi|). Returns
    ``(lhs, rhs, lhs / rhs)`` with the implicit absolute constant set to 1.
    """
    if not 2 < r < q:
        raise ParameterError(f"need 2 < r < q, got r={r}, q={q}")
    g = np.asarray(g, dtype=complex)
    c = np.asarray(c, dtype=complex)
    if g.ndim != 2 or c.ndim != 2 or g.shape[1] != c.shape[1]:
        raise DimensionError("g must be (|Y|, |Xi|) and c must be (T, |Xi|)")
    w = np.ones(g.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    vals = g @ c.T  # (|Y|, T)
    vq = variation_rows(vals, q, backend=backend)
    lhs = float(np.sqrt(np.sum(w * vq**2)))
    A0 = float(np.linalg.norm(np.sqrt(w)[:, None] * g, 2))
    vr = float(variation_rows(c[None], r, backend=backend)[0])
    size = g.shape[1]
    rhs = (q / (q - r) + 2.0 / (r - 2.0)) * A0 * size ** xi_exponent(r, q) * vr
    ratio = lhs / rhs if rhs > 0 else 0.0
    return lhs, rhs, ratio


def classical_coefficients(frequencies, spec: GridSpec) -> CoefficientField:
    """g_b(x) = e(x . xi_b) for dual-grid frequencies given as integer vectors k (xi = k/N)."""
    ks = [np.atleast_1d(np.asarray(k)) for k in frequencies]
    for k in ks:
        if k.shape != (spec.n,) or not np.all(np.equal(np.mod(k, 1), 0)):
            raise ParameterError(f"frequency {k} is not an integer vector of length {spec.n}")
    x = np.stack(np.meshgrid(*([np.arange(spec.N)] * spec.n), indexing="ij"))
    vals = []
    for k in ks:
        phase = sum(int(k[i]) * x[i] for i in range(spec.n)) % spec.N
        vals.append(np.exp(2j * np.pi * phase / spec.N))
    labels = tuple(tuple(int(v) for v in k) for k in ks)
    return CoefficientField(spec, labels, np.stack(vals))


def random_unimodular_coefficients(size: int, spec: GridSpec, seed: int, period: int | None = None
                                   ) -> CoefficientField:
    """g_b(x) = e(theta_b(x)) with i.i.d. uniform phases, optionally periodic in x.

    A period dividing N makes the field identical under N -> 2N.
    """
    rng = np.random.default_rng(seed)
    P = spec.N if period is None else int(period)
    if spec.N % P:
        raise ParameterError(f"period {P} must divide N={spec.N}")
    theta = rng.random((size,) + (P,) * spec.n)
    reps = (1,) + (spec.N // P,) * spec.n
    vals = np.exp(2j * np.pi * np.tile(theta, reps))
    return CoefficientField(spec, tuple(range(size)), vals)
