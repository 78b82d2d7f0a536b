"""Circle-method pipeline for the oscillatory singular integral operator

    C f(x) = sup_lambda | sum_{y != 0} f(x - y) e(lambda |y|^(2d)) K(y) |.

The kernel is split dyadically, K_j = K * psi(2^-j .), with psi = chi0 - chi0(2 .)
so partial sums telescope exactly. ``multiplier_m`` is the lattice symbol of
one piece, ``phi_continuous`` its continuous counterpart, and ``assemble_Ls``
and ``error_term_E`` put together the major-arc approximants.

Sign convention: symbols are m(xi) = sum_y e(lambda|y|^(2d) + xi.y) K_j(y) and
m(D) is applied with the unnormalized DFT, so m(D) f(x) = sum_y f(x + y) e(...) K_j(y).
For odd kernels this differs from the f(x - y) form only by a global sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bumps import BumpSpec, bump_value, chi0
from .errors import AccuracyError, InvariantViolation, ParameterError, ResolutionError, SizeError
from .gauss import gauss_sum_point
from .grid import GridSignal, GridSpec, Multiplier, apply_multiplier, centered
from .rationals import MajorArcParams, enumerate_Rs, major_arc_membership, wrap_unit

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class KernelSpec:
    """``riesz_1d`` is K(y) = 1/y on Z (n = 1). ``custom`` takes a callable
    ``func(y)`` on points of shape (n, ...) that is odd or at least of
    |y|^-n size; it must be defined off the origin."""

    kind: str = "riesz_1d"
    n: int = 1
    d: int = 1
    func: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("riesz_1d", "custom"):
            raise ParameterError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "riesz_1d" and self.n != 1:
            raise ParameterError("riesz_1d is one-dimensional")
        if self.kind == "custom" and self.func is None:
            raise ParameterError("custom kernels need a callable")
        if self.d < 1:
            raise ParameterError("degree d must be >= 1")

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "riesz_1d":
            return 1.0 / y[0]
        return np.asarray(self.func(y), dtype=float)


def riesz_kernel(n: int, d: int = 1) -> KernelSpec:
    """K(y) = y_1 / |y|^(n+1), odd with |y|^-n decay; riesz_1d when n = 1."""
    if n == 1:
        return KernelSpec("riesz_1d", 1, d)

    def func(y):
        return y[0] / np.sqrt(np.sum(y * y, axis=0)) ** (n + 1)

    return KernelSpec("custom", n, d, func)


def psi(u):
    """chi0(u) - chi0(2u) for points of shape (n, ...)."""
    u = np.asarray(u, dtype=float)
    return chi0(u) - chi0(2.0 * u)


@dataclass(frozen=True)
class PipelineParams:
    kernel: KernelSpec = KernelSpec()
    eps1: float | None = None  # default 1/(10 d)
    kappa: int = 10
    j_max: int = 12
    budget: int = DEFAULT_BUDGET
    quad_order: int = 16

    def __post_init__(self):
        if self.eps1 is None:
            object.__setattr__(self, "eps1", 1.0 / (10 * self.kernel.d))
        if not (0 < self.eps1 <= 1.0 / (4 * self.kernel.d)):
            raise ParameterError(f"eps1 must lie in (0, 1/(4d)], got {self.eps1}")
        if self.kappa < 1:
            raise ParameterError("kappa must be >= 1")

    @property
    def d(self) -> int:
        return self.kernel.d

    @property
    def n(self) -> int:
        return self.kernel.n

    def arcs(self, j: int) -> MajorArcParams:
        return MajorArcParams(self.eps1, j, self.d)

    def arc_radius(self, j: int) -> float:
        return 2.0 ** (-2 * self.d * j + self.eps1 * j)

    def first_scale(self, s: int) -> int:
        """Least j with j >= s / eps1."""
        return int(math.ceil(s / self.eps1 - 1e-9))

    def max_level(self, j: int) -> int:
        """Largest s with s <= eps1 j."""
        return int(math.floor(self.eps1 * j + 1e-9))

    def chi(self, s: int) -> BumpSpec:
        return BumpSpec.chi_s(s, self.kappa, self.n)


# -- kernel pieces ---------------------------------------------------------

def kernel_support_size(j: int, n: int) -> int:
    return (2 ** (j + 1) - 1) ** n


def kernel_piece(j: int, kspec: KernelSpec, budget: int = DEFAULT_BUDGET):
    """Lattice points y with psi(2^-j y) > 0 and the values K_j(y).

    Returns ``(points, values)`` with points of shape (n, P).
    """
    if j < 1:
        raise ParameterError("j must be >= 1")
    n = kspec.n
    if kernel_support_size(j, n) > budget:
        raise SizeError(f"support of K_{j} in dimension {n} exceeds budget {budget}")
    R = 2**j
    axis = np.arange(-R + 1, R)
    pts = np.stack(np.meshgrid(*([axis] * n), indexing="ij")).reshape(n, -1)
    pts = pts[:, np.max(np.abs(pts), axis=0) > R // 4]
    w = psi(pts / R)
    keep = w > 0
    pts, w = pts[:, keep], w[keep]
    return pts, kspec(pts) * w


def truncated_kernel(j_max: int, kspec: KernelSpec, budget: int = DEFAULT_BUDGET):
    """sum_{j <= j_max} K_j = K * chi0(2^-j_max .) off the origin."""
    n = kspec.n
    if kernel_support_size(j_max, n) > budget:
        raise SizeError(f"support of the truncated kernel exceeds budget {budget}")
    R = 2**j_max
    axis = np.arange(-R + 1, R)
    pts = np.stack(np.meshgrid(*([axis] * n), indexing="ij")).reshape(n, -1)
    pts = pts[:, np.any(pts != 0, axis=0)]
    w = chi0(pts / R)
    keep = w > 0
    pts, w = pts[:, keep], w[keep]
    return pts, kspec(pts) * w


def _poly_phase(lam: float, pts: np.ndarray, d: int) -> np.ndarray:
    """lambda |y|^(2d) mod 1, with the product formed in extended precision."""
    norm2 = np.sum(pts.astype(np.int64) ** 2, axis=0)
    power = norm2.astype(object) ** d if d > 1 else norm2
    power = np.asarray(power, dtype=np.longdouble)
    ph = np.longdouble(lam) * power
    return np.asarray(ph - np.floor(ph), dtype=float)


def multiplier_m(j: int, lam: float, xi, kspec: KernelSpec = KernelSpec(), budget: int = DEFAULT_BUDGET,
                 chunk: int = 2**22):
    """m_{j,lambda}(xi) = sum_y e(lambda |y|^(2d) + xi . y) K_j(y).

    ``xi`` is a scalar (n = 1), a length-n point, or an array of shape (n, M).
    """
    pts, vals = kernel_piece(j, kspec, budget)
    return _lattice_sum(pts, vals, lam, xi, kspec, chunk)


def _as_points(xi, n):
    xi = np.asarray(xi, dtype=float)
    scalar = xi.ndim == 0 or (xi.ndim == 1 and xi.shape[0] == n and n > 1)
    if xi.ndim == 0:
        xi = xi.reshape(1, 1)
    elif xi.ndim == 1:
        xi = xi.reshape(n, -1) if n > 1 else xi.reshape(1, -1)
    if xi.shape[0] != n:
        raise ParameterError(f"frequency points must have {n} coordinates")
    return xi, scalar


def _lattice_sum(pts, vals, lam, xi, kspec, chunk):
    xi, scalar = _as_points(xi, kspec.n)
    weights = vals * np.exp(2j * np.pi * _poly_phase(lam, pts, kspec.d))
    M = xi.shape[1]
    out = np.empty(M, dtype=complex)
    step = max(1, chunk // max(pts.shape[1], 1))
    ptsf = pts.astype(float)
    for lo in range(0, M, step):
        ph = xi[:, lo : lo + step].T @ ptsf  # (m, P)
        out[lo : lo + step] = np.exp(2j * np.pi * ph) @ weights
    return complex(out[0]) if scalar else out


def _grid_symbol(pts, vals, lam, spec: GridSpec, d: int) -> Multiplier:
    half = spec.N // 2
    if np.max(np.abs(pts)) >= half:
        raise ResolutionError(
            f"kernel support radius {int(np.max(np.abs(pts)))} does not fit in half of N={spec.N}"
        )
    kgrid = np.zeros(spec.shape, dtype=complex)
    w = vals * np.exp(2j * np.pi * _poly_phase(lam, pts, d))
    np.add.at(kgrid, tuple(np.mod(pts, spec.N)), w)
    # m(k/N) = sum_y kgrid(y) e(+y.k/N)
    return Multiplier(spec, np.fft.ifftn(kgrid) * spec.size)


def multiplier_grid(j: int, lam: float, spec: GridSpec, kspec: KernelSpec = KernelSpec(),
                    budget: int = DEFAULT_BUDGET) -> Multiplier:
    """m_{j,lambda} sampled on the dual grid (requires supp K_j inside half the grid)."""
    if spec.n != kspec.n:
        raise ParameterError("grid and kernel dimensions differ")
    pts, vals = kernel_piece(j, kspec, budget)
    return _grid_symbol(pts, vals, lam, spec, kspec.d)


def truncated_multiplier_grid(j_max: int, lam: float, spec: GridSpec, kspec: KernelSpec = KernelSpec(),
                              budget: int = DEFAULT_BUDGET) -> Multiplier:
    """sum_{j <= j_max} m_{j,lambda} on the dual grid."""
    if spec.n != kspec.n:
        raise ParameterError("grid and kernel dimensions differ")
    pts, vals = truncated_kernel(j_max, kspec, budget)
    return _grid_symbol(pts, vals, lam, spec, kspec.d)


def apply_piece_direct(j: int, lam: float, f: GridSignal, kspec: KernelSpec = KernelSpec(),
                       budget: int = DEFAULT_BUDGET) -> GridSignal:
    """sum_y f(x + y) e(lambda |y|^(2d)) K_j(y) by explicit summation (periodic)."""
    pts, vals = kernel_piece(j, kspec, budget)
    w = vals * np.exp(2j * np.pi * _poly_phase(lam, pts, kspec.d))
    out = np.zeros(f.spec.shape, dtype=complex)
    axes = tuple(range(f.spec.n))
    for k in range(pts.shape[1]):
        out += w[k] * np.roll(f.values, shift=tuple(-int(v) for v in pts[:, k]), axis=axes)
    return GridSignal(f.spec, out)


def sup_over_xi(j: int, lam: float, kspec: KernelSpec = KernelSpec(), oversample: int = 4,
                budget: int = DEFAULT_BUDGET) -> float:
    """max_xi |m_{j,lambda}(xi)| over a dual grid oversampling the kernel support (n = 1)."""
    if kspec.n != 1:
        raise ParameterError("sup_over_xi is one-dimensional")
    N = 2 ** (j + 1) * oversample
    return multiplier_grid(j, lam, GridSpec(1, N), kspec, budget).sup_norm()


# -- continuous symbol -----------------------------------------------------

def _gauss_legendre(order):
    return np.polynomial.legendre.leggauss(order)


def _phi_rule(j, lam, kspec, panels, order):
    """Nodes u and weights for int over 1/4 <= |u| <= 1 after y = 2^j u."""
    x, w = _gauss_legendre(order)
    edges = np.linspace(0.25, 1.0, panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    u_pos = ((b - a) / 2 * x + (a + b) / 2).ravel()
    w_pos = ((b - a) / 2 * w).ravel()
    u = np.concatenate([-u_pos[::-1], u_pos])
    wt = np.concatenate([w_pos[::-1], w_pos])
    R = 2.0**j
    y = R * u
    base = wt * R * kspec(y[None, :]) * psi(u[None, :])
    Lam = lam * R ** (2 * kspec.d)
    phase = Lam * u ** (2 * kspec.d)
    return u, base * np.exp(2j * np.pi * (phase - np.floor(phase)))


def _phi_eval(j, lam, xi, kspec, panels, order):
    u, weights = _phi_rule(j, lam, kspec, panels, order)
    R = 2.0**j
    out = np.empty(xi.shape[0], dtype=complex)
    step = max(1, 2**22 // u.shape[0])
    for lo in range(0, xi.shape[0], step):
        ph = np.outer(xi[lo : lo + step] * R, u)
        out[lo : lo + step] = np.exp(2j * np.pi * ph) @ weights
    return out


def kernel_piece_l1(j: int, kspec: KernelSpec = KernelSpec(), order: int = 16) -> float:
    """int |K_j(y)| dy (n = 1)."""
    u, w = _phi_rule(j, 0.0, kspec, 64, order)
    return float(np.sum(np.abs(w)))


def phi_continuous(j: int, lam: float, xi, kspec: KernelSpec = KernelSpec(), order: int = 16,
                   tol: float = 1e-6, max_halvings: int = 10):
    """Phi_{j,lambda}(xi) = int e(lambda |y|^(2d) + xi y) K_j(y) dy for n = 1.

    Composite Gauss-Legendre on panels, in the rescaled variable u = 2^-j y,
    each spanning at most one oscillation of the integrand; the
    panel count is doubled until two successive results agree within
    ``tol`` times int |K_j|.
    """
    if kspec.n != 1:
        raise ParameterError("phi_continuous is implemented for n = 1 only")
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    R = 2.0**j
    rate = 2 * kspec.d * abs(lam) * R ** (2 * kspec.d) + float(np.max(np.abs(xi_arr))) * R + 1.0
    panels = max(8, int(math.ceil(0.75 * rate)))
    scale = kernel_piece_l1(j, kspec, order)
    prev = _phi_eval(j, lam, xi_arr, kspec, panels, order)
    for _ in range(max_halvings):
        panels *= 2
        cur = _phi_eval(j, lam, xi_arr, kspec, panels, order)
        if np.max(np.abs(cur - prev)) <= tol * scale:
            return complex(cur[0]) if np.ndim(xi) == 0 else cur
        prev = cur
    raise AccuracyError(f"panel refinement did not settle for j={j}, lambda={lam}")


def phi_riemann(j: int, lam: float, xi, kspec: KernelSpec = KernelSpec(), step: float | None = None):
    """Midpoint-rule oracle for Phi_{j,lambda}(xi) in the original variable y."""
    if kspec.n != 1:
        raise ParameterError("phi_riemann is one-dimensional")
    R = 2.0**j
    if step is None:
        step = R / 20000.0
    out = []
    for sign in (-1.0, 1.0):
        nodes = np.arange(R / 4 + step / 2, R, step)
        y = sign * nodes
        out.append((y, kspec(y[None, :]) * psi(y[None, :] / R)))
    y = np.concatenate([o[0] for o in out])
    kv = np.concatenate([o[1] for o in out])
    ph = lam * y ** (2 * kspec.d)
    w = kv * np.exp(2j * np.pi * (ph - np.floor(ph))) * step
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    vals = np.exp(2j * np.pi * np.outer(xi_arr, y)) @ w
    return complex(vals[0]) if np.ndim(xi) == 0 else vals


def phi_lattice_proxy(j: int, lam: float, xi, kspec: KernelSpec, refine: int = 4,
                      budget: int = DEFAULT_BUDGET):
    """Riemann sum on the lattice refine^-1 Z^n standing in for Phi when n >= 2."""
    n = kspec.n
    R = 2**j
    count = (2 * R * refine) ** n
    if count > budget:
        raise SizeError(f"proxy lattice of {count} points exceeds budget {budget}")
    h = 1.0 / refine
    axis = np.arange(-R * refine + 1, R * refine) * h
    pts = np.stack(np.meshgrid(*([axis] * n), indexing="ij")).reshape(n, -1)
    w = psi(pts / R)
    keep = w > 0
    pts, w = pts[:, keep], w[keep]
    vals = kspec(pts) * w * h**n
    norm2 = np.sum(pts**2, axis=0)
    ph = lam * norm2**kspec.d
    weights = vals * np.exp(2j * np.pi * (ph - np.floor(ph)))
    xi_pts, scalar = _as_points(xi, n)
    out = np.exp(2j * np.pi * (xi_pts.T @ pts)) @ weights
    return complex(out[0]) if scalar else out


def phi_star(j: int, lam: float, xi, params: PipelineParams):
    """Phi_{j,lambda} times the indicator |lambda| <= 2^(-2dj + eps1 j)."""
    if abs(lam) > params.arc_radius(j):
        if params.n == 1:
            return 0j if np.ndim(xi) == 0 else np.zeros(np.shape(xi), dtype=complex)
        pts, scalar = _as_points(xi, params.n)
        return 0j if scalar else np.zeros(pts.shape[1], dtype=complex)
    if params.n == 1:
        return phi_continuous(j, lam, xi, params.kernel, params.quad_order)
    return phi_lattice_proxy(j, lam, xi, params.kernel, budget=params.budget)


# -- approximants ----------------------------------------------------------

def _rs_by_alpha(s: int, params: PipelineParams):
    pts = enumerate_Rs(s, params.n, params.budget)
    groups: dict = {}
    for p in pts:
        groups.setdefault(p.alpha, []).append(p)
    return groups


def _active_alpha(s, lam, radius, params):
    """The alpha in A_s within ``radius`` of lambda mod 1; at most one may exist.

    Distances are taken on R/Z since e(lambda |y|^(2d)) has period 1 in
    lambda, so lambda near 1 is approximated through alpha = 0.
    """
    x = Fraction(lam)
    r = Fraction(radius)
    hits = [a for a in _rs_by_alpha(s, params) if abs(wrap_unit(x - a)) <= r]
    if len(hits) > 1:
        raise InvariantViolation(f"lambda={lam} lies in {len(hits)} level-{s} arcs at once")
    return hits[0] if hits else None


def _bump_terms(s, alpha, xi_pts, params, d):
    """Yields (point, S(alpha, beta), eta, chi_s(eta)) with eta = xi - beta centred,
    restricted to frequencies where chi_s(xi - beta) > 0; checks disjointness."""
    chi = params.chi(s)
    covered = np.zeros(xi_pts.shape[1], dtype=int)
    out = []
    for p in _rs_by_alpha(s, params).get(alpha, []):
        beta = np.asarray(p.beta_float).reshape(params.n, 1)
        eta = centered(xi_pts - beta)
        cv = bump_value(chi, eta)
        live = cv > 0
        if not np.any(live):
            continue
        covered += live
        out.append((p, gauss_sum_point(p, d), eta, cv, live))
    if np.any(covered > 1):
        raise InvariantViolation(f"bump supports overlap at level s={s} (kappa={params.kappa})")
    return out


def assemble_Ls(s: int, lam: float, xi, params: PipelineParams, j: int | None = None):
    """L^s_{j,lambda}(xi) for one j, or L^s_lambda = sum_{s/eps1 <= j <= j_max} L^s_{j,lambda}."""
    xi_pts, scalar = _as_points(xi, params.n)
    js = [j] if j is not None else list(range(params.first_scale(s), params.j_max + 1))
    total = np.zeros(xi_pts.shape[1], dtype=complex)
    if not js:
        return complex(total[0]) if scalar else total
    widest = max(params.arc_radius(jj) for jj in js)
    alpha = _active_alpha(s, lam, widest, params)
    if alpha is not None:
        lam_rel = float(wrap_unit(Fraction(lam) - alpha))
        for p, S, eta, cv, live in _bump_terms(s, alpha, xi_pts, params, params.d):
            if S == 0:
                continue
            for jj in js:
                if abs(lam_rel) > params.arc_radius(jj):
                    continue
                vals = phi_star(jj, lam_rel, eta[:, live] if params.n > 1 else eta[0, live], params)
                total[live] += S * vals * cv[live]
    return complex(total[0]) if scalar else total


def phi_s(s: int, lam: float, xi, params: PipelineParams):
    """Phi^s_lambda(xi) = sum_{j >= s/eps1} Phi*_{j,lambda}(xi) chi_s(xi), truncated at j_max."""
    xi_pts, scalar = _as_points(xi, params.n)
    cv = bump_value(params.chi(s), centered(xi_pts))
    total = np.zeros(xi_pts.shape[1], dtype=complex)
    live = cv > 0
    for jj in range(params.first_scale(s), params.j_max + 1):
        if abs(lam) > params.arc_radius(jj) or not np.any(live):
            continue
        arg = xi_pts[:, live] if params.n > 1 else xi_pts[0, live]
        total[live] += phi_star(jj, lam, centered(arg), params) * cv[live]
    return complex(total[0]) if scalar else total


def in_major_arc(lam: float, j: int, params: PipelineParams) -> bool:
    return major_arc_membership(lam, params.arcs(j)) is not None


def in_covered_arc(lam: float, j: int, params: PipelineParams) -> bool:
    """Major-arc membership restricted to denominators whose level s <= eps1 j is summed."""
    hit = major_arc_membership(lam, params.arcs(j))
    return hit is not None and hit.q.bit_length() <= params.max_level(j)


def error_term_E(j: int, lam: float, xi, params: PipelineParams):
    """m_{j,lambda}(xi) 1_{X_j}(lambda) - sum_{1 <= s <= eps1 j} L^s_{j,lambda}(xi).

    On arcs with q >= 2^floor(eps1 j) no summed level carries a/q, so there
    E = m exactly; ``in_covered_arc`` separates those arcs out.
    """
    xi_pts, scalar = _as_points(xi, params.n)
    out = np.zeros(xi_pts.shape[1], dtype=complex)
    if in_major_arc(lam, j, params):
        out += np.atleast_1d(multiplier_m(j, lam, xi_pts, params.kernel, params.budget))
    for s in range(1, params.max_level(j) + 1):
        out -= np.atleast_1d(assemble_Ls(s, lam, xi_pts, params, j=j))
    return complex(out[0]) if scalar else out


def weyl_multiplier_L2(s: int, alpha, xi, params: PipelineParams):
    """L^{s,2}_alpha(xi) = sum_{beta in B_s(alpha)} S(alpha, beta) chi_s(xi - beta).

    A float alpha within rounding of a fraction with denominator below 2^s is
    read as that fraction.
    """
    xi_pts, scalar = _as_points(xi, params.n)
    total = np.zeros(xi_pts.shape[1], dtype=complex)
    alpha = Fraction(alpha)
    if alpha.denominator >= 2**s:
        near = alpha.limit_denominator(2**s - 1)
        if abs(near - alpha) < 1e-12:
            alpha = near
    if alpha in _rs_by_alpha(s, params):
        for p, S, eta, cv, live in _bump_terms(s, alpha, xi_pts, params, params.d):
            total += S * cv
    return complex(total[0]) if scalar else total


# -- the maximal operator --------------------------------------------------

def lambda_grid(level: int, params: PipelineParams | None = None, j: int | None = None,
                per_arc: int = 9) -> np.ndarray:
    """Dyadic rationals k 2^-level in (0, 1], refined near major-arc centres of scale j."""
    pts = set((np.arange(1, 2**level + 1) / 2.0**level).tolist())
    if params is not None and j is not None:
        arcs = params.arcs(j)
        rad = arcs.radius
        for q in range(1, arcs.max_denominator + 1):
            for a in range(0, q + 1):
                if math.gcd(a, q) != 1:
                    continue
                for t in np.linspace(-1.0, 1.0, per_arc):
                    lam = a / q + t * rad
                    if 0 < lam <= 1:
                        pts.add(float(lam))
    return np.array(sorted(pts))


def carleson_operator(f: GridSignal, lam_grid, j_max: int, kspec: KernelSpec = KernelSpec(),
                      budget: int = DEFAULT_BUDGET) -> GridSignal:
    """max over the lambda grid of |m_lambda(D) f|, m_lambda = sum_{j <= j_max} m_{j,lambda}.

    A lower bound for the supremum over all lambda.
    """
    lam_grid = np.asarray(lam_grid, dtype=float).ravel()
    if lam_grid.size == 0 or np.any(lam_grid <= 0) or np.any(lam_grid > 1):
        raise ParameterError("lambda grid must be a nonempty subset of (0, 1]")
    if f.spec.n != kspec.n:
        raise ParameterError("grid and kernel dimensions differ")
    pts, vals = truncated_kernel(j_max, kspec, budget)
    best = np.zeros(f.spec.shape)
    for lam in lam_grid:
        m = _grid_symbol(pts, vals, float(lam), f.spec, kspec.d)
        best = np.maximum(best, np.abs(apply_multiplier(m, f).values))
    return GridSignal(f.spec, best)
