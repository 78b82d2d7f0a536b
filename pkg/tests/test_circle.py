import numpy as np
import pytest

from mfreqlab.bumps import BumpSpec, bump_value, chi0
from mfreqlab.circle import (
    KernelSpec,
    PipelineParams,
    apply_piece_direct,
    assemble_Ls,
    carleson_operator,
    error_term_E,
    in_major_arc,
    kernel_piece,
    kernel_piece_l1,
    lambda_grid,
    multiplier_grid,
    multiplier_m,
    phi_continuous,
    phi_lattice_proxy,
    phi_riemann,
    phi_s,
    phi_star,
    riesz_kernel,
    truncated_kernel,
    truncated_multiplier_grid,
    weyl_multiplier_L2,
)
from mfreqlab.errors import InvariantViolation, ParameterError, ResolutionError, SizeError
from mfreqlab.gauss import gauss_sum
from mfreqlab.grid import GridSignal, GridSpec, apply_multiplier

K1 = riesz_kernel(1)


def test_kernel_piece_basics():
    pts, vals = kernel_piece(5, K1)
    assert not np.any(pts == 0)
    assert abs(vals.sum()) < 1e-14
    with pytest.raises(ParameterError):
        kernel_piece(0, K1)
    with pytest.raises(SizeError):
        kernel_piece(12, riesz_kernel(2), budget=1000)


def test_kernel_telescoping(rng):
    J = 7
    total = {}
    for j in range(1, J + 1):
        pts, vals = kernel_piece(j, K1)
        for y, v in zip(pts[0], vals):
            total[int(y)] = total.get(int(y), 0.0) + v
    ys = rng.integers(-2**J, 2**J, 1000)
    ys = ys[ys != 0]
    for y in ys:
        expected = (chi0(np.array([[y / 2**J]]))[0] - chi0(np.array([[float(y)]]))[0]) / y
        assert abs(total.get(int(y), 0.0) - expected) < 1e-14


def test_truncated_kernel_is_sum_of_pieces():
    pts, vals = truncated_kernel(5, K1)
    acc = {}
    for j in range(1, 6):
        p, v = kernel_piece(j, K1)
        for y, w in zip(p[0], v):
            acc[int(y)] = acc.get(int(y), 0.0) + w
    # chi0 vanishes at every nonzero integer, so nothing survives from the j = 0 end
    assert len(acc) == pts.shape[1]
    for y, w in zip(pts[0], vals):
        assert abs(acc[int(y)] - w) < 1e-14


def test_multiplier_trivial_values():
    assert abs(multiplier_m(6, 0.0, 0.0, K1)) < 1e-14
    pts, vals = kernel_piece(6, K1)
    xi = 0.137
    assert abs(multiplier_m(6, 0.0, xi) - np.sum(vals * np.exp(2j * np.pi * xi * pts[0]))) < 1e-12


def test_multiplier_bounded_by_l1():
    pts, vals = kernel_piece(7, K1)
    xi = np.linspace(0, 1, 200, endpoint=False)
    assert np.max(np.abs(multiplier_m(7, 0.3, xi))) <= np.abs(vals).sum() + 1e-12


def test_conjugate_symmetry(rng):
    for _ in range(100):
        lam, xi = rng.uniform(-1, 1), rng.uniform(-0.5, 0.5)
        j = int(rng.integers(1, 8))
        assert abs(multiplier_m(j, -lam, -xi) - np.conj(multiplier_m(j, lam, xi))) < 1e-12


def test_multiplier_grid_matches_direct_sum():
    spec = GridSpec(1, 64)
    f = GridSignal.random(spec, 4)
    for j, lam in [(3, 0.3), (4, 0.71), (2, 1.0)]:
        m = multiplier_grid(j, lam, spec)
        fast = apply_multiplier(m, f).values
        slow = apply_piece_direct(j, lam, f).values
        assert np.linalg.norm(fast - slow) <= 1e-9 * np.linalg.norm(slow)
        xi = spec.frequencies()[0]
        assert np.allclose(m.values, multiplier_m(j, lam, xi), atol=1e-12)


def test_multiplier_grid_2d():
    kspec = riesz_kernel(2)
    spec = GridSpec(2, 16)
    f = GridSignal.random(spec, 6)
    m = multiplier_grid(2, 0.4, spec, kspec)
    fast = apply_multiplier(m, f).values
    slow = apply_piece_direct(2, 0.4, f, kspec).values
    assert np.linalg.norm(fast - slow) <= 1e-9 * np.linalg.norm(slow)


def test_grid_too_small():
    with pytest.raises(ResolutionError):
        multiplier_grid(5, 0.1, GridSpec(1, 32))


def test_degree_two_phase():
    kspec = riesz_kernel(1, d=2)
    pts, vals = kernel_piece(4, kspec)
    lam, xi = 0.123, 0.3
    direct = np.sum(vals * np.exp(2j * np.pi * (lam * pts[0].astype(float) ** 4 + xi * pts[0])))
    assert abs(multiplier_m(4, lam, xi, kspec) - direct) < 1e-9


def test_phi_trivial_and_oracle():
    assert abs(phi_continuous(6, 0.0, 0.0)) < 1e-12
    xi = np.array([0.001, 0.01, 0.05])
    a = phi_continuous(6, 0.0, xi)
    b = phi_riemann(6, 0.0, xi)
    assert np.max(np.abs(a - b)) < 1e-6
    lam = 2.0**-13
    assert np.max(np.abs(phi_continuous(6, lam, xi) - phi_riemann(6, lam, xi))) < 1e-6


def test_phi_close_to_lattice_sum_for_large_j():
    # Euler-Maclaurin: the lattice sum and the integral agree up to small terms
    j, lam, xi = 10, 2.0**-21, 0.0007
    assert abs(phi_continuous(j, lam, xi) - multiplier_m(j, lam, xi)) < 1e-4 * kernel_piece_l1(j)


def test_phi_continuous_rejects_2d():
    with pytest.raises(ParameterError):
        phi_continuous(3, 0.0, 0.1, riesz_kernel(2))
    val = phi_lattice_proxy(3, 0.0, np.array([0.01, 0.02]), riesz_kernel(2))
    assert np.isfinite(val)


def test_phi_star_indicator():
    P = PipelineParams(eps1=0.1)
    assert phi_star(6, 1.0, 0.01, P) == 0
    assert phi_star(6, P.arc_radius(6) * 0.5, 0.01, P) != 0


def test_assemble_level_one_reduction():
    P = PipelineParams(eps1=0.25, kappa=2, j_max=8)
    xi = np.linspace(-0.3, 0.3, 41)
    lam = 2.0**-14
    L = assemble_Ls(1, lam, xi, P, j=5)
    expected = phi_star(5, lam, xi, P) * bump_value(BumpSpec.chi_s(1, 2), xi[None])
    assert np.allclose(L, expected, atol=1e-14)
    # lambda far from every alpha, xi outside every bump
    assert np.all(assemble_Ls(1, 0.37, xi, P, j=5) == 0)
    assert assemble_Ls(1, lam, 0.45, P, j=5) == 0


def test_assemble_sum_over_j_and_phi_s():
    P = PipelineParams(eps1=0.25, kappa=2, j_max=7)
    xi = np.array([0.0, 0.01, 0.2])
    lam = 2.0**-13
    total = sum(assemble_Ls(1, lam, xi, P, j=j) for j in range(4, 8))
    assert np.allclose(assemble_Ls(1, lam, xi, P), total, atol=1e-14)
    assert np.allclose(phi_s(1, lam, xi, P), total, atol=1e-14)
    assert np.all(phi_s(1, 1.0, xi, P) == 0)


def test_overlapping_bumps_detected():
    P = PipelineParams(eps1=0.25, kappa=1, j_max=12)
    with pytest.raises(InvariantViolation):
        assemble_Ls(2, 1 / 3, np.linspace(0, 1, 200), P, j=8)


def test_error_term_pieces():
    P = PipelineParams(eps1=0.25, kappa=2, j_max=10)
    xi = np.linspace(0, 1, 17)
    # below 1/eps1 the s-range is empty
    lam = 1.0
    assert in_major_arc(lam, 3, P)
    assert np.allclose(error_term_E(3, lam, xi, P), multiplier_m(3, lam, xi), atol=1e-14)
    # outside X_j and all indicators
    assert np.all(error_term_E(8, 0.4, xi, P) == 0)
    # compositional oracle
    lam = 0.5 + 2.0**-17
    direct = multiplier_m(8, lam, xi) - sum(assemble_Ls(s, lam, xi, P, j=8) for s in (1, 2))
    assert np.allclose(error_term_E(8, lam, xi, P), direct, atol=1e-14)


def test_approximation_deep_in_arc():
    P = PipelineParams(eps1=0.25, kappa=2, j_max=12)
    for j in (8, 10):
        lam = 0.5 + 2.0 ** (-2 * j) * 0.5
        xi = 0.5 + np.linspace(-2.0**-6, 2.0**-6, 33)
        E = np.abs(error_term_E(j, lam, xi, P)).max()
        M = np.abs(multiplier_m(j, lam, np.linspace(0, 1, 512, endpoint=False))).max()
        assert E <= 1e-6 * M


def test_weyl_multiplier():
    P = PipelineParams(eps1=0.25, kappa=2)
    assert weyl_multiplier_L2(1, 0, 0.0, P) == pytest.approx(1.0)
    assert weyl_multiplier_L2(2, 0.5, 0.25, P) == 0
    assert weyl_multiplier_L2(2, 0.2, 0.0, P) == 0
    Q = PipelineParams(eps1=0.25, kappa=3)
    alpha = 1 / 3
    xi = np.arange(3) / 3
    vals = np.abs(weyl_multiplier_L2(2, alpha, xi, Q))
    brute = max(abs(gauss_sum(1, 3, (b,), 1)) for b in range(3))
    assert vals.max() == pytest.approx(brute, abs=1e-12)


def test_carleson_operator():
    spec = GridSpec(1, 64)
    zero = GridSignal(spec, np.zeros(64))
    assert np.all(carleson_operator(zero, [0.5], 4).values == 0)
    out = carleson_operator(GridSignal.delta(spec), [0.3, 0.7], 4)
    pts, vals = truncated_kernel(4, K1)
    expected = np.zeros(64)
    expected[np.mod(-pts[0], 64)] = np.abs(vals)
    assert np.allclose(out.values, expected, atol=1e-12)
    f = GridSignal.random(spec, 3)
    single = carleson_operator(f, [0.3], 4).values
    direct = np.abs(apply_multiplier(truncated_multiplier_grid(4, 0.3, spec), f).values)
    assert np.allclose(single, direct, atol=1e-12)
    with pytest.raises(ParameterError):
        carleson_operator(f, [0.0], 4)


def test_lambda_grid_refined():
    P = PipelineParams(eps1=0.25)
    base = lambda_grid(4)
    refined = lambda_grid(4, P, 8)
    assert set(base) <= set(refined) and refined.size > base.size
    assert np.all((refined > 0) & (refined <= 1))


def test_custom_kernel_validation():
    with pytest.raises(ParameterError):
        KernelSpec("custom", 1, 1, None)
    with pytest.raises(ParameterError):
        KernelSpec("riesz_1d", 2, 1)


@pytest.mark.parametrize("eps1,d", [(0.25, 1), (0.1, 1), (0.125, 2)])
def test_phi_s_vanishes_at_one(eps1, d):
    P = PipelineParams(kernel=riesz_kernel(1, d), eps1=eps1, kappa=2, j_max=12)
    for s in range(1, 4):
        for j in range(P.first_scale(s), 40):
            assert P.arc_radius(j) < 1
        assert np.all(phi_s(s, 1.0, np.array([0.0, 0.01]), P) == 0)
