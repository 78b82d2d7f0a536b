import numpy as np
import pytest

from mfreqlab.bumps import (
    BumpSpec,
    bump_multiplier,
    bump_value,
    check_resolution,
    chi0,
    eta,
    phi_from_bump,
    smooth_step,
)
from mfreqlab.errors import ParameterError, ResolutionError
from mfreqlab.grid import GridSpec


def test_smooth_step_limits():
    u = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    assert np.allclose(smooth_step(u), [0, 0, 0.5, 1, 1])


def test_chi0_plateau_and_support(rng):
    assert chi0(np.zeros((1, 1)))[0] == 1.0
    t = rng.uniform(-0.5, 0.5, size=(2, 1000))
    assert np.all(chi0(t) == 1.0)
    far = rng.uniform(1.0, 3.0, size=(1, 1000)) * rng.choice([-1, 1], size=(1, 1000))
    assert np.all(chi0(far) == 0.0)
    vals = chi0(rng.uniform(-2, 2, size=(3, 5000)))
    assert vals.min() >= 0 and vals.max() <= 1


def test_chi_s_plateau():
    b = BumpSpec.chi_s(1, kappa=10)
    assert bump_value(b, np.array([2.0**-11])) == 1.0
    assert bump_value(b, np.array([2.0**-10 * 1.01])) == 0.0


def test_tilde_times_chi_is_chi(rng):
    xi = rng.uniform(-2, 2, size=(2, 10**4))
    chi = bump_value(BumpSpec.chi0(2), xi)
    til = bump_value(BumpSpec.chi0(2).tilde(), xi)
    assert np.array_equal(chi * til, chi)


def test_psi_nonnegative_and_telescoping(rng):
    y = rng.uniform(-300, 300, size=10**4)
    psi = BumpSpec("psi_annulus", (1.0,))
    J = 8
    total = np.zeros_like(y)
    for j in range(1, J + 1):
        v = bump_value(psi, (y * 2.0**-j)[None])
        assert v.min() >= 0
        total += v
    expected = chi0((y * 2.0**-J)[None]) - chi0(y[None])
    assert np.allclose(total, expected, atol=1e-14)


def test_eta_symmetric(rng):
    t = rng.uniform(-2, 2, 100)
    assert np.array_equal(eta(t), eta(-t))


def test_measure_and_validation():
    assert BumpSpec("chi0", (0.5, 0.25)).measure == 0.125
    with pytest.raises(ParameterError):
        BumpSpec("chi0", (2.0,))
    with pytest.raises(ParameterError):
        BumpSpec("square", (1.0,))


def test_resolution_error():
    with pytest.raises(ResolutionError):
        check_resolution(BumpSpec.chi_s(2, kappa=3), GridSpec(1, 64))
    check_resolution(BumpSpec.chi_s(1, kappa=2), GridSpec(1, 64))


def test_full_band_phi_is_delta():
    spec = GridSpec(1, 16)
    b = BumpSpec("chi0", (1.0,))
    # plateau covers (-1/2, 1/2], i.e. every dual grid point
    phi = phi_from_bump(b, spec)
    expected = np.zeros(16)
    expected[0] = 1.0
    assert np.allclose(phi.values, expected, atol=1e-14)


def test_phi_norms_scale_with_U():
    spec = GridSpec(1, 64)
    b = BumpSpec.chi_s(1, kappa=2)
    phi = phi_from_bump(b, spec)
    U = b.measure
    assert 1 / 8 <= phi.l2_norm() ** 2 / U <= 8
    assert 1 / 8 <= phi.lp_norm(1) <= 8
    assert 1 / 8 <= phi.lp_norm(np.inf) / U <= 8
    assert phi.values[0].real > 0 and abs(phi.values[0].imag) < 1e-15
    assert np.isclose(phi.values[0].real, bump_multiplier(b, spec).values.sum() / 64)
