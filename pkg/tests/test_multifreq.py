import math

import numpy as np
import pytest

from mfreqlab.bumps import BumpSpec, phi_from_bump
from mfreqlab.errors import DimensionError, ParameterError
from mfreqlab.grid import GridSignal, GridSpec, forward_dft
from mfreqlab.multifreq import (
    CoefficientField,
    FrequencyData,
    MultiplierFamily,
    a1_constant,
    classical_coefficients,
    lemma21_check,
    multifreq_apply,
    random_unimodular_coefficients,
    theorem1_rhs,
    vr_family_constant,
    windowed_norm,
)
from mfreqlab.variation import variation_rows

# the single absolute constant the transfer-bound sweep is checked against
C_ABS = 1.0

SPEC = GridSpec(1, 64)
U = BumpSpec.chi_s(1, 2)
PHI = phi_from_bump(U, SPEC)


def test_a1_single_unimodular():
    g = random_unimodular_coefficients(1, SPEC, seed=3)
    expected = PHI.l2_norm() / math.sqrt(U.measure)
    assert a1_constant(g, PHI, U.measure) == pytest.approx(expected, rel=1e-12)


def test_a1_zero_cases():
    g = CoefficientField(SPEC, (0, 1), np.zeros((2, 64)))
    assert a1_constant(g, PHI, U.measure) == 0
    g = random_unimodular_coefficients(2, SPEC, seed=0)
    assert a1_constant(g, GridSignal(SPEC, np.zeros(64)), U.measure) == 0
    with pytest.raises(ParameterError):
        a1_constant(g, PHI, 0.0)


def test_a1_classical_order_one():
    spec = GridSpec(1, 256)
    U2 = BumpSpec.chi_s(2, 2)
    step = int(2 * 2.0**-4 * 256)
    g = classical_coefficients([[k * step] for k in range(6)], spec)
    A1 = a1_constant(g, phi_from_bump(U2, spec), U2.measure)
    assert 0.25 <= A1 <= 4


def test_a1_methods_agree():
    g = random_unimodular_coefficients(3, SPEC, seed=11)
    a = a1_constant(g, PHI, U.measure, "fft")
    b = a1_constant(g, PHI, U.measure, "direct")
    c = a1_constant(g, PHI, U.measure, "windowed")
    assert abs(a - b) <= 1e-9 * b and abs(a - c) <= 1e-9 * b
    with pytest.raises(ParameterError):
        a1_constant(g, PHI, U.measure, "svd")


def test_a1_is_optimal(rng):
    g = random_unimodular_coefficients(4, SPEC, seed=5)
    A1, x, vec = a1_constant(g, PHI, U.measure, return_argmax=True)
    scale = A1 * math.sqrt(U.measure)
    for _ in range(100):
        xp = int(rng.integers(0, 64))
        c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert windowed_norm(g, PHI, (xp,), c) <= scale * np.linalg.norm(c) * (1 + 1e-12)
    assert windowed_norm(g, PHI, x, vec) >= 0.999 * scale * np.linalg.norm(vec)


def test_coefficient_field_validation():
    with pytest.raises(DimensionError):
        CoefficientField(SPEC, (0,), np.zeros((2, 64)))
    with pytest.raises(ParameterError):
        random_unimodular_coefficients(2, SPEC, seed=0, period=7)


def _family(times, values):
    return MultiplierFamily(SPEC, np.asarray(times, dtype=float), np.asarray(values))


def _inputs(k, seed=0):
    rng = np.random.default_rng(seed)
    inside = np.abs(SPEC.frequencies()[0]) <= U.scale[0] / 2
    F = np.zeros((k, 64), dtype=complex)
    F[:, inside] = rng.standard_normal((k, inside.sum())) + 1j * rng.standard_normal((k, inside.sum()))
    return FrequencyData(SPEC, np.fft.ifft(F, axis=1), U)


def test_frequency_data_support_checked():
    f = GridSignal.delta(SPEC).values[None]
    with pytest.raises(ParameterError):
        FrequencyData(SPEC, f, U)


def test_multifreq_trivial_families():
    g = random_unimodular_coefficients(2, SPEC, seed=1)
    F = _inputs(2)
    single = _family([0.0], np.ones((1, 64)))
    assert np.all(multifreq_apply(g, single, F).values == 0)
    same = _family([0.0, 1.0, 2.0], np.tile(np.linspace(0, 1, 64), (3, 1)))
    assert np.max(multifreq_apply(g, same, F).values) < 1e-12


def test_multifreq_scalar_family_factorizes():
    g = CoefficientField(SPEC, (0,), np.ones((1, 64)))
    F = _inputs(1, seed=2)
    c = np.array([0.3, -1.0, 2.0, 0.5 + 1j])
    fam = _family(np.arange(4), c[:, None] * np.ones((4, 64)))
    out = multifreq_apply(g, fam, F, q=3.0).values
    expected = np.abs(F.values[0]) * variation_rows(c[None], 3.0)[0]
    assert np.allclose(out, expected, rtol=1e-10, atol=1e-14)


def test_multifreq_scaling_and_per_label():
    g = random_unimodular_coefficients(3, SPEC, seed=4)
    F = _inputs(3, seed=5)
    rng = np.random.default_rng(6)
    vals = np.exp(2j * np.pi * rng.random((5, 64)))
    fam = _family(np.arange(5), vals)
    out = multifreq_apply(g, fam, F).values
    scaled = FrequencyData(SPEC, (-2 + 1j) * F.values, U)
    assert np.allclose(multifreq_apply(g, fam, scaled).values, abs(-2 + 1j) * out, rtol=1e-12)
    per = MultiplierFamily(SPEC, np.arange(5.0), np.stack([vals] * 3))
    assert per.per_label
    assert np.allclose(multifreq_apply(g, per, F).values, out, rtol=1e-12, atol=1e-14)


def test_multifreq_errors():
    g = random_unimodular_coefficients(2, SPEC, seed=1)
    fam = _family([0.0, 1.0], np.ones((2, 64)))
    with pytest.raises(DimensionError):
        multifreq_apply(g, fam, _inputs(3))
    with pytest.raises(ParameterError):
        multifreq_apply(g, fam, _inputs(2), q=2.0)
    with pytest.raises(ParameterError):
        _family([1.0, 0.0], np.ones((2, 64)))


def test_theorem1_rhs():
    assert theorem1_rhs(3, 1, 1.0, 1.0, 1.0) == pytest.approx(9.0)
    assert theorem1_rhs(4, 1, 2.0, 0.0, 1.0) == pytest.approx(4.0)
    vals = [theorem1_rhs(3, k, 1.0) for k in (1, 2, 5, 20, 100)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ParameterError):
        theorem1_rhs(2, 1, 1.0)


def test_vr_family_constant():
    assert vr_family_constant(_family([0.0], np.ones((1, 64))), 2.5) == 0
    same = _family(np.arange(4.0), np.ones((4, 64)))
    assert vr_family_constant(same, 2.5) == pytest.approx(0.0, abs=1e-12)
    m = np.exp(2j * np.pi * np.random.default_rng(0).random(64))
    fam = _family([0.0, 1.0], np.stack([m, 2 * m]))
    assert vr_family_constant(fam, 2.5, trials=8, seed=3) <= 1 + 1e-12
    assert vr_family_constant(fam, 2.5, trials=8, seed=3) == vr_family_constant(fam, 2.5, trials=8, seed=3)


def test_lemma21_examples():
    rng = np.random.default_rng(0)
    g = rng.standard_normal((10, 3))
    c = np.tile(rng.standard_normal(3), (5, 1))
    assert lemma21_check(g, c, 3.0, 2.5)[0] == pytest.approx(0.0, abs=1e-12)
    g = rng.standard_normal((7, 1)) + 1j * rng.standard_normal((7, 1))
    c = np.array([[1.0 + 1j], [-0.5]])
    lhs, rhs, _ = lemma21_check(g, c, 3.0, 2.5)
    assert lhs == pytest.approx(np.linalg.norm(g) * abs(c[1, 0] - c[0, 0]), rel=1e-12)
    assert lhs <= rhs
    with pytest.raises(ParameterError):
        lemma21_check(g, c, 3.0, 3.5)


def test_lemma21_sweep_uniform_constant():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        k, T, Y = rng.integers(1, 9), rng.integers(2, 11), rng.integers(1, 33)
        q = rng.uniform(2.2, 6.0)
        r = rng.uniform(2.05, q - 0.05)
        g = rng.standard_normal((Y, k)) + 1j * rng.standard_normal((Y, k))
        c = rng.standard_normal((T, k)) + 1j * rng.standard_normal((T, k))
        worst = max(worst, lemma21_check(g, c, q, r, rng.uniform(0.1, 2.0, Y))[2])
    assert worst <= C_ABS


def test_classical_coefficients():
    g = classical_coefficients([[0], [5]], SPEC)
    assert np.allclose(g.values[0], 1)
    spec_g = forward_dft(GridSignal(SPEC, g.values[1])).values
    assert abs(spec_g[5]) == pytest.approx(64) and np.abs(np.delete(spec_g, 5)).max() < 1e-9
    with pytest.raises(ParameterError):
        classical_coefficients([[0.5]], SPEC)


def test_classical_gram_nearly_orthogonal():
    spec = GridSpec(1, 256)
    U2 = BumpSpec.chi_s(2, 2)
    width = int(U2.scale[0] * 256)
    g = classical_coefficients([[0], [width]], spec)
    phi = phi_from_bump(U2, spec).values
    cols = phi[:, None] * g.values.T
    G = cols.conj().T @ cols
    assert abs(G[0, 1]) <= 0.5 * G[0, 0].real
