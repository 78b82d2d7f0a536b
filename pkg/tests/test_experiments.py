import numpy as np
import pytest

from mfreqlab.bumps import BumpSpec, bump_value
from mfreqlab.errors import ParameterError, SizeError
from mfreqlab.circle import PipelineParams, multiplier_m
from mfreqlab.experiments import (
    ARC_OFFSETS,
    _arc_lambdas,
    _xi_sample,
    a1_reduction_experiment,
    decay_experiments,
    reduction_input,
    thm1_scaling_experiment,
)
from mfreqlab.grid import GridSpec, centered


def test_thm1_small_sweep_deterministic():
    kw = dict(sizes=(2, 4), N=128, trials=1, n_times=4, vr_trials=1, seed=3, check_doubling=False)
    a = thm1_scaling_experiment(**kw)
    b = thm1_scaling_experiment(**kw)
    assert a.measured == b.measured
    rows = a.measured["per_size"]
    assert [r["size_xi"] for r in rows] == [2, 4]
    assert all(r["A1_mean"] > 0 and r["ratio_mean"] > 0 for r in rows)
    assert a.measured["within_bound"] == (a.measured["fitted_exponent"] <= 2.5)
    assert a.params["seed"] == 3 and a.params["q"] == 3


def test_thm1_classical_single_label():
    rec = thm1_scaling_experiment(sizes=(1, 2), N=128, trials=1, n_times=4, vr_trials=1,
                                  coefficients="classical", seed=0, check_doubling=False)
    assert np.isfinite(rec.measured["per_size"][0]["ratio_mean"])


def test_reduction_input_single_indicator():
    spec = GridSpec(1, 256)
    f, pts = reduction_input(2, 5, np.array([1.0, 0.0, 0.0]), 0, spec, 2)
    assert len(pts) == 3
    xi = spec.frequencies()[0]
    beta = pts[0].beta_float[0]
    mode = np.fft.ifft(bump_value(BumpSpec.chi_s_tilde(2, 2), centered(xi - beta)[None]))
    assert np.linalg.norm(f) == pytest.approx(np.linalg.norm(mode), rel=1e-12)
    with pytest.raises(ParameterError):
        reduction_input(2, 0, np.ones(2), 0, spec, 2)
    with pytest.raises(ParameterError):
        reduction_input(2, 0, np.ones(3), 0.2, spec, 2)


def test_a1_reduction_bounds():
    rec = a1_reduction_experiment(s=2, seed=0, check_doubling=False)
    m = rec.measured
    assert 1 / 8 <= m["norm_ratio"] <= 8
    assert m["A1"] <= 8 * m["weyl_bound"]
    rec0 = a1_reduction_experiment(s=2, seed=0, lambda_mode="missing", check_doubling=False)
    assert rec0.measured["A1"] == 0


def test_decay_gauss_sum():
    rec = decay_experiments("gauss_sum")
    assert rec.measured["slope"] == pytest.approx(-0.5, abs=0.05)
    assert rec.measured["slope_negative"]


def test_decay_minor_arc_small():
    rec = decay_experiments("minor_arc", [6, 7, 8], {"n_lambda": 8}, seed=1, check_doubling=False)
    assert len(rec.measured["values"]) == 3
    again = decay_experiments("minor_arc", [6, 7, 8], {"n_lambda": 8}, seed=1, check_doubling=False)
    assert again.measured == rec.measured


def test_decay_error_term_below_threshold_is_m():
    rec = decay_experiments("error_term", [2, 3], {"eps1": 0.25}, check_doubling=False)
    assert any("E = m" in n for n in rec.notes)
    assert not any(rec.measured["approximated"])
    P = PipelineParams(eps1=0.25, kappa=2, j_max=4)
    for j, val in zip([2, 3], rec.measured["values"]):
        xi = _xi_sample(j, P, 1)
        direct = max(np.abs(multiplier_m(j, lam, xi)).max() for lam in _arc_lambdas(j, P, False, ARC_OFFSETS))
        assert val == pytest.approx(direct, rel=1e-12)


def test_decay_errors():
    with pytest.raises(ParameterError):
        decay_experiments("nonsense")
    with pytest.raises(ParameterError):
        decay_experiments("gauss_sum", params={"colour": 1})
    with pytest.raises(SizeError):
        decay_experiments("gauss_sum", [10**8])
