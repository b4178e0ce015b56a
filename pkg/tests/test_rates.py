import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from compser.rates import (
    SpectralData, beta_rate, eta_s, lambda_rate, lattice_eta, mixing_eta, rate_report,
    rate_report_json, s_from_eigenvalue, validate_lax_phillips,
)
from compser.suites import brute_lambda

dims = st.sampled_from([1, 2, 3])
unit = st.floats(0.01, 0.99)


def test_eta_s_examples():
    assert eta_s(0.75, 1) == 0.5
    assert eta_s(1.9, 2) == 1.0
    for d in (1, 2, 3):
        assert eta_s((d + 1) / 2, d) == 1.0
    with pytest.raises(ValueError):
        eta_s(1.0, 2)


def test_mixing_eta_examples():
    assert mixing_eta(SpectralData(1, 0.9, 0.6)) == pytest.approx(0.3)
    for d in (1, 2, 3):
        assert mixing_eta(SpectralData(d, float(d))) == min(d / 2, 1.0)
    assert mixing_eta(SpectralData(5, 4.9, 2.5)) == 1.0


def test_lambda_examples():
    assert lambda_rate(SpectralData(1, 0.9, 0.6), 0.1) == pytest.approx(-0.7, abs=1e-12)
    assert lambda_rate(SpectralData(2, 1.9, 1.4), 0.1) == pytest.approx(-1.1, abs=1e-12)
    data = SpectralData(2, 1.95, 1.6)
    assert lambda_rate(data, 0.1) == pytest.approx(1.95 - 3, abs=1e-12)
    with pytest.raises(ValueError):
        lambda_rate(data, 0.5)


def test_beta_worked_example():
    rep = beta_rate(SpectralData(1, 0.9, 0.6), 0.05, 0.05)
    assert rep.beta == pytest.approx(0.2, abs=1e-12)
    assert rep.terms == pytest.approx((0.8, 0.2, 0.55))
    assert rep.lower_bound == pytest.approx(0.2, abs=1e-12)
    assert rep.limit == pytest.approx(0.3)
    with pytest.raises(ValueError):
        beta_rate(SpectralData(1, 0.9, 0.6), 0.0, 0.05)


def test_lattice_eta_examples():
    assert lattice_eta(SpectralData(2, 2.0, 1.2)) == pytest.approx(0.8)
    assert lattice_eta(SpectralData(3, 3.0, 1.5)) == pytest.approx(1.5)
    assert lattice_eta(SpectralData(2, 2.0, 1.2), True) == pytest.approx(0.8)
    assert lattice_eta(SpectralData(5, 5.0, 2.5)) == 2.0
    assert lattice_eta(SpectralData(5, 5.0, 2.5), True) == 2.5
    with pytest.raises(ValueError):
        lattice_eta(SpectralData(2, 1.9, 1.2))


def test_lax_phillips():
    lam1 = 0.7 * 0.3
    rep = validate_lax_phillips(SpectralData(1, 0.9, eigenvalues=[0.09, lam1]))
    assert rep["valid"] and rep["lambda0"] == pytest.approx(0.09)
    assert rep["s"][1] == pytest.approx(0.7, abs=1e-12)
    bad = validate_lax_phillips(SpectralData(1, 0.9, 0.6, eigenvalues=[0.09, 0.25]))
    assert not bad["valid"]
    assert any("outside" in msg for msg in bad["issues"])
    with pytest.raises(ValueError):
        validate_lax_phillips(SpectralData(1, 0.9, 0.6))


def test_spectral_data_validation_and_defaults():
    assert SpectralData(2, 1.5).s1 == 1.0
    assert SpectralData(1, 0.9, eigenvalues=[0.09]).s1 == 0.5
    for args in [(1, 0.4, None), (1, 0.9, 0.95), (2, 2.5, None), (0, 0.5, None)]:
        with pytest.raises(ValueError):
            SpectralData(*args)
    data = SpectralData(1, 0.9, eigenvalues=[0.09, 0.21])
    assert SpectralData.from_dict(data.to_dict()) == data


def test_report_keys():
    text = rate_report_json(SpectralData(2, 2.0, 1.2))
    rep = json.loads(text)
    assert set(rep) == {"eta", "eta_delta", "lambda", "beta", "lower_bound", "diagnostics"}
    assert rep["diagnostics"]["bms_beta"] == "not computed"
    assert rep["diagnostics"]["lattice_eta"] == pytest.approx(0.8)
    assert rate_report(SpectralData(1, 0.9, 0.6))["beta"] == pytest.approx(0.2)


@st.composite
def spectral(draw):
    d = draw(dims)
    a, b, c = draw(unit), draw(unit), draw(unit)
    delta = d / 2 + 1e-3 + a * (d / 2 - 1e-3)
    s1 = d / 2 + b * (delta - d / 2 - 1e-3)
    r = 1e-4 + c * (delta - s1 - 2e-4)
    return SpectralData(d, delta, s1), r


@given(spectral())
def test_lambda_matches_grid(arg):
    data, r = arg
    assume(r < data.delta - data.s1)
    assert abs(lambda_rate(data, r) - brute_lambda(data.d, data.delta, data.s1, r)) < 1e-9


@given(spectral(), st.floats(1e-4, 0.5))
def test_beta_lower_bound(arg, xi):
    data, r = arg
    assume(r < data.delta - data.s1)
    rep = beta_rate(data, r, xi)
    assert rep.beta >= min(1.0, data.delta - data.s1) - (xi + r) - 1e-12


@given(dims, unit, unit, unit)
def test_mixing_eta_monotone(d, a, b, c):
    lo, hi = sorted((d / 2 + 1e-3 + a * (d / 2 - 1e-3), d / 2 + 1e-3 + b * (d / 2 - 1e-3)))
    s1 = d / 2 + c * (lo - d / 2) * 0.99
    assume(s1 < lo)
    assert mixing_eta(SpectralData(d, lo, s1)) <= mixing_eta(SpectralData(d, hi, s1))
    s1b = s1 + 0.5 * (lo - s1)
    assert mixing_eta(SpectralData(d, lo, s1b)) <= mixing_eta(SpectralData(d, lo, s1))


@given(dims, st.floats(0.0, 1.0))
def test_eta_s_piecewise_linear(d, a):
    s = d / 2 + 1e-6 + a * d / 2
    assert eta_s(s, d) == pytest.approx(min(2 * s - d, 1.0))
    h = 1e-7
    assert abs(eta_s(s + h, d) - eta_s(s, d)) <= 2 * h + 1e-15


@given(dims, st.floats(0.0, 1.0))
def test_eigenvalue_round_trip(d, a):
    s = d / 2 + 1e-6 + a * (d / 2 - 2e-6)
    lam = s * (d - s)
    assert s_from_eigenvalue(lam, d) == pytest.approx(s, abs=1e-6 if a < 1e-3 else 1e-10)
    assert math.isfinite(lam)


def test_quarter_square_is_outside_window():
    rep = validate_lax_phillips(SpectralData(2, 1.9, eigenvalues=[1.9 * 0.1, 1.0]))
    assert not rep["valid"]


def test_rate_oracles_vectorised():
    s = np.linspace(0.6, 0.9, 5)
    assert np.allclose([eta_s(x, 1) for x in s], np.minimum(2 * s - 1, 1))
