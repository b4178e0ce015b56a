import json
import math

import numpy as np
import pytest

from compser import group
from compser.asymptotics import (
    certify_decay, fit_slope, main_term, matcoef_direct, matcoef_nbar, minv_vanishing_suite,
)
from compser.harmonic import intertwining_scalars, unitary_inner
from compser.liealg import make_label
from compser.model import act, basis_vector, inner_K, random_vector
from compser.suites import vanishing_probes

# Legendre P_{-s}(cosh t) at s = 0.75, computed with mpmath.legenp
SPHERICAL_D1 = {1.0: 0.955475121399662715566756472394,
                2.0: 0.844434871121154183677205456801,
                4.0: 0.576139057029377042431119107405}


@pytest.mark.parametrize("t", sorted(SPHERICAL_D1))
def test_spherical_d1_two_routes(t):
    label = make_label(1, 0.75)
    u = basis_vector(label, 8, (0, 0))
    ref = SPHERICAL_D1[t]
    assert matcoef_direct(u, u, t).real == pytest.approx(ref, abs=1e-12)
    assert matcoef_nbar(u, u, t).real == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("t", [0.5, 1.5, 3.0])
def test_spherical_d2_closed_form(t):
    s = 1.4
    u = basis_vector(make_label(2, s), 4, (0, 0))
    ref = math.sinh((s - 1) * t) / ((s - 1) * math.sinh(t))
    assert matcoef_direct(u, u, t).real == pytest.approx(ref, abs=1e-12)


def test_direct_matches_action_route():
    rng = np.random.default_rng(2)
    label = make_label(2, 1.4)
    u = random_vector(label, 2, rng).with_cutoff(20)
    v = random_vector(label, 2, rng).with_cutoff(20)
    want = inner_K(act(group.make_a(1.0, 2), u), v)
    assert abs(matcoef_direct(u, v, 1.0) - want) < 1e-12 * u.norm() * v.norm()
    sc = intertwining_scalars(label, 20)
    want = unitary_inner(act(group.make_a(1.0, 2), u), v, sc)
    assert abs(matcoef_direct(u, v, 1.0, scalars=sc) - want) < 1e-12 * u.norm() * v.norm()


def test_mixed_routes_agree_d2():
    rng = np.random.default_rng(0)
    label = make_label(2, 1.4)
    kts = [(0, 0), (1, 0)]
    u, v = random_vector(label, 4, rng, kts), random_vector(label, 4, rng, kts)
    assert abs(matcoef_direct(u, v, 2.0) - matcoef_nbar(u, v, 2.0)) < 1e-9


def test_main_terms():
    assert main_term(*(2 * [basis_vector(make_label(2, 1.4), 2, (0, 0))])).k_form == pytest.approx(2.5)
    u = basis_vector(make_label(1, 0.75), 2, (0, 0))
    assert main_term(u, u).k_form == pytest.approx(5.24411510858423962 / math.pi, rel=1e-12)


def test_main_term_partial_sums():
    rng = np.random.default_rng(4)
    label = make_label(2, 1.5)
    u, v = random_vector(label, 3, rng), random_vector(label, 3, rng)
    mt = main_term(u, v, intertwining_scalars(label, 3))
    assert mt.partial_sums[-1] == pytest.approx(mt.k_form, abs=1e-12)
    assert mt.unitary_form is not None


def test_decay_d1_and_report_formats():
    u = basis_vector(make_label(1, 0.75), 32, (0, 0))
    rep = certify_decay(u, u, np.linspace(2, 8, 13), 0.05)
    assert rep.passed
    assert rep.target_slope == pytest.approx(-0.75)
    rows = rep.to_csv().splitlines()
    assert rows[0] == "t,re,im,main_re,main_im,residual" and len(rows) == 14
    assert json.loads(rep.summary_json())["pass"] is True


def test_fit_slope_exact_exponential():
    t = np.linspace(0, 3, 7)
    assert fit_slope(t, 2 * np.exp(-1.3 * t)) == pytest.approx(-1.3, abs=1e-12)


def test_vanishing_summands_and_rejection():
    label = make_label(2, 1.2, 1)
    probes = vanishing_probes(label, 12, seed=0)
    rep = minv_vanishing_suite(label, probes, np.linspace(2, 3, 3))
    assert rep["max_summand"] < 1e-8
    mt = main_term(*probes[0])
    assert abs(mt.k_form) < 1e-12
    with pytest.raises(ValueError):
        minv_vanishing_suite(make_label(2, 1.2), probes, [1.0, 2.0])


def test_nbar_route_at_zero_time():
    u = basis_vector(make_label(1, 0.75), 4, (0, 0))
    assert matcoef_nbar(u, u, 0.0).real == pytest.approx(1.0, abs=1e-10)
