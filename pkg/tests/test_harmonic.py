import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from compser import group
from compser.harmonic import (
    InvalidParameters, a_ratio, cplus, eisenstein_check, intertwining_scalars, kv_ratio_check,
    nbar_mass, spherical_cplus, t_bound, t_matrix, unitary_inner,
)
from compser.liealg import ktypes_of_compser, make_label
from compser.model import basis_vector, project_mtype_left, random_vector
from compser.suites import measure_first_order

# pi Gamma(2s-1) / (2^(2s-2) Gamma(s+n) Gamma(s-n)) at s = 0.75, evaluated with mpmath
CPLUS_D1 = {0: 5.24411510858423962, 1: -1.74803836952807987,
            2: 1.24859883537719991, 3: -1.02158086530861811}


def test_cplus_d1_frozen_values():
    C = cplus(make_label(1, 0.75), 4)
    for n, ref in CPLUS_D1.items():
        for m in (n, -n):
            assert C.block((m, 0), (m, 0))[0, 0] == pytest.approx(ref, rel=1e-12)
    assert C.report["quadrature_change"] < 1e-10


def test_cplus_spherical_closed_forms():
    assert cplus(make_label(1, 0.75), 2, s=1.0).block((0, 0), (0, 0))[0, 0] == pytest.approx(math.pi, abs=1e-8)
    assert cplus(make_label(2, 1.5), 2).block((0, 0), (0, 0))[0, 0] == pytest.approx(2 * math.pi, abs=1e-6)
    for d, s in [(1, 0.6), (1, 0.9), (2, 1.2), (2, 1.8)]:
        val = cplus(make_label(d, s), 2).block((0, 0), (0, 0))[0, 0].real
        assert val == pytest.approx(spherical_cplus(s, d), rel=1e-8)


def test_cplus_rejects_small_s():
    with pytest.raises(ValueError):
        cplus(make_label(2, 1.5), 2, s=1.0)


def test_nbar_mass():
    assert nbar_mass(1) == pytest.approx(math.pi)
    assert nbar_mass(2) == pytest.approx(math.pi)


# --- T operators --------------------------------------------------------------------

def test_t_diagonal_is_scaled_projection():
    T = t_matrix((1, 0), (1, 0), make_label(2, 1.5))
    expected = np.zeros((3, 3))
    expected[1, 1] = 3.0
    assert np.abs(T - expected).max() < 1e-8


@pytest.mark.parametrize("ups", [0, 1])
def test_t_adjoint_and_bound(ups):
    label = make_label(2, 1.5, ups)
    kts = ktypes_of_compser(label, 3)
    for a in kts:
        for c in kts:
            Tac, Tca = t_matrix(a, c, label), t_matrix(c, a, label)
            assert np.abs(Tac - Tca.conj().T).max() < 1e-10
            assert np.linalg.norm(Tac, 2) <= t_bound(a, c, label) + 1e-8


def test_t_vanishes_on_M_invariant_vectors():
    label = make_label(2, 1.5, 1)
    v = project_mtype_left(random_vector(label, 3, np.random.default_rng(0)), 0)
    kts = v.basis.ktypes
    assert max(np.linalg.norm(t_matrix(a, c, label) @ v.block(a)) for a in kts for c in kts) < 1e-9


def test_eisenstein_identity_at_identity():
    label = make_label(2, 1.5)
    assert eisenstein_check(np.eye(4), label, (1, 0), (1, 0))[2] < 1e-8
    assert eisenstein_check(np.eye(4), label, (0, 0), (1, 0))[2] < 1e-8


def test_eisenstein_identity_d1():
    assert eisenstein_check(group.make_a(1.0, 1), make_label(1, 0.75), (0, 0), (0, 0))[2] < 1e-6


# --- intertwining scalars -----------------------------------------------------------

def test_a_ratio_examples():
    assert a_ratio(make_label(2, 1.5), (0, 0), (1, 0)) == pytest.approx(1 / 3, abs=1e-14)
    assert a_ratio(make_label(1, 0.75), (0, 0), (1, 0)) == pytest.approx(1 / 3, abs=1e-14)
    assert a_ratio(make_label(2, 1.5), (2, 0), (2, 0)) == 1.0


def test_a_ratio_invalid_region():
    with pytest.raises(InvalidParameters):
        a_ratio(make_label(3, 2.2, 1), (1, 0), (1, 1))


def test_scalars_d3_table():
    sc = intertwining_scalars(make_label(3, 1.8, 1), 2)
    assert sc.base == (1, -1)
    assert sc[(1, 0)] == pytest.approx(4.0, rel=1e-12)
    assert sc[(1, 1)] == pytest.approx(1.0, rel=1e-12)
    assert sc[(2, 0)] == pytest.approx(3.1428571428571428, rel=1e-12)
    assert sc.to_csv().splitlines()[0] == "t1,t2,a_over_base"


paths = st.tuples(st.sampled_from([(1, 0.6), (1, 0.9), (2, 1.2), (2, 1.7), (3, 1.6), (3, 2.6)]),
                  st.integers(0, 1), st.integers(0, 10 ** 6))


@given(paths)
def test_ratio_is_path_independent(args):
    (d, s), ups, seed = args
    if ups and (d == 1 or (d == 3 and s >= 2)):
        ups = 0
    label = make_label(d, s, ups)
    kts = ktypes_of_compser(label, 6)
    rng = np.random.default_rng(seed)
    a, b, c = (kts[i] for i in rng.choice(len(kts), 3))
    chained = a_ratio(label, a, b) * a_ratio(label, b, c)
    assert chained == pytest.approx(a_ratio(label, a, c), rel=1e-12)


@given(st.integers(0, 10 ** 6), st.sampled_from([make_label(1, 0.8), make_label(2, 1.3),
                                                 make_label(2, 1.6, 1)]))
def test_unitary_form_positive(seed, label):
    v = random_vector(label, 5, np.random.default_rng(seed))
    sc = intertwining_scalars(label, 5)
    val = unitary_inner(v, v, sc)
    assert val.real > 0 and abs(val.imag) < 1e-12 * val.real


def test_unitary_form_normalised_on_base():
    label = make_label(2, 1.5, 1)
    sc = intertwining_scalars(label, 3)
    u = basis_vector(label, 3, sc.base, 0) * (1 + 2j)
    assert unitary_inner(u, u, sc) == pytest.approx(5.0, abs=1e-14)


def test_unitary_form_missing_scalar():
    label = make_label(2, 1.5)
    sc = intertwining_scalars(label, 1)
    u = basis_vector(label, 3, (3, 0))
    with pytest.raises(KeyError):
        unitary_inner(u, u, sc)


# --- first order action and Gamma quotients -----------------------------------------

@pytest.mark.parametrize("d, s, tol", [(1, 0.75, 1e-5), (2, 1.5, 1e-4)])
def test_first_order_raising(d, s, tol):
    res = measure_first_order(d, s)
    assert res["witness"]
    assert res["relative_defect"] < tol
    assert res["coefficient"] == pytest.approx(s, abs=1e-14)
    assert res["skip_norm"] < 1e-8


def test_kv_ratio():
    rep = kv_ratio_check(0.75, 1, [0.0, 1.0, 100.0, 1e4])
    assert rep["pass"]
    assert rep["value_at_0"] == pytest.approx(math.gamma(0.75) / math.gamma(0.25), rel=1e-13)
    tail = np.abs(rep["scaled_ratio"][2:] - 1)
    assert tail[1] < tail[0]
    with pytest.raises(ValueError):
        kv_ratio_check(0.4, 1, [1.0])
