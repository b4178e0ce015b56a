import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from compser import group, quadrature, wigner
from compser.suites import measure_schur, pw_functions

dims = st.sampled_from([1, 2, 3])
seeds = st.integers(0, 2 ** 32 - 1)


def words(d, seed, n=8, length=5):
    rng = np.random.default_rng(seed)
    return np.stack([group.random_word(d, rng, length=length) for _ in range(n)])


@given(dims, seeds)
def test_products_stay_in_group(d, seed):
    g = words(d, seed)
    prod = g[0]
    for h in g[1:]:
        prod = prod @ h
    J = group.metric(d)
    scale = np.abs(prod).max() ** 2
    assert np.abs(prod.T @ J @ prod - J).max() < 1e-12 * scale
    assert group.is_group_element(prod)


@given(dims, seeds)
def test_iwasawa_reassembles(d, seed):
    g = words(d, seed)
    f = group.iwasawa(g)
    assert np.abs(group.reassemble(f) - g).max() < 1e-10
    k = f.k
    assert np.abs(k[..., d + 1, d + 1] - 1).max() < 1e-12
    kt = np.swapaxes(k, -1, -2)
    assert np.abs(kt @ k - np.eye(d + 2)).max() < 1e-12


@given(dims, seeds)
def test_iwasawa_of_factors_is_identity_on_factors(d, seed):
    rng = np.random.default_rng(seed)
    k = group.random_k(d, rng)
    H = rng.uniform(-2, 2)
    x = rng.uniform(-2, 2, d)
    f = group.iwasawa(k @ group.make_a(H, d) @ group.make_n(x))
    assert np.abs(f.k - k).max() < 1e-11
    assert abs(f.H - H) < 1e-12
    assert np.abs(f.n - x).max() < 1e-11


@given(st.sampled_from([2, 3]), seeds)
def test_H_is_M_conjugation_invariant(d, seed):
    rng = np.random.default_rng(seed)
    g = words(d, seed, n=4)
    m = group.embed_m(group.random_rotation(d, rng))
    lhs = group.H_of(m @ g @ group.inverse(m))
    assert np.abs(lhs - group.H_of(g)).max() < 1e-11


@given(dims, st.floats(-3, 3), seeds)
def test_cocycle_relation(d, t, seed):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-3, 3, d)
    nb = group.make_nbar(x)
    lhs = group.H_of(group.make_a(t, d) @ group.kappa(nb))
    rhs = group.H_of(group.make_a(t, d) @ nb @ group.make_a(-t, d)) + t - group.H_of(nb)
    assert abs(lhs - rhs) < 1e-10


@given(dims, seeds)
def test_nbar_abelian_and_height(d, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(-2, 2, (2, d))
    assert np.abs(group.make_nbar(x) @ group.make_nbar(y) - group.make_nbar(x + y)).max() < 1e-12
    assert np.abs(group.make_n(x) @ group.make_n(y) - group.make_n(x + y)).max() < 1e-12
    assert math.exp(group.H_of(group.make_nbar(x))) == pytest.approx(1 + x @ x, abs=1e-12)


@given(dims, st.floats(-3, 3), seeds)
def test_a_conjugates_nbar(d, t, seed):
    x = np.random.default_rng(seed).uniform(-2, 2, d)
    lhs = group.make_a(t, d) @ group.make_nbar(x) @ group.make_a(-t, d)
    assert np.abs(lhs - group.make_nbar(math.exp(-t) * x)).max() < 1e-12


@given(st.sampled_from([2, 3]), seeds)
def test_M_centralises_A_and_rotates_nbar(d, seed):
    rng = np.random.default_rng(seed)
    r = group.random_rotation(d, rng)
    m = group.embed_m(r)
    a = group.make_a(0.7, d)
    assert np.abs(m @ a - a @ m).max() < 1e-12
    x = rng.uniform(-1, 1, d)
    assert np.abs(m @ group.make_nbar(x) @ group.inverse(m) - group.make_nbar(r @ x)).max() < 1e-12


def test_basic_elements():
    assert np.array_equal(group.make_a(0.0, 2), np.eye(4))
    assert np.abs(group.make_a(0.3, 2) @ group.make_a(0.5, 2) - group.make_a(0.8, 2)).max() < 1e-12
    assert group.iwasawa(group.make_a(1.0, 2)).H == pytest.approx(1.0, abs=1e-14)
    f = group.iwasawa(np.eye(3))
    assert np.allclose(f.k, np.eye(3)) and f.H == 0 and np.allclose(f.n, 0)


def test_embed_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        group.embed_k(np.ones((3, 3)))
    with pytest.raises(ValueError):
        group.embed_m(2 * np.eye(2))


def test_iwasawa_rejects_bad_input():
    g = np.eye(3)
    g[2, 2] = -1.0
    g[1, 1] = -1.0
    with pytest.raises(ValueError):
        group.iwasawa(g)


def test_dist_K():
    k = group.random_k(2, np.random.default_rng(0))
    assert group.dist_K(k, k) < 1e-7
    for theta in (0.3, 1.2, 3.0):
        r = group.embed_k(np.array([[math.cos(theta), -math.sin(theta)],
                                    [math.sin(theta), math.cos(theta)]]))
        assert group.dist_K(np.eye(3), r) == pytest.approx(theta, abs=1e-10)
    k2 = group.random_k(2, np.random.default_rng(1))
    assert group.dist_K(k, k2) == pytest.approx(group.dist_K(k2, k), abs=1e-10)


def test_algebra_normalisation():
    H = group.boost_generator(1, 1)
    assert group.algebra_inner(H, H) == 1.0
    R = group.rotation_generator(0, 1, 2)
    assert group.algebra_inner(R, R) == 1.0


# --- quadrature -----------------------------------------------------------------

@pytest.mark.parametrize("d, level", [(1, 4), (2, 3), (3, 2)])
def test_weights_sum_to_one(d, level):
    grid = quadrature.k_quadrature(d, level)
    assert abs(grid.weights.sum() - 1) < 1e-12
    assert np.all(grid.weights > 0)
    if d in (2, 3):
        m = quadrature.m_quadrature(d, level)
        assert abs(m.weights.sum() - 1) < 1e-12


def test_so3_type_one_norm():
    grid = quadrature.k_quadrature(2, 4)
    D = wigner.wigner_D_matrix(1, grid.rotations)
    assert grid.integrate(np.abs(D[:, 0, 0]) ** 2) == pytest.approx(1 / 3, abs=1e-13)
    assert abs(grid.integrate(D[:, 0, 0] * np.conj(D[:, 1, 0]))) < 1e-13


def test_orthogonality_improves_with_level():
    defects = [measure_schur(2, level, degree=4) for level in (2, 3, 4)]
    assert defects[0] >= defects[1] >= defects[2]
    assert defects[2] < 1e-12


def test_so4_grid_reproduces_haar_averages():
    grid = quadrature.k_quadrature(3, 3)
    R = grid.rotations
    # E[R_ij R_kl] = delta_ik delta_jl / 4 on SO(4)
    second = np.einsum("n,nij,nkl->ijkl", grid.weights, R, R)
    expected = np.einsum("ik,jl->ijkl", np.eye(4), np.eye(4)) / 4
    assert np.abs(second - expected).max() < 1e-12
    assert np.abs(grid.integrate(R)).max() < 1e-12


def test_pw_functions_shape():
    grid = quadrature.k_quadrature(2, 3)
    assert pw_functions(2, grid.nodes, 2).shape == (len(grid), 1 + 9 + 25)
