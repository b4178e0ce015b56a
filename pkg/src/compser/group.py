"""Matrix model of G = SO°(d+1, 1) and its Iwasawa decomposition.

Coordinates are ``0..d`` (space) and ``d+1`` (time), with
``J = diag(1, ..., 1, -1)``.  K = SO(d+1) acts on the spatial block,
A boosts the pair (d, d+1), and M = SO(d) rotates coordinates ``0..d-1``.
N fixes the light-cone vector ``v+ = e_d + e_{d+1}`` and N-bar fixes
``v- = e_{d+1} - e_d``; with these choices ``a_t nbar_x a_{-t} = nbar_{e^{-t} x}``
and ``exp H(nbar_x) = 1 + |x|^2``.

All functions accept stacks of matrices with shape (..., n, n), n = d + 2.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.linalg import logm


def size(d: int) -> int:
    return d + 2


def dim_of(g: np.ndarray) -> int:
    return np.shape(g)[-1] - 2


def metric(d: int) -> np.ndarray:
    J = np.eye(d + 2)
    J[-1, -1] = -1.0
    return J


def is_group_element(g: np.ndarray, tol: float = 1e-9) -> bool:
    """J-orthogonal, determinant one, and time-orientation preserving."""
    g = np.asarray(g, dtype=float)
    d = dim_of(g)
    J = metric(d)
    ok = np.allclose(g.T @ J @ g, J, atol=tol * max(1.0, np.abs(g).max() ** 2))
    return bool(ok and abs(np.linalg.det(g) - 1) < 1e-6 and g[-1, -1] >= 1 - tol)


def make_a(t, d: int) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    g = np.broadcast_to(np.eye(d + 2), t.shape + (d + 2, d + 2)).copy()
    g[..., d, d] = np.cosh(t)
    g[..., d + 1, d + 1] = np.cosh(t)
    g[..., d, d + 1] = np.sinh(t)
    g[..., d + 1, d] = np.sinh(t)
    return g


def _unipotent(x, sign: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    X = np.zeros(x.shape[:-1] + (d + 2, d + 2))
    X[..., :d, d] = sign * x
    X[..., d, :d] = -sign * x
    X[..., :d, d + 1] = x
    X[..., d + 1, :d] = x
    return np.eye(d + 2) + X + 0.5 * (X @ X)


def make_nbar(x) -> np.ndarray:
    """Element of N-bar with parameter x in R^d."""
    return _unipotent(x, 1.0)


def make_n(x) -> np.ndarray:
    """Element of N with parameter x in R^d."""
    return _unipotent(x, -1.0)


def _check_rotation(r: np.ndarray, tol=1e-9):
    r = np.asarray(r, dtype=float)
    k = r.shape[-1]
    eye = np.eye(k)
    if not np.allclose(np.swapaxes(r, -1, -2) @ r, eye, atol=tol):
        raise ValueError("matrix is not orthogonal")
    if k and np.any(np.abs(np.linalg.det(r) - 1) > 1e-6):
        raise ValueError("matrix does not have determinant one")
    return r


def embed_k(rot) -> np.ndarray:
    """Block-embed an SO(d+1) matrix into G."""
    rot = _check_rotation(rot)
    d = rot.shape[-1] - 1
    g = np.broadcast_to(np.eye(d + 2), rot.shape[:-2] + (d + 2, d + 2)).copy()
    g[..., : d + 1, : d + 1] = rot
    return g


def embed_m(rot, d: int | None = None) -> np.ndarray:
    """Block-embed an SO(d) matrix into G (d may be given for SO(1))."""
    rot = np.asarray(rot, dtype=float)
    if d is None:
        d = rot.shape[-1]
    if d > 0:
        rot = _check_rotation(rot)
    g = np.broadcast_to(np.eye(d + 2), rot.shape[:-2] + (d + 2, d + 2)).copy()
    if d > 0:
        g[..., :d, :d] = rot
    return g


def inverse(g: np.ndarray) -> np.ndarray:
    """Group inverse J g^T J."""
    d = dim_of(g)
    J = metric(d)
    return J @ np.swapaxes(g, -1, -2) @ J


class IwasawaFactors(NamedTuple):
    """g = k a(H) n(x)."""

    k: np.ndarray
    H: np.ndarray
    n: np.ndarray


def iwasawa(g) -> IwasawaFactors:
    """Iwasawa factors of one element or a stack of elements.

    ``exp H = (g v+)_last``; the N parameter solves the linear condition
    that ``g e_i - x_i g v+`` has no time component; the K columns are then
    read off directly.
    """
    g = np.asarray(g, dtype=float)
    d = dim_of(g)
    gv = g[..., :, d] + g[..., :, d + 1]
    eH = gv[..., d + 1]
    if np.any(eH <= 0):
        raise ValueError("(g v+)_last <= 0: not in the identity component")
    x = g[..., d + 1, :d] / eH[..., None]
    kcols = g[..., : d + 1, :d] - x[..., None, :] * gv[..., : d + 1, None]
    k = np.broadcast_to(np.eye(d + 2), g.shape).copy()
    k[..., : d + 1, :d] = kcols
    k[..., : d + 1, d] = gv[..., : d + 1] / eH[..., None]
    return IwasawaFactors(k, np.log(eH), x)


def H_of(g) -> np.ndarray:
    """Logarithmic A-coordinate of g."""
    g = np.asarray(g, dtype=float)
    d = dim_of(g)
    return np.log(g[..., d + 1, d] + g[..., d + 1, d + 1])


def kappa(g) -> np.ndarray:
    return iwasawa(g).k


def reassemble(f: IwasawaFactors) -> np.ndarray:
    d = dim_of(f.k)
    return f.k @ make_a(f.H, d) @ make_n(f.n)


# --- Lie algebra -----------------------------------------------------------

def boost_generator(i: int, d: int) -> np.ndarray:
    """Symmetric generator of p mixing space coordinate i with time."""
    X = np.zeros((d + 2, d + 2))
    X[i, d + 1] = X[d + 1, i] = 1.0
    return X


def rotation_generator(i: int, j: int, d: int) -> np.ndarray:
    X = np.zeros((d + 2, d + 2))
    X[i, j] = -1.0
    X[j, i] = 1.0
    return X


def algebra_inner(X: np.ndarray, Y: np.ndarray) -> float:
    """Killing-form inner product c(-B(X, theta Y)) scaled so <H, H> = 1.

    For so(d+1, 1) this equals ``tr(X Y^T) / 2``.
    """
    return 0.5 * float(np.sum(X * Y))


def dist_K(k1, k2) -> float:
    """Bi-invariant distance on K from the matrix logarithm.

    With the normalisation of :func:`algebra_inner` an elementary rotation
    by angle theta has length |theta|, so the SO(2) constant is 1.
    """
    d = dim_of(k1)
    r = (k1[: d + 1, : d + 1]).T @ k2[: d + 1, : d + 1]
    L = np.real(logm(r))
    return float(np.sqrt(0.5 * np.sum(L * L)))


# --- random words ----------------------------------------------------------

def random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 0:
        return np.zeros((0, 0))
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_k(d: int, rng: np.random.Generator) -> np.ndarray:
    return embed_k(random_rotation(d + 1, rng))


def random_word(d: int, rng: np.random.Generator, length: int = 4, scale: float = 1.0) -> np.ndarray:
    """Product of bounded generators a_t, nbar_x and k."""
    g = np.eye(d + 2)
    for _ in range(length):
        c = rng.integers(3)
        if c == 0:
            h = make_a(rng.uniform(-scale, scale), d)
        elif c == 1:
            h = make_nbar(rng.uniform(-scale, scale, d))
        else:
            h = random_k(d, rng)
        g = g @ h
    return g


def rotation_angle_so2(k) -> np.ndarray:
    """Angle theta of k = [[cos, -sin], [sin, cos]] in the K block for d = 1."""
    k = np.asarray(k)
    return np.arctan2(k[..., 1, 0], k[..., 0, 0])


def k_block(g) -> np.ndarray:
    d = dim_of(g)
    return np.asarray(g)[..., : d + 1, : d + 1]


__all__ = [
    "IwasawaFactors", "make_a", "make_n", "make_nbar", "embed_k", "embed_m",
    "iwasawa", "H_of", "kappa", "reassemble", "dist_K", "random_word",
    "random_k", "inverse", "metric", "is_group_element", "boost_generator",
    "rotation_generator", "algebra_inner",
]
