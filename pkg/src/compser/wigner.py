"""Wigner D-functions for SO(3) and SU(2).

Conventions: rotations are ``R = Rz(alpha) @ Ry(beta) @ Rz(gamma)`` with
right-handed generators, and

    D^j(R) = exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz)

in the basis |j, m>, m = -j..j (array index m + j).  This makes ``D`` a
homomorphism.  Small-d matrices come from a single diagonalisation of
``Jy`` per spin, which is stable well beyond the spins used here.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np


def rot_z(a):
    a = np.asarray(a, dtype=float)
    c, s = np.cos(a), np.sin(a)
    out = np.zeros(a.shape + (3, 3))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    out[..., 2, 2] = 1.0
    return out


def rot_y(b):
    b = np.asarray(b, dtype=float)
    c, s = np.cos(b), np.sin(b)
    out = np.zeros(b.shape + (3, 3))
    out[..., 0, 0] = c
    out[..., 0, 2] = s
    out[..., 2, 0] = -s
    out[..., 2, 2] = c
    out[..., 1, 1] = 1.0
    return out


def euler_matrix(alpha, beta, gamma):
    return rot_z(alpha) @ rot_y(beta) @ rot_z(gamma)


def euler_angles(R):
    """ZYZ Euler angles of rotation matrices with shape (..., 3, 3).

    alpha is read off the third column; beta and gamma are then taken from
    ``Rz(-alpha) R``, which keeps the result well conditioned near the
    poles (errors in alpha only multiply terms of size sin(beta)).
    """
    R = np.asarray(R, dtype=float)
    alpha = np.arctan2(R[..., 1, 2], R[..., 0, 2])
    P = rot_z(-alpha) @ R
    beta = np.arctan2(P[..., 0, 2], P[..., 2, 2])
    gamma = np.arctan2(P[..., 1, 0], P[..., 1, 1])
    return alpha, beta, gamma


@lru_cache(maxsize=None)
def _jy_eig(two_j: int):
    j = two_j / 2.0
    m = np.arange(-j, j + 1)
    n = len(m)
    jp = np.zeros((n, n))
    for i in range(n - 1):
        # J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>
        jp[i + 1, i] = np.sqrt(j * (j + 1) - m[i] * (m[i] + 1))
    jy = (jp - jp.T) / 2j
    w, v = np.linalg.eigh(jy)
    w = np.round(2 * w) / 2
    return m, w, v


def small_d(j: float, beta) -> np.ndarray:
    """Wigner small-d matrices d^j(beta), shape beta.shape + (2j+1, 2j+1)."""
    m, w, v = _jy_eig(int(round(2 * j)))
    beta = np.asarray(beta, dtype=float)
    ph = np.exp(-1j * beta[..., None] * w)
    out = np.einsum("ak,...k,bk->...ab", v, ph, v.conj())
    return out.real


def small_d_column(j: float, col: float, beta) -> np.ndarray:
    """Column ``d^j_{:, col}(beta)`` with shape beta.shape + (2j+1,)."""
    m, w, v = _jy_eig(int(round(2 * j)))
    c = int(round(col + j))
    beta = np.asarray(beta, dtype=float)
    ph = np.exp(-1j * beta[..., None] * w)
    out = np.einsum("ak,...k,k->...a", v, ph, v[c].conj())
    return out.real


def wigner_D(j: float, alpha, beta, gamma) -> np.ndarray:
    """Full D^j for arrays of Euler angles."""
    m = np.arange(-j, j + 1)
    d = small_d(j, beta)
    alpha = np.asarray(alpha, dtype=float)[..., None, None]
    gamma = np.asarray(gamma, dtype=float)[..., None, None]
    return np.exp(-1j * m[:, None] * alpha) * d * np.exp(-1j * m[None, :] * gamma)


def wigner_D_matrix(j: int, R) -> np.ndarray:
    """D^j evaluated at SO(3) matrices ``R`` (integral spin only)."""
    a, b, g = euler_angles(R)
    return wigner_D(j, a, b, g)


def wigner_D_column(j: int, col: int, R) -> np.ndarray:
    """Column ``D^j_{:, col}`` evaluated at SO(3) matrices, shape (..., 2j+1)."""
    a, b, g = euler_angles(R)
    m = np.arange(-j, j + 1)
    d = small_d_column(j, col, b)
    return np.exp(-1j * m * np.asarray(a)[..., None]) * d * np.exp(-1j * col * np.asarray(g))[..., None]


# --- SU(2) and the double cover of SO(4) -----------------------------------

def su2_from_euler(alpha, beta, gamma) -> np.ndarray:
    """SU(2) matrices exp(-i a sz/2) exp(-i b sy/2) exp(-i g sz/2)."""
    return wigner_D(0.5, alpha, beta, gamma)


def quaternion_from_su2(U) -> np.ndarray:
    """Unit quaternion (w, x, y, z) with U = w I - i (x sx + y sy + z sz)."""
    U = np.asarray(U)
    w = (U[..., 0, 0] + U[..., 1, 1]).real / 2
    z = -(U[..., 0, 0] - U[..., 1, 1]).imag / 2
    x = -(U[..., 0, 1] + U[..., 1, 0]).imag / 2
    y = (U[..., 1, 0] - U[..., 0, 1]).real / 2
    return np.stack([w, x, y, z], axis=-1)


def _left_mult(q):
    w, x, y, z = np.moveaxis(np.asarray(q), -1, 0)
    return np.stack([
        np.stack([w, -x, -y, -z], -1),
        np.stack([x, w, -z, y], -1),
        np.stack([y, z, w, -x], -1),
        np.stack([z, -y, x, w], -1),
    ], -2)


def _right_mult(q):
    w, x, y, z = np.moveaxis(np.asarray(q), -1, 0)
    return np.stack([
        np.stack([w, -x, -y, -z], -1),
        np.stack([x, w, z, -y], -1),
        np.stack([y, -z, w, x], -1),
        np.stack([z, y, -x, w], -1),
    ], -2)


def so4_from_quaternions(q1, q2) -> np.ndarray:
    """Rotation x -> q1 x conj(q2) of R^4 = H, as a 4x4 matrix."""
    q2c = np.asarray(q2) * np.array([1.0, -1.0, -1.0, -1.0])
    return _left_mult(q1) @ _right_mult(q2c)
