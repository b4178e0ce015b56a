"""Haar quadrature grids on K = SO(d+1), on M = SO(d) and on K/M.

Weights are normalised to total mass one.  ``level`` fixes the resolution
as a power of two; ``degree`` is the largest t1 for which Schur
orthogonality between Peter-Weyl functions of types <= degree is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import group, wigner


@dataclass(frozen=True)
class QuadratureGrid:
    nodes: np.ndarray            # (N, d+2, d+2) group elements
    weights: np.ndarray          # (N,)
    degree: int
    angles: tuple = field(default=(), repr=False)

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def rotations(self) -> np.ndarray:
        d = self.nodes.shape[-1] - 2
        return self.nodes[:, : d + 1, : d + 1]

    def integrate(self, values) -> np.ndarray:
        """Weighted sum over the first axis of ``values``."""
        return np.tensordot(self.weights, values, axes=(0, 0))


def circle(n: int) -> tuple[np.ndarray, np.ndarray]:
    return 2 * np.pi * np.arange(n) / n, np.full(n, 1.0 / n)


def gauss_cos(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes beta in (0, pi) with Gauss-Legendre weights in cos(beta), mass 1."""
    x, w = np.polynomial.legendre.leggauss(n)
    return np.arccos(x)[::-1], w[::-1] / 2


def _so2_matrices(theta) -> np.ndarray:
    theta = np.asarray(theta)
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def _so3_grid(level: int):
    n = 2 ** level
    nb = max(1, 2 ** (level - 1))
    a, wa = circle(n)
    b, wb = gauss_cos(nb)
    A, B, C = np.meshgrid(a, b, a, indexing="ij")
    W = (wa[:, None, None] * wb[None, :, None] * wa[None, None, :]).ravel()
    R = wigner.euler_matrix(A.ravel(), B.ravel(), C.ravel())
    return R, W, min(nb - 1, n // 2 - 1), (A.ravel(), B.ravel(), C.ravel())


def _su2_grid(level: int):
    n = 2 ** level
    nb = max(1, 2 ** (level - 1))
    a, wa = circle(n)
    b, wb = gauss_cos(nb)
    c = 4 * np.pi * np.arange(2 * n) / (2 * n)
    wc = np.full(2 * n, 1.0 / (2 * n))
    A, B, C = np.meshgrid(a, b, c, indexing="ij")
    W = (wa[:, None, None] * wb[None, :, None] * wc[None, None, :]).ravel()
    U = wigner.su2_from_euler(A.ravel(), B.ravel(), C.ravel())
    return wigner.quaternion_from_su2(U), W, min(nb - 1, n // 2 - 1)


def k_quadrature(d: int, level: int) -> QuadratureGrid:
    """Product quadrature for probability Haar measure on K = SO(d+1)."""
    if d == 1:
        n = 2 ** level
        th, w = circle(n)
        return QuadratureGrid(group.embed_k(_so2_matrices(th)), w, n // 2 - 1, (th,))
    if d == 2:
        R, W, deg, ang = _so3_grid(level)
        return QuadratureGrid(group.embed_k(R), W, deg, ang)
    if d == 3:
        q, w, deg = _su2_grid(level)
        i, j = np.meshgrid(np.arange(len(w)), np.arange(len(w)), indexing="ij")
        R = wigner.so4_from_quaternions(q[i.ravel()], q[j.ravel()])
        return QuadratureGrid(group.embed_k(R), (w[i] * w[j]).ravel(), deg)
    raise ValueError(f"K quadrature is available for d in 1, 2, 3 (got {d})")


def m_quadrature(d: int, level: int) -> QuadratureGrid:
    """Product quadrature for probability Haar measure on M = SO(d)."""
    if d == 1:
        return QuadratureGrid(np.eye(3)[None], np.ones(1), 10 ** 9)
    if d == 2:
        n = 2 ** level
        th, w = circle(n)
        return QuadratureGrid(group.embed_m(_so2_matrices(th)), w, n // 2 - 1, (th,))
    if d == 3:
        R, W, deg, ang = _so3_grid(level)
        return QuadratureGrid(group.embed_m(R), W, deg, ang)
    raise ValueError(f"M quadrature is available for d in 1, 2, 3 (got {d})")


def coset_quadrature(d: int, n_alpha: int, n_beta: int) -> QuadratureGrid:
    """Quadrature on K/M with representatives k = Rz(alpha) Ry(beta) (d = 2).

    For d = 1 M is trivial and this is the circle grid with ``n_alpha`` nodes.
    Integrals of right-M-invariant functions on K reduce to this grid.
    """
    if d == 1:
        th, w = circle(n_alpha)
        return QuadratureGrid(group.embed_k(_so2_matrices(th)), w, n_alpha // 2 - 1, (th,))
    if d == 2:
        a, wa = circle(n_alpha)
        b, wb = gauss_cos(n_beta)
        A, B = np.meshgrid(a, b, indexing="ij")
        R = wigner.rot_z(A.ravel()) @ wigner.rot_y(B.ravel())
        W = (wa[:, None] * wb[None, :]).ravel()
        deg = min(n_beta - 1, n_alpha // 2 - 1)
        return QuadratureGrid(group.embed_k(R), W, deg, (A.ravel(), B.ravel(), np.zeros(A.size)))
    raise ValueError(f"coset quadrature is available for d in 1, 2 (got {d})")
