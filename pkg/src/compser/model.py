"""Truncated Peter-Weyl model of L^2(K : upsilon) and the action U^s.

A vector is a table of coefficients over an orthonormal basis of
L^2(K : upsilon) restricted to K-types with t1 <= cutoff.

Basis conventions
-----------------
d = 1
    K = SO(2), M trivial.  The K-type (n) is spanned by
    ``b_n(k_theta) = exp(-i n theta)``, so that ``lambda(k_phi) b_n =
    exp(i n phi) b_n``.
d = 2
    K = SO(3), M = rotations about the third axis.  The K-type (l) is
    spanned by ``f_m(k) = sqrt(2l+1) D^l_{m, -u}(k)`` for m = -l..l, where
    u is the M-character of upsilon.  The left index m is the left M-type;
    pinning the right index at -u is what makes the right-M projection
    with character ``exp(i u phi)`` the identity (see ``right_m_projection``).

The standard representation is

    [U^s(g) v](k) = exp(-s H(g^-1 k)) v(kappa(g^-1 k)).

For g in K this is the left-regular action and is applied exactly on
coefficients.  For general g the function is sampled on a K/M grid and
projected back; the mass lost to K-types above the cutoff is reported.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import group, quadrature, wigner
from .liealg import CompSerLabel, dim_weight, ktype_weight, ktypes_of_compser


class TruncationOverflow(RuntimeError):
    """Raised when act() loses more mass than the configured tolerance."""


class Basis:
    """Index layout and basis functions for a (label, cutoff) pair."""

    def __init__(self, label: CompSerLabel, cutoff: int):
        if label.d not in (1, 2):
            raise NotImplementedError("the L^2(K:upsilon) model is implemented for d = 1, 2")
        self.label = label
        self.d = label.d
        self.cutoff = cutoff
        self.ups = label.ups
        self.right_index = -self.ups if self.d == 2 else 0
        self.ktypes = ktypes_of_compser(label, cutoff)
        self.dims = [self.block_dim(t) for t in self.ktypes]
        self.offsets = np.concatenate([[0], np.cumsum(self.dims)]).astype(int)
        self.size = int(self.offsets[-1])
        self._index = {t: i for i, t in enumerate(self.ktypes)}

    def block_dim(self, tau) -> int:
        return dim_weight(ktype_weight(tau, self.d), self.d + 1)

    def block(self, tau) -> slice:
        i = self._index[tuple(tau)]
        return slice(self.offsets[i], self.offsets[i + 1])

    def contains(self, tau) -> bool:
        return tuple(tau) in self._index

    def left_indices(self, tau) -> np.ndarray:
        """Left indices of the basis of one K-type (M-types for d = 2)."""
        if self.d == 1:
            return np.zeros(1, dtype=int)
        ell = tau[0]
        return np.arange(-ell, ell + 1)

    def entries(self):
        """Iterate (tau, left index, right index, flat position)."""
        for t in self.ktypes:
            sl = self.block(t)
            for pos, i in zip(range(sl.start, sl.stop), self.left_indices(t)):
                yield t, int(i), self.right_index, pos

    def left_mtypes(self) -> np.ndarray:
        """Left M-type of every basis function (0 for d = 1)."""
        out = np.zeros(self.size, dtype=int)
        for _, i, _, pos in self.entries():
            out[pos] = i
        return out

    def t1_array(self) -> np.ndarray:
        out = np.zeros(self.size, dtype=int)
        for t, _, _, pos in self.entries():
            out[pos] = t[0]
        return out

    # --- basis functions ----------------------------------------------------

    def functions(self, rot) -> np.ndarray:
        """Basis functions at K elements; ``rot`` has shape (N, d+1, d+1) or (N, d+2, d+2)."""
        rot = np.asarray(rot, dtype=float)
        if rot.shape[-1] == self.d + 2:
            rot = rot[..., : self.d + 1, : self.d + 1]
        lead = rot.shape[:-2]
        rot = rot.reshape((-1,) + rot.shape[-2:])
        out = np.empty((rot.shape[0], self.size), dtype=complex)
        if self.d == 1:
            th = group.rotation_angle_so2(rot)
            for t in self.ktypes:
                out[:, self.block(t)] = np.exp(-1j * t[0] * th)[:, None]
        else:
            a, b, g = wigner.euler_angles(rot)
            r = self.right_index
            for t in self.ktypes:
                ell = t[0]
                m = np.arange(-ell, ell + 1)
                col = wigner.small_d_column(ell, r, b)
                vals = np.exp(-1j * m * a[:, None]) * col * np.exp(-1j * r * g)[:, None]
                out[:, self.block(t)] = np.sqrt(2 * ell + 1) * vals
        return out.reshape(lead + (self.size,))

    def left_matrix(self, k, tau) -> np.ndarray:
        """Matrix of lambda(k) on the coefficients of one K-type block."""
        k = np.asarray(k, dtype=float)
        if k.shape[-1] == self.d + 2:
            k = k[..., : self.d + 1, : self.d + 1]
        if self.d == 1:
            th = group.rotation_angle_so2(k)
            return np.exp(1j * tau[0] * th)[..., None, None]
        return np.conj(wigner.wigner_D_matrix(tau[0], k))

    def left_action(self, k, coeffs: np.ndarray) -> np.ndarray:
        """Apply lambda(k) to a coefficient array (size,) or (size, ncols)."""
        out = np.empty_like(coeffs, dtype=complex)
        for t in self.ktypes:
            sl = self.block(t)
            out[sl] = self.left_matrix(k, t) @ coeffs[sl]
        return out


@lru_cache(maxsize=64)
def basis_for(label: CompSerLabel, cutoff: int) -> Basis:
    return Basis(label, cutoff)


@dataclass(frozen=True, eq=False)
class ModelVector:
    """Immutable coefficient table of a vector in the truncated model."""

    label: CompSerLabel
    cutoff: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (self.basis.size,):
            raise ValueError(f"expected {self.basis.size} coefficients, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def basis(self) -> Basis:
        return basis_for(self.label, self.cutoff)

    def _new(self, c) -> "ModelVector":
        return ModelVector(self.label, self.cutoff, c)

    def __add__(self, other: "ModelVector") -> "ModelVector":
        _same(self, other)
        return self._new(self.coeffs + other.coeffs)

    def __sub__(self, other: "ModelVector") -> "ModelVector":
        _same(self, other)
        return self._new(self.coeffs - other.coeffs)

    def __mul__(self, z) -> "ModelVector":
        return self._new(self.coeffs * z)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def block(self, tau) -> np.ndarray:
        return self.coeffs[self.basis.block(tau)]

    def populated(self, tol: float = 0.0) -> list:
        return [t for t in self.basis.ktypes if np.abs(self.block(t)).max(initial=0) > tol]

    def with_cutoff(self, cutoff: int) -> "ModelVector":
        """Zero-pad or truncate to another cutoff."""
        new = basis_for(self.label, cutoff)
        c = np.zeros(new.size, dtype=complex)
        for t in new.ktypes:
            if self.basis.contains(t):
                c[new.block(t)] = self.block(t)
        return ModelVector(self.label, cutoff, c)

    def to_json(self) -> str:
        entries = [[list(t), i, j, float(self.coeffs[p].real), float(self.coeffs[p].imag)]
                   for t, i, j, p in self.basis.entries() if self.coeffs[p] != 0]
        return json.dumps({"label": self.label.to_dict(), "cutoff": self.cutoff, "entries": entries})

    @classmethod
    def from_json(cls, text: str) -> "ModelVector":
        data = json.loads(text)
        label = CompSerLabel.from_dict(data["label"])
        basis = basis_for(label, int(data["cutoff"]))
        c = np.zeros(basis.size, dtype=complex)
        lookup = {(tuple(t), i): p for t, i, _, p in basis.entries()}
        for t, i, j, re, im in data["entries"]:
            if j != basis.right_index:
                raise ValueError(f"right index {j} is not {basis.right_index}")
            c[lookup[(tuple(t), i)]] = complex(re, im)
        return cls(label, int(data["cutoff"]), c)


def _same(u: ModelVector, v: ModelVector):
    if u.label != v.label or u.cutoff != v.cutoff:
        raise ValueError("vectors have different labels or cutoffs")


def zero(label: CompSerLabel, cutoff: int) -> ModelVector:
    return ModelVector(label, cutoff, np.zeros(basis_for(label, cutoff).size))


def basis_vector(label: CompSerLabel, cutoff: int, tau, left: int = 0) -> ModelVector:
    b = basis_for(label, cutoff)
    c = np.zeros(b.size, dtype=complex)
    sl = b.block(tau)
    idx = list(b.left_indices(tau)).index(left)
    c[sl.start + idx] = 1.0
    return ModelVector(label, cutoff, c)


def random_vector(label: CompSerLabel, cutoff: int, rng: np.random.Generator,
                  ktypes=None) -> ModelVector:
    b = basis_for(label, cutoff)
    c = np.zeros(b.size, dtype=complex)
    for t in (ktypes if ktypes is not None else b.ktypes):
        sl = b.block(t)
        n = sl.stop - sl.start
        c[sl] = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return ModelVector(label, cutoff, c)


# --- inner products and projections ----------------------------------------

def inner_K(u: ModelVector, v: ModelVector) -> complex:
    """L^2(K) inner product, linear in the first argument."""
    _same(u, v)
    return complex(np.vdot(v.coeffs, u.coeffs))


def project_ktype(v: ModelVector, tau) -> ModelVector:
    b = v.basis
    c = np.zeros(b.size, dtype=complex)
    if b.contains(tau):
        sl = b.block(tau)
        c[sl] = v.coeffs[sl]
    return v._new(c)


def mtype_character(sigma, m_rot) -> np.ndarray:
    """chi_sigma(m) = dim(sigma) tr sigma(m) for M = SO(1) or SO(2)."""
    m_rot = np.asarray(m_rot)
    if len(sigma) == 0:
        return np.ones(m_rot.shape[:-2])
    phi = np.arctan2(m_rot[..., 1, 0], m_rot[..., 0, 0])
    return np.exp(1j * sigma[0] * phi)


def _as_weight(sigma) -> tuple:
    if isinstance(sigma, (int, np.integer)):
        return (int(sigma),)
    return tuple(sigma)


def project_mtype_left(v: ModelVector, sigma, level: int | None = None) -> ModelVector:
    """P_sigma v = integral over M of conj(chi_sigma(m)) lambda(m) v, by quadrature."""
    sigma = _as_weight(sigma)
    b = v.basis
    grid = quadrature.m_quadrature(b.d, level if level is not None else _m_level(b.cutoff))
    mrot = grid.nodes[:, : b.d, : b.d]
    chi = np.conj(mtype_character(sigma, mrot))
    c = np.zeros(b.size, dtype=complex)
    for t in b.ktypes:
        sl = b.block(t)
        mats = b.left_matrix(grid.nodes, t)
        c[sl] = np.einsum("n,n,nij,j->i", grid.weights, chi, mats, v.coeffs[sl])
    return v._new(c)


def _m_level(cutoff: int) -> int:
    return max(3, int(np.ceil(np.log2(4 * cutoff + 4))))


def chi_vector(tau, label: CompSerLabel, cutoff: int | None = None) -> ModelVector:
    """chi_tau = sum_i conj(v_i(e)) v_i over an orthonormal basis of the tau block."""
    tau = tuple(tau)
    if len(tau) == 1:
        tau = (tau[0], 0)
    cutoff = tau[0] if cutoff is None else cutoff
    b = basis_for(label, max(cutoff, abs(tau[0])))
    if not b.contains(tau):
        raise ValueError(f"K-type {tau} does not occur for {label}")
    vals = b.functions(np.eye(b.d + 1)[None])[0]
    c = np.zeros(b.size, dtype=complex)
    sl = b.block(tau)
    c[sl] = np.conj(vals[sl])
    return ModelVector(label, b.cutoff, c)


def evaluate(v: ModelVector, k) -> np.ndarray:
    """Value of the truncated series at one or more K elements."""
    k = np.asarray(k, dtype=float)
    single = k.ndim == 2
    vals = v.basis.functions(k[None] if single else k) @ v.coeffs
    return vals[0] if single else vals


def right_m_projection(v: ModelVector, k, level: int | None = None) -> np.ndarray:
    """Values at k of the integral over M of conj(chi_upsilon(m)) v(k m)."""
    b = v.basis
    k = np.asarray(k, dtype=float)
    grid = quadrature.m_quadrature(b.d, level if level is not None else _m_level(b.cutoff))
    mrot = grid.nodes[:, : b.d, : b.d]
    chi = np.conj(mtype_character(v.label.upsilon, mrot))
    km = k[:, None] @ grid.nodes[None]
    vals = evaluate(v, km.reshape((-1,) + km.shape[-2:])).reshape(km.shape[:2])
    return vals @ (grid.weights * chi)


# --- the action U^s ---------------------------------------------------------

def is_in_K(g, tol: float = 1e-13) -> bool:
    g = np.asarray(g)
    d = group.dim_of(g)
    return abs(g[d + 1, d + 1] - 1) < tol and np.abs(g[d + 1, : d + 1]).max() < tol


def commutes_with_M(g, tol: float = 1e-12) -> bool:
    g = np.asarray(g)
    d = group.dim_of(g)
    if d == 1:
        return True
    off = np.abs(g[:d, d:]).max() + np.abs(g[d:, :d]).max()
    rot = g[:d, :d]
    return off < tol and np.allclose(rot, np.eye(d), atol=tol)


def auto_grid(g, cutoff: int, d: int) -> tuple[int, int]:
    """(n_alpha, n_beta) resolving U^s(g) of K-finite vectors to ~1e-14."""
    g = np.asarray(g)
    ct = max(1.0, float(g[-1, -1]))
    et = ct + np.sqrt(ct * ct - 1)
    if d == 1:
        n = 24 * et + 8 * cutoff + 64
        return int(2 ** np.ceil(np.log2(n))), 0
    if commutes_with_M(g):
        na = 2 * cutoff + 4
    else:
        na = 2 * cutoff + 16 * et + 16
    na = int(2 ** np.ceil(np.log2(na)))
    nb = int(cutoff + 12 * et + 16)
    return na, nb


@lru_cache(maxsize=16)
def _grid_and_functions(label: CompSerLabel, cutoff: int, na: int, nb: int):
    grid = quadrature.coset_quadrature(label.d, na, nb)
    F = basis_for(label, cutoff).functions(grid.nodes)
    F.setflags(write=False)
    return grid, F


def sample_action(g, coeffs: np.ndarray, label: CompSerLabel, cutoff: int,
                  s: float | None = None, grid: tuple | None = None):
    """Sample U^s(g) applied to coefficient columns on a K/M grid.

    Returns ``(values, grid, basis_values)`` with values of shape
    (nodes, ncols).
    """
    b = basis_for(label, cutoff)
    s = label.s if s is None else s
    na, nb = grid if grid is not None else auto_grid(g, cutoff, b.d)
    qg, F = _grid_and_functions(label, cutoff, na, nb)
    h = group.inverse(np.asarray(g, dtype=float)) @ qg.nodes
    fac = group.iwasawa(h)
    vals = b.functions(fac.k) @ coeffs
    vals = vals * np.exp(-s * fac.H)[:, None]
    return vals, qg, F


def act_coeffs(g, coeffs: np.ndarray, label: CompSerLabel, cutoff: int,
               s: float | None = None, grid: tuple | None = None, exact_k: bool = True):
    """U^s(g) on coefficient columns; returns (new coefficients, relative defect).

    ``exact_k=False`` forces the sampling route even for g in K.
    """
    b = basis_for(label, cutoff)
    C = np.asarray(coeffs, dtype=complex)
    vec = C.ndim == 1
    if vec:
        C = C[:, None]
    if exact_k and is_in_K(g):
        out = b.left_action(np.asarray(g), C)
        defect = np.zeros(C.shape[1])
    else:
        vals, qg, F = sample_action(g, C, label, cutoff, s=s, grid=grid)
        out = (F.conj() * qg.weights[:, None]).T @ vals
        total = qg.weights @ np.abs(vals) ** 2
        kept = np.sum(np.abs(out) ** 2, axis=0)
        defect = np.sqrt(np.maximum(total - kept, 0.0) / np.maximum(total, 1e-300))
    if vec:
        return out[:, 0], defect[0]
    return out, defect


def act(g, v: ModelVector, *, s: float | None = None, grid: tuple | None = None,
        tol: float | None = None, return_defect: bool = False):
    """Apply U^s(g) and re-expand over the K-types kept by the cutoff.

    Parameters
    ----------
    g : ndarray
        Group element of size (d+2, d+2).
    v : ModelVector
    s : float, optional
        Override the parameter of ``v.label`` (used for U^{d-s}).
    grid : (n_alpha, n_beta), optional
        K/M sampling grid; chosen from the size of g when omitted.
    tol : float, optional
        Raise :class:`TruncationOverflow` if the relative mass discarded
        above the cutoff exceeds ``tol``.
    return_defect : bool
        Also return the relative truncation defect.
    """
    out, defect = act_coeffs(g, v.coeffs, v.label, v.cutoff, s=s, grid=grid)
    if tol is not None and defect > tol:
        raise TruncationOverflow(f"truncation defect {defect:.3e} exceeds {tol:.1e}")
    w = v._new(out)
    return (w, float(defect)) if return_defect else w


def operator_matrix(g, label: CompSerLabel, cutoff: int, s: float | None = None,
                    grid: tuple | None = None) -> np.ndarray:
    """Matrix of the truncated U^s(g) on the full basis."""
    b = basis_for(label, cutoff)
    out, _ = act_coeffs(g, np.eye(b.size), label, cutoff, s=s, grid=grid)
    return out


def quadrature_inner(u: ModelVector, v: ModelVector, grid: quadrature.QuadratureGrid) -> complex:
    """Integral of u conj(v) over K computed from sampled values."""
    return complex(grid.integrate(evaluate(u, grid.nodes) * np.conj(evaluate(v, grid.nodes))))
