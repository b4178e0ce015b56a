"""Operators built from the M-average: T-operators, the c-function,
the Eisenstein integral, and the intertwining scalars.

Measure conventions: dk and dm are probability Haar measures.  The
c-function integral over N-bar uses Lebesgue measure dx on R^d, so the
spherical value is ``pi^(d/2) Gamma(s - d/2) / Gamma(s)``.  The Haar
measure on N-bar that turns K-integrals into N-bar integrals is
``dx / nbar_mass(d)`` with ``nbar_mass(d) = int (1+|x|^2)^(-d) dx``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi

from . import group, quadrature
from .liealg import CompSerLabel, casimir_scalar, dim_weight
from .model import (
    ModelVector, act_coeffs, auto_grid, basis_for, chi_vector, inner_K,
    _grid_and_functions, _m_level,
)
from .special import lgamma


@dataclass
class KTypeOperator:
    """Block operator on the truncated model; blocks map tau1 -> tau2."""

    label: CompSerLabel
    cutoff: int
    blocks: dict = field(default_factory=dict)
    report: dict = field(default_factory=dict)

    def block(self, tau1, tau2) -> np.ndarray:
        b = basis_for(self.label, self.cutoff)
        key = (tuple(tau1), tuple(tau2))
        if key in self.blocks:
            return self.blocks[key]
        return np.zeros((b.block_dim(tau2), b.block_dim(tau1)), dtype=complex)

    def full(self) -> np.ndarray:
        b = basis_for(self.label, self.cutoff)
        out = np.zeros((b.size, b.size), dtype=complex)
        for (t1, t2), m in self.blocks.items():
            out[b.block(t2), b.block(t1)] = m
        return out

    def apply(self, v: ModelVector) -> ModelVector:
        return ModelVector(v.label, v.cutoff, self.full() @ v.coeffs)


def nbar_mass(d: int) -> float:
    """Integral of (1 + |x|^2)^(-d) over R^d."""
    return math.pi ** (d / 2) * math.gamma(d / 2) / math.gamma(d)


def sphere_volume(d: int) -> float:
    """Surface measure of S^(d-1)."""
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


def spherical_cplus(s: float, d: int) -> float:
    """Closed form pi^(d/2) Gamma(s - d/2) / Gamma(s)."""
    return math.pi ** (d / 2) * math.exp(lgamma(s - d / 2) - lgamma(s))


# --- T-operator ---------------------------------------------------------------

def _ensure_tau(tau):
    tau = tuple(tau)
    return (tau[0], 0) if len(tau) == 1 else tau


def t_matrix(tau1, tau2, label: CompSerLabel, level: int | None = None) -> np.ndarray:
    """Matrix of T v = int_M v(m) U(m) chi_tau2 dm from the tau1 to the tau2 block."""
    tau1, tau2 = _ensure_tau(tau1), _ensure_tau(tau2)
    cutoff = max(abs(tau1[0]), abs(tau2[0]))
    b = basis_for(label, cutoff)
    grid = quadrature.m_quadrature(b.d, level if level is not None else _m_level(cutoff))
    vals = b.functions(grid.nodes)[:, b.block(tau1)]           # (nm, dim1)
    chi = chi_vector(tau2, label, cutoff).coeffs[b.block(tau2)]
    rot = b.left_matrix(grid.nodes, tau2) @ chi                  # (nm, dim2)
    return np.einsum("n,nj,ni->ij", grid.weights, vals, rot)


def t_operator(tau1, tau2, label: CompSerLabel, cutoff: int | None = None,
               level: int | None = None) -> KTypeOperator:
    tau1, tau2 = _ensure_tau(tau1), _ensure_tau(tau2)
    cutoff = max(abs(tau1[0]), abs(tau2[0])) if cutoff is None else cutoff
    return KTypeOperator(label, cutoff, {(tau1, tau2): t_matrix(tau1, tau2, label, level)})


def t_bound(tau1, tau2, label: CompSerLabel) -> float:
    """sqrt(dim tau1 dim tau2) / dim upsilon."""
    b = basis_for(label, max(abs(tau1[0]), abs(tau2[0])))
    du = dim_weight(label.upsilon, label.d)
    return math.sqrt(b.block_dim(_ensure_tau(tau1)) * b.block_dim(_ensure_tau(tau2))) / du


# --- c-function -----------------------------------------------------------------

def _sphere_nodes(d: int, n_angle: int):
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if d == 2:
        psi = 2 * np.pi * np.arange(n_angle) / n_angle
        return np.stack([np.cos(psi), np.sin(psi)], -1), np.full(n_angle, 2 * np.pi / n_angle)
    raise NotImplementedError("c-function quadrature is implemented for d = 1, 2")


def _cplus_blocks(label: CompSerLabel, cutoff: int, n_radial: int, n_angle: int,
                  s: float) -> dict:
    d = label.d
    alpha, beta = s - d / 2 - 1, d / 2 - 1
    x, w = roots_jacobi(n_radial, alpha, beta)
    u = (1 + x) / 2
    w = w * 2.0 ** (-(alpha + beta + 1)) / 2        # includes the 1/2 from r dr
    r = np.sqrt(u / (1 - u))
    dirs, wdir = _sphere_nodes(d, n_angle)
    pts = (r[:, None, None] * dirs[None]).reshape(-1, d)
    wts = (w[:, None] * wdir[None]).ravel()
    kinv = group.inverse(group.kappa(group.make_nbar(pts)))
    b = basis_for(label, cutoff)
    return {(t, t): np.einsum("n,nij->ij", wts, b.left_matrix(kinv, t)) for t in b.ktypes}


def cplus(label: CompSerLabel, cutoff: int, n_radial: int | None = None,
          n_angle: int | None = None, s: float | None = None) -> KTypeOperator:
    """Harish-Chandra c-function on the truncated model.

    The radial variable is mapped to u = r^2 / (1 + r^2) in [0, 1], where
    the factor r^(d-1) (1 + r^2)^(-s) dr becomes a Jacobi weight; the
    integrand left over is polynomial in u on each M-diagonal entry, so
    Gauss-Jacobi is exact once ``n_radial`` exceeds half the cutoff.  The
    whole half-line is mapped, so there is no separate tail; the report
    records the change under extra radial nodes as the error estimate.
    ``s`` overrides the label parameter; any s >= d/2 + 0.05 is accepted.
    """
    d = label.d
    s = label.s if s is None else s
    if s < d / 2 + 0.05:
        raise ValueError(f"c-function requires s >= d/2 + 0.05 (got s={s})")
    n_radial = cutoff // 2 + 8 if n_radial is None else n_radial
    n_angle = 2 * cutoff + 8 if n_angle is None else n_angle
    blocks = _cplus_blocks(label, cutoff, n_radial, n_angle, s)
    check = _cplus_blocks(label, cutoff, n_radial + 6, n_angle + 4, s)
    err = max(np.abs(blocks[k] - check[k]).max() for k in blocks)
    return KTypeOperator(label, cutoff, blocks,
                         {"quadrature_change": float(err), "tail": 0.0,
                          "n_radial": n_radial, "n_angle": n_angle})


def cplus_sampled(label: CompSerLabel, cutoff: int, n_radial: int | None = None,
                  n_angle: int | None = None) -> np.ndarray:
    """Full c-function matrix with each U(kappa^-1) obtained by grid sampling.

    Unlike :func:`cplus` nothing here is block diagonal by construction, so
    the off-diagonal blocks measure K-type preservation.
    """
    d, s = label.d, label.s
    n_radial = cutoff // 2 + 8 if n_radial is None else n_radial
    n_angle = 2 * cutoff + 8 if n_angle is None else n_angle
    alpha, beta = s - d / 2 - 1, d / 2 - 1
    x, w = roots_jacobi(n_radial, alpha, beta)
    u = (1 + x) / 2
    w = w * 2.0 ** (-(alpha + beta + 1)) / 2
    r = np.sqrt(u / (1 - u))
    dirs, wdir = _sphere_nodes(d, n_angle)
    b = basis_for(label, cutoff)
    grid = (4 * cutoff + 8, 2 * cutoff + 8) if d == 2 else (4 * cutoff + 8, 0)
    out = np.zeros((b.size, b.size), dtype=complex)
    eye = np.eye(b.size)
    for ri, wi in zip(r, w):
        for dv, wd in zip(dirs, wdir):
            kinv = group.inverse(group.kappa(group.make_nbar(ri * dv)))
            m, _ = act_coeffs(kinv, eye, label, cutoff, grid=grid, exact_k=False)
            out += wi * wd * m
    return out


# --- Eisenstein integral -------------------------------------------------------

def eisenstein_check(g, label: CompSerLabel, tau1, tau2, grid: tuple | None = None):
    """Compare P_tau2 U(g) P_tau1 with the Eisenstein-integral representation.

    Returns ``(lhs, rhs, defect)`` with the spectral-norm defect.
    """
    tau1, tau2 = _ensure_tau(tau1), _ensure_tau(tau2)
    cutoff = max(abs(tau1[0]), abs(tau2[0]))
    b = basis_for(label, cutoff)
    d, s = label.d, label.s
    na, nb = grid if grid is not None else auto_grid(g, cutoff + 8, d)
    cols = np.zeros((b.size, b.block_dim(tau1)), dtype=complex)
    sl1, sl2 = b.block(tau1), b.block(tau2)
    cols[sl1] = np.eye(b.block_dim(tau1))
    out, _ = act_coeffs(g, cols, label, cutoff, grid=(na, nb))
    lhs = out[sl2]

    qg, _ = _grid_and_functions(label, cutoff, na, nb)
    T = t_matrix(tau1, tau2, label)
    fac = group.iwasawa(np.asarray(g, dtype=float) @ qg.nodes)
    left = b.left_matrix(fac.k, tau2)
    right = b.left_matrix(group.inverse(qg.nodes), tau1)
    wts = qg.weights * np.exp((s - d) * fac.H)
    rhs = np.einsum("n,nij,jk,nkl->il", wts, left, T, right)
    defect = float(np.linalg.norm(lhs - rhs, 2))
    return lhs, rhs, defect


# --- intertwining scalars ------------------------------------------------------

class InvalidParameters(ValueError):
    """Raised when a Gamma quotient needs arguments outside the handled range."""


def _log_factor(t: int, s: float, d: int) -> float:
    """log of Gamma(s+t) / Gamma(d-s+t), rewriting negative integer t for odd d."""
    a, b = s + t, d - s + t
    if a > 0 and b > 0:
        return lgamma(a) - lgamma(b)
    if t < 0 and d % 2 == 1:
        a, b = abs(t) + 1 + s - d, abs(t) + 1 - s
        if a > 0 and b > 0:
            return lgamma(a) - lgamma(b)
    raise InvalidParameters(f"Gamma quotient at t={t}, s={s}, d={d} is not defined here")


def a_ratio(label: CompSerLabel, tau1, tau2) -> float:
    """a(upsilon, s, tau2) / a(upsilon, s, tau1) as a Gamma quotient."""
    tau1, tau2 = _ensure_tau(tau1), _ensure_tau(tau2)
    d, s = label.d, label.s
    (t1, t2), (t3, t4) = tau1, tau2
    if tau1 == tau2:
        return 1.0
    logr = _log_factor(t1, s, d) - _log_factor(t3, s, d)
    if t2 != t4:
        if s >= d - 1:
            raise InvalidParameters(f"t2 changes ({t2} -> {t4}) but s={s} >= d-1")
        logr += _log_factor(t2 - 1, s, d) - _log_factor(t4 - 1, s, d)
    return math.exp(logr)


def base_ktype(ktypes) -> tuple:
    """Normalising K-type: smallest |t1|, then lexicographically lowest."""
    return min(ktypes, key=lambda t: (abs(t[0]), t[0], t[1]))


@dataclass(frozen=True)
class IntertwiningScalars:
    label: CompSerLabel
    base: tuple
    table: dict

    def __getitem__(self, tau) -> float:
        return self.table[_ensure_tau(tau)]

    def to_csv(self) -> str:
        rows = ["t1,t2,a_over_base"]
        for (t1, t2), a in sorted(self.table.items()):
            rows.append(f"{t1},{t2},{a:.17g}")
        return "\n".join(rows) + "\n"


def intertwining_scalars(label: CompSerLabel, cutoff: int) -> IntertwiningScalars:
    from .liealg import ktypes_of_compser
    kts = ktypes_of_compser(label, cutoff)
    base = base_ktype(kts)
    return IntertwiningScalars(label, base, {t: a_ratio(label, base, t) for t in kts})


def unitary_inner(u: ModelVector, v: ModelVector, scalars: IntertwiningScalars) -> complex:
    """sum_tau a(tau) <P_tau u, P_tau v>_K."""
    if u.label != v.label or u.label != scalars.label:
        raise ValueError("labels differ")
    b = u.basis
    total = 0j
    for t in b.ktypes:
        sl = b.block(t)
        pu, pv = u.coeffs[sl], v.coeffs[sl]
        if not (np.any(pu) and np.any(pv)):
            continue
        if t not in scalars.table:
            raise KeyError(f"no scalar for populated K-type {t}")
        total += scalars.table[t] * np.vdot(pv, pu)
    return complex(total)


# --- first-order action ----------------------------------------------------------

def _expm_sym(X: np.ndarray, eps: float) -> np.ndarray:
    from scipy.linalg import expm
    return expm(eps * X)


def adjoint_pairing(X: np.ndarray, k: np.ndarray) -> np.ndarray:
    """<Ad(k^-1) X, H> for a stack of K elements, with H the A generator."""
    d = X.shape[-1] - 2
    H = group.boost_generator(d, d)
    kt = np.swapaxes(k, -1, -2)
    return 0.5 * np.einsum("nij,ij->n", kt @ X @ k, H)


def first_order_action_check(X: np.ndarray, v: ModelVector, target, *,
                             eps: float = 1e-4, s: float | None = None,
                             grid: tuple | None = None) -> dict:
    """Compare a projected finite difference of U^s(exp(eps X)) with the
    multiplication formula.

    The predicted coefficient is ``s - d/2 + (Omega(target) - Omega(tau)) / 2``,
    which is ``s + r1`` when ``target`` raises t1 by one.  Returns a dict with
    the measured and predicted projections and their relative defect.
    """
    label = v.label
    d = label.d
    s = label.s if s is None else s
    target = _ensure_tau(target)
    pop = v.populated()
    if len(pop) != 1:
        raise ValueError("v must lie in a single K-type")
    tau = pop[0]
    cutoff = max(v.cutoff, abs(target[0]), abs(tau[0]) + 2)
    w = v.with_cutoff(cutoff)
    b = w.basis
    if grid is None:
        grid = (4 * cutoff + 16, 2 * cutoff + 16) if d == 2 else (8 * cutoff + 64, 0)
    plus, _ = act_coeffs(_expm_sym(X, eps), w.coeffs, label, cutoff, s=s, grid=grid)
    minus, _ = act_coeffs(_expm_sym(X, -eps), w.coeffs, label, cutoff, s=s, grid=grid)
    fd = (plus - minus) / (2 * eps)

    qg, F = _grid_and_functions(label, cutoff, *grid)
    prod = adjoint_pairing(X, qg.nodes) * (F @ w.coeffs)
    mult = (F.conj() * qg.weights[:, None]).T @ prod
    coef = s - d / 2 + (casimir_scalar(target, d) - casimir_scalar(tau, d)) / 2
    sl = b.block(target) if b.contains(target) else slice(0, 0)
    measured = fd[sl]
    predicted = coef * mult[sl]
    scale = max(np.linalg.norm(predicted), np.linalg.norm(measured))
    defect = np.linalg.norm(measured - predicted) / scale if scale > 0 else 0.0
    return {"source": tau, "target": target, "coefficient": coef,
            "measured": measured, "predicted": predicted,
            "multiplier_projection": mult[sl],
            "norm": float(np.linalg.norm(measured)), "relative_defect": float(defect),
            "degenerate": bool(scale < 1e-12)}


def first_order_witness(label: CompSerLabel, tau, target, rng: np.random.Generator | None = None):
    """Search a basis of p and basis vectors of tau for a non-vanishing projection.

    Returns ``(X, v)`` or ``None`` if every candidate projects to zero.
    """
    from .model import basis_vector, random_vector
    tau = _ensure_tau(tau)
    d = label.d
    cutoff = max(abs(tau[0]), abs(_ensure_tau(target)[0]))
    b = basis_for(label, cutoff)
    candidates = [basis_vector(label, cutoff, tau, int(i)) for i in b.left_indices(tau)]
    if rng is not None:
        candidates.append(random_vector(label, cutoff, rng, [tau]))
    for i in range(d + 1):
        X = group.boost_generator(i, d)
        for v in candidates:
            rep = first_order_action_check(X, v, target)
            if not rep["degenerate"] and rep["norm"] > 1e-8:
                return X, v
    return None


def kv_ratio_check(s: float, d: int, t_grid) -> dict:
    """t^(d-2s) Gamma(s+t)/Gamma(d-s+t) along a grid, and the comparison with 1 + t^(2s-d)."""
    if not d / 2 < s < d:
        raise ValueError("s must lie in (d/2, d)")
    t = np.asarray(t_grid, dtype=float)
    logq = np.array([lgamma(s + x) - lgamma(d - s + x) for x in t])
    with np.errstate(divide="ignore"):
        scaled = np.where(t > 0, np.exp(logq + (d - 2 * s) * np.log(np.where(t > 0, t, 1.0))), np.nan)
    versus = np.exp(logq) / (1 + t ** (2 * s - d))
    big = 1e4
    at_big = math.exp(lgamma(s + big) - lgamma(d - s + big) + (d - 2 * s) * math.log(big))
    return {"t": t, "scaled_ratio": scaled, "ratio_over_model": versus,
            "min_over_model": float(np.min(versus)), "max_over_model": float(np.max(versus)),
            "value_at_1e4": at_big, "pass": abs(at_big - 1) < 1e-2,
            "value_at_0": math.exp(lgamma(s) - lgamma(d - s))}
