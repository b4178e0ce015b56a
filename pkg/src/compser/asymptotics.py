"""Matrix coefficients along a_t, their main term, and decay certification."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import group
from .harmonic import (
    IntertwiningScalars, cplus, intertwining_scalars, nbar_mass, t_matrix,
)
from .model import (
    ModelVector, _grid_and_functions, _same, auto_grid, basis_for, sample_action,
)
from .rates import eta_s


def matcoef_direct(u: ModelVector, v: ModelVector, t: float, grid: tuple | None = None,
                   scalars: IntertwiningScalars | None = None) -> complex:
    """<U^s(a_t) u, v> by K-quadrature; unitary form when ``scalars`` is given.

    The integrand (U^s(a_t) u)(k) conj(v(k)) is sampled on the same K/M
    grid ``act`` would use, but only the K-types populated in u and v are
    evaluated.
    """
    _same(u, v)
    label = u.label
    if scalars is not None:
        # sum_tau a(tau) <P_tau w, P_tau v> = <w, A v> with A diagonal on K-types
        b = v.basis
        c = np.zeros(b.size, dtype=complex)
        for tau in v.populated():
            c[b.block(tau)] = scalars[tau] * v.block(tau)
        v = ModelVector(label, v.cutoff, c)
    if not u.populated() or not v.populated():
        return 0j
    g = group.make_a(t, label.d)
    na, nb = grid if grid is not None else auto_grid(g, u.cutoff, label.d)
    lu = max(abs(tau[0]) for tau in u.populated())
    lv = max(abs(tau[0]) for tau in v.populated())
    vals, qg, _ = sample_action(g, u.with_cutoff(lu).coeffs[:, None], label, lu, grid=(na, nb))
    _, Fv = _grid_and_functions(label, lv, na, nb)
    return complex(np.sum(qg.weights * vals[:, 0] * np.conj(Fv @ v.with_cutoff(lv).coeffs)))


def _pair_matrices(label, kts):
    return {(a, b): t_matrix(a, b, label) for a in kts for b in kts}


def matcoef_nbar(u: ModelVector, v: ModelVector, t: float, *, step: float = 0.2,
                 margin: float = 40.0, n_angle: int | None = None,
                 tail_tol: float = 1e-12) -> complex:
    """Matrix coefficient from its N-bar integral representation.

    The integral over R^d is done in polar coordinates with log-radius
    rho = log r on [-margin/d, t + margin/d].  The integrand is analytic
    in a strip around the real rho axis and decays like exp(-d |rho|)
    outside [0, t], so the trapezoid rule converges geometrically.
    """
    _same(u, v)
    label = u.label
    d, s = label.d, label.s
    if s <= d / 2:
        raise ValueError("the N-bar integral needs s > d/2")
    b = u.basis
    ku = u.populated()
    kv = v.populated()
    if not ku or not kv:
        return 0j
    T = {(a, c): t_matrix(a, c, label) for a in ku for c in kv}
    lo, hi = -margin / d, t + margin / d
    n = int(math.ceil((hi - lo) / step))
    rho = lo + step * np.arange(n + 1)
    r = np.exp(rho)
    if d == 1:
        dirs, wdir = np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    else:
        na = n_angle or (4 * b.cutoff + 8)
        psi = 2 * np.pi * np.arange(na) / na
        dirs, wdir = np.stack([np.cos(psi), np.sin(psi)], -1), np.full(na, 2 * np.pi / na)
    x = (r[:, None, None] * dirs[None]).reshape(-1, d)
    r2 = np.repeat(r * r, len(wdir))
    jac = np.repeat(r ** d * step, len(wdir)) * np.tile(wdir, len(r))
    weight = jac * (1 + math.exp(-2 * t) * r2) ** (s - d) * (1 + r2) ** (-s)
    k1 = group.inverse(group.kappa(group.make_nbar(x)))
    k2 = group.inverse(group.kappa(group.make_nbar(math.exp(-t) * x)))
    total = np.zeros(len(weight), dtype=complex)
    rot_u = {a: b.left_matrix(k1, a) @ u.block(a) for a in ku}
    for c in kv:
        left = sum(rot_u[a] @ T[(a, c)].T for a in ku)
        right = b.left_matrix(k2, c) @ v.block(c)
        total += np.sum(left * right.conj(), axis=1)
    vals = weight * total
    ends = np.abs(vals[: len(wdir)]).sum() + np.abs(vals[-len(wdir):]).sum()
    result = complex(vals.sum()) * math.exp((s - d) * t) / nbar_mass(d)
    scale = max(abs(result), np.abs(vals).max() * math.exp((s - d) * t) / nbar_mass(d))
    if ends * math.exp((s - d) * t) / nbar_mass(d) > tail_tol * max(scale, 1e-300):
        raise RuntimeError("N-bar integral tail estimate exceeds tolerance; increase margin")
    return result


@dataclass
class MainTerm:
    k_form: complex
    unitary_form: complex | None
    summands: dict
    partial_sums: list


def main_term(u: ModelVector, v: ModelVector, scalars: IntertwiningScalars | None = None,
              c_operator=None) -> MainTerm:
    """Sum over K-type pairs of <T C+ P u, P v>, Haar-normalised on N-bar.

    ``summands`` maps (tau1, tau2) to the K-form contribution; the partial
    sums follow K-types ordered by max(|t1|) of the pair.
    """
    _same(u, v)
    label = u.label
    d = label.d
    C = cplus(label, u.cutoff) if c_operator is None else c_operator
    norm = nbar_mass(d)
    summands = {}
    for a in u.populated():
        cu = C.block(a, a) @ u.block(a)
        for c in v.populated():
            val = np.vdot(v.block(c), t_matrix(a, c, label) @ cu) / norm
            summands[(a, c)] = complex(val)
    k_form = complex(sum(summands.values())) if summands else 0j
    unitary = None
    if scalars is not None:
        unitary = complex(sum(scalars[c] * val for (a, c), val in summands.items()))
    order = sorted(summands, key=lambda p: (max(abs(p[0][0]), abs(p[1][0])), p))
    partial = list(np.cumsum([summands[p] for p in order])) if order else []
    return MainTerm(k_form, unitary, summands, partial)


@dataclass
class DecayReport:
    s: float
    d: int
    t_grid: np.ndarray
    values: np.ndarray
    main_term: complex
    residuals: np.ndarray
    fitted_slope: float
    target_slope: float
    slope_tolerance: float
    passed: bool
    used: np.ndarray = field(repr=False, default=None)

    def to_csv(self) -> str:
        rows = ["t,re,im,main_re,main_im,residual"]
        for t, val, res in zip(self.t_grid, self.values, self.residuals):
            main = math.exp((self.s - self.d) * t) * self.main_term
            rows.append(",".join(f"{x:.17g}" for x in
                                 (t, val.real, val.imag, main.real, main.imag, res)))
        return "\n".join(rows) + "\n"

    def summary(self) -> dict:
        return {"fitted_slope": self.fitted_slope, "target_slope": self.target_slope,
                "slope_tolerance": self.slope_tolerance, "pass": bool(self.passed)}

    def summary_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)


def fit_slope(t, residuals) -> float:
    """Least-squares slope of log(residual) against t."""
    return float(np.polyfit(np.asarray(t, float), np.log(np.asarray(residuals, float)), 1)[0])


def certify_decay(u: ModelVector, v: ModelVector, t_grid, slope_tolerance: float = 0.1,
                  form: str = "K", scalars: IntertwiningScalars | None = None,
                  noise_floor: float = 1e-12) -> DecayReport:
    """Fit the decay rate of value(t) - exp((s-d) t) main_term.

    ``form`` is "K" for the L^2(K) pairing or "unitary" for the pairing
    weighted by the intertwining scalars.  Residuals below
    ``noise_floor`` times the size of the main term are dropped.
    """
    label = u.label
    d, s = label.d, label.s
    t_grid = np.asarray(t_grid, dtype=float)
    if form == "unitary" and scalars is None:
        scalars = intertwining_scalars(label, u.cutoff)
    mt = main_term(u, v, scalars if form == "unitary" else None)
    main = mt.unitary_form if form == "unitary" else mt.k_form
    vals = np.array([matcoef_direct(u, v, t, scalars=scalars if form == "unitary" else None)
                     for t in t_grid])
    res = np.abs(vals - np.exp((s - d) * t_grid) * main)
    scale = np.maximum(np.abs(vals), 1e-300)
    used = res > noise_floor * scale
    if used.sum() < 2:
        raise RuntimeError("fewer than two residuals above the noise floor")
    slope = fit_slope(t_grid[used], res[used])
    target = s - d - eta_s(s, d)
    return DecayReport(s, d, t_grid, vals, main, res, slope, target, slope_tolerance,
                       slope <= target + slope_tolerance, used)


def minv_vanishing_suite(label, probes, t_grid, slope_tolerance: float = 0.1,
                         summand_tol: float = 1e-8) -> dict:
    """Main term vanishing and improved decay on left-M-invariant probes.

    ``probes`` is a list of (u, v) pairs.  For each populated K-type the
    norm of T C+ P_tau u is recorded; each pair is then certified against
    the target slope s - d - eta_s.
    """
    if all(x == 0 for x in label.upsilon):
        raise ValueError("the vanishing suite needs a non-trivial upsilon")
    out = {"label": label.to_dict(), "summand_norms": [], "reports": []}
    cutoff = probes[0][0].cutoff
    C = cplus(label, cutoff)
    b = basis_for(label, cutoff)
    for u, v in probes:
        for a in u.populated():
            cu = C.block(a, a) @ u.block(a)
            for c in b.ktypes:
                out["summand_norms"].append(float(np.linalg.norm(t_matrix(a, c, label) @ cu)))
        out["reports"].append(certify_decay(u, v, t_grid, slope_tolerance))
    out["max_summand"] = max(out["summand_norms"]) if out["summand_norms"] else 0.0
    out["pass"] = bool(out["max_summand"] < summand_tol and all(r.passed for r in out["reports"]))
    return out
