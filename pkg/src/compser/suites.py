"""Verification suites and the measurements they are built from.

Each ``measure_*`` function returns plain numbers (defects, slopes,
values) so that the command line driver and the test suite share one
implementation of every check while choosing their own tolerances.
Suites turn measurements into :class:`Case` records.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import group, harmonic, quadrature, rates, wigner
from .asymptotics import certify_decay, main_term, matcoef_direct, matcoef_nbar, minv_vanishing_suite
from .liealg import (
    branch, casimir_scalar, dim_weight, dual, ktypes_of_compser, make_label,
    sobolev_weight, validate_weight,
)
from .model import (
    act, basis_for, basis_vector, chi_vector, evaluate, inner_K, project_ktype,
    project_mtype_left, random_vector, right_m_projection,
)

SUITES = ("algebra", "group", "model", "toperator", "cfunction", "eisenstein",
          "gammas", "decay", "vanishing", "rates")


# --- reports -------------------------------------------------------------------

@dataclass
class Case:
    name: str
    passed: bool
    measured: float
    target: float
    tolerance: float

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "measured": _num(self.measured),
                "target": _num(self.target), "tolerance": _num(self.tolerance)}


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def defect_case(name: str, measured: float, tol: float) -> Case:
    """Pass when a non-negative defect stays below ``tol``."""
    return Case(name, bool(measured < tol), measured, 0.0, tol)


def bound_case(name: str, measured: float, bound: float, slack: float = 0.0) -> Case:
    """Pass when ``measured <= bound + slack``."""
    return Case(name, bool(measured <= bound + slack), measured, bound, slack)


# --- configuration -------------------------------------------------------------

class ConfigError(ValueError):
    pass


@dataclass
class SuiteConfig:
    d: int = 2
    upsilon: int = 0
    s: float | None = None
    s_grid: list | None = None
    cutoff: int = 4
    level: int | None = None
    t: float | None = None
    t_grid: list | None = None
    samples: int = 1000
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    out: str = "reports"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"config.{unknown[0]}: unknown field")
        return cls(**data)

    def s_values(self) -> list:
        if self.s_grid is not None:
            return [float(x) for x in self.s_grid]
        return [float(self.s)] if self.s is not None else []

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))


def _lin(a, b, n):
    return [round(float(x), 12) for x in np.linspace(a, b, n)]


DEFAULTS = {
    "algebra": {"d": 2},
    "group": {"d": 2, "samples": 1000},
    "model": {"d": 2, "upsilon": 1, "cutoff": 4},
    "toperator": {"d": 2, "upsilon": 1, "cutoff": 4},
    "cfunction": {"d": 2, "cutoff": 4},
    "eisenstein": {"d": 2, "cutoff": 2},
    "gammas": {"d": 2, "cutoff": 20, "samples": 50},
    "decay": {"d": 1},
    "vanishing": {"d": 2, "upsilon": 1, "s_grid": [1.2, 1.5], "cutoff": 12,
                  "t_grid": _lin(3, 6, 7)},
    "rates": {"d": 1, "samples": 1000},
}

# defaults that depend on d; applied before the config file and flags
DEFAULTS_BY_D = {
    ("group", 1): {"level": 8},
    ("group", 2): {"level": 5},
    ("model", 1): {"s": 0.75, "upsilon": 0, "cutoff": 8},
    ("model", 2): {"s": 1.4},
    ("toperator", 1): {"upsilon": 0},
    ("cfunction", 1): {"s_grid": [0.6, 0.75, 0.9]},
    ("cfunction", 2): {"s_grid": [1.2, 1.5, 1.8]},
    ("eisenstein", 1): {"s": 0.75, "t": 1.0},
    ("eisenstein", 2): {"s": 1.4, "t": 0.5},
    ("gammas", 1): {"s": 0.75},
    ("gammas", 2): {"s": 1.5},
    ("decay", 1): {"s_grid": [0.6, 0.75, 0.9], "cutoff": 32, "t_grid": _lin(2, 8, 13)},
    ("decay", 2): {"s_grid": [1.4], "cutoff": 12, "t_grid": _lin(1, 4, 13)},
}


def suite_defaults(suite: str, d: int | None = None) -> dict:
    if suite not in DEFAULTS:
        raise ConfigError(f"suite: unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    out = dict(DEFAULTS[suite])
    d = out["d"] if d is None else d
    out["d"] = d
    out.update(DEFAULTS_BY_D.get((suite, d), {}))
    return out


def default_config(suite: str, d: int | None = None) -> SuiteConfig:
    return SuiteConfig.from_dict(suite_defaults(suite, d))


def validate_config(suite: str, cfg: SuiteConfig) -> SuiteConfig:
    """Check field ranges; errors name the offending field."""
    d = cfg.d
    if not isinstance(d, int) or d < 1:
        raise ConfigError(f"config.d: expected a positive integer, got {d!r}")
    supported = {"algebra": (1, 2, 3, 4, 5), "group": (1, 2, 3), "gammas": (1, 2, 3),
                 "rates": (1, 2, 3, 4, 5)}
    if d not in supported.get(suite, (1, 2)):
        raise ConfigError(f"config.d: {suite} supports d in {supported.get(suite, (1, 2))}, got {d}")
    if cfg.upsilon < 0:
        raise ConfigError(f"config.upsilon: must be non-negative, got {cfg.upsilon}")
    if d == 1 and cfg.upsilon != 0:
        raise ConfigError("config.upsilon: M is trivial for d = 1, upsilon must be 0")
    if cfg.s is not None and not d / 2 < cfg.s < d:
        raise ConfigError(f"config.s: {cfg.s} outside ({d / 2}, {d})")
    for i, s in enumerate(cfg.s_grid or []):
        if not d / 2 < float(s) < d:
            raise ConfigError(f"config.s_grid[{i}]: {s} outside ({d / 2}, {d})")
    if not isinstance(cfg.cutoff, int) or cfg.cutoff < 0:
        raise ConfigError(f"config.cutoff: expected a non-negative integer, got {cfg.cutoff!r}")
    if d == 2 and cfg.cutoff < cfg.upsilon:
        raise ConfigError("config.cutoff: must be at least upsilon")
    if cfg.level is not None and not 1 <= cfg.level <= 12:
        raise ConfigError(f"config.level: expected 1..12, got {cfg.level}")
    for i, t in enumerate(cfg.t_grid or []):
        if float(t) < 0:
            raise ConfigError(f"config.t_grid[{i}]: must be non-negative")
    if cfg.samples < 1:
        raise ConfigError("config.samples: must be positive")
    for k, v in cfg.tolerances.items():
        if not isinstance(v, (int, float)) or v < 0:
            raise ConfigError(f"config.tolerances.{k}: expected a non-negative number")
    if suite in ("decay", "vanishing", "cfunction", "model", "eisenstein") and not cfg.s_values():
        raise ConfigError("config.s: required for this suite")
    if suite == "vanishing" and (d != 2 or cfg.upsilon == 0):
        raise ConfigError("config.upsilon: the vanishing suite needs d = 2 and upsilon > 0")
    if suite in ("decay", "vanishing") and (not cfg.t_grid or len(cfg.t_grid) < 2):
        raise ConfigError("config.t_grid: needs at least two points")
    return cfg


# --- algebra -------------------------------------------------------------------

def measure_branch_dimensions(d: int, tmax: int) -> int:
    """Number of SO(d+1) weights with t1 <= tmax whose branching fails a dimension count."""
    bad = 0
    n = d + 1
    k = n // 2
    for t1 in range(tmax + 1):
        for rest in _weights_below(t1, k - 1, n):
            tau = (t1,) + rest
            if not validate_weight(n, tau):
                continue
            parts = branch(tau, d)
            if len(set(parts)) != len(parts):
                bad += 1
            if d % 2 == 0 or d == 1:
                # restriction to SO(d) preserves dimension
                if sum(dim_weight(p, d) for p in parts) != dim_weight(tau, n):
                    bad += 1
    return bad


def _weights_below(t1, m, n):
    if m <= 0:
        yield ()
        return
    lo = -t1 if (n % 2 == 0 and m == 1) else 0
    for x in range(lo, t1 + 1):
        for rest in _weights_below(abs(x), m - 1, n):
            yield (x,) + rest


def suite_algebra(cfg: SuiteConfig) -> list:
    d = cfg.d
    cases = [
        Case("branch_dimension_count", measure_branch_dimensions(d, 6) == 0,
             measure_branch_dimensions(d, 6), 0, 0),
        Case("dual_involution", all(dual(dual(t, d + 1), d + 1) == t
                                   for t in _weights_below(4, (d + 1) // 2, d + 1)
                                   if validate_weight(d + 1, t)), 1, 1, 0),
    ]
    partial = sum((2 * ell + 1) ** -2 for ell in range(200001))
    cases.append(bound_case("so3_inverse_square_dimension_sum", partial, 1.24))
    cas = [casimir_scalar((t1, 0), d) for t1 in range(0, 8)]
    cases.append(Case("casimir_nonnegative", min(cas) >= 0, min(cas), 0, 0))
    cases.append(defect_case("sobolev_weight_order_one",
                             abs(sobolev_weight((1, 0), 1, d) - (1 + casimir_scalar((1, 0), d))), 1e-15))
    return cases


# --- group ---------------------------------------------------------------------

def measure_iwasawa(d: int, samples: int, seed: int = 0, length: int = 6) -> dict:
    """Reassembly error on random words and e^{H(nbar_x)} = 1 + |x|^2 error."""
    rng = np.random.default_rng(seed)
    g = np.stack([group.random_word(d, rng, length=length) for _ in range(samples)])
    f = group.iwasawa(g)
    reassembly = float(np.abs(group.reassemble(f) - g).max())
    k_ok = float(np.abs(f.k[..., d + 1, d + 1] - 1).max())
    x = rng.uniform(-2, 2, (100, d))
    eh = np.exp(group.H_of(group.make_nbar(x)))
    height = float(np.abs(eh - (1 + np.sum(x * x, axis=1))).max())
    return {"reassembly": reassembly, "k_in_K": k_ok, "nbar_height": height}


def pw_functions(d: int, rot, degree: int) -> np.ndarray:
    """Orthonormal Peter-Weyl functions of K = SO(d+1) up to ``degree``.

    d = 1: exp(i n theta) for |n| <= degree.
    d = 2: sqrt(2l+1) D^l_{mn} for l <= degree.
    """
    rot = np.asarray(rot)[..., : d + 1, : d + 1]
    if d == 1:
        th = group.rotation_angle_so2(rot)
        n = np.arange(-degree, degree + 1)
        return np.exp(1j * th[:, None] * n[None])
    if d == 2:
        cols = [math.sqrt(2 * ell + 1) * wigner.wigner_D_matrix(ell, rot).reshape(len(rot), -1)
                for ell in range(degree + 1)]
        return np.concatenate(cols, axis=1)
    raise ValueError("Peter-Weyl functions are provided for d = 1, 2")


def measure_schur(d: int, level: int, degree: int | None = None) -> float:
    """max |Gram - I| of orthonormal Peter-Weyl functions on the K grid."""
    grid = quadrature.k_quadrature(d, level)
    if degree is None:
        degree = grid.degree if d == 1 else grid.degree // 2
    F = pw_functions(d, grid.nodes, degree)
    gram = (F.conj() * grid.weights[:, None]).T @ F
    return float(np.abs(gram - np.eye(F.shape[1])).max())


def suite_group(cfg: SuiteConfig) -> list:
    d = cfg.d
    m = measure_iwasawa(d, cfg.samples, cfg.seed)
    cases = [
        defect_case("iwasawa_reassembly", m["reassembly"], cfg.tol("iwasawa_reassembly", 1e-10)),
        defect_case("iwasawa_k_factor_in_K", m["k_in_K"], cfg.tol("iwasawa_k_factor_in_K", 1e-10)),
        defect_case("nbar_height", m["nbar_height"], cfg.tol("nbar_height", 1e-12)),
    ]
    a = group.make_a(0.7, d) @ group.make_a(-0.3, d)
    cases.append(defect_case("a_one_parameter", float(np.abs(a - group.make_a(0.4, d)).max()), 1e-12))
    x = np.linspace(-1, 1, d)
    conj = group.make_a(1.3, d) @ group.make_nbar(x) @ group.make_a(-1.3, d)
    cases.append(defect_case("a_nbar_scaling",
                             float(np.abs(conj - group.make_nbar(math.exp(-1.3) * x)).max()), 1e-12))
    if d in (1, 2):
        level = cfg.level if cfg.level is not None else (8 if d == 1 else 5)
        tol = 1e-12 if d == 1 else 1e-10
        cases.append(defect_case(f"schur_orthogonality_level{level}", measure_schur(d, level),
                                 cfg.tol("schur_orthogonality", tol)))
    return cases


# --- model ---------------------------------------------------------------------

def suite_model(cfg: SuiteConfig) -> list:
    d, s = cfg.d, cfg.s_values()[0]
    label = make_label(d, s, cfg.upsilon)
    rng = np.random.default_rng(cfg.seed)
    v = random_vector(label, cfg.cutoff, rng)
    k = group.random_k(d, rng)
    cases = [
        defect_case("identity_action", (act(np.eye(d + 2), v) - v).norm(), 1e-12),
        defect_case("k_action_isometry", abs(act(k, v).norm() - v.norm()) / v.norm(), 1e-10),
    ]
    kts = rng.choice(len(v.basis.ktypes), 4)
    pts = np.stack([group.random_k(d, rng) for _ in range(4)])
    rp = right_m_projection(v, pts)
    cases.append(defect_case("right_m_isotype", float(np.abs(rp - evaluate(v, pts)).max()), 1e-10))
    # evaluation through chi_tau
    tau = v.basis.ktypes[int(kts[0])]
    w = project_ktype(v, tau)
    chi = chi_vector(tau, label, cfg.cutoff)
    err = abs(evaluate(w, k) - inner_K(w, act(k, chi)))
    cases.append(defect_case("evaluation_reproduction", err, 1e-9))
    # semigroup
    g, h = group.make_a(0.1, d), group.random_k(d, rng) @ group.make_a(0.15, d)
    small = project_ktype(v, v.basis.ktypes[0]).with_cutoff(cfg.cutoff + 16)
    lhs = act(g, act(h, small))
    rhs = act(g @ h, small)
    cases.append(defect_case("semigroup", (lhs - rhs).norm() / small.norm(), 1e-6))
    return cases


# --- T operators -----------------------------------------------------------------

def measure_toperator(label, tmax: int) -> dict:
    """Adjoint, diagonal, norm-bound and M-invariant-vanishing defects for t1 <= tmax."""
    b = basis_for(label, tmax)
    du = dim_weight(label.upsilon, label.d)
    dual_type = -label.ups if label.d == 2 else 0
    out = {"adjoint": 0.0, "diagonal": 0.0, "norm_excess": -np.inf, "minv": 0.0, "range": 0.0}
    mats = {(a, c): harmonic.t_matrix(a, c, label) for a in b.ktypes for c in b.ktypes}
    for (a, c), T in mats.items():
        out["adjoint"] = max(out["adjoint"], float(np.abs(T - mats[(c, a)].conj().T).max()))
        bound = harmonic.t_bound(a, c, label)
        out["norm_excess"] = max(out["norm_excess"], float(np.linalg.norm(T, 2) - bound))
        left_a = b.left_indices(a)
        left_c = b.left_indices(c)
        out["range"] = max(out["range"],
                           float(np.abs(T[left_c != dual_type]).max(initial=0)),
                           float(np.abs(T[:, left_a != dual_type]).max(initial=0)))
        if label.d == 2 and label.ups != 0 and 0 in left_a:
            out["minv"] = max(out["minv"], float(np.linalg.norm(T[:, list(left_a).index(0)])))
        if a == c:
            P = np.diag((left_a == dual_type).astype(float))
            expected = b.block_dim(a) / du * P
            out["diagonal"] = max(out["diagonal"], float(np.linalg.norm(T - expected, 2)))
    return out


def suite_toperator(cfg: SuiteConfig) -> list:
    label = make_label(cfg.d, _mid_s(cfg.d), cfg.upsilon)
    m = measure_toperator(label, cfg.cutoff)
    cases = [
        defect_case("adjoint_symmetry", m["adjoint"], cfg.tol("adjoint_symmetry", 1e-10)),
        defect_case("diagonal_is_scaled_projection", m["diagonal"], cfg.tol("diagonal", 1e-8)),
        bound_case("norm_bound", m["norm_excess"], 0.0, cfg.tol("norm_bound", 1e-8)),
        defect_case("range_in_dual_mtype", m["range"], cfg.tol("range", 1e-9)),
    ]
    if cfg.d == 2 and cfg.upsilon != 0:
        cases.append(defect_case("vanishing_on_m_invariant", m["minv"], cfg.tol("minv", 1e-9)))
    return cases


def _mid_s(d: int) -> float:
    return 0.75 * d


# --- c-function ------------------------------------------------------------------

def measure_cfunction_spherical(d: int, s: float, cutoff: int = 2) -> float:
    label = make_label(d, s)
    c = harmonic.cplus(label, cutoff).block((0, 0), (0, 0))[0, 0]
    return float(abs(c - harmonic.spherical_cplus(s, d)))


def measure_cfunction_structure(label, cutoff: int) -> dict:
    """Off-diagonal K-type mass and left-M-type commutator of the sampled c-function."""
    C = harmonic.cplus_sampled(label, cutoff)
    b = basis_for(label, cutoff)
    off = C.copy()
    for t in b.ktypes:
        off[b.block(t), b.block(t)] = 0
    mt = b.left_mtypes()
    comm = 0.0
    for sigma in np.unique(mt):
        P = np.diag((mt == sigma).astype(float))
        comm = max(comm, float(np.linalg.norm(C @ P - P @ C, 2)))
    direct = harmonic.cplus(label, cutoff).full()
    return {"offdiagonal": float(np.linalg.norm(off, 2)), "m_commutator": comm,
            "routes": float(np.abs(direct - (C - off)).max())}


def suite_cfunction(cfg: SuiteConfig) -> list:
    cases = []
    for s in cfg.s_values():
        cases.append(defect_case(f"spherical_closed_form_s{s:g}",
                                 measure_cfunction_spherical(cfg.d, s), cfg.tol("spherical", 1e-6)))
    label = make_label(cfg.d, cfg.s_values()[0], cfg.upsilon)
    m = measure_cfunction_structure(label, cfg.cutoff)
    cases += [
        defect_case("ktype_diagonality", m["offdiagonal"], cfg.tol("diagonality", 1e-8)),
        defect_case("mtype_commutation", m["m_commutator"], cfg.tol("commutation", 1e-8)),
        defect_case("sampled_vs_direct", m["routes"], cfg.tol("routes", 1e-8)),
    ]
    return cases


# --- Eisenstein --------------------------------------------------------------------

def measure_eisenstein(label, t: float, tmax: int) -> dict:
    """Largest operator defect over all K-type pairs with |t1| <= tmax."""
    g = group.make_a(t, label.d)
    kts = ktypes_of_compser(label, tmax)
    worst = 0.0
    for a in kts:
        for c in kts:
            worst = max(worst, harmonic.eisenstein_check(g, label, a, c)[2])
    return {"defect": worst, "pairs": len(kts) ** 2}


def suite_eisenstein(cfg: SuiteConfig) -> list:
    t = 1.0 if cfg.t is None else cfg.t
    cases = []
    for s in cfg.s_values():
        label = make_label(cfg.d, s, cfg.upsilon)
        m = measure_eisenstein(label, t, cfg.cutoff)
        tol = 1e-6 if cfg.d == 1 else 1e-5
        cases.append(defect_case(f"eisenstein_s{s:g}_t{t:g}", m["defect"], cfg.tol("eisenstein", tol)))
    return cases


# --- Gamma recursion and scalars ------------------------------------------------------

def open_grid(d: int, n: int) -> np.ndarray:
    """n points strictly inside (d/2, d)."""
    return d / 2 + d / 2 * (np.arange(1, n + 1) / (n + 1))


def measure_recursion(label, tmax: int) -> dict:
    """Relative defects of the t1 and t2 recursions and of path independence."""
    d, s = label.d, label.s
    kts = ktypes_of_compser(label, tmax)
    sc = harmonic.intertwining_scalars(label, tmax)
    have = set(kts)
    r1 = r2 = 0.0
    n2 = 0
    for (t1, t2) in kts:
        if (t1 + 1, t2) in have:
            lhs = (s + t1) * sc[(t1 + 1, t2)]
            rhs = (d - s + t1) * sc[(t1, t2)]
            r1 = max(r1, abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
        if (t1, t2 + 1) in have and s < d - 1:
            lhs = (s + t2 - 1) * sc[(t1, t2 + 1)]
            rhs = (d - s + t2 - 1) * sc[(t1, t2)]
            r2 = max(r2, abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
            n2 += 1
    path = 0.0
    for a in kts[:: max(1, len(kts) // 7)]:
        for b in kts[:: max(1, len(kts) // 5)]:
            for c in kts[:: max(1, len(kts) // 3)]:
                try:
                    direct = harmonic.a_ratio(label, a, c)
                    via = harmonic.a_ratio(label, a, b) * harmonic.a_ratio(label, b, c)
                except harmonic.InvalidParameters:
                    continue
                path = max(path, abs(direct - via) / direct)
    positive = min(sc.table.values()) > 0
    return {"t1_step": r1, "t2_step": r2, "t2_pairs": n2, "path": path, "positive": positive}


def recursion_labels(d: int, n_s: int) -> list:
    """Labels covering the recursion checks for one d."""
    out = [make_label(d, float(s)) for s in open_grid(d, n_s)]
    if d == 3:
        # steps in t2 are only defined for s < d - 1
        out += [make_label(d, float(s), 1) for s in 1.5 + 0.5 * np.arange(1, n_s + 1) / (n_s + 1)]
    return out


def measure_first_order(d: int, s: float, eps: float = 1e-4) -> dict:
    label = make_label(d, s)
    tau, target = (0, 0), (1, 0)
    found = harmonic.first_order_witness(label, tau, target)
    if found is None:
        return {"relative_defect": float("inf"), "witness": False}
    X, v = found
    rep = harmonic.first_order_action_check(X, v, target, eps=eps)
    skip = harmonic.first_order_action_check(X, v, (2, 0), eps=eps)
    return {"relative_defect": rep["relative_defect"], "witness": True,
            "coefficient": rep["coefficient"], "skip_norm": skip["norm"]}


def measure_unitary_truncation(s: float = 0.75, t: float = 1.0, cutoffs=(16, 32),
                               seed: int = 1, probe_cutoff: int = 8) -> list:
    """|<U(a_t)u, U(a_t)v>_U - <u,v>_U| at each cutoff, d = 1."""
    label = make_label(1, s)
    rng = np.random.default_rng(seed)
    u0 = random_vector(label, probe_cutoff, rng)
    v0 = random_vector(label, probe_cutoff, rng)
    g = group.make_a(t, 1)
    out = []
    for lam in cutoffs:
        u, v = u0.with_cutoff(lam), v0.with_cutoff(lam)
        sc = harmonic.intertwining_scalars(label, lam)
        before = harmonic.unitary_inner(u, v, sc)
        after = harmonic.unitary_inner(act(g, u), act(g, v), sc)
        out.append(abs(after - before))
    return out


def suite_gammas(cfg: SuiteConfig) -> list:
    cases = []
    r1 = r2 = path = 0.0
    positive = True
    for label in recursion_labels(cfg.d, cfg.samples):
        m = measure_recursion(label, cfg.cutoff)
        r1, r2, path = max(r1, m["t1_step"]), max(r2, m["t2_step"]), max(path, m["path"])
        positive &= m["positive"]
    cases += [
        defect_case("t1_recursion", r1, cfg.tol("recursion", 1e-10)),
        defect_case("t2_recursion", r2, cfg.tol("recursion", 1e-10)),
        defect_case("path_independence", path, cfg.tol("path", 1e-12)),
        Case("scalars_positive", positive, float(positive), 1.0, 0.0),
    ]
    if cfg.d in (1, 2):
        s = cfg.s if cfg.s is not None else 0.75 * cfg.d
        fo = measure_first_order(cfg.d, s)
        tol = 1e-5 if cfg.d == 1 else 1e-4
        cases.append(defect_case("first_order_action", fo["relative_defect"], cfg.tol("first_order", tol)))
    s = cfg.s if cfg.s is not None else 0.75 * cfg.d
    kv = harmonic.kv_ratio_check(s, cfg.d, [0, 1, 10, 100, 1e4])
    cases.append(defect_case("kv_ratio_at_1e4", abs(kv["value_at_1e4"] - 1), 1e-2))
    if cfg.d == 1:
        a, b = measure_unitary_truncation()
        cases.append(bound_case("unitary_truncation_decreases", b, a))
        cases.append(defect_case("unitary_truncation_at_32", b, cfg.tol("unitary", 1e-4)))
    return cases


# --- decay -------------------------------------------------------------------------

def decay_probes(label, cutoff: int, seed: int = 0):
    """(u, v) for the decay suite: constants for d = 1, random on K-types (0), (1) for d = 2."""
    if label.d == 1:
        u = basis_vector(label, cutoff, (0, 0))
        return u, u
    rng = np.random.default_rng(seed)
    kts = [(0, 0), (1, 0)]
    return random_vector(label, cutoff, rng, kts), random_vector(label, cutoff, rng, kts)


def suite_decay(cfg: SuiteConfig, csv_out: dict | None = None) -> list:
    cases = []
    tol = cfg.tol("slope", 0.05 if cfg.d == 1 else 0.1)
    for s in cfg.s_values():
        label = make_label(cfg.d, s, cfg.upsilon)
        u, v = decay_probes(label, cfg.cutoff, cfg.seed)
        rep = certify_decay(u, v, cfg.t_grid, tol)
        if csv_out is not None:
            csv_out[f"decay_d{cfg.d}_s{s:g}.csv"] = rep.to_csv()
        cases.append(Case(f"slope_s{s:g}", rep.passed, rep.fitted_slope, rep.target_slope, tol))
    return cases


def vanishing_probes(label, cutoff: int, seed: int = 0, count: int = 1):
    """Left-M-invariant random pairs on the two lowest K-types."""
    rng = np.random.default_rng(seed)
    kts = ktypes_of_compser(label, cutoff)[:2]
    out = []
    for _ in range(count):
        u = project_mtype_left(random_vector(label, cutoff, rng, kts), 0)
        v = project_mtype_left(random_vector(label, cutoff, rng, kts), 0)
        out.append((u, v))
    return out


def spherical_control(d: int, s: float, cutoff: int = 2) -> float:
    label = make_label(d, s)
    u = basis_vector(label, cutoff, (0, 0))
    return abs(main_term(u, u).k_form)


def suite_vanishing(cfg: SuiteConfig, csv_out: dict | None = None) -> list:
    cases = []
    tol = cfg.tol("slope", 0.1)
    for s in cfg.s_values():
        label = make_label(cfg.d, s, cfg.upsilon)
        rep = minv_vanishing_suite(label, vanishing_probes(label, cfg.cutoff, cfg.seed), cfg.t_grid, tol)
        cases.append(defect_case(f"main_term_summands_s{s:g}", rep["max_summand"],
                                 cfg.tol("summand", 1e-8)))
        for i, r in enumerate(rep["reports"]):
            if csv_out is not None:
                csv_out[f"vanishing_s{s:g}_probe{i}.csv"] = r.to_csv()
            cases.append(Case(f"improved_slope_s{s:g}_probe{i}", r.passed, r.fitted_slope,
                              r.target_slope, tol))
        ctrl = spherical_control(cfg.d, s)
        cases.append(Case(f"spherical_control_s{s:g}", ctrl > 1e-3, ctrl, 1e-3, 0.0))
    return cases


# --- rates ---------------------------------------------------------------------------

def brute_lambda(d: int, delta: float, s1: float, r: float, n: int = 20001) -> float:
    """max of s - d - eta_s over a uniform grid on [s1 + r, delta] (endpoints included)."""
    s = np.linspace(s1 + r, delta, n)
    return float(np.max(s - d - np.minimum(2 * s - d, 1.0)))


def random_spectral(d: int, rng: np.random.Generator):
    delta = rng.uniform(d / 2 + 1e-3, d)
    s1 = rng.uniform(d / 2, delta - 1e-3)
    r = rng.uniform(1e-4, delta - s1 - 1e-4)
    xi = rng.uniform(1e-4, 0.5)
    return rates.SpectralData(d, float(delta), float(s1)), float(r), float(xi)


def measure_rates(d: int, samples: int, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    lam_err = beta_err = 0.0
    bound_ok = True
    for _ in range(samples):
        data, r, xi = random_spectral(d, rng)
        lam = rates.lambda_rate(data, r)
        lb = brute_lambda(d, data.delta, data.s1, r)
        lam_err = max(lam_err, abs(lam - lb))
        rep = rates.beta_rate(data, r, xi)
        oracle = min(min(2 * data.delta - d, 1.0), data.delta - data.s1 - r - xi, data.delta - d - lb)
        beta_err = max(beta_err, abs(rep.beta - oracle))
        bound_ok &= rep.beta >= min(1.0, data.delta - data.s1) - (xi + r) - 1e-12
    return {"lambda": lam_err, "beta": beta_err, "lower_bound": bound_ok}


def suite_rates(cfg: SuiteConfig) -> list:
    cases = []
    dims = (1, 2, 3)
    for d in dims:
        m = measure_rates(d, cfg.samples, cfg.seed + d)
        cases.append(defect_case(f"lambda_vs_grid_d{d}", m["lambda"], cfg.tol("lambda", 1e-9)))
        cases.append(defect_case(f"beta_vs_oracle_d{d}", m["beta"], cfg.tol("beta", 1e-9)))
        cases.append(Case(f"beta_lower_bound_d{d}", m["lower_bound"], float(m["lower_bound"]), 1.0, 0.0))
    beta = rates.beta_rate(rates.SpectralData(1, 0.9, 0.6), 0.05, 0.05).beta
    cases.append(defect_case("worked_example_beta", abs(beta - 0.2), 1e-12))
    return cases


# --- driver --------------------------------------------------------------------------

RUNNERS = {
    "algebra": suite_algebra, "group": suite_group, "model": suite_model,
    "toperator": suite_toperator, "cfunction": suite_cfunction,
    "eisenstein": suite_eisenstein, "gammas": suite_gammas, "decay": suite_decay,
    "vanishing": suite_vanishing, "rates": suite_rates,
}


def run_suite(name: str, cfg: SuiteConfig, out_dir: str | Path | None = None) -> dict:
    """Run one suite; write ``<name>.json`` and any CSV tables to ``out_dir``."""
    validate_config(name, cfg)
    tables: dict = {}
    runner = RUNNERS[name]
    if name in ("decay", "vanishing"):
        cases = runner(cfg, tables)
    else:
        cases = runner(cfg)
    report = {"suite": name, "config": cfg.to_dict(), "cases": [c.to_dict() for c in cases]}
    report["pass"] = all(c["pass"] for c in report["cases"])
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        for fname, text in tables.items():
            (out / fname).write_text(text)
    return report


# --- tables --------------------------------------------------------------------------

def _fmt(x) -> str:
    return f"{float(x):.17g}"


def table_matcoef(cfg: SuiteConfig) -> str:
    """Spherical matrix coefficient by both routes on integer t."""
    s = cfg.s_values()[0] if cfg.s_values() else 0.75 * cfg.d
    label = make_label(cfg.d, s, cfg.upsilon)
    cutoff = max(cfg.cutoff, 1)
    u = basis_vector(label, cutoff, ktypes_of_compser(label, cutoff)[0 if cfg.d == 2 else cutoff])
    ts = cfg.t_grid if cfg.t_grid else list(range(0, 9 if cfg.d == 1 else 5))
    rows = ["t,direct_re,direct_im,nbar_re,nbar_im"]
    for t in ts:
        a = matcoef_direct(u, u, float(t))
        b = matcoef_nbar(u, u, float(t))
        rows.append(",".join(_fmt(x) for x in (t, a.real, a.imag, b.real, b.imag)))
    return "\n".join(rows) + "\n"


def table_scalars(cfg: SuiteConfig) -> str:
    s = cfg.s_values()[0] if cfg.s_values() else 0.75 * cfg.d
    label = make_label(cfg.d, s, cfg.upsilon)
    return harmonic.intertwining_scalars(label, cfg.cutoff).to_csv()


def table_cfun(cfg: SuiteConfig) -> str:
    rows = ["d,s,computed,closed_form,abs_error"]
    grids = {1: [0.6, 0.75, 0.9], 2: [1.2, 1.5, 1.8]}
    for d in (1, 2):
        for s in grids[d]:
            c = harmonic.cplus(make_label(d, s), 2).block((0, 0), (0, 0))[0, 0].real
            ref = harmonic.spherical_cplus(s, d)
            rows.append(f"{d},{_fmt(s)},{_fmt(c)},{_fmt(ref)},{_fmt(abs(c - ref))}")
    return "\n".join(rows) + "\n"


TABLES = {"matcoef": table_matcoef, "scalars": table_scalars, "cfun": table_cfun}
TABLE_DEFAULTS = {
    "matcoef": {"d": 1, "s": 0.75, "cutoff": 8},
    "scalars": {"d": 3, "upsilon": 1, "s": 1.8, "cutoff": 6},
    "cfun": {"d": 2},
}
