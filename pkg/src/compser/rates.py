"""Exponent arithmetic for mixing rates.

All functions are pure; ``SpectralData`` validates its own invariants.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


def eta_s(s: float, d: int) -> float:
    """Gap min(2s - d, 1) between the main term and the error term."""
    if s <= d / 2:
        raise ValueError(f"eta_s needs s > d/2 (got s={s}, d={d})")
    return min(2 * s - d, 1.0)


def s_from_eigenvalue(lam: float, d: int) -> float:
    return d / 2 + math.sqrt(d * d / 4 - lam)


@dataclass(frozen=True)
class SpectralData:
    """Critical exponent, second resonance and optional Laplace eigenvalues.

    When ``s1`` is omitted it is taken from the second eigenvalue, or set
    to d/2 when there is none.
    """

    d: int
    delta: float
    s1: float | None = None
    eigenvalues: tuple | None = field(default=None)

    def __post_init__(self):
        d = self.d
        if d < 1:
            raise ValueError("d must be >= 1")
        if not (d / 2 < self.delta <= d):
            raise ValueError(f"delta={self.delta} must lie in (d/2, d]")
        s1 = self.s1
        if self.eigenvalues is not None:
            object.__setattr__(self, "eigenvalues", tuple(float(x) for x in self.eigenvalues))
            if s1 is None:
                ev = self.eigenvalues
                s1 = s_from_eigenvalue(ev[1], d) if len(ev) > 1 else d / 2
        if s1 is None:
            s1 = d / 2
        object.__setattr__(self, "s1", float(s1))
        if not (d / 2 <= self.s1 < self.delta):
            raise ValueError(f"s1={self.s1} must satisfy d/2 <= s1 < delta")

    @classmethod
    def from_dict(cls, data: dict) -> "SpectralData":
        return cls(int(data["d"]), float(data["delta"]), data.get("s1"), data.get("eigenvalues"))

    def to_dict(self) -> dict:
        out = {"d": self.d, "delta": self.delta, "s1": self.s1}
        if self.eigenvalues is not None:
            out["eigenvalues"] = list(self.eigenvalues)
        return out


def mixing_eta(data: SpectralData) -> float:
    return min(data.delta - data.s1, 1.0)


def _error_exponent(s: float, d: int) -> float:
    return s - d - eta_s(s, d)


def lambda_rate(data: SpectralData, r: float) -> float:
    """max over s in [s1 + r, delta] of s - d - eta_s.

    The function is -s up to s = (d+1)/2 and s - d - 1 after, so it is
    convex and the maximum sits at an endpoint.
    """
    if not 0 < r < data.delta - data.s1:
        raise ValueError(f"r={r} must lie in (0, delta - s1)")
    lo = data.s1 + r
    return max(_error_exponent(lo, data.d), _error_exponent(data.delta, data.d))


@dataclass(frozen=True)
class BetaReport:
    beta: float
    terms: tuple
    lower_bound: float
    limit: float


def beta_rate(data: SpectralData, r: float, xi: float) -> BetaReport:
    """min(eta_delta, delta - s1 - r - xi, delta - d - lambda(delta, r))."""
    if r <= 0 or xi <= 0:
        raise ValueError("r and xi must be positive")
    lam = lambda_rate(data, r)
    terms = (eta_s(data.delta, data.d), data.delta - data.s1 - r - xi, data.delta - data.d - lam)
    beta = min(terms)
    limit = min(1.0, data.delta - data.s1)
    lower = limit - (xi + r)
    if beta < lower - 1e-12:
        raise ArithmeticError(f"beta={beta} fell below the lower bound {lower}")
    return BetaReport(beta, terms, lower, limit)


def lattice_eta(data: SpectralData, no_nonspherical_above: bool = False) -> float:
    """Rate for lattices (delta = d): min(d - s1, 2), or d - s1 under the flag."""
    if abs(data.delta - data.d) > 1e-12:
        raise ValueError("lattice_eta needs delta = d")
    if no_nonspherical_above:
        return data.d - data.s1
    return min(data.d - data.s1, 2.0)


def validate_lax_phillips(data: SpectralData, tol: float = 1e-12) -> dict:
    """Check eigenvalue ordering, the window [0, d^2/4), and the link with s."""
    if data.eigenvalues is None:
        raise ValueError("no eigenvalues supplied")
    d = data.d
    ev = data.eigenvalues
    top = d * d / 4
    issues = []
    lam0 = data.delta * (d - data.delta)
    if abs(ev[0] - lam0) > tol:
        issues.append(f"eigenvalues[0]={ev[0]} differs from delta(d-delta)={lam0}")
    for i, lam in enumerate(ev):
        if not 0 <= lam < top:
            issues.append(f"eigenvalues[{i}]={lam} outside [0, {top})")
    for i in range(1, len(ev)):
        if not ev[i] > ev[i - 1]:
            issues.append(f"eigenvalues[{i}] not increasing")
    s_vals = []
    for lam in ev:
        if 0 <= lam <= top:
            s = s_from_eigenvalue(lam, d)
            s_vals.append(s)
            if abs(s * (d - s) - lam) > tol:
                issues.append(f"s(lambda) round trip failed at {lam}")
    if len(ev) > 1 and not issues and abs(s_vals[1] - data.s1) > tol:
        issues.append(f"s1={data.s1} differs from s(eigenvalues[1])={s_vals[1]}")
    return {"lambda0": lam0, "s": s_vals, "issues": issues, "valid": not issues}


def rate_report(data: SpectralData, r: float = 0.05, xi: float = 0.05) -> dict:
    """Everything the command line prints for a SpectralData document."""
    diag = {"bms_beta": "not computed"}
    r = min(r, (data.delta - data.s1) / 2)
    br = beta_rate(data, r, xi)
    out = {
        "eta": mixing_eta(data),
        "eta_delta": eta_s(data.delta, data.d),
        "lambda": lambda_rate(data, r),
        "beta": br.beta,
        "lower_bound": br.lower_bound,
        "diagnostics": diag,
    }
    diag.update({"r": r, "xi": xi, "beta_terms": list(br.terms), "limit": br.limit})
    if abs(data.delta - data.d) < 1e-12:
        diag["lattice_eta"] = lattice_eta(data)
    if data.eigenvalues is not None:
        diag["lax_phillips"] = validate_lax_phillips(data)
    return out


def rate_report_json(data: SpectralData, **kw) -> str:
    return json.dumps(rate_report(data, **kw), sort_keys=True, indent=2)
