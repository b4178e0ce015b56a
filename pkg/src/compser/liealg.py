"""Weights, branching and Casimir scalars for SO(n).

Irreducible representations of SO(n) are labelled by dominant integer
tuples of length ``n // 2``.  SO(1) is the trivial group and carries the
single empty weight ``()``.

Example
-------
>>> branch((2,), 2)
[(-2,), (-1,), (0,), (1,), (2,)]
>>> dim_weight((1, 0), 4)
4
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Weight = tuple


def _rank(n: int) -> int:
    if n < 1:
        raise ValueError(f"SO(n) needs n >= 1, got {n}")
    return n // 2


def validate_weight(n: int, entries: Sequence[int]) -> bool:
    """Return True iff ``entries`` is a dominant weight of SO(n).

    Raises ``ValueError`` when the tuple has the wrong length.
    """
    m = _rank(n)
    entries = tuple(entries)
    if len(entries) != m:
        raise ValueError(f"SO({n}) weights have {m} entries, got {len(entries)}")
    if any(int(e) != e for e in entries):
        return False
    if m == 0:
        return True
    for a, b in zip(entries[:-1], entries[1:]):
        if a < b:
            return False
    if n % 2 == 0:
        if m >= 2 and entries[-2] < abs(entries[-1]):
            return False
        return True
    return entries[-1] >= 0


def _check(n: int, tau: Sequence[int]) -> Weight:
    tau = tuple(int(x) for x in tau)
    if not validate_weight(n, tau):
        raise ValueError(f"{tau} is not a dominant weight of SO({n})")
    return tau


def branch(tau: Sequence[int], d: int) -> list[Weight]:
    """M-types of the SO(d+1)-type ``tau`` restricted to SO(d).

    Every returned weight occurs with multiplicity one (interlacing rule).
    """
    tau = _check(d + 1, tau)
    k = _rank(d)
    if k == 0:
        return [()]
    ranges = []
    if d % 2 == 1:
        # SO(2m) -> SO(2m-1): tau_i >= sigma_i >= |tau_{i+1}|
        for i in range(k):
            lo = abs(tau[i + 1]) if i + 1 == len(tau) - 1 else tau[i + 1]
            ranges.append(range(lo, tau[i] + 1))
    else:
        # SO(2m+1) -> SO(2m): tau_i >= sigma_i >= tau_{i+1}, last |sigma_m| <= tau_m
        for i in range(k - 1):
            ranges.append(range(tau[i + 1], tau[i] + 1))
        ranges.append(range(-tau[k - 1], tau[k - 1] + 1))
    out = [s for s in itertools.product(*ranges) if validate_weight(d, s)]
    return sorted(out)


def dual(tau: Sequence[int], n: int) -> Weight:
    """Dual weight: negate the last entry for SO(4m+2), identity otherwise."""
    tau = _check(n, tau)
    if n % 4 == 2:
        return tau[:-1] + (-tau[-1],)
    return tau


def dim_weight(tau: Sequence[int], n: int) -> int:
    """Weyl dimension formula for SO(n)."""
    tau = _check(n, tau)
    m = len(tau)
    if m == 0:
        return 1
    if n % 2 == 1:
        rho = [Fraction(2 * (m - i) - 1, 2) for i in range(m)]
    else:
        rho = [Fraction(m - 1 - i) for i in range(m)]
    ell = [t + r for t, r in zip(tau, rho)]
    num = Fraction(1)
    den = Fraction(1)
    for i in range(m):
        for j in range(i + 1, m):
            num *= ell[i] ** 2 - ell[j] ** 2
            den *= rho[i] ** 2 - rho[j] ** 2
    if n % 2 == 1:
        for i in range(m):
            num *= ell[i]
            den *= rho[i]
    val = num / den
    assert val.denominator == 1
    return int(val)


def casimir_scalar(tau: Sequence[int], d: int) -> float:
    """Casimir eigenvalue t1^2 + t2^2 + (d-1) t1 + (d-3) t2 of a K-type (t1, t2)."""
    t1, t2 = _two(tau)
    return float(t1 * t1 + t2 * t2 + (d - 1) * t1 + (d - 3) * t2)


def sobolev_weight(tau: Sequence[int], m: int, d: int) -> float:
    """Casimir-form Sobolev weight (1 + Omega_K(tau))^m."""
    if m < 0:
        raise ValueError("Sobolev order must be non-negative")
    return (1.0 + casimir_scalar(tau, d)) ** m


def _two(tau: Sequence[int]) -> tuple[int, int]:
    tau = tuple(tau)
    if len(tau) == 1:
        return int(tau[0]), 0
    return int(tau[0]), int(tau[1])


@dataclass(frozen=True)
class CompSerLabel:
    """Parameters (d, upsilon, s) of a complementary series representation.

    ``upsilon`` is the SO(d) weight given as a tuple; ``s`` must lie in the
    open interval (d/2, d).  Unitarizability for the given upsilon is not
    decided here.
    """

    d: int
    upsilon: Weight
    s: float

    def __post_init__(self):
        ups = tuple(int(x) for x in self.upsilon)
        object.__setattr__(self, "upsilon", ups)
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not validate_weight(self.d, ups):
            raise ValueError(f"{ups} is not an SO({self.d}) weight")
        if not (self.d / 2 < self.s < self.d):
            raise ValueError(f"s={self.s} outside ({self.d / 2}, {self.d})")

    @property
    def ups(self) -> int:
        """First entry of upsilon (0 for SO(1))."""
        return self.upsilon[0] if self.upsilon else 0

    def with_s(self, s: float) -> "CompSerLabel":
        return CompSerLabel(self.d, self.upsilon, s)

    def to_dict(self) -> dict:
        return {"d": self.d, "upsilon": list(self.upsilon), "s": self.s}

    @classmethod
    def from_dict(cls, data: dict) -> "CompSerLabel":
        return cls(int(data["d"]), tuple(data["upsilon"]), float(data["s"]))


def make_label(d: int, s: float, upsilon: int = 0) -> CompSerLabel:
    """Convenience constructor for the family upsilon = (upsilon, 0, ..., 0)."""
    k = d // 2
    ups = () if k == 0 else (upsilon,) + (0,) * (k - 1)
    return CompSerLabel(d, ups, s)


def ktypes_of_compser(label: CompSerLabel, cutoff: int) -> list[tuple[int, int]]:
    """K-types (t1, t2) of U(upsilon, s) with t1 <= cutoff.

    For d = 1 the K-types are all integers |t1| <= cutoff.  For d = 2 they
    are t1 >= |upsilon|, which reduces to t1 >= 0 in the spherical case.
    """
    d = label.d
    ups = label.upsilon
    if any(x != 0 for x in ups[1:]):
        raise ValueError("only upsilon of the form (u, 0, ..., 0) is supported")
    u = label.ups
    if d == 1:
        return [(t, 0) for t in range(-cutoff, cutoff + 1)]
    if d == 2:
        return [(t, 0) for t in range(abs(u), cutoff + 1)]
    if u < 0:
        raise ValueError("upsilon must be non-negative")
    out = []
    for t1 in range(u, cutoff + 1):
        if d == 3:
            t2s = range(-u, u + 1)
        else:
            t2s = range(0, u + 1)
        out.extend((t1, t2) for t2 in t2s)
    return out


def ktype_weight(tau: tuple[int, int], d: int) -> Weight:
    """Full SO(d+1) weight (t1, t2, 0, ...) of a two-coordinate K-type."""
    k = (d + 1) // 2
    full = (tau[0], tau[1]) + (0,) * max(0, k - 2)
    return full[:k]
