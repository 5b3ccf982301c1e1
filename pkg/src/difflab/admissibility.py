"""Coefficient machinery and admissibility of (γ, b, d, potential) tuples.

The decay arguments hinge on the signs of four coefficients,

    c1 = -|b|/2 + |γ|b²/2 + γ|b|/2        (gradient-product term)
    c2 = -γ|b|/2 + |γ|(d-1)/4 - |γ|b²/4   (cross term)
    c0 = c1 + c2                           (combined, must not be positive)
    c3 = γbd/2 - 1                         (quadratic-drift term)

and on clause tables that differ per potential class. The strict/non-strict
character of every inequality is encoded verbatim in CLAUSES so tests can
diff the table instead of reading code branches. Writing s = γb > 0,

    c0 < 0  <=>  1 - sqrt(1-γ²(d-1)) < s < 1 + sqrt(1-γ²(d-1)),

which is the recurring clause (ii).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

BOUNDED = "bounded"
QUADRATIC = "quadratic"
TRIVIAL = "trivial"
ASSUMPTIONS = (BOUNDED, QUADRATIC, TRIVIAL)


@dataclass(frozen=True)
class CoefficientSet:
    c1: float
    c2: float
    c0: float
    c3: float
    sign_convention_ok: bool  # γ ≠ 0 and γb > 0


def coefficients(gamma: float, b: float, dim: int) -> CoefficientSet:
    """Evaluate c0..c3; c0 is literally c1 + c2.

    Tuples with γb <= 0 are outside the working sign convention but still
    evaluated, with the flag cleared, so parameter sweeps can map the plane.
    """
    if gamma == 0:
        raise DomainError("gamma must be nonzero")
    ag, ab = abs(gamma), abs(b)
    c1 = -ab / 2.0 + ag * b * b / 2.0 + gamma * ab / 2.0
    c2 = -gamma * ab / 2.0 + ag * (dim - 1) / 4.0 - ag * b * b / 4.0
    c3 = gamma * b * dim / 2.0 - 1.0
    return CoefficientSet(c1=c1, c2=c2, c0=c1 + c2, c3=c3, sign_convention_ok=gamma * b > 0)


@dataclass(frozen=True)
class Interval:
    """Interval for s = γb with per-endpoint openness."""

    lo: float
    hi: float
    lo_open: bool = True
    hi_open: bool = True

    @property
    def empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and (self.lo_open or self.hi_open)

    def contains(self, s: float) -> bool:
        if self.empty:
            return False
        above = s > self.lo if self.lo_open else s >= self.lo
        below = s < self.hi if self.hi_open else s <= self.hi
        return above and below

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo or (self.lo == other.lo and self.lo_open):
            lo, lo_open = self.lo, self.lo_open
        else:
            lo, lo_open = other.lo, other.lo_open
        if self.hi < other.hi or (self.hi == other.hi and self.hi_open):
            hi, hi_open = self.hi, self.hi_open
        else:
            hi, hi_open = other.hi, other.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def __str__(self):
        if self.empty:
            return "(empty)"
        return f"{'(' if self.lo_open else '['}{self.lo:.6g}, {self.hi:.6g}{')' if self.hi_open else ']'}"


EMPTY_INTERVAL = Interval(1.0, 0.0)


def _ii_halfwidth(gamma: float, dim: int) -> float | None:
    disc = 1.0 - gamma * gamma * (dim - 1)
    if disc < 0.0:
        return None
    return math.sqrt(disc)


# Clause table, transcribed with the printed strictness.
# i: (upper bound for γ (resp. |γ|) as fn(d), strict)
# ii: (lo_open, hi_open) for s in 1 ± sqrt(1-γ²(d-1))
# iii: (lo fn(γ,d) or None, lo_open, hi fn(γ,d) or None, hi_open), or None if absent
CLAUSES = {
    (BOUNDED, "pme"): {
        "i": (lambda d: min(1.0 / math.sqrt(d), 2.0 / d, 0.5), False),
        "ii": (True, True),
        "iii": (lambda g, d: g, False, lambda g, d: 1.0 - g, False),
    },
    (BOUNDED, "fde"): {
        "i": (lambda d: min(2.0 / d, 4.0 / (3.0 + d)), True),
        "ii": (True, True),
        "iii": (lambda g, d: abs(g), True, lambda g, d: min(1.0 + abs(g), 2.0 * abs(g)), False),
    },
    (QUADRATIC, "pme"): {
        "i": (lambda d: min(1.0 / math.sqrt(d), 2.0 / d), True),
        "ii": (False, False),
        "iii": (None, True, lambda g, d: min(1.0 - g, 2.0 / d), True),
    },
    (QUADRATIC, "fde"): {
        "i": (lambda d: 2.0 / d, True),
        "ii": (False, False),
        "iii": (lambda g, d: abs(g), True, lambda g, d: min(1.0 + abs(g), 2.0 / d), True),
    },
    (TRIVIAL, "pme"): {
        "i": (lambda d: math.inf if d == 1 else 1.0 / math.sqrt(d - 1), True),
        "ii": (True, True),
        # no clause (iii) in the drift-less slow regime
        "iii": None,
    },
    (TRIVIAL, "fde"): {
        "i": (lambda d: 2.0 / d, True),
        "ii": (True, True),
        # the regime is stated for b < -1, i.e. s = γb > |γ| strictly
        "iii": (lambda g, d: abs(g), True, None, True),
    },
}


@dataclass(frozen=True)
class AdmissibilityReport:
    gamma: float
    b: float
    dim: int
    assumption: str
    regime: str  # "pme" or "fde"
    clause_i: bool
    clause_ii: bool
    clause_iii: bool  # True when the assumption has no third clause
    sign_convention_ok: bool
    admissible: bool
    coefficients: CoefficientSet
    gamma_b_interval: Interval
    sign_flags: dict

    def rows(self) -> list[str]:
        """Machine-readable CSV rows (header + data)."""
        head = ("gamma,b,dim,assumption,regime,clause_i,clause_ii,clause_iii,"
                "sign_convention,admissible,c0,c1,c2,c3")
        data = (
            f"{self.gamma:.17g},{self.b:.17g},{self.dim},{self.assumption},{self.regime},"
            f"{int(self.clause_i)},{int(self.clause_ii)},{int(self.clause_iii)},"
            f"{int(self.sign_convention_ok)},{int(self.admissible)},"
            f"{self.coefficients.c0:.17g},{self.coefficients.c1:.17g},"
            f"{self.coefficients.c2:.17g},{self.coefficients.c3:.17g}"
        )
        return [head, data]

    def text(self) -> str:
        lines = [
            f"admissibility ({self.assumption} potential), gamma={self.gamma:g}, "
            f"b={self.b:g}, gamma*b={self.gamma * self.b:g}, d={self.dim}",
            f"  regime        : {self.regime}",
            f"  sign γb>0     : {'ok' if self.sign_convention_ok else 'VIOLATED'}",
            f"  clause (i)    : {'pass' if self.clause_i else 'fail'}",
            f"  clause (ii)   : {'pass' if self.clause_ii else 'fail'}",
            f"  clause (iii)  : {'pass' if self.clause_iii else 'fail'}",
            f"  c0={self.coefficients.c0:.6g}  c1={self.coefficients.c1:.6g}  "
            f"c2={self.coefficients.c2:.6g}  c3={self.coefficients.c3:.6g}",
            f"  admissible γb : {self.gamma_b_interval}",
            f"  admissible    : {'yes' if self.admissible else 'no'}",
        ]
        return "\n".join(lines)


def _regime(gamma: float, b: float) -> str:
    return "pme" if gamma > 0 else "fde"


def _validate_gamma(gamma: float, dim: int) -> None:
    if gamma == 0 or (gamma < 0 and gamma <= -2.0 / dim):
        raise DomainError(f"gamma = {gamma} outside (-2/d, 0) u (0, inf) for d = {dim}")


def clause_ii_interval(gamma: float, dim: int, assumption: str) -> Interval:
    half = _ii_halfwidth(gamma, dim)
    if half is None:
        return EMPTY_INTERVAL
    lo_open, hi_open = CLAUSES[(assumption, _regime(gamma, 1.0 if gamma > 0 else -1.0))]["ii"]
    return Interval(1.0 - half, 1.0 + half, lo_open, hi_open)


def clause_iii_interval(gamma: float, dim: int, assumption: str) -> Interval:
    spec = CLAUSES[(assumption, _regime(gamma, 1.0 if gamma > 0 else -1.0))]["iii"]
    if spec is None:
        return Interval(0.0, math.inf, True, True)
    lo_fn, lo_open, hi_fn, hi_open = spec
    lo = lo_fn(gamma, dim) if lo_fn is not None else 0.0
    hi = hi_fn(gamma, dim) if hi_fn is not None else math.inf
    return Interval(lo, hi, lo_open, hi_open)


def admissible_interval(gamma: float, dim: int, assumption: str) -> Interval:
    """Admissible range of s = γb: clauses (ii) and (iii) intersected.

    Clause (i) is a precondition on γ alone; when it fails the interval is
    returned empty.
    """
    if assumption not in ASSUMPTIONS:
        raise DomainError(f"unknown assumption {assumption!r}")
    _validate_gamma(gamma, dim)
    regime = _regime(gamma, 1.0 if gamma > 0 else -1.0)
    bound, strict = CLAUSES[(assumption, regime)]["i"]
    limit = bound(dim)
    ok_i = abs(gamma) < limit if strict else abs(gamma) <= limit
    if not ok_i:
        return EMPTY_INTERVAL
    # the blanket sign condition s > 0 is implied by (ii)/(iii) lower bounds >= 0
    inter = clause_ii_interval(gamma, dim, assumption).intersect(
        clause_iii_interval(gamma, dim, assumption)
    )
    return inter.intersect(Interval(0.0, math.inf, True, True))


def check(gamma: float, b: float, dim: int, potential_kind: str) -> AdmissibilityReport:
    """Evaluate every clause literally for the given tuple.

    ``potential_kind`` selects the clause set: bounded, quadratic, trivial.
    """
    if potential_kind not in ASSUMPTIONS:
        raise DomainError(f"unknown potential kind {potential_kind!r}")
    _validate_gamma(gamma, dim)
    regime = _regime(gamma, b)
    coeff = coefficients(gamma, b, dim)
    s = gamma * b

    bound, strict = CLAUSES[(potential_kind, regime)]["i"]
    limit = bound(dim)
    ok_i = abs(gamma) < limit if strict else abs(gamma) <= limit
    ok_ii = clause_ii_interval(gamma, dim, potential_kind).contains(s)
    ok_iii = clause_iii_interval(gamma, dim, potential_kind).contains(s)

    sign_ok = coeff.sign_convention_ok and (b > 0 if gamma > 0 else b < 0)
    admissible = sign_ok and ok_i and ok_ii and ok_iii
    flags = {
        "c0_negative": coeff.c0 < 0.0,
        "c0_nonpositive": coeff.c0 <= 0.0,
        "c1_negative": coeff.c1 < 0.0,
        "c1_nonpositive": coeff.c1 <= 0.0,
        "c3_negative": coeff.c3 < 0.0,
    }
    return AdmissibilityReport(
        gamma=gamma, b=b, dim=dim, assumption=potential_kind, regime=regime,
        clause_i=ok_i, clause_ii=ok_ii, clause_iii=ok_iii,
        sign_convention_ok=sign_ok, admissible=admissible,
        coefficients=coeff,
        gamma_b_interval=admissible_interval(gamma, dim, potential_kind),
        sign_flags=flags,
    )


def clause_i_limit(assumption: str, regime: str, dim: int) -> tuple[float, bool]:
    """Upper bound (and strictness) on γ (resp. |γ|) from clause (i)."""
    bound, strict = CLAUSES[(assumption, regime)]["i"]
    return bound(dim), strict


def required_sign_flags(assumption: str) -> tuple[str, ...]:
    """Coefficient signs each decay argument relies on."""
    if assumption == BOUNDED:
        return ("c0_negative", "c1_nonpositive")
    if assumption == QUADRATIC:
        return ("c0_nonpositive", "c1_negative", "c3_negative")
    return ("c0_negative",)
