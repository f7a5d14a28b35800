"""The ring of differential operators with rational-function coefficients.

A ``DiffOp`` is kept in normal order: all x-dependence to the left of all
derivatives, i.e. a finite sum  sum_j V_j(x) * d^j  stored as a map from
the derivative power j to the nonzero coefficient V_j.  The variable tag
("x" or "z") distinguishes operators acting in the original variable from
operators acting in the spectral one; mixing tags is an error.

Products are computed with the Leibniz rule
    d^i o W(x) = sum_t C(i, t) W^(t)(x) d^(i-t),
so every constructor returns a normal-ordered value and equality is plain
coefficient comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Mapping, Optional, Union

from .errors import (
    DivisionByZeroOperator,
    NonRationalGauge,
    NotMonic,
    PoleAtOrigin,
    VariableMismatch,
)
from .rational import (
    Poly,
    PowerSeries,
    RatFunc,
    ScalarLike,
    rat_antiderivative,
    taylor_expand_at_zero,
)

CoeffLike = Union[RatFunc, Poly, Fraction, int]


def _coerce(c: CoeffLike) -> RatFunc:
    if isinstance(c, RatFunc):
        return c
    if isinstance(c, Poly):
        return RatFunc(c)
    return RatFunc.const(c)


@dataclass(frozen=True, eq=False)
class DiffOp:
    """Normal-ordered differential operator sum_j V_j(x) d^j."""

    var: str
    coeffs: Mapping[int, RatFunc]

    def __post_init__(self):
        clean = {int(j): _coerce(c) for j, c in self.coeffs.items()}
        clean = {j: c for j, c in clean.items() if not c.is_zero()}
        if any(j < 0 for j in clean):
            raise ValueError("negative derivative power in DiffOp")
        object.__setattr__(self, "coeffs", clean)

    # -- constructors

    @staticmethod
    def zero(var: str = "x") -> "DiffOp":
        return DiffOp(var, {})

    @staticmethod
    def one(var: str = "x") -> "DiffOp":
        return DiffOp(var, {0: RatFunc.one()})

    @staticmethod
    def const(c: ScalarLike, var: str = "x") -> "DiffOp":
        return DiffOp(var, {0: RatFunc.const(c)})

    @staticmethod
    def d(var: str = "x") -> "DiffOp":
        return DiffOp(var, {1: RatFunc.one()})

    @staticmethod
    def x(var: str = "x") -> "DiffOp":
        return DiffOp(var, {0: RatFunc.x()})

    @staticmethod
    def from_function(f: CoeffLike, var: str = "x") -> "DiffOp":
        return DiffOp(var, {0: _coerce(f)})

    @staticmethod
    def monomial(coeff: CoeffLike, j: int, var: str = "x") -> "DiffOp":
        return DiffOp(var, {j: _coerce(coeff)})

    # -- queries

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def order(self) -> int:
        """Order in d; -1 for the zero operator."""
        return max(self.coeffs) if self.coeffs else -1

    def coeff(self, j: int) -> RatFunc:
        return self.coeffs.get(j, RatFunc.zero())

    def leading(self) -> RatFunc:
        if self.is_zero():
            return RatFunc.zero()
        return self.coeffs[self.order]

    def is_monic(self) -> bool:
        return not self.is_zero() and self.leading().is_one()

    def is_function(self) -> bool:
        return self.order <= 0

    def has_polynomial_coeffs(self) -> bool:
        return all(c.is_polynomial() for c in self.coeffs.values())

    def _check_var(self, other: "DiffOp"):
        if self.var != other.var:
            raise VariableMismatch(f"operators in {self.var!r} and {other.var!r}")

    # -- ring operations

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiffOp)
            and self.var == other.var
            and self.coeffs == other.coeffs
        )

    def __neg__(self) -> "DiffOp":
        return DiffOp(self.var, {j: -c for j, c in self.coeffs.items()})

    def __add__(self, other: "DiffOp") -> "DiffOp":
        self._check_var(other)
        out = dict(self.coeffs)
        for j, c in other.coeffs.items():
            out[j] = out.get(j, RatFunc.zero()) + c
        return DiffOp(self.var, out)

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def scale(self, c: ScalarLike) -> "DiffOp":
        return DiffOp(self.var, {j: v.scale(c) for j, v in self.coeffs.items()})

    def mul_function(self, f: CoeffLike) -> "DiffOp":
        """Left multiplication by a function of x."""
        f = _coerce(f)
        return DiffOp(self.var, {j: f * v for j, v in self.coeffs.items()})

    def __mul__(self, other: "DiffOp") -> "DiffOp":
        return dop_mul(self, other)

    def __pow__(self, n: int) -> "DiffOp":
        if n < 0:
            raise ValueError("negative operator power")
        result = DiffOp.one(self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def substitute_d(self, replacement: "DiffOp") -> "DiffOp":
        """Evaluate sum V_j(x) * R^j for an order-preserving replacement R
        of the derivative (used by the gauge normalizer)."""
        self._check_var(replacement)
        powers: dict[int, DiffOp] = {0: DiffOp.one(self.var)}
        top = self.order
        for j in range(1, top + 1):
            powers[j] = powers[j - 1] * replacement
        out = DiffOp.zero(self.var)
        for j, c in self.coeffs.items():
            out = out + powers[j].mul_function(c)
        return out

    def retag(self, var: str) -> "DiffOp":
        return DiffOp(var, dict(self.coeffs))

    def __str__(self):
        from .parser import print_operator

        return print_operator(self)

    def __repr__(self):
        return f"DiffOp({self.var!r}, {self!s})"


# ---------------------------------------------------------------------------
# products, brackets, ad powers
# ---------------------------------------------------------------------------

def dop_mul(L: DiffOp, M: DiffOp) -> DiffOp:
    """Normal-ordered product L o M via the Leibniz rule."""
    L._check_var(M)
    out: dict[int, RatFunc] = {}
    for i, a in L.coeffs.items():
        for j, b in M.coeffs.items():
            # d^i o b = sum_t C(i,t) b^(t) d^(i-t)
            deriv = b
            for t in range(0, i + 1):
                if not deriv.is_zero():
                    k = i - t + j
                    term = a * deriv.scale(comb(i, t))
                    out[k] = out.get(k, RatFunc.zero()) + term
                if t < i:
                    deriv = deriv.derivative()
    return DiffOp(L.var, out)


def commutator(L: DiffOp, M: DiffOp) -> DiffOp:
    """[L, M] = LM - ML."""
    return dop_mul(L, M) - dop_mul(M, L)


def ad_pow(L: DiffOp, G: DiffOp, m: int) -> DiffOp:
    """m-fold iterated bracket ad_L^m(G); ad^0 = G."""
    if m < 0:
        raise ValueError("ad power must be >= 0")
    out = G
    for _ in range(m):
        out = commutator(L, out)
    return out


def ad_condition_min_m(L: DiffOp, theta: Poly, m_max: int) -> Optional[int]:
    """Minimal m <= m_max with ad_L^(m+1)(theta) = 0 and ad_L^m(theta) != 0,
    or None when no such m exists within the budget."""
    current = DiffOp.from_function(theta, L.var)
    for m in range(m_max + 1):
        nxt = commutator(L, current)
        if nxt.is_zero():
            return m if not current.is_zero() else None
        current = nxt
    return None


# ---------------------------------------------------------------------------
# division
# ---------------------------------------------------------------------------

def right_divide(L: DiffOp, P: DiffOp) -> tuple[DiffOp, DiffOp]:
    """Quotient/remainder with the divisor on the right: L = Q o P + R,
    order(R) < order(P).  Division by an order-0 operator is multiplication
    by its inverse (R = 0)."""
    L._check_var(P)
    if P.is_zero():
        raise DivisionByZeroOperator("right division by the zero operator")
    q = DiffOp.zero(L.var)
    r = L
    n = P.order
    lead = P.leading()
    while not r.is_zero() and r.order >= n:
        j = r.order - n
        c = r.leading() / lead
        term = DiffOp.monomial(c, j, L.var)
        q = q + term
        r = r - dop_mul(term, P)
    return q, r


def left_divide(L: DiffOp, P: DiffOp) -> tuple[DiffOp, DiffOp]:
    """Quotient/remainder with the divisor on the left: L = P o Q + R."""
    L._check_var(P)
    if P.is_zero():
        raise DivisionByZeroOperator("left division by the zero operator")
    q = DiffOp.zero(L.var)
    r = L
    n = P.order
    lead = P.leading()
    while not r.is_zero() and r.order >= n:
        j = r.order - n
        c = r.leading() / lead
        term = DiffOp.monomial(c, j, L.var)
        q = q + term
        r = r - dop_mul(P, term)
    return q, r


# ---------------------------------------------------------------------------
# gauge normalization
# ---------------------------------------------------------------------------

def gauge_normalize(L: DiffOp) -> tuple[DiffOp, RatFunc]:
    """Kill the subleading coefficient of a monic operator by the gauge
    with exponent derivative g' = -V_{N-1}/N.

    The conjugation acts on generators as d -> d + g', leaving x fixed;
    the returned certificate is g'.  Raises NotMonic when the leading
    coefficient is not 1, NonRationalGauge when the gauge exponent
    (the antiderivative of g') is not a rational function.
    """
    if L.is_zero() or not L.is_monic():
        raise NotMonic("gauge normalization requires a monic operator")
    n = L.order
    sub = L.coeff(n - 1)
    if sub.is_zero():
        return L, RatFunc.zero()
    gprime = sub.scale(Fraction(-1, n))
    rat_antiderivative(gprime)  # raises LogObstruction for log-type gauges
    replacement = DiffOp(L.var, {1: RatFunc.one(), 0: gprime})
    out = L.substitute_d(replacement)
    if not out.coeff(n - 1).is_zero():
        raise NonRationalGauge("gauge failed to cancel the subleading term")
    return out, gprime


# ---------------------------------------------------------------------------
# application to truncated series at the origin
# ---------------------------------------------------------------------------

def apply_to_series(L: DiffOp, s: PowerSeries, M: Optional[int] = None) -> PowerSeries:
    """Apply L to a truncated series at the origin.

    The result's ``trunc`` field reports the guaranteed-exact range (one
    derivative order is lost per d).  Coefficients with poles at 0 are
    allowed only when the series supports them: any surviving negative
    exponent raises PoleAtOrigin.
    """
    out = PowerSeries.zero(None)
    for j, c in sorted(L.coeffs.items()):
        term = s
        for _ in range(j):
            term = term.derivative()
        if c.is_laurent_polynomial():
            factor = PowerSeries({e: v for e, v in c.laurent_terms()}, None)
        else:
            # expand the coefficient at 0 deep enough for the known window
            depth_needed = term.trunc if term.trunc is not None else 0
            hi = max(term.terms) if term.terms else 0
            depth = max(depth_needed, hi, 0) + c.den.degree + 4
            factor = taylor_expand_at_zero(c, depth)
        out = out + term * factor
    neg = [e for e in out.terms if e < 0]
    if neg:
        raise PoleAtOrigin(f"result has pole terms at exponents {sorted(neg)}")
    if M is not None:
        out = out.restrict(M)
    return out


# ---------------------------------------------------------------------------
# small helpers shared by higher modules
# ---------------------------------------------------------------------------

def euler_operator(var: str = "x") -> DiffOp:
    """The Euler operator x d."""
    return DiffOp(var, {1: RatFunc.x()})


def poly_of_operator(p: Poly, L: DiffOp) -> DiffOp:
    """p(L) for a scalar polynomial p."""
    acc = DiffOp.zero(L.var)
    for c in reversed(p.coeffs):
        acc = dop_mul(acc, L) + DiffOp.const(c, L.var)
    return acc


def transpose_weyl(P: DiffOp, out_var: str) -> DiffOp:
    """Coordinate transpose x^a d^b -> z^b d_z^a on polynomial-coefficient
    operators.  This realizes the standard anti-isomorphism b with
    b(x) = d_z, b(d) = z (products reverse)."""
    out: dict[int, RatFunc] = {}
    terms: dict[int, Poly] = {}
    for j, c in P.coeffs.items():
        if not c.is_polynomial():
            raise ValueError("transpose requires polynomial coefficients")
        for a, coeff in enumerate(c.num.coeffs):
            if coeff == 0:
                continue
            terms[a] = terms.get(a, Poly.zero()) + Poly.monomial(j, coeff)
    for a, poly in terms.items():
        out[a] = RatFunc(poly)
    return DiffOp(out_var, out)
