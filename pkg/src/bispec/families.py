"""Constructors for the three basic operator families and the Darboux engine.

The families:

* generalized Airy      A = d^p + sum a_j d^j - x          (1 <= j <= p-2)
* generalized Bessel    B = x^-p (xd - b_1) ... (xd - b_p)
* constant coefficient  C = d^p + sum a_j d^j

A Darboux transformation factors a polynomial in a base operator as
h(L) = Q P and exchanges the factors: the transformed operator is P Q.
The caller supplies P; the engine completes Q by right division, verifies
the factorization exactly and re-multiplies.  When the declared h is a pure
power of the base the transformation is called monomial.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .errors import BadIndex, FormViolation, FormViolationWarning, NotAFactor
from .rational import Poly, RatFunc, ScalarLike, laurent_expand
from .diffop import DiffOp, dop_mul, euler_operator, right_divide


@dataclass(frozen=True)
class BesselSpec:
    """Order p and the p roots (beta_1 .. beta_p) of the Bessel symbol."""

    betas: tuple[Fraction, ...]
    check_weight_sum: bool = False

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(Fraction(b) for b in self.betas))
        if self.check_weight_sum:
            p = self.p
            want = Fraction(p * (p - 1), 2)
            got = sum(self.betas, Fraction(0))
            if got != want:
                raise ValueError(f"sum of betas is {got}, expected {want}")

    @property
    def p(self) -> int:
        return len(self.betas)


@dataclass(frozen=True)
class DarbouxResult:
    """Certificate of a Darboux transformation.

    Q * P = base and P * Q = transformed hold exactly (re-verified on
    construction).  ``monomial`` records the caller's declaration that the
    base is a pure power of a Bessel operator; ``base_power`` is that power
    when declared."""

    P: DiffOp
    Q: DiffOp
    base: DiffOp
    transformed: DiffOp
    monomial: bool = False
    base_power: Optional[int] = None
    form_ok: Optional[bool] = None

    def __post_init__(self):
        if dop_mul(self.Q, self.P) != self.base:
            raise NotAFactor("Q*P does not reproduce the base operator")
        if dop_mul(self.P, self.Q) != self.transformed:
            raise NotAFactor("P*Q does not reproduce the transformed operator")


def make_airy(p: int, a: Mapping[int, ScalarLike] | None = None, var: str = "x") -> DiffOp:
    """d^p + sum_{j=1}^{p-2} a_j d^j - x."""
    if p < 2:
        raise BadIndex("Airy order must be >= 2")
    a = a or {}
    coeffs: dict[int, RatFunc] = {p: RatFunc.one(), 0: -RatFunc.x()}
    for j, c in a.items():
        if not 1 <= j <= p - 2:
            raise BadIndex(f"Airy parameter index {j} outside [1, {p - 2}]")
        if Fraction(c) != 0:
            coeffs[j] = RatFunc.const(c)
    return DiffOp(var, coeffs)


def make_constcoeff(p: int, a: Mapping[int, ScalarLike] | None = None, var: str = "x") -> DiffOp:
    """d^p + sum_{j=1}^{p-2} a_j d^j."""
    if p < 1:
        raise BadIndex("order must be >= 1")
    a = a or {}
    coeffs: dict[int, RatFunc] = {p: RatFunc.one()}
    for j, c in a.items():
        if not 1 <= j <= p - 2:
            raise BadIndex(f"parameter index {j} outside [1, {p - 2}]")
        if Fraction(c) != 0:
            coeffs[j] = RatFunc.const(c)
    return DiffOp(var, coeffs)


def make_bessel(spec: BesselSpec, var: str = "x") -> DiffOp:
    """x^-p (xd - beta_1) ... (xd - beta_p), fully expanded and normal
    ordered.  The factors commute, so the order of the betas is irrelevant."""
    D = euler_operator(var)
    prod = DiffOp.one(var)
    for b in spec.betas:
        prod = dop_mul(prod, D - DiffOp.const(b, var))
    return prod.mul_function(RatFunc.x_power(-spec.p))


def bessel_integrality(spec: BesselSpec) -> bool:
    """True iff some difference beta_i - beta_j (i != j) lies in p*Z."""
    p = spec.p
    bs = spec.betas
    for i in range(p):
        for j in range(i + 1, p):
            diff = bs[i] - bs[j]
            if diff.denominator == 1 and diff.numerator % p == 0:
                return True
    return False


# ---------------------------------------------------------------------------
# Bessel symbol and recovery
# ---------------------------------------------------------------------------

def falling_factorial(j: int) -> Poly:
    """u (u-1) ... (u-j+1); the symbol of x^j d^j in the Euler variable."""
    out = Poly.one()
    for i in range(j):
        out = out * Poly([-i, 1])
    return out


def is_euler_homogeneous(L: DiffOp) -> bool:
    """True iff [xd, L] = -N L with N = order(L)."""
    if L.is_zero():
        return False
    from .diffop import commutator

    D = euler_operator(L.var)
    return commutator(D, L) == L.scale(-L.order)


def bessel_symbol(L: DiffOp) -> Optional[Poly]:
    """For an Euler-homogeneous monic operator, the polynomial b with
    x^N L = b(xd); None when L is not of Bessel shape."""
    if L.is_zero() or not L.is_monic() or not is_euler_homogeneous(L):
        return None
    N = L.order
    T = DiffOp.from_function(Poly.monomial(N), L.var) * L
    sym = Poly.zero()
    for j, c in T.coeffs.items():
        # homogeneity forces c = w_j x^j
        if not c.is_polynomial():
            return None
        mono = c.num
        if any(k != j and v != 0 for k, v in enumerate(mono.coeffs)):
            return None
        sym = sym + falling_factorial(j).scale(mono.coeff(j))
    return sym


def bessel_recover(L: DiffOp) -> Optional[BesselSpec]:
    """Recover the betas of a Bessel operator as the rational roots of its
    symbol; None when L is not Bessel-shaped or the roots are irrational."""
    sym = bessel_symbol(L)
    if sym is None:
        return None
    roots = sym.rational_roots()
    total = sum(m for _, m in roots)
    if total != sym.degree:
        return None
    betas: list[Fraction] = []
    for root, mult in roots:
        betas.extend([root] * mult)
    return BesselSpec(tuple(sorted(betas)))


# ---------------------------------------------------------------------------
# the shape test for Darboux P factors
# ---------------------------------------------------------------------------

def _is_function_of_xN(q: RatFunc, N: int) -> bool:
    """Exact test for q(x) in Q(x^N), via the expansion at infinity: all
    exponents must be congruent to 0 mod N through a depth that separates
    distinct rational functions of the occurring degrees."""
    if q.is_zero():
        return True
    depth = 2 * (max(q.num.degree, 0) + max(q.den.degree, 0)) + 2 * N + 4
    tail = laurent_expand(q, depth)
    return all(s % N == 0 for s in tail.terms)


def p_form_check(P: DiffOp, N: int) -> bool:
    """True iff P = x^-n sum_k p_k(x^N) D^k with D = xd, p_k rational and
    p_n = 1, where n = order(P).

    The rewrite is a change of basis from d^k to Euler powers: with
    h_k(x) = sum_j V_j(x) x^-j s(j, k) (signed Stirling numbers), the test
    is x^n h_n = 1 and x^n h_k a rational function of x^N for every k."""
    if P.is_zero():
        return False
    n = P.order
    h: dict[int, RatFunc] = {}
    for j, v in P.coeffs.items():
        g = v * RatFunc.x_power(-j)
        ff = falling_factorial(j)
        for k, s in enumerate(ff.coeffs):
            if s != 0:
                h[k] = h.get(k, RatFunc.zero()) + g.scale(s)
    xn = RatFunc.x_power(n)
    top = xn * h.get(n, RatFunc.zero())
    if not top.is_one():
        return False
    return all(_is_function_of_xN(xn * q, N) for k, q in h.items() if k != n)


# ---------------------------------------------------------------------------
# the Darboux engine
# ---------------------------------------------------------------------------

def darboux(
    base: DiffOp,
    P: DiffOp,
    *,
    monomial: bool = False,
    base_power: Optional[int] = None,
    form_check_order: Optional[int] = None,
    strict_form: bool = False,
) -> DarbouxResult:
    """Factor base = Q P by right division and exchange to P Q.

    Raises NotAFactor when the division leaves a remainder.  When
    ``form_check_order`` is given, P is tested against the
    x^-n sum p_k(x^N) D^k shape; a failure warns (FormViolationWarning) or
    raises FormViolation when ``strict_form`` is set.
    """
    if base.is_zero() or P.is_zero():
        raise NotAFactor("base and P must be nonzero")
    Q, R = right_divide(base, P)
    if not R.is_zero():
        raise NotAFactor("P does not divide the base operator on the right")
    form_ok: Optional[bool] = None
    if form_check_order is not None:
        form_ok = p_form_check(P, form_check_order)
        if not form_ok:
            if strict_form:
                raise FormViolation("P fails the x^-n sum p_k(x^N) D^k shape")
            warnings.warn("Darboux P factor fails the expected shape",
                          FormViolationWarning, stacklevel=2)
    transformed = dop_mul(P, Q)
    return DarbouxResult(
        P=P, Q=Q, base=base, transformed=transformed,
        monomial=monomial, base_power=base_power, form_ok=form_ok,
    )


def compose_darboux(first: DarbouxResult, second: DarbouxResult) -> DarbouxResult:
    """Chain two transformations: requires second.base to be built over
    first.transformed.  The composite pair is (P2 P1, Q1 Q2); the monomial
    flag survives composition and base powers multiply as d1 * (1 + d2)."""
    P = dop_mul(second.P, first.P)
    Q = dop_mul(first.Q, second.Q)
    base = dop_mul(Q, P)
    transformed = dop_mul(P, Q)
    power = None
    if first.base_power is not None and second.base_power is not None:
        power = first.base_power * (1 + second.base_power)
    return DarbouxResult(
        P=P, Q=Q, base=base, transformed=transformed,
        monomial=first.monomial and second.monomial, base_power=power,
    )
