"""Filtration toolkit: exponent sets, Newton-polygon weight selection,
weighted orders, associated polynomials and normal-form tests.

The weight of a term V(x) d^i is rho * (leading exponent of V at infinity)
+ sigma * i.  The associated polynomial collects the leading monomials of
the maximal-weight terms into a sparse element of Q[x, x^-1, y]; because
all its exponent pairs lie on one line, every structural question reduces
to a univariate polynomial p(w) in the line parameter w = x^sigma y^-rho
times a monomial prefactor, and the normal-form shapes become statements
about the root structure of p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Optional

from .errors import NotAiryShape, NotHomogeneous, NotIncreasing, ZeroOperand
from .rational import Poly, RatFunc
from .diffop import DiffOp


# ---------------------------------------------------------------------------
# exponent set / Newton polygon
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonPolygon:
    """Exponent pairs (m, j): m the leading Laurent exponent at infinity of
    the coefficient of d^j; plus the convex hull vertices."""

    points: frozenset[tuple[int, int]]
    hull: tuple[tuple[int, int], ...]


def _convex_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Monotone-chain hull in integer arithmetic."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def exponent_set(L: DiffOp) -> NewtonPolygon:
    """E(L): the set of (leading exponent, derivative power) pairs."""
    if L.is_zero():
        raise ZeroOperand("exponent set of the zero operator")
    pts = [(c.infinity_order(), j) for j, c in L.coeffs.items()]
    return NewtonPolygon(frozenset(pts), tuple(_convex_hull(pts)))


@dataclass(frozen=True)
class WeightPair:
    """Coprime positive weights (rho, sigma) with the supporting point."""

    rho: int
    sigma: int
    support: tuple[int, int]  # the point (k, j) on the line besides (0, N)

    def weight(self, x_exp: int, d_exp: int) -> int:
        return self.rho * x_exp + self.sigma * d_exp


def choose_weights(L: DiffOp) -> WeightPair:
    """The supporting line of the Newton polygon through (0, N).

    Picks the point (k, j), k > 0, maximizing the slope (j - N)/k; all of
    E(L) then lies on or below the line, and N sigma = k rho + j sigma has
    the coprime positive solution rho = (N - j)/g, sigma = k/g.  Raises
    NotIncreasing when no coefficient grows at infinity."""
    if L.is_zero() or not L.is_monic():
        raise NotIncreasing("weight selection requires a monic operator")
    N = L.order
    pts = [(c.infinity_order(), j) for j, c in L.coeffs.items() if j < N]
    grow = [(k, j) for (k, j) in pts if k > 0]
    if not grow:
        raise NotIncreasing("all coefficients bounded at infinity")
    best = max(grow, key=lambda kj: (Fraction(kj[1] - N, kj[0]), kj[0]))
    k, j = best
    g = gcd(N - j, k)
    return WeightPair(rho=(N - j) // g, sigma=k // g, support=(k, j))


def weighted_order(L: DiffOp, w: WeightPair) -> int:
    """Max term weight rho*(ord V_j) + sigma*j."""
    if L.is_zero():
        raise ZeroOperand("weighted order of the zero operator")
    return max(w.weight(c.infinity_order(), j) for j, c in L.coeffs.items())


# ---------------------------------------------------------------------------
# associated polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BiHomPoly:
    """Sparse element of Q[x, x^-1, y]: (x exponent, y exponent) -> scalar."""

    terms: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {
            (int(a), int(b)): Fraction(c)
            for (a, b), c in self.terms.items()
            if Fraction(c) != 0
        }
        if any(b < 0 for (_, b) in clean):
            raise ValueError("negative y exponent")
        object.__setattr__(self, "terms", clean)

    def is_zero(self) -> bool:
        return not self.terms

    def __mul__(self, other: "BiHomPoly") -> "BiHomPoly":
        out: dict[tuple[int, int], Fraction] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return BiHomPoly(out)

    def weight(self, w: WeightPair) -> int:
        if self.is_zero():
            raise ZeroOperand("weight of the zero polynomial")
        weights = {w.weight(a, b) for (a, b) in self.terms}
        if len(weights) > 1:
            raise NotHomogeneous(f"mixed weights {sorted(weights)}")
        return weights.pop()

    def is_homogeneous(self, w: WeightPair) -> bool:
        try:
            self.weight(w)
            return True
        except NotHomogeneous:
            return False

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b) in sorted(self.terms, key=lambda ab: (-ab[1], -ab[0])):
            c = self.terms[(a, b)]
            atoms = []
            if abs(c) != 1 or (a == 0 and b == 0):
                atoms.append(str(abs(c)))
            if a != 0:
                atoms.append("x" if a == 1 else f"x^{a}")
            if b != 0:
                atoms.append("y" if b == 1 else f"y^{b}")
            body = "*".join(atoms)
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f" {'+' if c > 0 else '-'} {body}")
        return "".join(parts)


def associated_polynomial(L: DiffOp, w: WeightPair) -> BiHomPoly:
    """Sum of the leading monomials of the maximal-weight terms of L."""
    v = weighted_order(L, w)
    terms: dict[tuple[int, int], Fraction] = {}
    for j, c in L.coeffs.items():
        m = c.infinity_order()
        if w.weight(m, j) == v:
            terms[(m, j)] = c.infinity_leading()
    return BiHomPoly(terms)


def homogeneous_part(L: DiffOp, w: WeightPair) -> DiffOp:
    """The normal-ordered operator realization of the associated polynomial
    (y goes to d, already on the right)."""
    f = associated_polynomial(L, w)
    coeffs: dict[int, RatFunc] = {}
    for (a, b), c in f.terms.items():
        coeffs[b] = coeffs.get(b, RatFunc.zero()) + RatFunc.x_power(a, c)
    return DiffOp(L.var, coeffs)


# ---------------------------------------------------------------------------
# normal-form classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalFormReport:
    """Outcome of matching f against the admissible leading-term shapes.

    ``case`` is one of "b", "c", "d" or None; (n, k, m, mu) describe a match
    f = y^n (y^m + mu x)^k (case c; case b is the same with x and y swapped,
    case d has two linear factors with roots lam, mu).  ``yrx`` carries the
    (y^r - lam x)^k data when f = y^n (y^r - lam x)^k with lam != 0; the
    bispectral normal form is the sub-case n = 0 (lam rescalable to 1).
    ``perfect_power`` reports f = h^d with maximal d >= 2 (the shape any
    f^s = g^r relation would require).  ``nilpotency_excluded`` flags
    y^n (y^r - lam x)^k with n >= 1, k >= 1: such leading terms cannot come
    from an operator acting nilpotently."""

    case: Optional[str]
    n: int = 0
    k: int = 0
    m: int = 0
    mu: Optional[Fraction] = None
    lam: Optional[Fraction] = None
    yrx: Optional[tuple[int, int, Fraction]] = None  # (r, k, lam)
    perfect_power: Optional[int] = None
    nilpotency_excluded: bool = False
    unresolved_over_Q: bool = False
    weight: int = 0
    precondition_weight_ok: bool = False

    @property
    def is_airy_normal_form(self) -> bool:
        """f = (y^r - lam x)^1 with no y factor."""
        return self.yrx is not None and self.n == 0 and self.yrx[1] == 1


def _line_data(f: BiHomPoly, w: WeightPair) -> tuple[int, int, Poly]:
    """Write a homogeneous f as x^a0 y^b0 p(w), w = x^sigma y^-rho.

    Exponent pairs of a (rho,sigma)-homogeneous polynomial lie on a line
    with direction (sigma, -rho); a0/b0 anchor at the minimal x exponent."""
    f.weight(w)  # raises NotHomogeneous
    a0 = min(a for (a, _) in f.terms)
    b_at_a0 = max(b for (a, b) in f.terms if a == a0)
    coeffs: dict[int, Fraction] = {}
    for (a, b), c in f.terms.items():
        t, rem = divmod(a - a0, w.sigma)
        if rem or b != b_at_a0 - w.rho * t:
            raise NotHomogeneous("terms do not lie on a single weight line")
        coeffs[t] = c
    p = Poly([coeffs.get(i, Fraction(0)) for i in range(max(coeffs) + 1)])
    return a0, b_at_a0, p


def _match_binomial_power(p: Poly) -> Optional[tuple[int, Fraction]]:
    """p = c (1 + mu w)^k?  Returns (k, mu).  Over Q this is decidable from
    the first two coefficients: rational p forces mu = p_1/(k p_0)."""
    k = p.degree
    if k < 1 or p.coeff(0) == 0:
        return None
    c0 = p.coeff(0)
    mu = p.coeff(1) / (k * c0)
    if mu == 0:
        return None
    if (Poly([1, mu]) ** k).scale(c0) == p:
        return k, mu
    return None


def _perfect_power(a0: int, b0: int, p: Poly) -> Optional[int]:
    """Largest d >= 2 with f = h^d structurally (gcd of the squarefree
    multiplicities of p and the monomial prefactor exponents)."""
    if p.degree < 0:
        return None
    g = 0
    for _, mult in p.monic().squarefree_decomposition():
        g = gcd(g, mult)
    g = gcd(gcd(g, abs(a0)), abs(b0))
    return g if g >= 2 else None


def normal_form_test(f: BiHomPoly, w: WeightPair) -> NormalFormReport:
    """Classify a homogeneous f against the admissible shapes.

    Shapes tried, keyed by the weight comparison exactly as in the case
    split (scalars extracted over Q, the x-scalar recorded):
      (b) sigma > rho = 1:  f = x^n (x^m + mu y)^k,
      (c) rho > sigma = 1:  f = y^n (y^m + mu x)^k,
      (d) rho = sigma = 1:  f = (y + lam x)^n (y + mu x)^k.
    Also reports the (y^r - lam x)^k data, a perfect-power exponent f = h^d
    (the shape any f^s = g^r relation would require), and the nilpotency
    exclusion for the y^n (y^r - lam x)^k, n >= 1, k >= 1 pattern."""
    if f.is_zero():
        raise ZeroOperand("normal form of the zero polynomial")
    v = f.weight(w)  # raises NotHomogeneous
    pre_ok = v > w.rho + w.sigma
    report_kwargs = dict(weight=v, precondition_weight_ok=pre_ok)

    a0, b0, p = _line_data(f, w)
    perfect = _perfect_power(a0, b0, p)

    # case (c), and the (y^r - lam x)^k form for any rho > sigma = 1
    if w.sigma == 1 and w.rho > 1 and a0 == 0:
        match = _match_binomial_power(p)
        if match is not None:
            k, mu = match
            m = w.rho
            n = b0 - m * k
            if n >= 0:
                yrx = (m, k, -mu)
                return NormalFormReport(
                    case="c", n=n, k=k, m=m, mu=mu, yrx=yrx,
                    perfect_power=perfect,
                    nilpotency_excluded=n >= 1 and k >= 1,
                    **report_kwargs,
                )

    # case (b): mirror of (c) with x and y swapped (sigma > rho = 1)
    if w.rho == 1 and w.sigma > 1 and all(a >= 0 for (a, _) in f.terms):
        swapped = BiHomPoly({(b, a): c for (a, b), c in f.terms.items()})
        ws = WeightPair(rho=w.sigma, sigma=w.rho, support=w.support)
        try:
            sa0, sb0, sp = _line_data(swapped, ws)
        except NotHomogeneous:
            sp = None
        if sp is not None and sa0 == 0:
            match = _match_binomial_power(sp)
            if match is not None:
                k, mu = match
                m = ws.rho
                n = sb0 - m * k
                if n >= 0:
                    return NormalFormReport(
                        case="b", n=n, k=k, m=m, mu=mu,
                        perfect_power=perfect, **report_kwargs,
                    )

    # case (d): rho = sigma = 1; factors read off the roots of p(w), plus a
    # (y + 0 x)-factor of multiplicity b0 - deg p
    if w.rho == 1 and w.sigma == 1 and a0 == 0:
        T = p.degree
        roots = p.rational_roots()
        total = sum(mult for _, mult in roots)
        if T >= 0 and total == T:
            factors: list[tuple[Fraction, int]] = []
            if b0 - T > 0:
                factors.append((Fraction(0), b0 - T))
            for root, mult in roots:
                factors.append((-1 / root, mult))
            if 1 <= len(factors) <= 2:
                first = factors[0]
                second = factors[1] if len(factors) > 1 else None
                yrx = None
                if first[0] == 0 and second is not None and w.rho == 1:
                    yrx = (1, second[1], -second[0]) if second[0] != 0 else None
                return NormalFormReport(
                    case="d",
                    n=first[1], lam=first[0],
                    k=second[1] if second else 0,
                    mu=second[0] if second else None,
                    yrx=yrx,
                    perfect_power=perfect,
                    nilpotency_excluded=bool(yrx) and first[1] >= 1,
                    **report_kwargs,
                )
        elif T >= 2:
            distinct = (1 if b0 - T > 0 else 0) + sum(
                g.degree for g, _ in p.monic().squarefree_decomposition()
            )
            if distinct <= 2:
                return NormalFormReport(
                    case="d", perfect_power=perfect,
                    unresolved_over_Q=True, **report_kwargs,
                )

    return NormalFormReport(case=None, perfect_power=perfect, **report_kwargs)


# ---------------------------------------------------------------------------
# principal part
# ---------------------------------------------------------------------------

def principal_part(L: DiffOp) -> tuple[DiffOp, DiffOp]:
    """Split an increasing-coefficient operator into its generalized Airy
    part and the decaying remainder.

    Requires the pipeline choose_weights -> associated_polynomial ->
    normal_form_test to land on (y^N - lam x)^1; the Airy part then collects
    the leading -lam x together with the constants-at-infinity of the lower
    coefficients, and the remainder has every coefficient O(x^-1)."""
    w = choose_weights(L)  # NotIncreasing propagates
    f = associated_polynomial(L, w)
    nf = normal_form_test(f, w)
    N = L.order
    if not nf.is_airy_normal_form or nf.yrx is None or nf.yrx[0] != N:
        raise NotAiryShape(f"leading form {f} is not (y^{N} - lam*x)^1")
    lam = nf.yrx[2]
    coeffs: dict[int, RatFunc] = {N: RatFunc.one()}
    coeffs[0] = RatFunc.x().scale(-lam)
    for j, c in L.coeffs.items():
        if j >= N:
            continue
        rest = c - RatFunc.x().scale(-lam) if j == 0 else c
        if rest.infinity_order() > 0:
            raise NotAiryShape(f"coefficient of d^{j} still grows: {rest}")
        const = rest.constant_at_infinity()
        if const != 0:
            coeffs[j] = coeffs.get(j, RatFunc.zero()) + RatFunc.const(const)
    A = DiffOp(L.var, coeffs)
    V = L - A
    return A, V
