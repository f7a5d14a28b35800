"""Exact scalar, polynomial, rational-function and Laurent-at-infinity arithmetic.

Conventions used throughout the package:

* Scalars are ``fractions.Fraction`` (exact, arbitrary precision).
* ``Poly`` is a dense univariate polynomial, coefficients ascending by
  degree.  The zero polynomial has degree -1 (the distinguished sentinel).
* ``RatFunc`` is a reduced fraction of two Polys with a monic denominator.
* ``LaurentTail`` is a truncated expansion at infinity written in the
  variable x^-1: the term at index ``s`` is ``c_s * x^(-s)``.  Indices may
  be negative (polynomial part).  ``trunc`` is the last index known exactly;
  ``trunc=None`` means every absent coefficient is exactly zero.
* ``PowerSeries`` is the mirror object at the origin (term at index ``e``
  is ``c_e * x^e``, exact through ``e <= trunc``).

All values are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .errors import (
    InsufficientPrecision,
    LogObstruction,
    ZeroDenominator,
)

Scalar = Fraction

ScalarLike = Union[Fraction, int]


def _frac(value: ScalarLike) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Poly:
    """Dense univariate polynomial over Fraction, ascending coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[ScalarLike] = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *args):  # immutable
        raise AttributeError("Poly is immutable")

    # -- constructors

    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def one() -> "Poly":
        return Poly([1])

    @staticmethod
    def x() -> "Poly":
        return Poly([0, 1])

    @staticmethod
    def const(c: ScalarLike) -> "Poly":
        return Poly([c])

    @staticmethod
    def monomial(degree: int, coeff: ScalarLike = 1) -> "Poly":
        if degree < 0:
            raise ValueError("monomial degree must be >= 0")
        return Poly([0] * degree + [coeff])

    # -- basic queries

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (Fraction(1),)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_value(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def leading(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def coeff(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def valuation(self) -> int:
        """Multiplicity of the root x = 0 (degree+1 convention not used;
        returns 0 for the zero polynomial)."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return 0

    # -- arithmetic

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    def scale(self, c: ScalarLike) -> "Poly":
        c = _frac(c)
        if c == 0:
            return Poly()
        return Poly([a * c for a in self.coeffs])

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Poly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        d = other.degree
        lead = other.leading()
        while len(rem) - 1 >= d and any(c != 0 for c in rem):
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) - 1 < d:
                break
            shift = len(rem) - 1 - d
            c = rem[-1] / lead
            q[shift] = c
            for i, b in enumerate(other.coeffs):
                rem[shift + i] -= c * b
        return Poly(q), Poly(rem)

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("exact_div: division is not exact")
        return q

    def derivative(self) -> "Poly":
        return Poly([c * i for i, c in enumerate(self.coeffs)][1:])

    def integral(self) -> "Poly":
        """Antiderivative with zero constant term."""
        return Poly([Fraction(0)] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.leading()
        if lead == 1:
            return self
        return Poly([c / lead for c in self.coeffs])

    def gcd(self, other: "Poly") -> "Poly":
        """Monic greatest common divisor."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def __call__(self, point: ScalarLike) -> Fraction:
        """Evaluate at a scalar point by Horner."""
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def compose(self, inner: "Poly") -> "Poly":
        acc = Poly.zero()
        for c in reversed(self.coeffs):
            acc = acc * inner + Poly.const(c)
        return acc

    def squarefree_decomposition(self) -> list[tuple["Poly", int]]:
        """Yun's algorithm: returns [(g_i, i)] with self = lead * prod g_i^i,
        each g_i monic squarefree, pairwise coprime, deg g_i possibly 0."""
        if self.degree <= 0:
            return []
        p = self.monic()
        dp = p.derivative()
        a = p.gcd(dp)
        b = p.exact_div(a)
        c = dp.exact_div(a)
        out: list[tuple[Poly, int]] = []
        i = 1
        while b.degree > 0:
            d = c - b.derivative()
            g = b.gcd(d)
            if g.degree > 0:
                out.append((g, i))
            b = b.exact_div(g)
            c = d.exact_div(g)
            i += 1
        return out

    def rational_roots(self) -> list[tuple[Fraction, int]]:
        """All rational roots with multiplicities, by candidate testing and
        deflation.  Exact; may leave an irrational factor behind."""
        if self.degree < 1:
            return []
        p = self
        roots: dict[Fraction, int] = {}
        v = p.valuation()
        if v and not p.is_zero():
            roots[Fraction(0)] = v
            p = Poly(p.coeffs[v:])
        # clear denominators -> integer polynomial
        den_lcm = 1
        for c in p.coeffs:
            den_lcm = den_lcm * c.denominator // _gcd_int(den_lcm, c.denominator)
        ints = [int(c * den_lcm) for c in p.coeffs]
        while len(ints) > 1:
            a0, an = ints[0], ints[-1]
            found = None
            for num in _divisors(abs(a0)):
                for den in _divisors(abs(an)):
                    for cand in (Fraction(num, den), Fraction(-num, den)):
                        if _eval_int_poly(ints, cand) == 0:
                            found = cand
                            break
                    if found is not None:
                        break
                if found is not None:
                    break
            if found is None:
                break
            ints = _deflate(ints, found)
            roots[found] = roots.get(found, 0) + 1
        return sorted(roots.items())

    # -- display

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeff(k)
            if c == 0:
                continue
            parts.append(_fmt_term(c, "x", k, first=not parts))
        return "".join(parts)


def _fmt_term(c: Fraction, var: str, k: int, first: bool) -> str:
    sign = "-" if c < 0 else "+"
    mag = abs(c)
    if k == 0:
        body = str(mag)
    else:
        v = var if k == 1 else f"{var}^{k}"
        body = v if mag == 1 else f"{mag}*{v}"
    if first:
        return body if c > 0 else f"-{body}"
    return f" {sign} {body}"


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _divisors(n: int) -> list[int]:
    if n == 0:
        return [1]
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def _eval_int_poly(coeffs: list[int], point: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * point + c
    return acc


def _deflate(coeffs: list[int], root: Fraction) -> list[int]:
    """Divide the integer polynomial by (x - root); returns the quotient
    with denominators cleared (roots are preserved)."""
    n = len(coeffs) - 1
    q = [Fraction(0)] * n
    q[n - 1] = Fraction(coeffs[n])
    for k in range(n - 1, 0, -1):
        q[k - 1] = Fraction(coeffs[k]) + root * q[k]
    lcm = 1
    for c in q:
        lcm = lcm * c.denominator // _gcd_int(lcm, c.denominator)
    return [int(c * lcm) for c in q]


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return Poly.zero()
    return (a * b).exact_div(a.gcd(b)).monic()


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RatFunc:
    """Reduced rational function num/den with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = Poly([1])):
        if den.is_zero():
            raise ZeroDenominator("rational function with zero denominator")
        if num.is_zero():
            num, den = Poly.zero(), Poly.one()
        elif den.is_one():
            pass  # polynomial fast path: nothing to reduce
        else:
            if den.degree > 0 and num.degree > 0:
                g = num.gcd(den)
                if g.degree > 0:
                    num = num.exact_div(g)
                    den = den.exact_div(g)
            lead = den.leading()
            if lead != 1:
                num = num.scale(1 / lead)
                den = den.scale(1 / lead)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *args):
        raise AttributeError("RatFunc is immutable")

    # -- constructors

    @staticmethod
    def zero() -> "RatFunc":
        return RatFunc(Poly.zero())

    @staticmethod
    def one() -> "RatFunc":
        return RatFunc(Poly.one())

    @staticmethod
    def const(c: ScalarLike) -> "RatFunc":
        return RatFunc(Poly.const(c))

    @staticmethod
    def x() -> "RatFunc":
        return RatFunc(Poly.x())

    @staticmethod
    def from_poly(p: Poly) -> "RatFunc":
        return RatFunc(p)

    @staticmethod
    def x_power(k: int, coeff: ScalarLike = 1) -> "RatFunc":
        """coeff * x^k for any integer k (negative allowed)."""
        if k >= 0:
            return RatFunc(Poly.monomial(k, coeff))
        return RatFunc(Poly.const(coeff), Poly.monomial(-k))

    # -- queries

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.den.is_one() and self.num.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.constant_value()

    def infinity_order(self) -> int:
        """Leading exponent at infinity: deg num - deg den.  The zero
        function returns a very negative sentinel."""
        if self.is_zero():
            return -(10 ** 9)
        return self.num.degree - self.den.degree

    def infinity_leading(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return self.num.leading() / self.den.leading()

    def constant_at_infinity(self) -> Fraction:
        """Limit at infinity when bounded (0 if strictly decaying)."""
        o = self.infinity_order()
        if o > 0:
            raise ValueError("unbounded at infinity")
        if o == 0:
            return self.infinity_leading()
        return Fraction(0)

    def is_laurent_polynomial(self) -> bool:
        """True when the denominator is a power of x."""
        d = self.den
        return all(c == 0 for c in d.coeffs[:-1])

    def laurent_terms(self) -> list[tuple[int, Fraction]]:
        """Exponent/coefficient pairs for Laurent-polynomial values,
        descending by exponent."""
        if not self.is_laurent_polynomial():
            raise ValueError("not a Laurent polynomial")
        shift = self.den.degree
        out = [(k - shift, c) for k, c in enumerate(self.num.coeffs) if c != 0]
        return sorted(out, reverse=True)

    # -- arithmetic

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RatFunc.const(other)
        return (
            isinstance(other, RatFunc)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return self + (-other)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.num, self.den * other.den)

    def scale(self, c: ScalarLike) -> "RatFunc":
        return RatFunc(self.num.scale(c), self.den)

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDenominator("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        return self * other.inverse()

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inverse() ** (-n)
        result = RatFunc.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"


def ratfunc_canonicalize(num: Poly, den: Poly) -> RatFunc:
    """gcd-reduced, monic-denominator representative of num/den."""
    return RatFunc(num, den)


# ---------------------------------------------------------------------------
# Laurent tails at infinity
# ---------------------------------------------------------------------------

_SURROGATE = 10 ** 9  # stand-in start index for empty finite tails


@dataclass(frozen=True)
class LaurentTail:
    """Truncated Laurent expansion at infinity: sum_s c_s * x^(-s).

    ``terms`` maps the index s (negated exponent) to a nonzero coefficient.
    Indices at most ``trunc`` are exact; ``trunc=None`` means the tail is an
    exact Laurent polynomial (all absent coefficients are zero).
    """

    terms: Mapping[int, Fraction] = field(default_factory=dict)
    trunc: Optional[int] = None

    def __post_init__(self):
        clean = {int(s): _frac(c) for s, c in self.terms.items() if c != 0}
        if self.trunc is not None:
            clean = {s: c for s, c in clean.items() if s <= self.trunc}
        object.__setattr__(self, "terms", clean)

    # -- constructors

    @staticmethod
    def zero(trunc: Optional[int] = None) -> "LaurentTail":
        return LaurentTail({}, trunc)

    @staticmethod
    def from_terms(pairs: Mapping[int, ScalarLike], trunc: Optional[int] = None) -> "LaurentTail":
        return LaurentTail({s: _frac(c) for s, c in pairs.items()}, trunc)

    @staticmethod
    def x_power(exponent: int, coeff: ScalarLike = 1) -> "LaurentTail":
        """Exact tail for coeff * x^exponent."""
        return LaurentTail({-exponent: _frac(coeff)}, None)

    @staticmethod
    def from_poly(p: Poly) -> "LaurentTail":
        return LaurentTail({-k: c for k, c in enumerate(p.coeffs)}, None)

    # -- queries

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def start(self) -> Optional[int]:
        """Leading index r (term c_r x^-r); None for the zero tail."""
        if not self.terms:
            return None
        return min(self.terms)

    def _known_floor(self) -> int:
        """Start index used in precision bookkeeping (surrogate for zero)."""
        if self.terms:
            return min(self.terms)
        if self.trunc is not None:
            return self.trunc + 1
        return _SURROGATE

    def coeff(self, s: int) -> Fraction:
        return self.terms.get(s, Fraction(0))

    def known(self, s: int) -> bool:
        return self.trunc is None or s <= self.trunc

    def leading(self) -> tuple[int, Fraction]:
        if not self.terms:
            raise ValueError("zero tail has no leading term")
        s = min(self.terms)
        return s, self.terms[s]

    def height(self) -> Optional[int]:
        """x-exponent of the leading term (negated start index)."""
        if not self.terms:
            return None
        return -min(self.terms)

    def is_laurent_polynomial_part_only(self) -> bool:
        """True if no strictly-negative powers of x appear (all s <= 0)."""
        return all(s <= 0 for s in self.terms)

    # -- arithmetic

    def __neg__(self) -> "LaurentTail":
        return LaurentTail({s: -c for s, c in self.terms.items()}, self.trunc)

    def __add__(self, other: "LaurentTail") -> "LaurentTail":
        trunc = _min_trunc(self.trunc, other.trunc)
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out.get(s, Fraction(0)) + c
        return LaurentTail(out, trunc)

    def __sub__(self, other: "LaurentTail") -> "LaurentTail":
        return self + (-other)

    def scale(self, c: ScalarLike) -> "LaurentTail":
        c = _frac(c)
        if c == 0:
            return LaurentTail({}, self.trunc)
        return LaurentTail({s: v * c for s, v in self.terms.items()}, self.trunc)

    def __mul__(self, other: "LaurentTail") -> "LaurentTail":
        # Exact zero absorbs; otherwise contamination from either factor's
        # unknown range is shifted by the other factor's leading index.
        if (self.is_zero() and self.trunc is None) or (
            other.is_zero() and other.trunc is None
        ):
            return LaurentTail({}, None)
        cands = []
        if self.trunc is not None:
            cands.append(self.trunc + other._known_floor())
        if other.trunc is not None:
            cands.append(other.trunc + self._known_floor())
        trunc = min(cands) if cands else None
        out: dict[int, Fraction] = {}
        for s1, c1 in self.terms.items():
            for s2, c2 in other.terms.items():
                s = s1 + s2
                if trunc is not None and s > trunc:
                    continue
                out[s] = out.get(s, Fraction(0)) + c1 * c2
        return LaurentTail(out, trunc)

    def mul_x_power(self, k: int) -> "LaurentTail":
        """Multiply by x^k (shift indices by -k)."""
        trunc = None if self.trunc is None else self.trunc - k
        return LaurentTail({s - k: c for s, c in self.terms.items()}, trunc)

    def derivative(self) -> "LaurentTail":
        # d/dx x^-s = -s x^-(s+1); the constant term drops out.
        out = {s + 1: -s * c for s, c in self.terms.items() if s != 0}
        trunc = None if self.trunc is None else self.trunc + 1
        return LaurentTail(out, trunc)

    def antiderivative(self) -> "LaurentTail":
        """Term-by-term antiderivative, zero constant of integration.

        Raises LogObstruction when the x^-1 coefficient is nonzero: the
        antiderivative would leave the Laurent/rational class.
        """
        if self.terms.get(1, Fraction(0)) != 0:
            raise LogObstruction("antiderivative requires log(x): nonzero x^-1 term")
        out = {s - 1: c / (1 - s) for s, c in self.terms.items()}
        trunc = None if self.trunc is None else self.trunc - 1
        return LaurentTail(out, trunc)

    def restrict(self, trunc: Optional[int]) -> "LaurentTail":
        new = _min_trunc(self.trunc, trunc)
        return LaurentTail(self.terms, new)

    def known_count(self) -> Optional[int]:
        """Number of known coefficients from the leading index down to the
        truncation (None = infinitely many)."""
        if self.trunc is None:
            return None
        anchor = min(self.terms) if self.terms else 0
        return self.trunc - anchor + 1

    def as_ratfunc(self) -> RatFunc:
        """Exact tails only: the Laurent polynomial as a rational function."""
        if self.trunc is not None:
            raise ValueError("tail is truncated; not an exact value")
        out = RatFunc.zero()
        for s, c in self.terms.items():
            out = out + RatFunc.x_power(-s, c)
        return out

    def __str__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for s in sorted(self.terms):
                parts.append(_fmt_exp_term(self.terms[s], -s, first=not parts))
            body = "".join(parts)
        tail = "" if self.trunc is None else f" + O(x^{-(self.trunc + 1)})"
        return body + tail


def _fmt_exp_term(c: Fraction, exponent: int, first: bool) -> str:
    sign = "-" if c < 0 else "+"
    mag = abs(c)
    if exponent == 0:
        body = str(mag)
    else:
        v = "x" if exponent == 1 else f"x^{exponent}"
        body = v if mag == 1 else f"{mag}*{v}"
    if first:
        return body if c > 0 else f"-{body}"
    return f" {sign} {body}"


def _min_trunc(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def laurent_expand(f: RatFunc, M: int) -> LaurentTail:
    """Laurent expansion of ``f`` at infinity, exact through index M
    (i.e. through the term in x^-M)."""
    if f.is_zero():
        return LaurentTail({}, M)
    num, den = f.num, f.den
    n, d = num.degree, den.degree
    start = d - n  # index of the leading term
    count = M - start + 1
    if count <= 0:
        return LaurentTail({}, M)
    # reverse coefficients: num(x) = x^n * num_rev(1/x), den likewise
    num_rev = list(reversed(num.coeffs))
    den_rev = list(reversed(den.coeffs))
    # power-series division num_rev / den_rev in t = 1/x
    lead = den_rev[0]
    out: dict[int, Fraction] = {}
    series = [Fraction(0)] * count
    for i in range(count):
        acc = num_rev[i] if i < len(num_rev) else Fraction(0)
        for j in range(1, min(i, len(den_rev) - 1) + 1):
            acc -= den_rev[j] * series[i - j]
        series[i] = acc / lead
        if series[i] != 0:
            out[start + i] = series[i]
    return LaurentTail(out, M)


def rational_reconstruct(t: LaurentTail, degN: int, degD: int) -> Optional[RatFunc]:
    """Recover the rational function with deg num <= degN, deg den <= degD
    whose expansion at infinity matches ``t`` on every known coefficient.

    Returns None when no such function exists.  Raises InsufficientPrecision
    when the tail carries fewer than degN + degD + 2 known coefficients.
    """
    from .linalg import nullspace  # local import avoids a cycle at module load

    count = t.known_count()
    if count is not None and count < degN + degD + 2:
        raise InsufficientPrecision(
            f"need {degN + degD + 2} known coefficients, have {count}"
        )
    if t.is_zero():
        return RatFunc.zero()
    if t.trunc is None:
        # exact Laurent polynomial: solve by direct comparison
        f = t.as_ratfunc()
        if f.num.degree <= degN and f.den.degree <= degD:
            return f
        return None
    M = t.trunc
    r = t._known_floor()
    e_max = max(degN, degD - r)
    e_min = degD - M
    if e_min > e_max:
        raise InsufficientPrecision("empty matching window")
    # unknowns: p_0..p_degN, q_0..q_degD ; rows: coefficient of x^e in q*t - p
    ncols = (degN + 1) + (degD + 1)
    rows = []
    for e in range(e_max, e_min - 1, -1):
        row = [Fraction(0)] * ncols
        if 0 <= e <= degN:
            row[e] = Fraction(-1)
        for i in range(degD + 1):
            c = t.coeff(i - e)
            if c != 0:
                row[degN + 1 + i] += c
        if any(v != 0 for v in row):
            rows.append(row)
    basis = nullspace(rows, ncols)
    for vec in basis:
        qc = vec[degN + 1:]
        if any(c != 0 for c in qc):
            p = Poly(vec[: degN + 1])
            q = Poly(qc)
            f = RatFunc(p, q)
            # belt and braces: the reduced representative must re-expand to t
            check = laurent_expand(f, M)
            ok = all(check.coeff(s) == t.coeff(s) for s in range(min(r, check._known_floor()), M + 1))
            if ok:
                return f
            return None
    return None


def antiderivative(t: LaurentTail) -> LaurentTail:
    """Module-level alias for LaurentTail.antiderivative (spec operation)."""
    return t.antiderivative()


# ---------------------------------------------------------------------------
# rational antiderivative (tail propose, exact derivative verify)
# ---------------------------------------------------------------------------

def rat_antiderivative(g: RatFunc, max_rounds: int = 4) -> RatFunc:
    """Antiderivative of a rational function, certified rational.

    Proposes a candidate by integrating the Laurent tail at infinity and
    reconstructing; certifies by exact re-differentiation.  Raises
    LogObstruction when the residue at infinity (x^-1 coefficient) is
    nonzero, ReconstructionFailed when no rational antiderivative is found
    within growing degree bounds (e.g. arctan-type integrands).
    """
    if g.is_zero():
        return RatFunc.zero()
    dn = max(g.num.degree - g.den.degree + 1, 0) + g.den.degree
    dd = g.den.degree
    for round_ in range(max_rounds):
        degN = dn + round_ * (dn + 2)
        degD = dd + round_ * (dd + 2)
        depth = degN + degD + 4 + max(0, -g.infinity_order())
        tail = laurent_expand(g, depth)
        anti = tail.antiderivative()  # raises LogObstruction on x^-1 term
        try:
            cand = rational_reconstruct(anti, degN + 1, degD)
        except InsufficientPrecision:
            cand = None
        if cand is not None and cand.derivative() == g:
            return cand
    from .errors import ReconstructionFailed

    raise ReconstructionFailed("no rational antiderivative within degree bounds")


# ---------------------------------------------------------------------------
# truncated power series at the origin
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerSeries:
    """Truncated (Laurent) series at the origin: sum_e c_e * x^e.

    Exponents below zero are allowed internally (they arise while applying
    operators with poles at 0).  ``trunc`` is the last exponent known
    exactly; None means the series is an exact Laurent polynomial.
    """

    terms: Mapping[int, Fraction] = field(default_factory=dict)
    trunc: Optional[int] = None

    def __post_init__(self):
        clean = {int(e): _frac(c) for e, c in self.terms.items() if c != 0}
        if self.trunc is not None:
            clean = {e: c for e, c in clean.items() if e <= self.trunc}
        object.__setattr__(self, "terms", clean)

    @staticmethod
    def zero(trunc: Optional[int] = None) -> "PowerSeries":
        return PowerSeries({}, trunc)

    @staticmethod
    def from_coeffs(coeffs: Iterable[ScalarLike], trunc: Optional[int] = None) -> "PowerSeries":
        cs = list(coeffs)
        t = trunc if trunc is not None else None
        return PowerSeries({e: _frac(c) for e, c in enumerate(cs)},
                           t if t is not None else None)

    @staticmethod
    def from_poly(p: Poly) -> "PowerSeries":
        return PowerSeries({e: c for e, c in enumerate(p.coeffs)}, None)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, e: int) -> Fraction:
        return self.terms.get(e, Fraction(0))

    def _known_floor(self) -> int:
        if self.terms:
            return min(self.terms)
        if self.trunc is not None:
            return self.trunc + 1
        return _SURROGATE

    def __neg__(self) -> "PowerSeries":
        return PowerSeries({e: -c for e, c in self.terms.items()}, self.trunc)

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        trunc = _min_trunc(self.trunc, other.trunc)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return PowerSeries(out, trunc)

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        return self + (-other)

    def scale(self, c: ScalarLike) -> "PowerSeries":
        return PowerSeries({e: v * _frac(c) for e, v in self.terms.items()}, self.trunc)

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        if (self.is_zero() and self.trunc is None) or (
            other.is_zero() and other.trunc is None
        ):
            return PowerSeries({}, None)
        cands = []
        if self.trunc is not None:
            cands.append(self.trunc + other._known_floor())
        if other.trunc is not None:
            cands.append(other.trunc + self._known_floor())
        trunc = min(cands) if cands else None
        out: dict[int, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if trunc is not None and e > trunc:
                    continue
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return PowerSeries(out, trunc)

    def mul_x_power(self, k: int) -> "PowerSeries":
        trunc = None if self.trunc is None else self.trunc + k
        return PowerSeries({e + k: c for e, c in self.terms.items()}, trunc)

    def derivative(self) -> "PowerSeries":
        out = {e - 1: e * c for e, c in self.terms.items() if e != 0}
        trunc = None if self.trunc is None else self.trunc - 1
        return PowerSeries(out, trunc)

    def min_exponent(self) -> Optional[int]:
        if not self.terms:
            return None
        return min(self.terms)

    def restrict(self, trunc: Optional[int]) -> "PowerSeries":
        return PowerSeries(self.terms, _min_trunc(self.trunc, trunc))

    def __str__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for e in sorted(self.terms):
                parts.append(_fmt_exp_term(self.terms[e], e, first=not parts))
            body = "".join(parts)
        tail = "" if self.trunc is None else f" + O(x^{self.trunc + 1})"
        return body + tail


def taylor_expand_at_zero(f: RatFunc, M: int) -> PowerSeries:
    """Laurent expansion of ``f`` at the origin, exact through x^M.  The
    principal part (negative exponents) is finite and exact."""
    if f.is_zero():
        return PowerSeries({}, M)
    num, den = f.num, f.den
    v = den.valuation()
    unit = Poly(den.coeffs[v:])  # den = x^v * unit, unit(0) != 0
    lead = unit.coeff(0)
    nv = num.valuation()
    ncs = num.coeffs[nv:]
    start = nv - v
    count = M - start + 1
    if count <= 0:
        return PowerSeries({}, M)
    series = [Fraction(0)] * count
    out: dict[int, Fraction] = {}
    for i in range(count):
        acc = ncs[i] if i < len(ncs) else Fraction(0)
        for j in range(1, min(i, unit.degree) + 1):
            acc -= unit.coeff(j) * series[i - j]
        series[i] = acc / lead
        if series[i] != 0:
            out[start + i] = series[i]
    return PowerSeries(out, M)
