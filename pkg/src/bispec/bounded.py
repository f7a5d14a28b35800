"""Bounded-coefficient machinery: wave operators for L K = K f(d),
conjugation of theta through K, the anti-isomorphism b, reconstruction of
the dual operator Lambda, the polynomial-identity obstruction chain, and
bounded centralizer search.

Pseudo-differential series are stored as maps from the index j of d^-j to
exact rational-function coefficients; negative indices are differential
part.  The truncation J means indices <= J are known exactly (None for
finite exact sums).  With exact coefficients every product below the
truncation is computed exactly via
    d^-i o a(x) = sum_t C(-i, t) a^(t)(x) d^(-i-t).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping, Optional, Union

from .errors import (
    AdBudgetExceeded,
    InsufficientPrecision,
    NormalizationFailed,
    NotCommuting,
    NotInDomain,
    NotRankOrderCase,
    ReconstructionFailed,
    TruncationTooShort,
    UnboundedCoefficient,
    VariableMismatch,
)
from .rational import (
    LaurentTail,
    Poly,
    RatFunc,
    rat_antiderivative,
    rational_reconstruct,
)
from .diffop import (
    DiffOp,
    ad_condition_min_m,
    ad_pow,
    commutator,
    transpose_weyl,
)
from .linalg import nullspace


def _binom_general(n: int, t: int) -> Fraction:
    """Generalized binomial C(n, t) for integer n (negative allowed)."""
    out = Fraction(1)
    for s in range(t):
        out *= Fraction(n - s, s + 1)
    return out


# ---------------------------------------------------------------------------
# PDO: truncated pseudo-differential series with exact coefficients
# ---------------------------------------------------------------------------

PDOCoeff = Union[RatFunc, LaurentTail]


@dataclass(frozen=True)
class PDO:
    """sum_{j >= j0} a_j(x) d^-j, exact for j <= trunc (None = finite sum).

    Coefficients are RatFunc throughout the computational pipeline; the
    image of the anti-isomorphism b may carry LaurentTail coefficients,
    on which no further arithmetic is offered."""

    var: str
    terms: Mapping[int, PDOCoeff]
    trunc: Optional[int] = None

    def __post_init__(self):
        clean = {}
        for j, c in self.terms.items():
            if isinstance(c, LaurentTail):
                if not c.is_zero():
                    clean[int(j)] = c
            else:
                if not c.is_zero():
                    clean[int(j)] = c
        if self.trunc is not None:
            clean = {j: c for j, c in clean.items() if j <= self.trunc}
        object.__setattr__(self, "terms", clean)

    # -- constructors

    @staticmethod
    def identity(var: str = "x") -> "PDO":
        return PDO(var, {0: RatFunc.one()}, None)

    @staticmethod
    def from_diffop(L: DiffOp) -> "PDO":
        return PDO(L.var, {-j: c for j, c in L.coeffs.items()}, None)

    @staticmethod
    def from_function(f: RatFunc, var: str = "x") -> "PDO":
        return PDO(var, {0: f}, None)

    # -- queries

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def start(self) -> Optional[int]:
        return min(self.terms) if self.terms else None

    def _known_floor(self) -> int:
        if self.terms:
            return min(self.terms)
        if self.trunc is not None:
            return self.trunc + 1
        return 10 ** 9

    def coeff(self, j: int) -> RatFunc:
        c = self.terms.get(j, RatFunc.zero())
        if isinstance(c, LaurentTail):
            raise NotInDomain("tail-valued coefficient")
        return c

    def known(self, j: int) -> bool:
        return self.trunc is None or j <= self.trunc

    def all_ratfunc(self) -> bool:
        return all(isinstance(c, RatFunc) for c in self.terms.values())

    def differential_part(self) -> DiffOp:
        return DiffOp(self.var, {-j: c for j, c in self.terms.items()
                                 if j <= 0 and isinstance(c, RatFunc)})

    def _check(self, other: "PDO"):
        if self.var != other.var:
            raise VariableMismatch(f"series in {self.var!r} and {other.var!r}")
        if not (self.all_ratfunc() and other.all_ratfunc()):
            raise NotInDomain("arithmetic requires rational coefficients")

    # -- arithmetic (rational coefficients only)

    def __add__(self, other: "PDO") -> "PDO":
        self._check(other)
        trunc = _min_opt(self.trunc, other.trunc)
        out = dict(self.terms)
        for j, c in other.terms.items():
            out[j] = out.get(j, RatFunc.zero()) + c
        return PDO(self.var, out, trunc)

    def __neg__(self) -> "PDO":
        return PDO(self.var, {j: -c for j, c in self.terms.items()}, self.trunc)

    def __sub__(self, other: "PDO") -> "PDO":
        return self + (-other)

    def scale(self, c) -> "PDO":
        return PDO(self.var, {j: v.scale(c) for j, v in self.terms.items()},
                   self.trunc)

    def __mul__(self, other: "PDO") -> "PDO":
        """Product, exact through the combined truncation."""
        self._check(other)
        cands = []
        if self.trunc is not None:
            cands.append(self.trunc + other._known_floor())
        if other.trunc is not None:
            cands.append(other.trunc + self._known_floor())
        trunc = min(cands) if cands else None
        out: dict[int, RatFunc] = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                # d^-i o b = sum_t C(-i, t) b^(t) d^(-i-t); for i <= 0 the
                # binomial kills t > -i, for i > 0 the sum ends only when
                # the derivative chain of b dies (b polynomial) or at the
                # truncation.
                if trunc is None and i > 0 and not b.is_polynomial():
                    raise NotInDomain(
                        "untruncated product with infinite expansion"
                    )
                deriv = b
                t = 0
                while not deriv.is_zero():
                    if i <= 0 and t > -i:
                        break
                    k = i + j + t
                    if trunc is not None and k > trunc:
                        break
                    cb = _binom_general(-i, t)
                    if cb != 0:
                        coeff = a * deriv.scale(cb)
                        out[k] = out.get(k, RatFunc.zero()) + coeff
                    deriv = deriv.derivative()
                    t += 1
        return PDO(self.var, out, trunc)

    def inverse(self, J: int) -> "PDO":
        """(1 + T)^-1 through index J for series with start index 0 and
        leading coefficient 1."""
        if self.coeff(0) != RatFunc.one() or (self.start or 0) < 0:
            raise NotInDomain("inverse requires 1 + (strictly decaying part)")
        t = PDO(self.var, {j: c for j, c in self.terms.items() if j > 0},
                self.trunc).restrict(J)
        acc = PDO.identity(self.var).restrict(J)
        power = PDO.identity(self.var).restrict(J)
        for _ in range(J):
            power = (power * (-t)).restrict(J)
            if power.is_zero():
                break
            acc = acc + power
        return acc

    def restrict(self, trunc: Optional[int]) -> "PDO":
        return PDO(self.var, self.terms, _min_opt(self.trunc, trunc))

    def __str__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for j in sorted(self.terms):
                c = self.terms[j]
                dpow = f"d^{-j}" if j != 0 else ""
                piece = f"({c})" + (f"*{dpow}" if dpow else "")
                parts.append(piece)
            body = " + ".join(parts)
        if self.trunc is not None:
            body += f" + O(d^{-(self.trunc + 1)})"
        return body


def _min_opt(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# ---------------------------------------------------------------------------
# splitting off the constant part
# ---------------------------------------------------------------------------

def split_constant_part(L: DiffOp) -> tuple[Poly, DiffOp]:
    """L = f(d) + V with f collecting the constants at infinity and every
    coefficient of V of order O(x^-1).  Raises UnboundedCoefficient when a
    coefficient grows (the Airy branch owns those inputs)."""
    fcoeffs: dict[int, Fraction] = {}
    vcoeffs: dict[int, RatFunc] = {}
    for j, c in L.coeffs.items():
        if c.infinity_order() > 0:
            raise UnboundedCoefficient(f"coefficient of d^{j} grows at infinity")
        const = c.constant_at_infinity()
        if const != 0:
            fcoeffs[j] = const
        rest = c - RatFunc.const(const)
        if not rest.is_zero():
            vcoeffs[j] = rest
    top = max(fcoeffs) if fcoeffs else 0
    f = Poly([fcoeffs.get(k, Fraction(0)) for k in range(top + 1)])
    return f, DiffOp(L.var, vcoeffs)


# ---------------------------------------------------------------------------
# the wave operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveData:
    """K = 1 + sum a_j d^-j with L K = K f(d) through the truncation."""

    L: DiffOp
    f: Poly
    K: PDO
    J: int

    def residual_zero(self) -> bool:
        """Exactness certificate: the coefficients of L K - K f(d) vanish
        at every index untouched by the unknown a_j, j > J (that is,
        through index J + 1 - deg f)."""
        E = wave_defect(self.L, self.f, self.K)
        bound = self.J + 1 - self.f.degree
        return all(c.is_zero() for j, c in E.terms.items() if j <= bound)


def wave_defect(L: DiffOp, f: Poly, K: PDO) -> PDO:
    """L K - K f(d), treating K as the exact finite sum of its terms."""
    Kx = PDO(L.var, K.terms, None)
    F = PDO.from_diffop(DiffOp(L.var, {j: RatFunc.const(c)
                                       for j, c in enumerate(f.coeffs)}))
    return PDO.from_diffop(L) * Kx - Kx * F


def wave_operator(L: DiffOp, f: Poly, J: int) -> WaveData:
    """Solve L K = K f(d) for K = 1 + sum_{j=1}^J a_j(x) d^-j.

    Each step reads the coefficient of d^(N-1-j) in the defect of the
    partial solution; the new a_j enters that slot only through N a_j', so
    one antiderivative determines it.  Raises LogObstruction when the
    antiderivative has an x^-1 residue (rationality fails, so the input
    cannot satisfy the polynomial-conjugation lemma), ReconstructionFailed
    when the integral is not rational for a deeper reason."""
    N = L.order
    if N < 1:
        raise UnboundedCoefficient("wave operator needs order >= 1")
    if f.degree != N or f.leading() != 1:
        raise ValueError("f must be monic of the operator's order")
    K = PDO.identity(L.var)
    inv_n = Fraction(1, N)
    for j in range(1, J + 1):
        E = wave_defect(L, f, K)
        target = E.coeff(j - N + 1)  # coefficient of d^(N-1-j)
        if target.is_zero():
            continue
        g = target.scale(-inv_n)
        a_j = rat_antiderivative(g)
        K = PDO(L.var, {**K.terms, j: a_j}, None)
    return WaveData(L=L, f=f, K=K.restrict(J), J=J)


# ---------------------------------------------------------------------------
# conjugating theta through K
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaConjugate:
    """Theta = K^-1 theta K with per-index polynomial degree report."""

    theta: Poly
    series: PDO
    max_degree: int
    non_polynomial: tuple[int, ...]  # indices with non-polynomial coefficient

    def all_polynomial(self) -> bool:
        return not self.non_polynomial

    def poly_coeff(self, j: int) -> Poly:
        c = self.series.coeff(j)
        if not c.is_polynomial():
            raise NotInDomain(f"coefficient at d^-{j} is not polynomial")
        return c.num


def conjugate_theta(w: WaveData, theta: Poly) -> ThetaConjugate:
    """Compute Theta = K^-1 theta(x) K through the truncation and report
    the polynomial degrees of its coefficients."""
    if w.J < 1:
        raise TruncationTooShort("need truncation >= 1")
    K = w.K
    Kinv = K.inverse(w.J)
    theta_pdo = PDO.from_function(RatFunc(theta), w.L.var)
    series = Kinv * (theta_pdo * PDO(w.L.var, K.terms, None))
    series = series.restrict(w.J)
    max_deg = 0
    bad = []
    for j, c in sorted(series.terms.items()):
        if isinstance(c, RatFunc) and c.is_polynomial():
            max_deg = max(max_deg, c.num.degree)
        else:
            bad.append(j)
    return ThetaConjugate(theta=theta, series=series,
                          max_degree=max_deg, non_polynomial=tuple(bad))


# ---------------------------------------------------------------------------
# the anti-isomorphism b
# ---------------------------------------------------------------------------

def involution_b(P: Union[DiffOp, PDO]) -> Union[DiffOp, PDO]:
    """b(x) = d_z, b(d) = z extended as an anti-homomorphism
    (b(PQ) = b(Q) b(P)); defined on polynomial coefficients.

    On differential operators this is the coordinate transpose
    x^a d^j -> z^j d_z^a.  On series sum a_j(x) d^-j the image is
    sum z^-j a_j(d_z), regrouped by powers of d_z, whose coefficients are
    then truncated expansions in z^-1 (returned as tails)."""
    out_var = "z" if getattr(P, "var", "x") == "x" else "x"
    if isinstance(P, DiffOp):
        if not P.has_polynomial_coeffs():
            raise NotInDomain("b requires polynomial coefficients")
        return transpose_weyl(P, out_var)
    if not P.all_ratfunc():
        raise NotInDomain("b requires polynomial coefficients")
    tails: dict[int, dict[int, Fraction]] = {}
    for j, c in P.terms.items():
        if not c.is_polynomial():
            raise NotInDomain(f"coefficient at d^-{j} is not polynomial")
        for k, v in enumerate(c.num.coeffs):
            if v != 0:
                tails.setdefault(-k, {})[j] = v
    terms = {idx: LaurentTail(pairs, P.trunc) for idx, pairs in tails.items()}
    return PDO(out_var, terms, None)


# ---------------------------------------------------------------------------
# the dual operator Lambda
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualOperator:
    lam: DiffOp  # operator in z
    theta: Poly
    m: int

    def __post_init__(self):
        if self.lam.order != self.m:
            raise NormalizationFailed("order of Lambda disagrees with m")


def build_lambda(
    L: DiffOp,
    theta: Poly,
    J: int,
    bounds: Optional[int] = None,
) -> DualOperator:
    """Assemble Lambda = sum_j z^-j Theta_j(d_z), regroup by powers of d_z
    and lift each z^-1 series coefficient to a rational function.

    Degree bounds for the lift grow from small up to ``bounds`` (default
    2m), capped by the available truncation; the reconstruction is verified
    by exact re-expansion.  The normalization Lambda_m = 1, Lambda_{m-1} = 0
    is asserted."""
    f, _ = split_constant_part(L)  # raises UnboundedCoefficient
    w = wave_operator(L, f, J)
    conj = conjugate_theta(w, theta)
    if not conj.all_polynomial():
        raise ReconstructionFailed(
            f"non-polynomial conjugate coefficients at d^-j, j in "
            f"{conj.non_polynomial}"
        )
    m = conj.max_degree
    cap = bounds if bounds is not None else max(2 * m, 2)
    lam_coeffs: dict[int, RatFunc] = {}
    for i in range(m + 1):
        tail_terms = {}
        for j in range(0, J + 1):
            c = conj.series.terms.get(j)
            v = c.num.coeff(i) if isinstance(c, RatFunc) else Fraction(0)
            if v != 0:
                tail_terms[j] = v
        tail = LaurentTail(tail_terms, J)
        got: Optional[RatFunc] = None
        for d in range(0, cap + 1):
            if 2 * d + 2 > J + 1:
                break
            try:
                cand = rational_reconstruct(tail, d, d)
            except InsufficientPrecision:
                break
            if cand is not None:
                got = cand
                break
        if got is None:
            raise ReconstructionFailed(f"Lambda coefficient at d_z^{i}")
        if not got.is_zero():
            lam_coeffs[i] = got
    lam = DiffOp("z", lam_coeffs)
    if lam.coeff(m) != RatFunc.one() or not lam.coeff(m - 1).is_zero():
        raise NormalizationFailed(
            f"Lambda_m = {lam.coeff(m)}, Lambda_(m-1) = {lam.coeff(m - 1)}"
        )
    return DualOperator(lam=lam, theta=theta, m=m)


# ---------------------------------------------------------------------------
# polynomial expansion in L
# ---------------------------------------------------------------------------

def q_polynomial_in_L(Q: DiffOp, L: DiffOp) -> Optional[list[Fraction]]:
    """Constants q_0..q_r with Q = sum q_j L^j, by leading-term elimination;
    None when the elimination leaves an incompatible remainder.  Requires
    [L, Q] = 0 (NotCommuting otherwise)."""
    if not commutator(L, Q).is_zero():
        raise NotCommuting("[L, Q] != 0")
    N = L.order
    if N < 1:
        return None
    rem = Q
    coeffs: dict[int, Fraction] = {}
    while not rem.is_zero():
        o = rem.order
        if o == 0:
            c = rem.coeff(0)
            if not c.is_constant():
                return None
            coeffs[0] = c.constant_value()
            break
        if o % N != 0:
            return None
        lead = rem.leading()
        if not lead.is_constant():
            return None
        r = o // N
        coeffs[r] = lead.constant_value()
        rem = rem - (L ** r).scale(coeffs[r])
        if not rem.is_zero() and rem.order >= o:
            return None
    top = max(coeffs) if coeffs else 0
    return [coeffs.get(i, Fraction(0)) for i in range(top + 1)]


# ---------------------------------------------------------------------------
# the bounded obstruction chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundedTestReport:
    """Every link of the polynomial-identity chain, reported separately.

    The chain: m minimal with ad^|m+1|(theta) = 0; Q = ad^m(theta) commutes
    with L and expands as sum q_j L^j; then sum q_j f(z)^j = m! f'(z)^m
    must hold, with m = s N, r = s (N-1) and q_r = m! N^m; and when the
    rank equals the order, every lower constant of f must vanish."""

    theta: Poly
    m: int
    N: int
    f: Poly
    q: tuple[Fraction, ...]
    identity_holds: bool
    s: Optional[int]
    r_expected: Optional[int]
    r_actual: int
    q_r: Fraction
    q_r_expected: Fraction
    q_r_ok: bool
    nonzero_cj: tuple[tuple[int, Fraction], ...]

    @property
    def divisibility_ok(self) -> bool:
        return self.s is not None and self.r_expected == self.r_actual

    @property
    def cj_all_zero(self) -> bool:
        return not self.nonzero_cj

    @property
    def passes(self) -> bool:
        return (self.identity_holds and self.divisibility_ok
                and self.q_r_ok and self.cj_all_zero)

    def failures(self) -> tuple[str, ...]:
        out = []
        if not self.identity_holds:
            out.append("identity")
        if not self.divisibility_ok:
            out.append("divisibility")
        if not self.q_r_ok:
            out.append("leading-coefficient")
        if not self.cj_all_zero:
            out.append("nonzero-constants")
        return tuple(out)


def bounded_test(L: DiffOp, theta: Poly, m_max: int) -> BoundedTestReport:
    """Run the full chain for a bounded-coefficient normalized operator.

    Raises AdBudgetExceeded when no m is found, NotRankOrderCase when
    ad^m(theta) is not a polynomial in L (the rank is then smaller than the
    order and the input belongs to the constant-coefficient Darboux branch).
    """
    f, _ = split_constant_part(L)
    N = L.order
    m = ad_condition_min_m(L, theta, m_max)
    if m is None:
        raise AdBudgetExceeded(f"no ad exponent within budget {m_max}")
    Q = ad_pow(L, DiffOp.from_function(theta, L.var), m)
    q = q_polynomial_in_L(Q, L)
    if q is None:
        raise NotRankOrderCase("ad power is not a polynomial in L")
    # sum q_j f(z)^j == m! (f'(z))^m
    lhs = Poly.zero()
    for j, qj in enumerate(q):
        lhs = lhs + (f ** j).scale(qj)
    rhs = (f.derivative() ** m).scale(factorial(m))
    r_actual = len(q) - 1
    s = m // N if m % N == 0 else None
    q_r = q[-1] if q else Fraction(0)
    q_r_expected = Fraction(factorial(m) * N ** m)
    nonzero = tuple((j, c) for j, c in enumerate(f.coeffs[:-1]) if c != 0)
    return BoundedTestReport(
        theta=theta, m=m, N=N, f=f, q=tuple(q),
        identity_holds=(lhs == rhs),
        s=s,
        r_expected=(s * (N - 1) if s is not None else None),
        r_actual=r_actual,
        q_r=q_r, q_r_expected=q_r_expected, q_r_ok=(q_r == q_r_expected),
        nonzero_cj=nonzero,
    )


# ---------------------------------------------------------------------------
# centralizer search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CentralizerResult:
    generators: tuple[DiffOp, ...]
    orders: tuple[int, ...]
    rank: int


def centralizer_search(
    L: DiffOp,
    max_ord: int,
    pole_order: Optional[int] = None,
    num_degree: Optional[int] = None,
) -> CentralizerResult:
    """Solve [L, M] = 0 over candidates M = sum_j p_j(x) x^-d d^j with
    deg p_j <= num_degree, d = pole_order.

    Returns a basis of the solution space (echelonized so leading terms are
    distinct), the orders, and the gcd of the orders as the rank estimate.
    """
    if pole_order is None:
        pole_order = max_ord
    if num_degree is None:
        num_degree = 2 * max(max_ord, L.order) + pole_order
    d = pole_order
    basis_ops: list[tuple[int, int]] = [
        (j, i) for j in range(max_ord + 1) for i in range(num_degree + 1)
    ]
    brackets = [commutator(L, DiffOp.monomial(RatFunc.x_power(i - d), j, L.var))
                for (j, i) in basis_ops]
    # common denominator per derivative power, then polynomial coordinates
    all_degrees = sorted({k for B in brackets for k in B.coeffs})
    rows_by_key: dict[tuple[int, int], list[Fraction]] = {}
    ncols = len(basis_ops)
    for k in all_degrees:
        den = Poly.one()
        for B in brackets:
            c = B.coeffs.get(k)
            if c is not None:
                from .rational import poly_lcm

                den = poly_lcm(den, c.den)
        for col, B in enumerate(brackets):
            c = B.coeffs.get(k)
            if c is None:
                continue
            mult = den.exact_div(c.den)
            numer = c.num * mult
            for e, v in enumerate(numer.coeffs):
                if v != 0:
                    row = rows_by_key.setdefault((k, e), [Fraction(0)] * ncols)
                    row[col] += v
    sols = nullspace(list(rows_by_key.values()), ncols)
    # echelonize by descending derivative power so orders are exposed
    coord_order = sorted(range(ncols),
                         key=lambda c: (-basis_ops[c][0], -basis_ops[c][1]))
    perm = [[vec[c] for c in coord_order] for vec in sols]
    from .linalg import rref

    red, _ = rref(perm, ncols)
    gens: list[DiffOp] = []
    inv = {pos: c for pos, c in enumerate(coord_order)}
    for vec in red:
        coeffs: dict[int, RatFunc] = {}
        for pos, v in enumerate(vec):
            if v != 0:
                j, i = basis_ops[inv[pos]]
                coeffs[j] = coeffs.get(j, RatFunc.zero()) + RatFunc.x_power(i - d, v)
        M = DiffOp(L.var, coeffs)
        if not M.is_zero():
            gens.append(M)
    for M in gens:
        if not commutator(L, M).is_zero():
            raise NotCommuting("search produced a non-commuting element")
    orders = tuple(M.order for M in gens)
    rank = 0
    for o in orders:
        rank = _gcd(rank, o)
    return CentralizerResult(generators=tuple(gens), orders=orders, rank=rank)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)
