"""Calculus of operators expanded in inverse powers of a generalized Airy
operator: reduction mod A, the bracket decompositions [A,m] = bA + c and
Vm = UA + W, the Airy-adic wave recursion, the perturbation obstruction,
kernel series, and the Airy involution.

Height bookkeeping: monomials x^r d^k are ordered by r first, then k; the
height of an operator is the x-exponent of its maximal monomial.  The wave
recursion L K = K A is solved equation by equation in powers of A^-1; within
one equation the unknowns are determined from the top height down, each by a
single antiderivative, because the b-part of [A, .] sits exactly one height
below its argument while the U-part of V(.) enters at least two below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Mapping, Optional, Union

from .errors import (
    InvariantViolation,
    LogObstruction,
    NotAiryShape,
    NotInDomain,
    ZeroOperand,
)
from .rational import LaurentTail, Poly, PowerSeries, RatFunc, laurent_expand
from .diffop import DiffOp, dop_mul, right_divide, transpose_weyl
from .weights import principal_part

DEFAULT_TAIL_DEPTH = 24


# ---------------------------------------------------------------------------
# Airy shape inspection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AiryShape:
    """A = d^N + sum_{1<=j<=N-2} a_j d^j + a_0 - lam*x.

    The canonical family has lam = 1 and a_0 = 0; a nonzero a_0 is a
    translation of x and lam != 1 a dilation, both recorded rather than
    normalized away."""

    N: int
    a: tuple[tuple[int, Fraction], ...]
    a0: Fraction
    lam: Fraction

    @property
    def strict(self) -> bool:
        return self.lam == 1 and self.a0 == 0


def airy_shape(A: DiffOp) -> AiryShape:
    """Validate and decompose a generalized Airy operator."""
    if A.is_zero() or not A.is_monic():
        raise NotAiryShape("Airy operator must be monic")
    N = A.order
    if N < 2:
        raise NotAiryShape("Airy order must be >= 2")
    if not A.coeff(N - 1).is_zero():
        raise NotAiryShape("subleading coefficient must vanish")
    params: list[tuple[int, Fraction]] = []
    for j, c in A.coeffs.items():
        if j in (0, N):
            continue
        if not c.is_constant():
            raise NotAiryShape(f"coefficient of d^{j} is not constant")
        params.append((j, c.constant_value()))
    c0 = A.coeff(0)
    if not c0.is_polynomial() or c0.num.degree > 1:
        raise NotAiryShape("order-0 coefficient must be a0 - lam*x")
    lam = -c0.num.coeff(1)
    a0 = c0.num.coeff(0)
    if lam == 0:
        raise NotAiryShape("missing -x term")
    return AiryShape(N=N, a=tuple(sorted(params)), a0=a0, lam=lam)


# ---------------------------------------------------------------------------
# operators with Laurent-tail coefficients (internal working ring)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TOp:
    """Normal-ordered operator sum_k alpha_k(x) d^k with tail coefficients."""

    coeffs: Mapping[int, LaurentTail] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(k): t for k, t in self.coeffs.items() if not t.is_zero()}
        if any(k < 0 for k in clean):
            raise ValueError("negative derivative power")
        object.__setattr__(self, "coeffs", clean)

    @staticmethod
    def zero() -> "TOp":
        return TOp({})

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def order(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def coeff(self, k: int) -> LaurentTail:
        return self.coeffs.get(k, LaurentTail.zero(None))

    def __add__(self, other: "TOp") -> "TOp":
        out = dict(self.coeffs)
        for k, t in other.coeffs.items():
            out[k] = out.get(k, LaurentTail.zero(None)) + t
        return TOp(out)

    def __neg__(self) -> "TOp":
        return TOp({k: -t for k, t in self.coeffs.items()})

    def __sub__(self, other: "TOp") -> "TOp":
        return self + (-other)

    def scale(self, c) -> "TOp":
        return TOp({k: t.scale(c) for k, t in self.coeffs.items()})

    def __mul__(self, other: "TOp") -> "TOp":
        out: dict[int, LaurentTail] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                deriv = b
                for t in range(i + 1):
                    if not deriv.is_zero():
                        k = i - t + j
                        term = (a * deriv).scale(comb(i, t))
                        out[k] = out.get(k, LaurentTail.zero(None)) + term
                    if t < i:
                        deriv = deriv.derivative()
        return TOp(out)

    def height(self) -> Optional[int]:
        hs = [t.height() for t in self.coeffs.values() if t.height() is not None]
        return max(hs) if hs else None


def tail_of_ratfunc(c: RatFunc, depth: int) -> LaurentTail:
    if c.is_laurent_polynomial():
        return LaurentTail({-e: v for e, v in c.laurent_terms()}, None)
    return laurent_expand(c, depth)


def top_of_diffop(L: DiffOp, depth: int = DEFAULT_TAIL_DEPTH) -> TOp:
    return TOp({j: tail_of_ratfunc(c, depth) for j, c in L.coeffs.items()})


# ---------------------------------------------------------------------------
# MJOp and AiryPDO
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MJOp:
    """Operator coefficient of an Airy-adic series: sum_{k<N} alpha_k(x) d^k."""

    coeffs: Mapping[int, LaurentTail]
    N: int

    def __post_init__(self):
        clean = {int(k): t for k, t in self.coeffs.items() if not t.is_zero()}
        if any(not 0 <= k < self.N for k in clean):
            raise ValueError(f"derivative power outside [0, {self.N})")
        object.__setattr__(self, "coeffs", clean)

    @staticmethod
    def zero(N: int) -> "MJOp":
        return MJOp({}, N)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> LaurentTail:
        return self.coeffs.get(k, LaurentTail.zero(None))

    def as_top(self) -> TOp:
        return TOp(dict(self.coeffs))

    @staticmethod
    def from_top(t: TOp, N: int) -> "MJOp":
        if t.order >= N:
            raise ValueError("degree too high for an MJOp")
        return MJOp(dict(t.coeffs), N)

    def height(self) -> Optional[int]:
        return self.as_top().height()


@dataclass(frozen=True)
class AiryPDO:
    """Truncated Airy-adic wave operator K = 1 + sum_{j=1}^J m_j A^-j.

    ``h_min`` is the deepest height tracked while solving; identities
    involving K are exact above it."""

    A: DiffOp
    mjs: Mapping[int, MJOp]
    trunc: int
    h_min: Optional[int] = None

    def __post_init__(self):
        airy_shape(self.A)
        clean = {int(j): m for j, m in self.mjs.items() if not m.is_zero()}
        if any(j < 1 or j > self.trunc for j in clean):
            raise ValueError("coefficient index outside [1, trunc]")
        object.__setattr__(self, "mjs", clean)
        if self.h_min is None:
            object.__setattr__(self, "h_min",
                               -(self.trunc + self.A.order + 4))

    def coeff(self, j: int) -> MJOp:
        N = self.A.order
        return self.mjs.get(j, MJOp.zero(N))

    def is_identity(self) -> bool:
        return not self.mjs


@dataclass(frozen=True)
class ObstructionStep:
    j: int
    s: int
    k: int
    alpha: Fraction


@dataclass(frozen=True)
class ObstructionTrace:
    """Leading-height record of the wave recursion.

    Verdict "obstructed" certifies that the recursion forces a leading term
    alpha * x^-1 * d^k in some b_j, which cannot be the derivative of a
    rational function; "clean" means the perturbation was zero;
    "inconclusive" means the step budget ran out first."""

    steps: tuple[ObstructionStep, ...]
    verdict: str  # "obstructed" | "clean" | "inconclusive"
    N: int
    lam: Fraction

    @property
    def obstructed(self) -> bool:
        return self.verdict == "obstructed"

    def recursion_consistent(self) -> bool:
        """Check consecutive records against the height recursion
        alpha' = -lam * alpha * (N(s+1)+k) / (N(s+1)), s' = s+1."""
        for a, b in zip(self.steps, self.steps[1:]):
            if b.s != a.s + 1 or b.k != a.k or b.j != a.j + 1:
                return False
            denom = self.N * (a.s + 1)
            if denom == 0:
                return False
            expect = -self.lam * a.alpha * Fraction(self.N * (a.s + 1) + a.k, denom)
            if b.alpha != expect:
                return False
        return True


# ---------------------------------------------------------------------------
# reduction and decompositions
# ---------------------------------------------------------------------------

def reduce_mod_A(T: DiffOp, A: DiffOp, depth: int = DEFAULT_TAIL_DEPTH) -> tuple[DiffOp, MJOp]:
    """T = q A + r with d-degree(r) < N, both exact and unique."""
    shape = airy_shape(A)
    q, r = right_divide(T, A)
    coeffs = {k: tail_of_ratfunc(c, depth) for k, c in r.coeffs.items()}
    return q, MJOp(coeffs, shape.N)


def _reduce_top(T: TOp, At: TOp, N: int) -> tuple[TOp, TOp]:
    """Division T = q * At + r in the tail-coefficient ring (At monic of
    order N with constant leading coefficient)."""
    q = TOp.zero()
    r = T
    while r.order >= N:
        k = r.order
        piece = TOp({k - N: r.coeff(k)})
        q = q + piece
        r = r - piece * At
    return q, r


def bracket_decompose(A: DiffOp, m: MJOp, At: Optional[TOp] = None) -> tuple[MJOp, MJOp]:
    """[A, m] = b A + c with d-degree(b), d-degree(c) < N, exact.

    The height relation ht(c) = ht(b) + 1 holds when m arises from the wave
    recursion (where the d^0 coefficient never dominates); it is checked by
    the callers that rely on it rather than asserted here."""
    N = airy_shape(A).N if At is None else m.N
    if At is None:
        At = top_of_diffop(A)
    mt = m.as_top()
    bracket = At * mt - mt * At
    q, r = _reduce_top(bracket, At, N)
    return MJOp.from_top(q, N), MJOp.from_top(r, N)


def v_decompose(V: DiffOp, m: MJOp, A: DiffOp,
                Vt: Optional[TOp] = None, At: Optional[TOp] = None) -> tuple[MJOp, MJOp]:
    """V m = U A + W, exact; V must have d-degree < N."""
    N = m.N
    if At is None:
        At = top_of_diffop(A)
    if Vt is None:
        Vt = top_of_diffop(V)
    if Vt.order >= N:
        raise ValueError("V must have d-degree below the Airy order")
    prod = Vt * m.as_top()
    q, r = _reduce_top(prod, At, N)
    return MJOp.from_top(q, N), MJOp.from_top(r, N)


def decay_order(V: DiffOp) -> Optional[int]:
    """Largest leading exponent among the coefficients (None for zero)."""
    if V.is_zero():
        return None
    return max(c.infinity_order() for c in V.coeffs.values())


def height(m: Union[MJOp, TOp, DiffOp]):
    """Height and leading monomial under the (x power, then d power) order.

    Returns (height, d-degree, coefficient) of the leading monomial."""
    if isinstance(m, DiffOp):
        if m.is_zero():
            raise ZeroOperand("height of zero")
        best = None
        for k, c in m.coeffs.items():
            h = c.infinity_order()
            if best is None or (h, k) > best[:2]:
                best = (h, k, c.infinity_leading())
        return best
    top = m.as_top() if isinstance(m, MJOp) else m
    if top.is_zero():
        raise ZeroOperand("height of zero")
    best = None
    for k, t in top.coeffs.items():
        if t.is_zero():
            continue
        s, c = t.leading()
        h = -s
        if best is None or (h, k) > best[:2]:
            best = (h, k, c)
    if best is None:
        raise ZeroOperand("height of zero within truncation")
    return best


# ---------------------------------------------------------------------------
# perturbation obstruction (leading-height recursion)
# ---------------------------------------------------------------------------

def perturbation_obstruction(L: DiffOp, max_steps: int = 24) -> ObstructionTrace:
    """Track only the leading heights of the b_j through the recursion.

    b_1 matches -V at the top; thereafter the leading of b_{j+1} is forced
    by the leading of c_j, advancing the height by +1 each step with
    alpha_{j+1} = -lam * alpha_j (N(s_j+1)+k) / (N(s_j+1)) != 0.  The walk
    ends in one of: s_j = -1 (obstructed: that leading term would have to be
    the derivative of a rational function), V = 0 (clean), or budget
    exhaustion (inconclusive)."""
    A, V = principal_part(L)
    shape = airy_shape(A)
    N, lam = shape.N, shape.lam
    if V.is_zero():
        return ObstructionTrace((), "clean", N, lam)
    h, k, lead = height(V)
    if h >= 0:
        raise NotAiryShape("perturbation does not decay at infinity")
    steps = [ObstructionStep(j=1, s=h, k=k, alpha=-lead)]
    s, alpha = h, -lead
    for _ in range(max_steps):
        if s == -1:
            return ObstructionTrace(tuple(steps), "obstructed", N, lam)
        nxt_alpha = -lam * alpha * Fraction(N * (s + 1) + k, N * (s + 1))
        s += 1
        steps.append(ObstructionStep(j=steps[-1].j + 1, s=s, k=k, alpha=nxt_alpha))
        alpha = nxt_alpha
    if s == -1:
        return ObstructionTrace(tuple(steps), "obstructed", N, lam)
    return ObstructionTrace(tuple(steps), "inconclusive", N, lam)


# ---------------------------------------------------------------------------
# the Airy-adic wave recursion
# ---------------------------------------------------------------------------

def airy_wave_solve(
    L: DiffOp,
    J: int,
    h_min: Optional[int] = None,
) -> Union[AiryPDO, ObstructionTrace]:
    """Solve L K = K A for K = 1 + sum m_j A^-j through truncation J.

    Heights below ``h_min`` (default -(J + N + 4)) are not tracked.  When a
    required antiderivative needs a logarithm the recursion is impossible
    for rational data; the leading-height trace certifying the failure is
    returned instead of K.
    """
    if J < 1:
        raise ValueError("truncation must be >= 1")
    A, V = principal_part(L)
    shape = airy_shape(A)
    N = shape.N
    if V.order > N - 2:
        raise NotAiryShape("perturbation touches the subleading slot; "
                           "normalize the operator first")
    if h_min is None:
        h_min = -(J + N + 4)
    depth = -h_min
    if V.is_zero():
        return AiryPDO(A, {}, J, h_min)

    At = top_of_diffop(A)
    Vt = TOp({j: tail_of_ratfunc(c, depth).restrict(depth)
              for j, c in V.coeffs.items()})

    inv_n = Fraction(-1, N)
    m: dict[int, dict[int, LaurentTail]] = {j: {} for j in range(1, J + 2)}

    def contributions(delta: TOp) -> tuple[TOp, TOp]:
        """(b+U, c+W) parts produced by a new piece of some m."""
        bracket = At * delta - delta * At
        qb, rc = _reduce_top(bracket, At, N)
        qu, rw = _reduce_top(Vt * delta, At, N)
        return qb + qu, rc + rw

    try:
        rhs = Vt  # equation 0: b_1 + U_1 + V = 0
        for eq in range(0, J + 1):
            R = rhs
            next_rhs = TOp.zero()
            if eq >= 1:
                g = R.coeff(N - 1)
                beta = g.antiderivative().scale(inv_n)
                if not beta.is_zero():
                    m[eq][0] = beta
                    same, nxt = contributions(TOp({0: beta}))
                    # a pure function has no b/U part: everything it
                    # produces belongs to the current equation
                    R = R + same + nxt
            if eq == J:
                break
            for k in range(N - 1, 0, -1):
                g = R.coeff(k - 1)
                alpha = g.antiderivative().scale(inv_n)
                if alpha.is_zero():
                    continue
                m[eq + 1][k] = alpha
                same, nxt = contributions(TOp({k: alpha}))
                R = R + same
                next_rhs = next_rhs + nxt
            for k, t in R.coeffs.items():
                live = {s: c for s, c in t.terms.items() if -s >= h_min}
                if live:
                    raise InvariantViolation(
                        f"equation {eq} residual at d^{k}: {LaurentTail(live, t.trunc)}"
                    )
            rhs = next_rhs
    except LogObstruction:
        trace = perturbation_obstruction(L)
        if trace.obstructed:
            return trace
        raise

    mjs = {j: MJOp(parts, N) for j, parts in m.items() if parts and j <= J}
    return AiryPDO(A, mjs, J, h_min)


def airy_wave_residual(L: DiffOp, K: AiryPDO) -> bool:
    """Re-verify the recursion equations b_{j+1}+U_{j+1}+c_j+W_j = 0
    (and b_1+U_1+V = 0) for the solved coefficients, through truncation.

    Equations 0 .. trunc-1 are checked; heights below the solve's tracked
    range are ignored.  This is the L K - K A = 0 statement written in
    A-adic slices."""
    A, V = principal_part(L)
    shape = airy_shape(A)
    N = shape.N
    h_min = K.h_min
    depth = -h_min
    At = top_of_diffop(A)
    Vt = TOp({j: tail_of_ratfunc(c, depth).restrict(depth)
              for j, c in V.coeffs.items()})

    def bU(mj: MJOp) -> TOp:
        bracket = At * mj.as_top() - mj.as_top() * At
        qb, _ = _reduce_top(bracket, At, N)
        qu, _ = _reduce_top(Vt * mj.as_top(), At, N)
        return qb + qu

    def cW(mj: MJOp) -> TOp:
        bracket = At * mj.as_top() - mj.as_top() * At
        _, rc = _reduce_top(bracket, At, N)
        _, rw = _reduce_top(Vt * mj.as_top(), At, N)
        return rc + rw

    for j in range(0, K.trunc):
        lhs = bU(K.coeff(j + 1))
        lhs = lhs + (Vt if j == 0 else cW(K.coeff(j)))
        for k, t in lhs.coeffs.items():
            if any(-s >= h_min and c != 0 for s, c in t.terms.items()):
                return False
    return True


# ---------------------------------------------------------------------------
# kernel series and the bispectral identity checks
# ---------------------------------------------------------------------------

def airy_kernel_series(A: DiffOp, init, M: int) -> PowerSeries:
    """Taylor coefficients through degree M of a kernel element:
    A Phi = 0 with Phi^(i)(0) = init[i], i < N."""
    shape = airy_shape(A)
    N = shape.N
    init = list(init)
    if len(init) != N:
        raise ValueError(f"need {N} initial derivatives")
    c = [Fraction(0)] * (M + 1)
    from math import factorial

    for i, v in enumerate(init):
        if i <= M:
            c[i] = Fraction(v, factorial(i))
    a = dict(shape.a)
    for n in range(0, M - N + 1):
        # coefficient of x^n in d^N Phi = lam*x*Phi - a0*Phi - sum a_j Phi^(j)
        acc = shape.lam * (c[n - 1] if n >= 1 else Fraction(0))
        acc -= shape.a0 * c[n]
        for j, aj in a.items():
            acc -= aj * c[n + j] * Fraction(factorial(n + j), factorial(n))
        c[n + N] = acc * Fraction(factorial(n), factorial(n + N))
    return PowerSeries({e: v for e, v in enumerate(c)}, M)


class _BiSeries:
    """Bivariate truncated series sum c_{i,j} x^i z^j (total degree)."""

    __slots__ = ("terms", "trunc")

    def __init__(self, terms: dict[tuple[int, int], Fraction], trunc: int):
        self.terms = {k: v for k, v in terms.items()
                      if v != 0 and k[0] + k[1] <= trunc}
        self.trunc = trunc

    def diff_x(self) -> "_BiSeries":
        return _BiSeries({(i - 1, j): i * c for (i, j), c in self.terms.items()
                          if i > 0}, self.trunc - 1)

    def diff_z(self) -> "_BiSeries":
        return _BiSeries({(i, j - 1): j * c for (i, j), c in self.terms.items()
                          if j > 0}, self.trunc - 1)

    def mul_x(self) -> "_BiSeries":
        return _BiSeries({(i + 1, j): c for (i, j), c in self.terms.items()},
                         self.trunc)

    def mul_z(self) -> "_BiSeries":
        return _BiSeries({(i, j + 1): c for (i, j), c in self.terms.items()},
                         self.trunc)

    def scale(self, s: Fraction) -> "_BiSeries":
        return _BiSeries({k: s * c for k, c in self.terms.items()}, self.trunc)

    def __add__(self, other: "_BiSeries") -> "_BiSeries":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return _BiSeries(out, min(self.trunc, other.trunc))

    def __sub__(self, other: "_BiSeries") -> "_BiSeries":
        return self + other.scale(Fraction(-1))

    def zero_through(self, degree: int) -> bool:
        return all(c == 0 for (i, j), c in self.terms.items()
                   if i + j <= degree)


@dataclass(frozen=True)
class AiryBispectralReport:
    eigen_x: bool        # A(x, d_x) Psi = lam z Psi
    eigen_z: bool        # A(z, d_z) Psi = lam x Psi
    shift: bool          # d_x Psi = d_z Psi
    verified_degree: int

    @property
    def ok(self) -> bool:
        return self.eigen_x and self.eigen_z and self.shift


def airy_bispectral_check(A: DiffOp, M: int) -> AiryBispectralReport:
    """Build Psi(x,z) = Phi(x+z) from the kernel series and verify the two
    eigenvalue identities and the shift identity exactly.

    Phi is expanded through degree M + N; the identities are compared
    through total degree M - 2 (a uniform margin covering the derivative
    and multiplication bookkeeping on both sides)."""
    shape = airy_shape(A)
    N = shape.N
    pad = M + N
    init = [0] * N
    init[0] = 1
    phi = airy_kernel_series(A, init, pad)
    # Psi = Phi(x+z) = sum_n c_n sum_i C(n,i) x^i z^(n-i)
    terms: dict[tuple[int, int], Fraction] = {}
    for n, c in phi.terms.items():
        for i in range(n + 1):
            key = (i, n - i)
            terms[key] = terms.get(key, Fraction(0)) + c * comb(n, i)
    psi = _BiSeries(terms, pad)
    check_deg = M - 2

    def apply_A(s: _BiSeries, side: str) -> _BiSeries:
        mulx = s.mul_x if side == "x" else s.mul_z
        out = s
        for _ in range(N):
            out = out.diff_x() if side == "x" else out.diff_z()
        for j, aj in shape.a:
            term = s
            for _ in range(j):
                term = term.diff_x() if side == "x" else term.diff_z()
            out = out + term.scale(aj)
        out = out + s.scale(shape.a0) - mulx().scale(shape.lam)
        return out

    lhs_x = apply_A(psi, "x")
    rhs_x = psi.mul_z().scale(shape.lam)
    lhs_z = apply_A(psi, "z")
    rhs_z = psi.mul_x().scale(shape.lam)
    return AiryBispectralReport(
        eigen_x=(lhs_x - rhs_x).zero_through(check_deg),
        eigen_z=(lhs_z - rhs_z).zero_through(check_deg),
        shift=(psi.diff_x() - psi.diff_z()).zero_through(check_deg),
        verified_degree=check_deg,
    )


# ---------------------------------------------------------------------------
# the Airy involution
# ---------------------------------------------------------------------------

def airy_involution(P: DiffOp, A: DiffOp) -> DiffOp:
    """Anti-homomorphic image of a Weyl-algebra element under
    b(A) = z, b(d) = d_z, hence b(x) = A(z, d_z).

    Rewrites P over the generator pair (d, A) -- itself a Weyl pair since
    [A, d] = 1 -- by substituting x = d^N + sum a_j d^j + a_0 - A, then
    transposes.  Requires the strict shape (lam = 1)."""
    shape = airy_shape(A)
    if shape.lam != 1:
        raise NotInDomain("Airy involution requires the -x normalization")
    if not P.has_polynomial_coeffs():
        raise NotInDomain("involution defined on polynomial coefficients")
    N = shape.N
    # relabeled Weyl pair: X plays the function generator (image of d),
    # D plays the derivative generator (image of A)
    var = "_airy_gen"
    X = DiffOp.x(var)
    Dgen = DiffOp.d(var)
    phi_x = DiffOp(var, {0: RatFunc(Poly.monomial(N)
                                    + sum((Poly.monomial(j).scale(aj) for j, aj in shape.a),
                                          Poly.zero())
                                    + Poly.const(shape.a0))}) - Dgen
    image = DiffOp.zero(var)
    # precompute powers of phi(x)
    max_deg = max((c.num.degree for c in P.coeffs.values()), default=0)
    powers = [DiffOp.one(var)]
    for _ in range(max_deg):
        powers.append(dop_mul(powers[-1], phi_x))
    for j, c in P.coeffs.items():
        xj = DiffOp.zero(var)
        for a, coeff in enumerate(c.num.coeffs):
            if coeff != 0:
                xj = xj + powers[a].scale(coeff)
        # phi(d^j) is the relabeled function generator to the j-th power
        image = image + dop_mul(xj, DiffOp.from_function(Poly.monomial(j), var))
    return transpose_weyl(image, "z")
