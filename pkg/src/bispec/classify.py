"""The end-to-end classification pipeline for prime-order operators.

Branching follows coefficient growth at infinity.  Increasing branch:
weight selection, normal-form test, principal part, perturbation
obstruction; the only bispectral survivors are the generalized Airy
operators.  Bounded branch: exact shape matches for constant-coefficient
and Bessel operators, then the ad-condition chain; a passing chain with all
constants zero marks a monomial-Darboux-of-Bessel candidate (rank = order),
while a failing constants check or a non-polynomial ad power routes to the
constant-coefficient Darboux branch (rank 1).

Every verdict carries machine-checkable certificates (weights, associated
polynomial, principal part, ad data, Lambda, Darboux pairs, obstruction
traces) that the other modules can re-verify independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from . import errors as err
from .rational import Poly, RatFunc
from .diffop import DiffOp, dop_mul, gauge_normalize, left_divide
from .parser import print_operator
from .families import (
    bessel_integrality,
    bessel_recover,
    is_euler_homogeneous,
    p_form_check,
)
from .weights import (
    associated_polynomial,
    choose_weights,
    normal_form_test,
    principal_part,
)
from .airy import airy_shape, perturbation_obstruction
from .bounded import (
    bounded_test,
    build_lambda,
    centralizer_search,
    split_constant_part,
)
from .diffop import ad_condition_min_m

VERDICT_AIRY = "Airy(1)"
VERDICT_BESSEL = "Bessel(2)"
VERDICT_CONSTCOEFF = "ConstantCoeff(3)"
VERDICT_MONOMIAL = "MonomialDarbouxCandidate(4)"
VERDICT_POLYNOMIAL = "PolynomialDarbouxCandidate(5)"
VERDICT_OBSTRUCTED = "Obstructed"
VERDICT_INCONCLUSIVE = "Inconclusive"

FAMILY_VERDICTS = (
    VERDICT_AIRY,
    VERDICT_BESSEL,
    VERDICT_CONSTCOEFF,
    VERDICT_MONOMIAL,
    VERDICT_POLYNOMIAL,
)


@dataclass(frozen=True)
class Budgets:
    """Search budgets; the ad budget has no theoretical bound in general,
    so it is an explicit knob everywhere."""

    ad_budget: int = 8
    trunc: int = 8
    theta_lmax: int = 4
    obstruction_steps: int = 24
    centralizer_max_ord: Optional[int] = None  # default 2N - 1


@dataclass
class ClassificationReport:
    input_text: str
    branch: str = ""
    verdict: str = VERDICT_INCONCLUSIVE
    operator: Optional[DiffOp] = None
    certificates: dict[str, Any] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)
    trace_sizes: dict[str, int] = field(default_factory=dict)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "input": self.input_text,
            "branch": self.branch,
            "verdict": self.verdict,
            "operator": print_operator(self.operator) if self.operator else None,
            "certificates": _jsonable(self.certificates),
            "errors": list(self.errors),
            "trace_sizes": dict(self.trace_sizes),
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}" if value.denominator != 1 \
            else str(value.numerator)
    if isinstance(value, DiffOp):
        return print_operator(value)
    if isinstance(value, (Poly, RatFunc)):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (int, str, bool)) or value is None:
        return value
    return str(value)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _size_stats(*ops: Optional[DiffOp]) -> dict[str, int]:
    terms = 0
    bits = 0
    for L in ops:
        if L is None:
            continue
        for c in L.coeffs.values():
            for p in (c.num, c.den):
                for v in p.coeffs:
                    terms += 1
                    bits = max(bits, v.numerator.bit_length(),
                               v.denominator.bit_length())
    return {"coefficient_terms": terms, "max_coefficient_bits": bits}


def classify(
    L: DiffOp,
    *,
    input_text: str = "",
    theta: Optional[Poly] = None,
    P: Optional[DiffOp] = None,
    budgets: Budgets = Budgets(),
) -> ClassificationReport:
    """Classify against the prime-order families; errors from sub-modules
    are embedded in the report rather than raised."""
    report = ClassificationReport(input_text=input_text or print_operator(L))
    if L.is_zero() or L.order < 2:
        report.errors.append("order must be at least 2")
        return report
    if not L.is_monic():
        report.errors.append("NotMonic: leading coefficient must be 1")
        return report
    N = L.order
    prime = _is_prime(N)
    if not prime:
        report.certificates["composite_order"] = N

    # the Bessel shape is Euler homogeneity, which needs no normalization;
    # test it first (a weight-sum off N(N-1)/2 makes the gauge logarithmic).
    # Pure powers d^N are also constant-coefficient: that verdict wins.
    if (P is None and is_euler_homogeneous(L)
            and not all(c.is_constant() for c in L.coeffs.values())):
        spec = bessel_recover(L)
        report.operator = L
        report.branch = "bounded"
        if spec is not None:
            report.verdict = VERDICT_BESSEL
            report.certificates["bessel_betas"] = list(spec.betas)
            report.certificates["bessel_integrality"] = bessel_integrality(spec)
            want = Fraction(N * (N - 1), 2)
            report.certificates["bessel_weight_sum_normalized"] = (
                sum(spec.betas, Fraction(0)) == want
            )
        else:
            report.verdict = VERDICT_INCONCLUSIVE
            report.certificates["note"] = (
                "Euler-homogeneous of Bessel shape but the symbol roots are "
                "not all rational: unresolved over Q"
            )
        if not prime and report.verdict in FAMILY_VERDICTS:
            report.certificates["composite_note"] = (
                f"order {N} is not prime: family verdicts do not apply; "
                f"certificates indicate {report.verdict}"
            )
            report.verdict = VERDICT_INCONCLUSIVE
        report.trace_sizes = _size_stats(report.operator)
        return report

    if not L.coeff(N - 1).is_zero():
        try:
            L, gprime = gauge_normalize(L)
            report.certificates["gauge"] = gprime
        except err.BispecError as e:
            report.errors.append(f"{type(e).__name__}: {e}")
            return report
    report.operator = L

    increasing = any(c.infinity_order() > 0 for c in L.coeffs.values())
    report.branch = "increasing" if increasing else "bounded"
    if increasing:
        _classify_increasing(L, report, budgets)
    else:
        _classify_bounded(L, report, budgets, theta, P)

    if not prime and report.verdict in FAMILY_VERDICTS:
        report.certificates["composite_note"] = (
            f"order {N} is not prime: family verdicts do not apply; "
            f"certificates indicate {report.verdict}"
        )
        report.verdict = VERDICT_INCONCLUSIVE
    report.trace_sizes = _size_stats(report.operator)
    return report


# ---------------------------------------------------------------------------
# increasing branch
# ---------------------------------------------------------------------------

def _classify_increasing(L: DiffOp, report: ClassificationReport, budgets: Budgets):
    N = L.order
    try:
        w = choose_weights(L)
        f = associated_polynomial(L, w)
        nf = normal_form_test(f, w)
    except err.BispecError as e:
        report.errors.append(f"{type(e).__name__}: {e}")
        return
    report.certificates["weights"] = {"rho": w.rho, "sigma": w.sigma,
                                      "support": list(w.support)}
    report.certificates["associated_polynomial"] = str(f)
    report.certificates["normal_form"] = {
        "case": nf.case, "n": nf.n, "k": nf.k,
        "yrx": list(nf.yrx) if nf.yrx else None,
        "weight": nf.weight,
        "precondition_weight_ok": nf.precondition_weight_ok,
    }
    if nf.nilpotency_excluded:
        report.verdict = VERDICT_OBSTRUCTED
        report.certificates["obstruction"] = (
            "leading form y^n (y^r - lam x)^k with n >= 1: "
            "no operator with this leading form acts nilpotently"
        )
        return
    if nf.unresolved_over_Q:
        report.verdict = VERDICT_INCONCLUSIVE
        report.certificates["note"] = "normal-form scalars irrational: unresolved over Q"
        return
    if nf.yrx is not None and nf.n == 0 and nf.yrx[0] == N:
        if nf.yrx[1] != 1:
            report.verdict = VERDICT_INCONCLUSIVE
            report.certificates["note"] = (
                "leading form (y^r - lam x)^k with k > 1: outside the "
                "prime-order case split"
            )
            return
        try:
            A, V = principal_part(L)
        except err.BispecError as e:
            report.errors.append(f"{type(e).__name__}: {e}")
            return
        shape = airy_shape(A)
        report.certificates["principal_part"] = A
        report.certificates["perturbation"] = V
        if not shape.strict:
            report.certificates["airy_shape_note"] = {
                "lam": shape.lam, "a0": shape.a0,
                "note": "equivalent to the -x normalization by dilation/translation",
            }
        if V.is_zero():
            report.verdict = VERDICT_AIRY
            report.certificates["airy_parameters"] = dict(shape.a)
            return
        trace = perturbation_obstruction(L, budgets.obstruction_steps)
        report.certificates["obstruction_trace"] = {
            "verdict": trace.verdict,
            "steps": [(s.j, s.s, s.k, s.alpha) for s in trace.steps],
        }
        report.verdict = (VERDICT_OBSTRUCTED if trace.obstructed
                          else VERDICT_INCONCLUSIVE)
        return
    report.verdict = VERDICT_OBSTRUCTED
    report.certificates["obstruction"] = (
        "leading form is not (y^N - lam x)^1: excluded for increasing "
        "coefficients"
    )


# ---------------------------------------------------------------------------
# bounded branch
# ---------------------------------------------------------------------------

def _classify_bounded(
    L: DiffOp,
    report: ClassificationReport,
    budgets: Budgets,
    theta: Optional[Poly],
    P: Optional[DiffOp],
):
    N = L.order
    try:
        f, V = split_constant_part(L)
    except err.BispecError as e:
        report.errors.append(f"{type(e).__name__}: {e}")
        return
    report.certificates["constant_part"] = str(f)

    if V.is_zero():
        report.verdict = VERDICT_CONSTCOEFF
        return

    if is_euler_homogeneous(L):
        # reachable only with a supplied factor (classify() short-circuits
        # the Bessel shape otherwise): record the facts, run the Darboux
        # analysis the caller asked for
        spec = bessel_recover(L)
        if spec is not None:
            report.certificates["bessel_betas"] = list(spec.betas)
            report.certificates["bessel_integrality"] = bessel_integrality(spec)

    if P is not None:
        _darboux_certificate(L, P, N, report)

    thetas: list[Poly] = []
    if theta is not None:
        candidates = [theta]
    else:
        candidates = [Poly.monomial(l) for l in range(1, budgets.theta_lmax + 1)]
    for cand in candidates:
        m = ad_condition_min_m(L, cand, budgets.ad_budget)
        if m is not None:
            thetas.append(cand)
    report.certificates["admissible_thetas"] = [str(t) for t in thetas]

    if not thetas:
        _wave_probe(L, f, report, budgets)
        return

    use = thetas[0]
    try:
        chain = bounded_test(L, use, budgets.ad_budget)
    except err.NotRankOrderCase:
        report.certificates["ad_theta"] = str(use)
        report.certificates["rank_order_case"] = False
        _polynomial_branch(L, report, budgets)
        return
    except err.BispecError as e:
        report.errors.append(f"{type(e).__name__}: {e}")
        report.verdict = VERDICT_INCONCLUSIVE
        return
    report.certificates["bounded_chain"] = {
        "theta": str(chain.theta),
        "m": chain.m,
        "q": list(chain.q),
        "identity_holds": chain.identity_holds,
        "s": chain.s,
        "r": chain.r_actual,
        "q_r": chain.q_r,
        "q_r_expected": chain.q_r_expected,
        "nonzero_cj": list(chain.nonzero_cj),
        "failures": list(chain.failures()),
    }
    if chain.passes:
        report.verdict = VERDICT_MONOMIAL
        try:
            dual = build_lambda(L, use, budgets.trunc)
            report.certificates["lambda"] = dual.lam
            report.certificates["ad_m"] = dual.m
        except err.BispecError as e:
            report.errors.append(f"{type(e).__name__}: {e}")
        return
    if chain.identity_holds and chain.divisibility_ok and chain.q_r_ok:
        # chain consistent except nonzero constants: rank < order forced
        report.certificates["rank_order_case"] = False
        _polynomial_branch(L, report, budgets)
        return
    report.verdict = VERDICT_INCONCLUSIVE


def _polynomial_branch(L: DiffOp, report: ClassificationReport, budgets: Budgets):
    """Rank < order: candidate for a Darboux transformation of a
    constant-coefficient operator."""
    N = L.order
    max_ord = budgets.centralizer_max_ord or (2 * N - 1)
    try:
        cen = centralizer_search(L, max_ord)
        report.certificates["centralizer"] = {
            "orders": sorted(set(cen.orders)),
            "rank_estimate": cen.rank,
        }
    except err.BispecError as e:
        report.errors.append(f"{type(e).__name__}: {e}")
    report.verdict = VERDICT_POLYNOMIAL


def _wave_probe(L: DiffOp, f: Poly, report: ClassificationReport, budgets: Budgets):
    """Diagnostic when no admissible theta was found: attempt the wave
    recursion, whose failures certify non-bispectrality."""
    from .bounded import wave_operator

    try:
        wave_operator(L, f, min(budgets.trunc, 4))
    except err.LogObstruction as e:
        report.verdict = VERDICT_OBSTRUCTED
        report.certificates["obstruction"] = (
            f"wave recursion needs a logarithmic antiderivative: {e}"
        )
        return
    except err.BispecError as e:
        report.errors.append(f"{type(e).__name__}: {e}")
        report.verdict = VERDICT_INCONCLUSIVE
        report.certificates["note"] = "wave coefficients not recognized rational"
        return
    report.verdict = VERDICT_INCONCLUSIVE
    report.certificates["note"] = (
        f"no admissible theta among monomials up to degree "
        f"{budgets.theta_lmax} within ad budget {budgets.ad_budget}"
    )


def _darboux_certificate(L: DiffOp, P: DiffOp, N: int, report: ClassificationReport):
    """With a user-supplied P, complete L = P Q, reconstruct the base Q P
    and attach the full factorization certificate."""
    try:
        Q, R = left_divide(L, P)
    except err.BispecError as e:
        report.errors.append(f"{type(e).__name__}: {e}")
        return
    if not R.is_zero():
        report.errors.append("NotAFactor: P does not left-divide L")
        return
    base = dop_mul(Q, P)
    cert: dict[str, Any] = {
        "P": P,
        "Q": Q,
        "base": base,
        "p_form_ok": p_form_check(P, N),
    }
    if is_euler_homogeneous(base):
        spec = bessel_recover(base)
        if spec is not None:
            cert["base_bessel_betas"] = list(spec.betas)
            cert["base_integrality"] = bessel_integrality(spec)
            cert["monomial"] = True
    report.certificates["darboux"] = cert
