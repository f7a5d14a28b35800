"""Command-line surface: parse/arithmetic utilities and the classification
pipeline.

Exit codes: 0 for any completed report (domain errors are embedded in the
report), 2 for operator syntax errors, 3 for internal invariant violations.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Optional

from . import errors as err
from .rational import Poly
from .diffop import DiffOp, ad_condition_min_m, ad_pow, commutator, dop_mul, right_divide
from .parser import parse_operator, print_operator
from .families import darboux
from .weights import associated_polynomial, choose_weights, normal_form_test
from .airy import AiryPDO, airy_wave_solve
from .bounded import (
    bounded_test,
    centralizer_search,
    split_constant_part,
    wave_operator,
)
from .classify import Budgets, ClassificationReport, _jsonable, classify


def _parse_theta(text: str) -> Poly:
    """theta is a polynomial in x: parse as an operator and take the
    order-0 polynomial part."""
    L = parse_operator(text)
    if not L.is_function():
        raise err.OperatorSyntaxError("theta must not contain d", 0)
    c = L.coeff(0)
    if not c.is_polynomial():
        raise err.OperatorSyntaxError("theta must be a polynomial", 0)
    return c.num


def _emit(payload: dict[str, Any], as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(_jsonable(payload), indent=2))
    else:
        for line in lines:
            print(line)


def _op(text: str) -> DiffOp:
    return parse_operator(text)


def main(argv: Optional[list[str]] = None) -> int:
    ap = argparse.ArgumentParser(
        prog="bispec",
        description="Exact computations with differential operators and the "
                    "prime-order bispectral classification.",
    )
    ap.add_argument("--json", action="store_true", help="emit a JSON document")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, *exprs, **flags):
        p = sub.add_parser(name)
        # SUPPRESS keeps a top-level --json from being clobbered by the
        # subparser default
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        for e in exprs:
            p.add_argument(e)
        if flags.get("theta"):
            p.add_argument("--theta", default=None)
        if flags.get("p"):
            p.add_argument("--p", default=None)
        if flags.get("budget"):
            p.add_argument("--order-budget", type=int, default=8,
                           dest="order_budget")
        if flags.get("trunc"):
            p.add_argument("--trunc", type=int, default=8)
        return p

    add("parse", "expr")
    add("mul", "left", "right")
    add("commutator", "left", "right")
    add("ad-test", "expr", theta=True, budget=True)
    add("divide", "numerator", "divisor")
    add("darboux", "base", "factor")
    add("wave", "expr", trunc=True)
    add("airy-wave", "expr", trunc=True)
    add("weights", "expr")
    add("classify", "expr", theta=True, p=True, budget=True, trunc=True)
    add("centralizer", "expr", budget=True)

    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except err.OperatorSyntaxError as e:
        print(f"syntax error: {e}", file=sys.stderr)
        return 2
    except err.InvariantViolation as e:
        print(f"internal invariant violation: {e}", file=sys.stderr)
        return 3
    except err.BispecError as e:
        payload = {"errors": [f"{type(e).__name__}: {e}"]}
        _emit(payload, args.json, [f"error: {type(e).__name__}: {e}"])
        return 0


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "parse":
        L = _op(args.expr)
        _emit({"input": args.expr, "operator": print_operator(L)},
              args.json, [print_operator(L)])
    elif cmd == "mul":
        R = dop_mul(_op(args.left), _op(args.right))
        _emit({"result": print_operator(R)}, args.json, [print_operator(R)])
    elif cmd == "commutator":
        R = commutator(_op(args.left), _op(args.right))
        _emit({"result": print_operator(R)}, args.json, [print_operator(R)])
    elif cmd == "ad-test":
        L = _op(args.expr)
        theta = _parse_theta(args.theta) if args.theta else Poly.x()
        m = ad_condition_min_m(L, theta, args.order_budget)
        payload: dict[str, Any] = {"theta": str(theta), "m": m}
        lines = [f"minimal m: {m}"]
        if m is not None:
            Q = ad_pow(L, DiffOp.from_function(theta, L.var), m)
            payload["ad_power"] = print_operator(Q)
            lines.append(f"ad^m(theta) = {print_operator(Q)}")
            try:
                chain = bounded_test(L, theta, args.order_budget)
                payload["chain"] = {
                    "q": list(chain.q), "identity_holds": chain.identity_holds,
                    "s": chain.s, "q_r": chain.q_r,
                    "q_r_expected": chain.q_r_expected,
                    "failures": list(chain.failures()),
                }
                lines.append(f"chain: passes={chain.passes} "
                             f"failures={list(chain.failures())}")
            except err.BispecError as e:
                payload["chain_error"] = f"{type(e).__name__}: {e}"
                lines.append(f"chain: {type(e).__name__}: {e}")
        _emit(payload, args.json, lines)
    elif cmd == "divide":
        Q, R = right_divide(_op(args.numerator), _op(args.divisor))
        _emit({"quotient": print_operator(Q), "remainder": print_operator(R)},
              args.json,
              [f"Q = {print_operator(Q)}", f"R = {print_operator(R)}"])
    elif cmd == "darboux":
        res = darboux(_op(args.base), _op(args.factor))
        _emit({
            "P": print_operator(res.P), "Q": print_operator(res.Q),
            "base": print_operator(res.base),
            "transformed": print_operator(res.transformed),
        }, args.json, [
            f"Q = {print_operator(res.Q)}",
            f"transformed = {print_operator(res.transformed)}",
        ])
    elif cmd == "wave":
        L = _op(args.expr)
        f, _ = split_constant_part(L)
        w = wave_operator(L, f, args.trunc)
        coeffs = {j: str(c) for j, c in sorted(w.K.terms.items()) if j > 0}
        _emit({"f": str(f), "coefficients": coeffs,
               "residual_zero": w.residual_zero()},
              args.json,
              [f"f(z) = {f}"] + [f"a_{j} = {c}" for j, c in coeffs.items()])
    elif cmd == "airy-wave":
        L = _op(args.expr)
        out = airy_wave_solve(L, args.trunc)
        if isinstance(out, AiryPDO):
            mjs = {j: {k: str(t) for k, t in m.coeffs.items()}
                   for j, m in sorted(out.mjs.items())}
            _emit({"kind": "wave", "identity": out.is_identity(),
                   "coefficients": mjs},
                  args.json,
                  ["K = 1" if out.is_identity() else f"m_j: {mjs}"])
        else:
            steps = [(s.j, s.s, s.k, s.alpha) for s in out.steps]
            _emit({"kind": "obstruction", "verdict": out.verdict,
                   "steps": steps},
                  args.json,
                  [f"obstruction: {out.verdict}", f"steps: {steps}"])
    elif cmd == "weights":
        L = _op(args.expr)
        w = choose_weights(L)
        f = associated_polynomial(L, w)
        nf = normal_form_test(f, w)
        _emit({"rho": w.rho, "sigma": w.sigma, "f": str(f),
               "case": nf.case, "yrx": list(nf.yrx) if nf.yrx else None,
               "nilpotency_excluded": nf.nilpotency_excluded},
              args.json,
              [f"(rho, sigma) = ({w.rho}, {w.sigma})", f"f(x, y) = {f}",
               f"normal form case: {nf.case}"])
    elif cmd == "classify":
        L = _op(args.expr)
        theta = _parse_theta(args.theta) if args.theta else None
        P = _op(args.p) if args.p else None
        budgets = Budgets(ad_budget=args.order_budget, trunc=args.trunc)
        report = classify(L, input_text=args.expr, theta=theta, P=P,
                          budgets=budgets)
        _emit_report(report, args.json)
    elif cmd == "centralizer":
        L = _op(args.expr)
        res = centralizer_search(L, args.order_budget)
        gens = [print_operator(M) for M in res.generators]
        _emit({"orders": sorted(set(res.orders)), "rank": res.rank,
               "generators": gens},
              args.json,
              [f"orders: {sorted(set(res.orders))}", f"rank estimate: {res.rank}"]
              + [f"  {g}" for g in gens])
    return 0


def _emit_report(report: ClassificationReport, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report.to_json_dict(), indent=2))
        return
    print(f"input:   {report.input_text}")
    print(f"branch:  {report.branch}")
    print(f"verdict: {report.verdict}")
    for key, value in report.certificates.items():
        print(f"  {key}: {_jsonable(value)}")
    for e in report.errors:
        print(f"  error: {e}")


if __name__ == "__main__":
    sys.exit(main())
