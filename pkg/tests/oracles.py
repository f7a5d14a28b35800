"""Independent oracles used to compute expected values in the tests.

These deliberately avoid the library's code paths:

* a Weyl-monomial algebra over exponent pairs (a, b) <-> x^a d^b whose
  product uses the closed-form reordering
      d^b o x^a = sum_i C(b, i) * a(a-1)...(a-i+1) * x^(a-i) d^(b-i),
  in contrast to the library's coefficient-differentiation Leibniz rule;
* operator application to explicit Laurent polynomials, so products can be
  checked through their action on functions;
* commutator chains built on the monomial algebra for ad-condition values.
"""

from __future__ import annotations

import random
from fractions import Fraction

from bispec import DiffOp, Poly, RatFunc

# monomial algebra: {(a, b): coeff} represents sum coeff * x^a d^b, a in Z


def mono_zero() -> dict:
    return {}


def mono_add(u: dict, v: dict) -> dict:
    out = dict(u)
    for key, c in v.items():
        out[key] = out.get(key, Fraction(0)) + c
    return {k: c for k, c in out.items() if c != 0}


def mono_scale(u: dict, s) -> dict:
    s = Fraction(s)
    return {k: c * s for k, c in u.items() if c * s != 0}


def _falling(a: int, i: int) -> Fraction:
    out = Fraction(1)
    for t in range(i):
        out *= a - t
    return out


def _choose(b: int, i: int) -> int:
    from math import comb

    return comb(b, i)


def mono_mul(u: dict, v: dict) -> dict:
    out: dict = {}
    for (a1, b1), c1 in u.items():
        for (a2, b2), c2 in v.items():
            # x^a1 d^b1 x^a2 d^b2: reorder d^b1 past x^a2
            for i in range(b1 + 1):
                coeff = c1 * c2 * _choose(b1, i) * _falling(a2, i)
                if coeff == 0:
                    continue
                key = (a1 + a2 - i, b1 + b2 - i)
                out[key] = out.get(key, Fraction(0)) + coeff
    return {k: c for k, c in out.items() if c != 0}


def mono_commutator(u: dict, v: dict) -> dict:
    return mono_add(mono_mul(u, v), mono_scale(mono_mul(v, u), -1))


def mono_ad_chain(L: dict, g: dict, steps: int) -> list[dict]:
    """[g, ad_L g, ad_L^2 g, ...] with ``steps`` applications."""
    out = [g]
    for _ in range(steps):
        out.append(mono_commutator(L, out[-1]))
    return out


def mono_of_diffop(L: DiffOp) -> dict:
    out: dict = {}
    for j, c in L.coeffs.items():
        for e, v in c.laurent_terms():
            out[(e, j)] = out.get((e, j), Fraction(0)) + v
    return {k: c for k, c in out.items() if c != 0}


def diffop_of_mono(u: dict, var: str = "x") -> DiffOp:
    coeffs: dict[int, RatFunc] = {}
    for (a, b), c in u.items():
        coeffs[b] = coeffs.get(b, RatFunc.zero()) + RatFunc.x_power(a, c)
    return DiffOp(var, coeffs)


# applying operators to Laurent polynomials (functions {exponent: coeff})


def fn_apply_mono(u: dict, fn: dict) -> dict:
    """Apply the monomial-algebra operator to a Laurent polynomial."""
    out: dict = {}
    for (a, b), c in u.items():
        for e, v in fn.items():
            coeff = c * v * _falling(e, b)
            if coeff == 0:
                continue
            key = e - b + a
            out[key] = out.get(key, Fraction(0)) + coeff
    return {k: c for k, c in out.items() if c != 0}


def fn_of_poly(p: Poly) -> dict:
    return {e: c for e, c in enumerate(p.coeffs) if c != 0}


# random operator generators (seeded by the caller)


def random_poly(rng: random.Random, max_degree: int, zero_ok: bool = True) -> Poly:
    degree = rng.randint(0, max_degree)
    coeffs = [Fraction(rng.randint(-4, 4)) for _ in range(degree + 1)]
    p = Poly(coeffs)
    if p.is_zero() and not zero_ok:
        return Poly([Fraction(rng.randint(1, 4))])
    return p


def random_diffop(
    rng: random.Random,
    max_order: int = 4,
    max_degree: int = 4,
    min_exponent: int = 0,
    density: float = 0.7,
) -> DiffOp:
    """Random operator with sparse Laurent-polynomial coefficients."""
    coeffs: dict[int, RatFunc] = {}
    order = rng.randint(0, max_order)
    for j in range(order + 1):
        if j != order and rng.random() > density:
            continue
        c = RatFunc.zero()
        for _ in range(rng.randint(1, 2)):
            e = rng.randint(min_exponent, max_degree)
            c = c + RatFunc.x_power(e, rng.randint(-4, 4))
        if j == order and c.is_zero():
            c = RatFunc.one()
        if not c.is_zero():
            coeffs[j] = c
    if not coeffs:
        coeffs[0] = RatFunc.one()
    return DiffOp("x", coeffs)
