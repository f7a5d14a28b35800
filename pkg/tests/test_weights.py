"""Filtration toolkit: exponent sets, weights, associated polynomials,
normal forms, and principal parts."""

import random
from fractions import Fraction

import pytest

from bispec import (
    BiHomPoly,
    DiffOp,
    NotAiryShape,
    NotHomogeneous,
    NotIncreasing,
    Poly,
    RatFunc,
    WeightPair,
    associated_polynomial,
    choose_weights,
    dop_mul,
    exponent_set,
    homogeneous_part,
    make_airy,
    normal_form_test,
    principal_part,
    weighted_order,
)
from oracles import random_diffop

d = DiffOp.d()
x = DiffOp.x()


def xpow(k, c=1):
    return DiffOp.from_function(RatFunc.x_power(k, c))


class TestExponentSet:
    def test_airy(self):
        assert exponent_set(d * d - x).points == {(0, 2), (1, 0)}

    def test_pure_power(self):
        assert exponent_set(d * d).points == {(0, 2)}

    def test_mixed(self):
        L = dop_mul(DiffOp.from_function(Poly([0, 0, 1])), d) + x
        assert exponent_set(L).points == {(2, 1), (1, 0)}

    def test_hull_contains_extremes(self):
        L = d ** 3 - x + dop_mul(xpow(1), d)
        np_ = exponent_set(L)
        assert set(np_.hull) <= np_.points


class TestChooseWeights:
    @pytest.mark.parametrize("L,rho,sigma", [
        (d * d - x, 2, 1),
        (d ** 3 - x, 3, 1),
        (d ** 3 - dop_mul(DiffOp.from_function(Poly([0, 0, 1])), d), 1, 1),
    ])
    def test_examples(self, L, rho, sigma):
        w = choose_weights(L)
        assert (w.rho, w.sigma) == (rho, sigma)

    def test_bounded_rejected(self):
        with pytest.raises(NotIncreasing):
            choose_weights(d * d - xpow(-2, 2))

    def test_supporting_line(self):
        rng = random.Random(61)
        for _ in range(30):
            L = d ** 4 + random_diffop(rng, max_order=3, max_degree=3,
                                       min_exponent=-2)
            if L.order != 4 or not any(
                    c.infinity_order() > 0 for j, c in L.coeffs.items() if j < 4):
                continue
            w = choose_weights(L)
            N = L.order
            v = N * w.sigma
            for m, j in exponent_set(L).points:
                assert w.rho * m + w.sigma * j <= v
            k, j = w.support
            assert N * w.sigma == k * w.rho + j * w.sigma

    def test_coprime_positive(self):
        w = choose_weights(d ** 4 - DiffOp.from_function(Poly([0, 0, 1])))
        assert w.rho >= 1 and w.sigma >= 1
        from math import gcd
        assert gcd(w.rho, w.sigma) == 1


class TestWeightedOrder:
    def test_examples(self):
        assert weighted_order(d * d - x, WeightPair(2, 1, (1, 0))) == 2
        assert weighted_order(x * d, WeightPair(1, 1, (1, 1))) == 2
        assert weighted_order(dop_mul(x, d ** 3), WeightPair(2, 1, (1, 0))) == 5


class TestAssociatedPolynomial:
    def test_airy(self):
        w = WeightPair(2, 1, (1, 0))
        f = associated_polynomial(d * d - x, w)
        assert f.terms == {(0, 2): 1, (1, 0): -1}

    def test_low_weight_terms_dropped(self):
        w = WeightPair(2, 1, (1, 0))
        L = d * d - x + dop_mul(xpow(-1), d)
        assert associated_polynomial(L, w).terms == {(0, 2): 1, (1, 0): -1}

    def test_constant_dropped(self):
        w = WeightPair(1, 1, (1, 1))
        f = associated_polynomial(x * d + DiffOp.one(), w)
        assert f.terms == {(1, 1): 1}

    def test_multiplicative_without_cancellation(self):
        rng = random.Random(67)
        w = WeightPair(2, 1, (1, 0))
        checked = 0
        while checked < 20:
            A = random_diffop(rng, max_order=3, max_degree=2, min_exponent=-1)
            B = random_diffop(rng, max_order=3, max_degree=2, min_exponent=-1)
            if A.is_zero() or B.is_zero():
                continue
            fa = associated_polynomial(A, w)
            fb = associated_polynomial(B, w)
            prod = fa * fb
            if prod.is_zero():
                continue
            assert associated_polynomial(dop_mul(A, B), w).terms == prod.terms
            assert weighted_order(dop_mul(A, B), w) == \
                weighted_order(A, w) + weighted_order(B, w)
            checked += 1


class TestHomogeneousPart:
    def test_idempotent(self):
        rng = random.Random(71)
        for _ in range(20):
            L = random_diffop(rng, max_order=3, max_degree=3, min_exponent=-2)
            if L.is_zero():
                continue
            w = WeightPair(2, 1, (1, 0))
            H = homogeneous_part(L, w)
            assert homogeneous_part(H, w) == H

    def test_matches_polynomial(self):
        w = WeightPair(2, 1, (1, 0))
        L = d * d - x + dop_mul(xpow(-1), d)
        assert homogeneous_part(L, w) == d * d - x


class TestNormalForm:
    def test_airy_form(self):
        w = WeightPair(2, 1, (1, 0))
        nf = normal_form_test(BiHomPoly({(0, 2): 1, (1, 0): -1}), w)
        assert nf.case == "c"
        assert nf.yrx == (2, 1, Fraction(1))
        assert nf.is_airy_normal_form
        assert not nf.nilpotency_excluded

    def test_nilpotency_flag(self):
        w = WeightPair(2, 1, (1, 1))
        nf = normal_form_test(BiHomPoly({(0, 3): 1, (1, 1): -1}), w)
        assert nf.n == 1 and nf.k == 1
        assert nf.nilpotency_excluded

    def test_case_d(self):
        w = WeightPair(1, 1, (1, 1))
        nf = normal_form_test(BiHomPoly({(0, 2): 1, (1, 1): 3, (2, 0): 2}), w)
        assert nf.case == "d"
        assert {nf.lam, nf.mu} == {Fraction(1), Fraction(2)}

    def test_case_b(self):
        # x (x^2 + y)^2 with (rho, sigma) = (1, 2)
        w = WeightPair(1, 2, (1, 1))
        f = BiHomPoly({(5, 0): 1, (3, 1): 2, (1, 2): 1})
        nf = normal_form_test(f, w)
        assert nf.case == "b"
        assert nf.n == 1 and nf.k == 2 and nf.m == 2 and nf.mu == 1

    def test_unresolved_over_q(self):
        # (y - sqrt(2) x)(y + sqrt(2) x): rational coefficients, irrational roots
        w = WeightPair(1, 1, (1, 1))
        nf = normal_form_test(BiHomPoly({(0, 2): 1, (2, 0): -2}), w)
        assert nf.unresolved_over_Q

    def test_perfect_power(self):
        w = WeightPair(2, 1, (1, 0))
        f = BiHomPoly({(0, 4): 1, (1, 2): -2, (2, 0): 1})  # (y^2 - x)^2
        nf = normal_form_test(f, w)
        assert nf.perfect_power == 2
        assert nf.yrx == (2, 2, Fraction(1))

    def test_not_homogeneous(self):
        w = WeightPair(2, 1, (1, 0))
        with pytest.raises(NotHomogeneous):
            normal_form_test(BiHomPoly({(0, 2): 1, (0, 0): 1}), w)

    def test_precondition_attached(self):
        w = WeightPair(2, 1, (1, 0))
        nf = normal_form_test(BiHomPoly({(0, 2): 1, (1, 0): -1}), w)
        assert nf.weight == 2
        assert nf.precondition_weight_ok is False  # 2 = rho + sigma - 1 + ...


class TestPrincipalPart:
    def test_decaying_remainder(self):
        A, V = principal_part(d * d - x + xpow(-1))
        assert A == d * d - x
        assert V == xpow(-1)

    def test_exact_airy(self):
        L = make_airy(3, {1: 5})
        A, V = principal_part(L)
        assert A == L and V.is_zero()

    def test_shape_rejected(self):
        with pytest.raises(NotAiryShape):
            principal_part(d ** 4 - DiffOp.from_function(Poly([0, 0, 1])))

    def test_constant_collection(self):
        L = d ** 3 + dop_mul(DiffOp.from_function(
            RatFunc(Poly([1, 5]), Poly([0, 1]))), d) - x
        A, V = principal_part(L)
        # (5x + 1)/x = 5 + 1/x: the constant joins A, the decay stays in V
        assert A == make_airy(3, {1: 5})
        assert V == dop_mul(xpow(-1), d)

    def test_airy_pipeline_property(self):
        rng = random.Random(73)
        for _ in range(20):
            p = rng.randint(2, 5)
            params = {j: rng.randint(-3, 3) for j in range(1, p - 1)
                      if rng.random() < 0.6}
            A = make_airy(p, params)
            w = choose_weights(A)
            assert (w.rho, w.sigma) == (p, 1)
            f = associated_polynomial(A, w)
            assert f.terms == {(0, p): 1, (1, 0): -1}
            nf = normal_form_test(f, w)
            assert nf.is_airy_normal_form and nf.yrx == (p, 1, Fraction(1))
