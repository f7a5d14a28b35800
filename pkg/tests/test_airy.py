"""Airy-adic calculus: reduction, bracket decompositions, the wave
recursion, obstruction traces, kernel series, and the involution."""

import random
from fractions import Fraction

import pytest

from bispec import (
    AiryPDO,
    DiffOp,
    LaurentTail,
    MJOp,
    NotAiryShape,
    ObstructionTrace,
    Poly,
    RatFunc,
    ZeroOperand,
    airy_bispectral_check,
    airy_involution,
    airy_kernel_series,
    airy_shape,
    airy_wave_residual,
    airy_wave_solve,
    bracket_decompose,
    dop_mul,
    height,
    make_airy,
    perturbation_obstruction,
    reduce_mod_A,
    v_decompose,
)
from bispec.airy import top_of_diffop
from oracles import random_diffop

d = DiffOp.d()
x = DiffOp.x()
A2 = make_airy(2)


def xpow(k, c=1):
    return DiffOp.from_function(RatFunc.x_power(k, c))


def tail(e, c=1):
    return LaurentTail.x_power(e, c)


class TestAiryShape:
    def test_strict(self):
        s = airy_shape(make_airy(3, {1: 5}))
        assert s.N == 3 and s.a == ((1, Fraction(5)),)
        assert s.strict

    def test_relaxed(self):
        s = airy_shape(d * d - x.scale(2) + DiffOp.const(7))
        assert s.lam == 2 and s.a0 == 7 and not s.strict

    def test_rejects_subleading(self):
        with pytest.raises(NotAiryShape):
            airy_shape(d * d + d - x)

    def test_rejects_missing_x(self):
        with pytest.raises(NotAiryShape):
            airy_shape(d * d)


class TestReduceModA:
    def test_constant_shift(self):
        q, r = reduce_mod_A(d * d, A2)
        assert q == DiffOp.one()
        assert dict(r.coeffs) == {0: tail(1)}

    def test_cube(self):
        q, r = reduce_mod_A(d ** 3, A2)
        assert q == d
        assert dict(r.coeffs) == {1: tail(1), 0: tail(0)}

    def test_already_reduced(self):
        q, r = reduce_mod_A(x, A2)
        assert q.is_zero()
        assert dict(r.coeffs) == {0: tail(1)}

    def test_reconstruction_random(self):
        rng = random.Random(91)
        for _ in range(25):
            A = make_airy(rng.choice([2, 3]), {})
            N = A.order
            T = random_diffop(rng, max_order=2 * N, max_degree=3, min_exponent=-2)
            q, r = reduce_mod_A(T, A)
            r_op = DiffOp("x", {k: t.as_ratfunc() for k, t in r.coeffs.items()})
            assert dop_mul(q, A) + r_op == T
            assert all(k < N for k in r.coeffs)


class TestBracketDecompose:
    def test_pure_function(self):
        m = MJOp({0: tail(2) + tail(0, 3)}, 2)  # x^2 + 3
        b, c = bracket_decompose(A2, m)
        assert b.is_zero()
        # [d^2 - x, x^2 + 3] = 4x d + 2
        assert dict(c.coeffs) == {1: tail(1, 4), 0: tail(0, 2)}

    def test_alpha_d(self):
        m = MJOp({1: tail(0)}, 2)  # d
        b, c = bracket_decompose(A2, m)
        assert b.is_zero()
        assert dict(c.coeffs) == {0: tail(0)}

    def test_constant(self):
        b, c = bracket_decompose(A2, MJOp({0: tail(0, 5)}, 2))
        assert b.is_zero() and c.is_zero()

    def test_consistency_and_height_relation(self):
        rng = random.Random(97)
        At = top_of_diffop(A2)
        for _ in range(25):
            # recursion-shaped m: the d^0 part never dominates
            h1 = rng.randint(-4, 3)
            m = MJOp({1: tail(h1), 0: tail(rng.randint(-4, h1 + 1))}, 2)
            b, c = bracket_decompose(A2, m)
            bc = b.as_top() * At + c.as_top()
            mt = m.as_top()
            lhs = At * mt - mt * At
            diff = lhs - bc
            assert all(t.is_zero() for t in diff.coeffs.values())
            if not b.is_zero():
                assert height(c)[0] == height(b)[0] + 1


class TestVDecompose:
    def test_below_order(self):
        U, W = v_decompose(xpow(-2), MJOp({0: tail(0)}, 2), A2)
        assert U.is_zero()
        assert dict(W.coeffs) == {0: tail(-2)}

    def test_quotient_appears(self):
        # x^-1 d applied to d with N = 2: x^-1 d^2 = x^-1 A + 1
        U, W = v_decompose(dop_mul(xpow(-1), d), MJOp({1: tail(0)}, 2), A2)
        assert dict(U.coeffs) == {0: tail(-1)}
        assert dict(W.coeffs) == {0: tail(0)}

    def test_function_argument(self):
        U, W = v_decompose(xpow(-2), MJOp({1: tail(0)}, 2), A2)
        assert U.is_zero()
        assert dict(W.coeffs) == {1: tail(-2)}

    def test_height_bounds(self):
        rng = random.Random(103)
        for _ in range(20):
            hm = rng.randint(-3, 3)
            m = MJOp({rng.randint(0, 1): tail(hm)}, 2)
            V = xpow(rng.randint(-5, -2))
            U, W = v_decompose(V, m, A2)
            if not U.is_zero():
                assert height(U)[0] <= hm - 2
            if not W.is_zero():
                assert height(W)[0] <= hm - 1

    def test_reconstruction(self):
        rng = random.Random(107)
        At = top_of_diffop(A2)
        for _ in range(20):
            m = MJOp({k: tail(rng.randint(-4, 3), rng.randint(-3, 3) or 1)
                      for k in range(2) if rng.random() < 0.8} or {0: tail(0)}, 2)
            V = dop_mul(xpow(rng.randint(-5, -2)), d ** rng.randint(0, 1))
            U, W = v_decompose(V, m, A2)
            lhs = U.as_top() * At + W.as_top()
            rhs = top_of_diffop(V) * m.as_top()
            diff = lhs - rhs
            assert all(t.is_zero() for t in diff.coeffs.values())


class TestWaveSolve:
    def test_exact_airy_identity(self):
        K = airy_wave_solve(A2, 5)
        assert isinstance(K, AiryPDO) and K.is_identity()

    def test_exact_airy_with_parameters(self):
        K = airy_wave_solve(make_airy(3, {1: 5}), 4)
        assert isinstance(K, AiryPDO) and K.is_identity()

    def test_perturbed_obstructs(self):
        out = airy_wave_solve(A2 + xpow(-2), 10)
        assert isinstance(out, ObstructionTrace)
        assert out.obstructed

    def test_third_order_perturbed(self):
        L = make_airy(3) + dop_mul(xpow(-1), d)
        out = airy_wave_solve(L, 10)
        assert isinstance(out, ObstructionTrace) and out.obstructed

    def test_residual_for_identity(self):
        K = airy_wave_solve(make_airy(3, {1: 5}), 4)
        assert airy_wave_residual(make_airy(3, {1: 5}), K)

    def test_residual_for_deep_perturbation(self):
        # an obstruction deeper than the solve depth: a partial solve
        # comes back and its residual must vanish through truncation
        L = A2 + xpow(-9)
        out = airy_wave_solve(L, 2, h_min=-6)
        if isinstance(out, AiryPDO):
            assert airy_wave_residual(L, out)
        else:
            assert out.obstructed

    def test_partial_solve_nontrivial(self):
        # obstruction at height -1 needs nine steps; with J = 4 the solve
        # stays formal and returns genuine coefficients
        L = A2 + xpow(-9)
        out = airy_wave_solve(L, 4)
        assert isinstance(out, AiryPDO) and not out.is_identity()
        # 2 alpha_{1,1}' = -x^-9
        assert out.coeff(1).coeff(1).coeff(8) == Fraction(1, 16)
        assert airy_wave_residual(L, out)
        deep = airy_wave_solve(L, 12)
        assert isinstance(deep, ObstructionTrace) and deep.obstructed
        assert [s.s for s in deep.steps] == list(range(-9, 0))


class TestPerturbationObstruction:
    def test_clean(self):
        assert perturbation_obstruction(A2).verdict == "clean"

    def test_order_two(self):
        trace = perturbation_obstruction(A2 + xpow(-2), 10)
        assert trace.obstructed
        assert [s.s for s in trace.steps] == [-2, -1]
        assert all(s.alpha != 0 for s in trace.steps)
        assert trace.recursion_consistent()

    def test_order_three_derivative_term(self):
        L = make_airy(3, {1: 1}) + dop_mul(xpow(-1), d)
        trace = perturbation_obstruction(L, 10)
        assert trace.obstructed
        assert trace.steps[-1].s == -1
        assert trace.steps[0].k == 1

    def test_clean_iff_zero_corpus(self):
        rng = random.Random(109)
        corpus = []
        for p in (2, 3, 5):
            corpus.append(make_airy(p))
            corpus.append(make_airy(p, {j: rng.randint(-3, 3)
                                        for j in range(1, p - 1)}))
        for A in corpus:
            assert perturbation_obstruction(A).verdict == "clean"
        for A in corpus:
            N = A.order
            k = rng.randint(0, N - 2)
            h = rng.randint(-6, -1)
            V = dop_mul(xpow(h, rng.choice([1, -2, 3])), d ** k)
            trace = perturbation_obstruction(A + V, 20)
            assert trace.obstructed

    def test_steps_advance_by_one(self):
        trace = perturbation_obstruction(A2 + xpow(-5, 3), 20)
        assert trace.obstructed
        assert [s.s for s in trace.steps] == [-5, -4, -3, -2, -1]


class TestKernelSeries:
    def test_classic(self):
        s = airy_kernel_series(A2, (1, 0), 7)
        assert s.terms == {0: 1, 3: Fraction(1, 6), 6: Fraction(1, 180)}

    def test_second_solution(self):
        s = airy_kernel_series(A2, (0, 1), 5)
        assert s.terms == {1: 1, 4: Fraction(1, 12)}

    def test_third_order(self):
        s = airy_kernel_series(make_airy(3), (1, 0, 0), 5)
        assert s.terms == {0: 1, 4: Fraction(1, 24)}

    def test_annihilated(self):
        from bispec import apply_to_series

        s = airy_kernel_series(A2, (1, 0), 12)
        out = apply_to_series(A2, s)
        assert all(c == 0 for e, c in out.terms.items()
                   if out.trunc is None or e <= out.trunc)


class TestBispectralCheck:
    @pytest.mark.parametrize("A", [make_airy(2), make_airy(3),
                                   make_airy(3, {1: 5})])
    def test_identities(self, A):
        rep = airy_bispectral_check(A, 12)
        assert rep.ok
        assert rep.verified_degree == 10

    def test_shift_identity_alone(self):
        rep = airy_bispectral_check(make_airy(2), 8)
        assert rep.shift


class TestAiryInvolution:
    def test_generator_images(self):
        assert airy_involution(d, A2) == DiffOp.d("z")
        assert airy_involution(A2, A2) == DiffOp.x("z")
        assert airy_involution(x, A2) == A2.retag("z")

    def test_anti_homomorphism(self):
        rng = random.Random(113)
        A = make_airy(3, {1: 2})
        for _ in range(15):
            P = random_diffop(rng, max_order=2, max_degree=2)
            Q = random_diffop(rng, max_order=2, max_degree=2)
            lhs = airy_involution(dop_mul(P, Q), A)
            rhs = dop_mul(airy_involution(Q, A), airy_involution(P, A))
            assert lhs == rhs


class TestHeight:
    def test_x_dominates(self):
        L = DiffOp("x", {1: RatFunc(Poly([0, 0, 1])), 0: RatFunc(Poly([0, 0, 0, 1]))})
        assert height(L) == (3, 0, Fraction(1))

    def test_tie_broken_by_derivative(self):
        L = DiffOp("x", {2: RatFunc.x(), 1: RatFunc.x()})
        assert height(L) == (1, 2, Fraction(1))

    def test_constant(self):
        assert height(DiffOp.const(5))[0] == 0

    def test_zero_rejected(self):
        with pytest.raises(ZeroOperand):
            height(DiffOp.zero())
