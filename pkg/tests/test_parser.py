"""Expression parsing and canonical printing."""

import random
from fractions import Fraction

import pytest

from bispec import (
    DiffOp,
    NegativeDerivativeExponent,
    OperatorSyntaxError,
    Poly,
    RatFunc,
    parse_operator,
    print_operator,
)
from oracles import random_diffop

d = DiffOp.d()
x = DiffOp.x()


class TestParse:
    @pytest.mark.parametrize("text,expect", [
        ("d^2 - x", d * d - x),
        ("d*x", DiffOp("x", {1: RatFunc.x(), 0: RatFunc.one()})),
        ("x*d + 1", DiffOp("x", {1: RatFunc.x(), 0: RatFunc.one()})),
        ("0", DiffOp.zero()),
        ("1/2", DiffOp.const(Fraction(1, 2))),
        ("-x", -x),
        ("d^0", DiffOp.one()),
        ("(d - x^-1)*(d + x^-1)",
         d * d - DiffOp.from_function(RatFunc.x_power(-2, 2))),
    ])
    def test_examples(self, text, expect):
        assert parse_operator(text) == expect

    def test_bessel_expression(self):
        L = parse_operator("x^-2*(x*d-1/2)*(x*d-1/2)")
        assert L == d * d + DiffOp.from_function(RatFunc.x_power(-2, Fraction(1, 4)))

    def test_precedence_caret_over_star(self):
        assert parse_operator("2*x^2") == DiffOp.from_function(Poly([0, 0, 2]))

    def test_left_associative_noncommutative(self):
        assert parse_operator("d*x*d") == parse_operator("(d*x)*d")

    def test_negative_exponent_on_function_subexpression(self):
        L = parse_operator("(x^2 + 1)^-1")
        assert L == DiffOp.from_function(RatFunc(Poly([1]), Poly([1, 0, 1])))

    def test_negative_exponent_on_derivative_rejected(self):
        with pytest.raises(NegativeDerivativeExponent):
            parse_operator("d^-1")
        with pytest.raises(NegativeDerivativeExponent):
            parse_operator("(x*d)^-2")


class TestErrors:
    @pytest.mark.parametrize("text,pos", [
        ("d^", 2),
        ("x + ", 4),
        ("(d^2", 4),
        ("d^^2", 2),
        ("x^-2*", 5),
        ("y + 1", 0),
        ("1/0", 2),
        ("*x", 0),
        ("3x", 1),
        ("d^1/2", 2),
    ])
    def test_positions(self, text, pos):
        with pytest.raises(OperatorSyntaxError) as exc:
            parse_operator(text)
        assert exc.value.position == pos


class TestPrint:
    @pytest.mark.parametrize("L,expect", [
        (d * d - x, "d^2 - x"),
        (DiffOp.zero(), "0"),
        (DiffOp("x", {1: RatFunc.x(), 0: RatFunc.one()}), "x*d + 1"),
        (d * d - DiffOp.from_function(RatFunc.x_power(-2, 2)), "d^2 - 2*x^-2"),
    ])
    def test_examples(self, L, expect):
        assert print_operator(L) == expect

    def test_print_parse_print_fixed_point(self):
        rng = random.Random(127)
        for _ in range(30):
            L = random_diffop(rng, min_exponent=-3)
            text = print_operator(L)
            assert print_operator(parse_operator(text)) == text

    def test_roundtrip_corpus(self):
        rng = random.Random(131)
        for _ in range(100):
            L = random_diffop(rng, max_order=4, max_degree=6, min_exponent=-4)
            assert parse_operator(print_operator(L)) == L

    def test_general_denominator(self):
        L = DiffOp("x", {1: RatFunc(Poly([1]), Poly([-1, 1]))})
        text = print_operator(L)
        assert parse_operator(text) == L
