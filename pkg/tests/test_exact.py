"""
Tests for exact scalars, base polynomials and rational functions.
"""

import pytest
import random
from fractions import Fraction
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from errors import MixedBase, OreForgeError, UnknownVariable
from exact import (
    BaseAlgebra, BasePoly, BaseRatFun, Variable, base_arith, base_gcd_uni, render_rational, render_terms, to_rational,
)
from verify import BaseSampler


X = Variable("x")
Y = Variable("y")
XL = Variable("x", laurent=True)


def poly(variables, terms):
    return BasePoly(variables, terms)


class TestScalars:
    """Rational coercion and rendering."""

    def test_to_rational(self):
        assert to_rational(3) == Fraction(3)
        assert to_rational("-2/6") == Fraction(-1, 3)
        assert to_rational(Fraction(5, 10)) == Fraction(1, 2)

    def test_to_rational_rejects_bool(self):
        with pytest.raises(TypeError):
            to_rational(True)

    def test_render_rational(self):
        assert render_rational(Fraction(4)) == "4"
        assert render_rational(Fraction(-3, 6)) == "-1/2"

    def test_render_terms(self):
        assert render_terms([]) == "0"
        assert render_terms([(Fraction(1), "x"), (Fraction(-2), "")]) == "x - 2"
        assert render_terms([(Fraction(-1), "x^2"), (Fraction(1, 2), "x")]) == "-x^2 + 1/2*x"


class TestBasePoly:
    """Commutative polynomial arithmetic."""

    def test_arithmetic(self):
        x = BasePoly.gen((X, Y), "x")
        y = BasePoly.gen((X, Y), "y")
        p = (x + y) * (x - y)
        assert p == x * x - y * y
        assert p.render() == "x^2 - y^2"
        assert (x + 1) ** 2 == x * x + 2 * x + 1

    def test_zero_terms_dropped(self):
        p = poly((X,), {(1,): 1, (0,): 0})
        assert len(p.terms) == 1
        assert poly((X,), {(1,): 1}) - poly((X,), {(1,): 1}) == 0

    def test_negative_exponent_needs_laurent(self):
        with pytest.raises(OreForgeError):
            poly((X,), {(-1,): 1})
        assert poly((XL,), {(-1,): 1}).degree() == -1

    def test_laurent_inverse(self):
        x = BasePoly.gen((XL,), "x")
        assert x.inverse() * x == 1
        assert (3 * x).inverse() == poly((XL,), {(-1,): Fraction(1, 3)})
        assert (x + 1).inverse() is None
        assert BasePoly.gen((X,), "x").inverse() is None

    def test_partial(self):
        x = BasePoly.gen((X, Y), "x")
        y = BasePoly.gen((X, Y), "y")
        p = x ** 3 * y + 2 * x
        assert p.partial("x") == 3 * x * x * y + 2
        assert p.partial("y") == x ** 3

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariable):
            BasePoly.gen((X,), "z")

    def test_mixed_base_rejected(self):
        with pytest.raises(MixedBase):
            BasePoly.gen((X,), "x") + BasePoly.gen((Y,), "y")

    def test_gcd(self):
        x = BasePoly.gen((X,), "x")
        assert base_gcd_uni((x - 1) * (x + 2), (x - 1) * (x + 3)) == x - 1
        assert base_gcd_uni(2 * x, 4 * x * x) == x


class TestBaseRatFun:
    """Univariate rational functions in lowest terms."""

    def test_normalization(self):
        x = BasePoly.gen((X,), "x")
        f = BaseRatFun(X, (x - 1) * (x + 1), 2 * (x - 1))
        assert f.den == 1
        assert f.num == Fraction(1, 2) * x + Fraction(1, 2)

    def test_division_and_inverse(self):
        x = BaseRatFun.gen("x")
        f = 1 / (x + 1)
        assert f * (x + 1) == 1
        assert f.render() == "1/(x + 1)"
        assert f.inverse() == x + 1
        assert BaseRatFun(X, 0).inverse() is None

    def test_zero_denominator(self):
        with pytest.raises(ZeroDivisionError):
            BaseRatFun(X, 1, 0)

    def test_derivative_quotient_rule(self):
        x = BaseRatFun.gen("x")
        f = x / (x + 1)
        assert f.partial("x") == 1 / ((x + 1) * (x + 1))


class TestBaseAlgebra:
    """Coefficient algebra descriptions and coercion."""

    def test_describe(self):
        assert BaseAlgebra.rationals().describe() == "Q"
        assert BaseAlgebra.polynomials([XL, Y]).describe() == "Q[x^±1, y]"
        assert BaseAlgebra.ratfun("x").describe() == "Q(x)"

    def test_unit_variables(self):
        assert BaseAlgebra.polynomials([XL]).is_unit_variable("x")
        assert not BaseAlgebra.polynomials([X]).is_unit_variable("x")
        assert BaseAlgebra.ratfun("x").is_unit_variable("x")

    def test_duplicate_variable_names(self):
        with pytest.raises(OreForgeError):
            BaseAlgebra.polynomials([X, Variable("x", laurent=True)])

    def test_coerce(self):
        base = BaseAlgebra.ratfun("x")
        assert base.coerce(3) == 3
        assert isinstance(base.coerce(BasePoly.gen((X,), "x")), BaseRatFun)
        with pytest.raises(MixedBase):
            BaseAlgebra.polynomials([X]).coerce(BasePoly.gen((Y,), "y"))


def add(a, b):
    return base_arith(a, b, "add")


def mul(a, b):
    return base_arith(a, b, "mul")


class TestBaseArithProperties:
    """Ring axioms on random triples from each kind of base."""

    @pytest.fixture(params=[
        BaseAlgebra.rationals(),
        BaseAlgebra.polynomials([XL, Y]),
        pytest.param(BaseAlgebra.ratfun("t"), marks=pytest.mark.slow),
    ], ids=["Q", "laurent", "ratfun"])
    def triples(self, request):
        sampler = BaseSampler(request.param, random.Random(31))
        return [(sampler.element(), sampler.element(), sampler.element()) for _ in range(500)]

    def test_associativity(self, triples):
        for a, b, c in triples:
            assert mul(mul(a, b), c) == mul(a, mul(b, c))
            assert add(add(a, b), c) == add(a, add(b, c))

    def test_commutativity(self, triples):
        for a, b, _ in triples:
            assert mul(a, b) == mul(b, a)
            assert add(a, b) == add(b, a)

    def test_distributivity(self, triples):
        for a, b, c in triples:
            assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))

    def test_negation(self, triples):
        for a, _, _ in triples:
            assert not add(a, base_arith(a, None, "neg"))

    def test_mixed_base(self):
        with pytest.raises(MixedBase):
            base_arith(BasePoly.gen((X,), "x"), Fraction(1), "add")
