"""
Tests for integer matrices, Smith normal form and finitely generated weight groups.
"""

import pytest
from fractions import Fraction
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from abelian import (
    Ambient, IntMatrix, encode_multiplicative, group_from_generators, invariant_factors, monoid_group_closure,
    render_weight, smith_normal_form, solve_integer,
)
from errors import AmbientMismatch, ZeroComponent

F = Fraction


class TestIntMatrix:
    """Dense integer matrix helpers."""

    def test_shape_and_product(self):
        a = IntMatrix([[1, 2], [3, 4]])
        assert a.shape == (2, 2)
        assert a @ IntMatrix.identity(2) == a
        assert (a @ IntMatrix([[0, 1], [1, 0]])).rows == [[2, 1], [4, 3]]

    def test_ragged_rejected(self):
        with pytest.raises(ValueError):
            IntMatrix([[1, 2], [3]])

    def test_determinant(self):
        assert IntMatrix([[2, 1], [7, 4]]).determinant() == 1
        assert IntMatrix([[1, 2], [2, 4]]).determinant() == 0
        assert IntMatrix([], n_cols=0).determinant() == 1

    def test_diagonal(self):
        m = IntMatrix([[2, 0, 0], [0, 6, 0]])
        assert m.is_diagonal()
        assert m.diagonal() == [2, 6]


class TestSmithNormalForm:
    """S = U M V with unimodular transforms and a dividing diagonal."""

    def test_classic_example(self):
        m = IntMatrix([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
        snf = smith_normal_form(m)
        assert snf.diagonal == [2, 6, 12]
        assert snf.U @ m @ snf.V == snf.S
        assert snf.S.is_diagonal()
        assert snf.U @ snf.U_inv == IntMatrix.identity(3)
        assert snf.V @ snf.V_inv == IntMatrix.identity(3)
        assert abs(snf.U.determinant()) == 1
        assert abs(snf.V.determinant()) == 1

    def test_rank_deficient(self):
        m = IntMatrix([[1, 2, 3], [2, 4, 6]])
        snf = smith_normal_form(m)
        assert snf.rank == 1
        assert snf.diagonal == [1, 0]
        assert snf.U @ m @ snf.V == snf.S

    def test_divisibility_chain(self):
        snf = smith_normal_form(IntMatrix([[4, 0], [0, 6]]))
        assert snf.diagonal == [2, 12]

    def test_random_4x4_property(self, rng):
        for _ in range(200):
            m = IntMatrix([[rng.randint(-10, 10) for _ in range(4)] for _ in range(4)])
            snf = smith_normal_form(m)
            assert snf.U @ m @ snf.V == snf.S
            assert abs(snf.U.determinant()) == 1
            assert abs(snf.V.determinant()) == 1
            assert snf.S.is_diagonal()
            diag = [d for d in snf.diagonal if d]
            assert all(d > 0 for d in diag)
            assert all(b % a == 0 for a, b in zip(diag, diag[1:]))
            assert snf.diagonal[len(diag):] == [0] * (4 - len(diag))

    def test_invariant_factors(self):
        assert invariant_factors(IntMatrix([[2, 0], [0, 3]])) == [1, 6]
        assert invariant_factors(IntMatrix([[0, 0], [0, 0]])) == []

    def test_solve_integer(self):
        m = IntMatrix([[2, 0], [0, 3]])
        assert solve_integer(m, [4, 9]) == [2, 3]
        assert solve_integer(m, [1, 0]) is None


class TestAmbient:
    """Additive and multiplicative ambient groups."""

    def test_additive_operations(self):
        amb = Ambient.additive(2)
        a, b = amb.check([1, F(1, 2)]), amb.check([2, 3])
        assert amb.combine(a, b) == (3, F(7, 2))
        assert amb.inverse(a) == (-1, F(-1, 2))
        assert amb.power(a, 3) == (3, F(3, 2))
        assert amb.identity() == (0, 0)
        assert amb.describe() == "Q^2"

    def test_multiplicative_operations(self):
        amb = Ambient.multiplicative(1)
        assert amb.combine((F(2),), (F(3),)) == (6,)
        assert amb.inverse((F(2),)) == (F(1, 2),)
        assert amb.power((F(-2),), 3) == (-8,)
        assert amb.identity() == (1,)
        assert amb.describe() == "(Q*)^1"

    def test_check_rejects_bad_weights(self):
        with pytest.raises(ZeroComponent):
            Ambient.multiplicative(2).check([1, 0])
        with pytest.raises(AmbientMismatch):
            Ambient.additive(2).check([1])

    def test_render_weight(self):
        assert render_weight((F(2),)) == "2"
        assert render_weight((F(1), F(1, 2))) == "(1, 1/2)"


class TestMultiplicativeEncoding:
    """Sign bits plus prime exponents."""

    def test_encode_decode(self):
        w = encode_multiplicative((F(-12, 5), F(1)))
        assert w.primes == (2, 3, 5)
        assert w.signs == (1, 0)
        assert w.exponents == ((2, 1, -1), (0, 0, 0))
        assert w.decode() == (F(-12, 5), F(1))

    def test_product_aligns_primes(self):
        w = encode_multiplicative((F(2),)) * encode_multiplicative((F(-3),))
        assert w.decode() == (F(-6),)
        assert not w.is_identity()

    def test_zero_component(self):
        with pytest.raises(ZeroComponent):
            encode_multiplicative((F(0),))


class TestGroupStructure:
    """T ⊕ Z^r structure of generated subgroups."""

    def test_additive_free(self):
        group = group_from_generators([(2,), (3,)], Ambient.additive(1))
        assert group.rank == 1
        assert group.invariant_factors == []
        assert group.contains((1,))
        assert not group.contains((F(1, 2),))

    def test_sign_is_torsion(self):
        group = group_from_generators([(-1,)], Ambient.multiplicative(1))
        assert group.rank == 0
        assert group.invariant_factors == [2]
        assert group.torsion_order == 2
        assert group.torsion_elements() == [(1,), (-1,)]
        assert group.render() == "T = Z/2; rank r = 0; basis = []"

    def test_negative_generator_is_free(self):
        group = group_from_generators([(-2,)], Ambient.multiplicative(1))
        assert group.rank == 1
        assert group.invariant_factors == []
        assert group.contains((4,))
        assert not group.contains((2,))

    def test_mixed_torsion_and_free(self):
        group = group_from_generators([(-1,), (2,)], Ambient.multiplicative(1))
        assert group.rank == 1
        assert group.invariant_factors == [2]
        assert group.free_basis == [(2,)]
        assert group.render() == "T = Z/2; rank r = 1; basis = [2]"
        torsion, free = group.express((F(-8),))
        assert free == [3]
        assert group.element(torsion, free) == (-8,)

    def test_input_generators_preferred_as_basis(self):
        gens = [(1, 2), (1, F(1, 2)), (F(1, 2), 1), (2, 1)]
        group = group_from_generators(gens, Ambient.multiplicative(2))
        assert group.rank == 2
        assert group.invariant_factors == []
        assert group.free_basis == [(1, 2), (F(1, 2), 1)]
        assert group.express((F(1, 2), 2)) == ([], [1, 1])
        assert not group.contains((3, 1))

    def test_trivial_group(self):
        group = group_from_generators([], Ambient.additive(2))
        assert group.is_trivial
        assert group.torsion_elements() == [(0, 0)]

    def test_monoid_closure_echoes_generators(self):
        closure = monoid_group_closure([(1,), (-1,)], Ambient.additive(1))
        assert closure.monoid_generators == [(1,), (-1,)]
        assert closure.group.rank == 1
