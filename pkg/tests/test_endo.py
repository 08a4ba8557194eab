"""
Tests for derivations, automorphisms and anti-automorphisms.
"""

import pytest
from fractions import Fraction
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from endo import (
    MapKind, apply_map, bracket, commuting_check, compose, conj_automorphism, extend_to_unit_fraction,
    identity_map, inner_derivation, is_involution, make_map, negation_map, transpose_map, zero_derivation,
)
from errors import (
    InverseMismatch, KindMismatch, MissingImage, NotAUnit, OwnerMismatch, RelationViolation,
)


def samples(tower):
    """A few fixed elements mixing base and level generators."""
    gens = [tower.gen(g) for g in tower.generator_names]
    out = list(gens)
    for a in gens:
        for b in gens:
            out.append(a * b + 2 * a - 1)
    return out


class TestMapKind:
    """Kind names as written in spec files."""

    def test_parse(self):
        assert MapKind.parse("derivation") is MapKind.DERIVATION
        assert MapKind.parse("antiAutomorphism") is MapKind.ANTI_AUTOMORPHISM
        assert MapKind.parse("anti-automorphism") is MapKind.ANTI_AUTOMORPHISM

    def test_unknown_kind(self):
        with pytest.raises(KindMismatch):
            MapKind.parse("endomorphism")


class TestMakeMap:
    """Validation of generator images against the defining relations."""

    def test_builtin_ad_is_inner(self, catalog, a1):
        ad = catalog.map("A1", "ad_xd")
        inner = inner_derivation(a1.gen("x") * a1.gen("d"))
        for g in a1.generator_names:
            assert ad(a1.gen(g)) == inner(a1.gen(g))

    def test_identity_on_generators_is_not_a_derivation(self, a1):
        with pytest.raises(RelationViolation):
            make_map(a1, MapKind.DERIVATION, {"x": a1.gen("x"), "d": a1.gen("d")})

    def test_missing_image(self, a1):
        with pytest.raises(MissingImage):
            make_map(a1, MapKind.DERIVATION, {"x": a1.gen("x")})

    def test_derivation_takes_no_inverse(self, a1):
        images = {"x": a1.gen("x"), "d": -a1.gen("d")}
        with pytest.raises(KindMismatch):
            make_map(a1, MapKind.DERIVATION, images, images)

    def test_translation_automorphism(self, a1):
        x, d = a1.gen("x"), a1.gen("d")
        shift = make_map(a1, "automorphism", {"x": x + 1, "d": d}, {"x": x - 1, "d": d}, name="shift")
        assert shift(x * x) == x * x + 2 * x + 1
        assert shift.apply_inverse(shift(d * x)) == d * x

    def test_wrong_inverse(self, a1):
        x, d = a1.gen("x"), a1.gen("d")
        with pytest.raises(InverseMismatch):
            make_map(a1, MapKind.AUTOMORPHISM, {"x": x + 1, "d": d}, {"x": x + 2, "d": d})

    def test_describe(self, catalog):
        ad = catalog.map("A1", "ad_xd")
        assert ad.describe() == "ad_xd (derivation; x->x, d->-d)"


class TestMapLaws:
    """Leibniz, multiplicativity and reversal on fixed samples."""

    def test_derivation_leibniz(self, catalog, u2):
        ad = catalog.map("U2", "ad_h")
        for a in samples(u2):
            for b in samples(u2)[:4]:
                assert ad(a * b) == ad(a) * b + a * ad(b)

    def test_automorphism_multiplicative(self, catalog, t2):
        conj = catalog.map("T2", "conj_x")
        for a in samples(t2):
            for b in samples(t2)[:4]:
                assert conj(a * b) == conj(a) * conj(b)
            assert conj.apply_inverse(conj(a)) == a

    def test_anti_automorphism_reverses(self, catalog, a1):
        tr = catalog.map("A1", "weyl_transpose")
        for a in samples(a1):
            for b in samples(a1)[:4]:
                assert tr(a * b) == tr(b) * tr(a)
        assert is_involution(tr)

    def test_transpose_map_matches_builtin(self, catalog, a1):
        tr = catalog.map("A1", "weyl_transpose")
        generic = transpose_map(a1)
        for a in samples(a1):
            assert generic(a) == tr(a)

    def test_negation_map(self, u2):
        neg = negation_map(u2)
        e, h = u2.gen("e"), u2.gen("h")
        assert neg(h * e) == neg(e) * neg(h)
        assert is_involution(neg)

    def test_identity_and_zero(self, a1):
        a = a1.gen("d") * a1.gen("x")
        assert identity_map(a1)(a) == a
        assert zero_derivation(a1)(a) == 0

    def test_apply_map_owner(self, catalog, lw1):
        with pytest.raises(OwnerMismatch):
            apply_map(catalog.map("A1", "ad_xd"), lw1.gen("x"))


class TestCombinations:
    """Brackets, compositions and commuting families."""

    def test_bracket_of_inner_derivations(self, a1):
        x, d = a1.gen("x"), a1.gen("d")
        b = bracket(inner_derivation(x * d), inner_derivation(x))
        expected = inner_derivation(x)
        for g in a1.generator_names:
            assert b(a1.gen(g)) == expected(a1.gen(g))

    def test_bracket_needs_derivations(self, catalog):
        conj = catalog.map("T2", "conj_x")
        with pytest.raises(KindMismatch):
            bracket(conj, conj)

    def test_compose(self, catalog, t2):
        both = compose(catalog.map("T2", "conj_x"), catalog.map("T2", "conj_y"))
        x, y = t2.gen("x"), t2.gen("y")
        assert both(x) == 2 * x
        assert both(y) == Fraction(1, 2) * y
        assert both.apply_inverse(both(x * y)) == x * y

    def test_commuting(self, catalog):
        verdict = commuting_check([catalog.map("T2", "conj_x"), catalog.map("T2", "conj_y")])
        assert verdict.commuting
        assert verdict.render() == "commuting"

    def test_not_commuting_has_witness(self, catalog, a1):
        ad = catalog.map("A1", "ad_xd")
        verdict = commuting_check([ad, inner_derivation(a1.gen("x"), name="ad_x")])
        assert not verdict.commuting
        assert verdict.pair == ("ad_xd", "ad_x")
        assert verdict.generator in a1.generator_names

    def test_mixed_kinds(self, catalog, a1):
        with pytest.raises(KindMismatch):
            commuting_check([catalog.map("A1", "ad_xd"), identity_map(a1)])

    def test_conjugation_needs_unit(self, a1, t2):
        with pytest.raises(NotAUnit):
            conj_automorphism(a1.gen("d"))
        conj = conj_automorphism(t2.gen("y"))
        assert conj(t2.gen("x")) == 2 * t2.gen("x")


class TestUnitFractions:
    """Maps extended to s^-1 a for a unit s."""

    def test_derivation(self, catalog, lw1):
        ad = catalog.map("LW1", "ad_xd")
        x, d = lw1.gen("x"), lw1.gen("d")
        x_inv = lw1.gen_inverse("x")
        value = extend_to_unit_fraction(ad, x, d)
        assert value == ad(x_inv * d)
        assert value == -2 * (x_inv * d)

    def test_automorphism(self, catalog, t2):
        conj = catalog.map("T2", "conj_x")
        x, y = t2.gen("x"), t2.gen("y")
        value = extend_to_unit_fraction(conj, x, y)
        assert value == conj(t2.gen_inverse("x") * y)
        assert value == Fraction(1, 2) * t2.gen_inverse("x") * y

    def test_anti_automorphism(self, catalog, lw1):
        tr = catalog.map("LW1", "weyl_transpose")
        x, d = lw1.gen("x"), lw1.gen("d")
        assert extend_to_unit_fraction(tr, x, d) == tr(lw1.gen_inverse("x") * d)

    def test_sign_on_laurent(self, catalog):
        sign = catalog.map("LZ2", "sign")
        lz2 = catalog.tower("LZ2")
        x = lz2.gen("x")
        assert extend_to_unit_fraction(sign, x * x * x, x + 1) == sign(lz2.gen_inverse("x") ** 3 * (x + 1))

    def test_rational_function_coefficients(self, catalog, rw1):
        ad = catalog.map("RW1", "ad_xd")
        x = rw1.gen("x")
        assert extend_to_unit_fraction(ad, x + 1, rw1.one()) == ad(rw1.is_unit(x + 1))

    def test_denominator_must_be_unit(self, catalog, a1):
        with pytest.raises(NotAUnit):
            extend_to_unit_fraction(catalog.map("A1", "ad_xd"), a1.gen("x"), a1.one())
