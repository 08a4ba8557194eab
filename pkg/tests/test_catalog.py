"""
Tests for the builtin tower catalog.
"""

import pytest
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from catalog import BuiltinCatalog, quantum_torus_spec, weyl_spec
from errors import OreForgeError, SelfTestTooSlow, UnknownName


class TestBuiltinCatalog:
    """Named builtins go through the same validation as spec files."""

    def test_all_builtins_validate(self, catalog):
        assert catalog.self_test() >= 0
        assert catalog.names() == ["A1", "A2", "LW1", "RW1", "QP2", "T2", "S1", "U2", "LZ2", "QW2"]

    def test_self_test_time_bound(self):
        assert BuiltinCatalog().self_test() < 5

    def test_self_test_over_limit(self):
        with pytest.raises(SelfTestTooSlow):
            BuiltinCatalog().self_test(limit=0.0)

    def test_aliases(self, catalog):
        assert catalog.tower("ratweyl") is catalog.tower("RW1")
        assert catalog.tower("usolv2") is catalog.tower("U2")
        assert catalog.resolve("shift_algebra") == "S1"

    def test_loads_are_cached(self, catalog):
        assert catalog.load("A1") is catalog.load("A1")

    def test_parametrized(self, catalog):
        a3 = catalog.tower("weyl(3)")
        assert a3.generator_names == ("x1", "x2", "x3", "d1", "d2", "d3")
        d2, x2, x1 = a3.gen("d2"), a3.gen("x2"), a3.gen("x1")
        assert d2 * x2 == x2 * d2 + 1
        assert d2 * x1 == x1 * d2

    def test_quantum_torus_parameter(self, catalog):
        torus = catalog.tower("quantum_torus(3/2)")
        x, y = torus.gen("x"), torus.gen("y")
        assert 2 * (y * x) == 3 * (x * y)
        assert torus.name == "quantum_torus(3/2)"

    def test_unknown_names(self, catalog):
        for name in ["B7", "weyl(x)", "quantum_plane(0)", "nope(2)"]:
            with pytest.raises(UnknownName):
                catalog.spec(name)

    def test_unknown_map(self, catalog):
        with pytest.raises(UnknownName):
            catalog.map("A1", "missing")

    def test_weighted_families(self, catalog):
        for tower_name, maps in catalog.weighted():
            for map_name in maps:
                assert catalog.map(tower_name, map_name).owner is catalog.tower(tower_name)


class TestSpecBuilders:
    """The spec dictionaries behind the builtins."""

    def test_weyl_spec(self):
        spec = weyl_spec(2)
        assert spec["name"] == "A2"
        assert [level["name"] for level in spec["levels"]] == ["d1", "d2"]
        assert "ad_xd" not in spec["maps"]

    def test_weyl_needs_positive_n(self):
        with pytest.raises(OreForgeError):
            weyl_spec(0)

    def test_quantum_torus_needs_nonzero_q(self):
        with pytest.raises(OreForgeError):
            quantum_torus_spec(0)

    def test_fresh_catalog_is_independent(self, catalog):
        other = BuiltinCatalog()
        assert other.tower("A1") is not catalog.tower("A1")
        assert other.tower("A1").same_structure(catalog.tower("A1"))
