"""
Built-in example towers and their standard map sets.

Every builtin is written as a spec document and goes through the same parser
and validation as user spec files.
"""

import logging
import re
import time
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

try:
    from .errors import OreForgeError, SelfTestTooSlow, UnknownName
    from .exact import render_rational, to_rational
    from .spec_parser import TowerSpec, spec_to_tower
except ImportError:
    from errors import OreForgeError, SelfTestTooSlow, UnknownName
    from exact import render_rational, to_rational
    from spec_parser import TowerSpec, spec_to_tower

logger = logging.getLogger(__name__)

# seconds allowed for loading and validating every fixed builtin
SELF_TEST_LIMIT = 5.0

_CALL_RE = re.compile(r"^\s*([a-z_]+)\s*\(\s*([^)]*)\s*\)\s*$")


def _nonzero_q(q: Any) -> Fraction:
    value = to_rational(q)
    if value == 0:
        raise OreForgeError("q must be a nonzero rational")
    return value


def weyl_spec(n: int = 1, name: Optional[str] = None) -> Dict[str, Any]:
    """A_n: Q[x_1..x_n][d_1; d/dx_1]...[d_n; d/dx_n]."""
    if n < 1:
        raise OreForgeError("weyl(n) needs n >= 1")
    xs = ["x"] if n == 1 else [f"x{i}" for i in range(1, n + 1)]
    ds = ["d"] if n == 1 else [f"d{i}" for i in range(1, n + 1)]
    transpose = {x: x for x in xs}
    transpose.update({d: f"-{d}" for d in ds})
    spec = {
        "name": name or f"A{n}",
        "base": {"vars": [{"name": x, "laurent": False} for x in xs]},
        "levels": [{"name": d, "invertible": False, "delta": {x: "1"}} for x, d in zip(xs, ds)],
        "maps": {
            "weyl_transpose": {"kind": "antiAutomorphism", "images": transpose, "inverse_images": transpose},
        },
    }
    if n == 1:
        spec["maps"]["ad_xd"] = {"kind": "derivation", "images": {"x": "x", "d": "-d"}}
    return spec


def laurent_weyl_spec() -> Dict[str, Any]:
    """Q[x^±1][d; d/dx]."""
    transpose = {"x": "x", "d": "-d"}
    return {
        "name": "LW1",
        "base": {"vars": [{"name": "x", "laurent": True}]},
        "levels": [{"name": "d", "invertible": False, "delta": {"x": "1"}}],
        "maps": {
            "ad_xd": {"kind": "derivation", "images": {"x": "x", "d": "-d"}},
            "weyl_transpose": {"kind": "antiAutomorphism", "images": transpose, "inverse_images": transpose},
        },
    }


def ratweyl_spec() -> Dict[str, Any]:
    """Q(x)[d; d/dx]."""
    transpose = {"x": "x", "d": "-d"}
    return {
        "name": "RW1",
        "base": {"ratfun": "x"},
        "levels": [{"name": "d", "invertible": False, "delta": {"x": "1"}}],
        "maps": {
            "ad_xd": {"kind": "derivation", "images": {"x": "x", "d": "-d"}},
            "weyl_transpose": {"kind": "antiAutomorphism", "images": transpose, "inverse_images": transpose},
        },
    }


def quantum_plane_spec(q: Any = 2, name: Optional[str] = None) -> Dict[str, Any]:
    """Q[x][y; y x = q x y]."""
    q = _nonzero_q(q)
    qs, inv = render_rational(q), render_rational(1 / q)
    return {
        "name": name or f"quantum_plane({qs})",
        "base": {"vars": [{"name": "x", "laurent": False}]},
        "levels": [{"name": "y", "invertible": False, "sigma": {"x": f"({qs})*x"},
                    "sigma_inverse": {"x": f"({inv})*x"}}],
        "maps": {
            "scale_x": {"kind": "automorphism", "images": {"x": "2*x", "y": "y"},
                        "inverse_images": {"x": "1/2*x", "y": "y"}},
            "scale_y": {"kind": "automorphism", "images": {"x": "x", "y": "3*y"},
                        "inverse_images": {"x": "x", "y": "1/3*y"}},
        },
    }


def quantum_torus_spec(q: Any = 2, name: Optional[str] = None) -> Dict[str, Any]:
    """Q[x^±1][y^±1; y x = q x y]."""
    q = _nonzero_q(q)
    qs, inv = render_rational(q), render_rational(1 / q)
    return {
        "name": name or f"quantum_torus({qs})",
        "base": {"vars": [{"name": "x", "laurent": True}]},
        "levels": [{"name": "y", "invertible": True, "sigma": {"x": f"({qs})*x"},
                    "sigma_inverse": {"x": f"({inv})*x"}}],
        "maps": {
            "conj_x": {"kind": "automorphism", "images": {"x": "x", "y": f"({inv})*y"},
                       "inverse_images": {"x": "x", "y": f"({qs})*y"}},
            "conj_y": {"kind": "automorphism", "images": {"x": f"({qs})*x", "y": "y"},
                       "inverse_images": {"x": f"({inv})*x", "y": "y"}},
        },
    }


def shift_spec() -> Dict[str, Any]:
    """Q[n][E; sigma(n) = n + 1]."""
    return {
        "name": "S1",
        "base": {"vars": [{"name": "n", "laurent": False}]},
        "levels": [{"name": "E", "invertible": False, "sigma": {"n": "n + 1"}, "sigma_inverse": {"n": "n - 1"}}],
        "maps": {},
    }


def usolv2_spec() -> Dict[str, Any]:
    """Enveloping algebra of [h, e] = e as Q[e][h; e d/de]."""
    negation = {"e": "-e", "h": "-h"}
    return {
        "name": "U2",
        "base": {"vars": [{"name": "e", "laurent": False}]},
        "levels": [{"name": "h", "invertible": False, "delta": {"e": "e"}}],
        "maps": {
            "negation": {"kind": "antiAutomorphism", "images": negation, "inverse_images": negation},
            "ad_h": {"kind": "derivation", "images": {"e": "e", "h": "0"}},
        },
    }


def laurent_sign_spec() -> Dict[str, Any]:
    """Q[x^±1] with the sign automorphism x -> -x."""
    return {
        "name": "LZ2",
        "base": {"vars": [{"name": "x", "laurent": True}]},
        "levels": [],
        "maps": {
            "sign": {"kind": "automorphism", "images": {"x": "-x"}, "inverse_images": {"x": "-x"}},
        },
    }


def quantum_weyl_spec() -> Dict[str, Any]:
    """Q[x][d; sigma(x) = 2x, delta(x) = 1]."""
    return {
        "name": "QW2",
        "base": {"vars": [{"name": "x", "laurent": False}]},
        "levels": [{"name": "d", "invertible": False, "sigma": {"x": "2*x"}, "sigma_inverse": {"x": "1/2*x"},
                    "delta": {"x": "1"}}],
        "maps": {},
    }


class BuiltinCatalog:
    """Named builtin towers; parametrized ones are written like weyl(3) or quantum_torus(3/2)."""

    FIXED: Dict[str, Callable[[], Dict[str, Any]]] = {
        "A1": lambda: weyl_spec(1),
        "A2": lambda: weyl_spec(2),
        "LW1": laurent_weyl_spec,
        "RW1": ratweyl_spec,
        "QP2": lambda: quantum_plane_spec(2, name="QP2"),
        "T2": lambda: quantum_torus_spec(2, name="T2"),
        "S1": shift_spec,
        "U2": usolv2_spec,
        "LZ2": laurent_sign_spec,
        "QW2": quantum_weyl_spec,
    }
    ALIASES = {"ratweyl": "RW1", "laurent_weyl": "LW1", "shift_algebra": "S1", "usolv2": "U2"}
    PARAMETRIZED: Dict[str, Callable[[str], Dict[str, Any]]] = {
        "weyl": lambda arg: weyl_spec(int(arg)),
        "quantum_plane": lambda arg: quantum_plane_spec(arg),
        "quantum_torus": lambda arg: quantum_torus_spec(arg),
    }
    # commuting diagonal map sets used for weight computations
    WEIGHTED: Dict[str, List[str]] = {
        "A1": ["ad_xd"],
        "LW1": ["ad_xd"],
        "T2": ["conj_x", "conj_y"],
        "LZ2": ["sign"],
        "U2": ["ad_h"],
    }
    # towers whose opposite and tensor square are exercised by the property suites
    OPPOSITE_SUITE = ["A1", "A2", "LW1", "RW1", "QP2", "T2", "S1", "U2", "QW2"]

    def __init__(self):
        self._loaded: Dict[str, TowerSpec] = {}

    def names(self) -> List[str]:
        return list(self.FIXED)

    def resolve(self, name: str) -> str:
        return self.ALIASES.get(name, name)

    def spec(self, name: str) -> Dict[str, Any]:
        name = self.resolve(name)
        if name in self.FIXED:
            return self.FIXED[name]()
        match = _CALL_RE.match(name)
        if match and match.group(1) in self.PARAMETRIZED:
            try:
                return self.PARAMETRIZED[match.group(1)](match.group(2))
            except (ValueError, ZeroDivisionError) as e:
                raise UnknownName(f"bad builtin parameter in {name!r}: {e}")
        raise UnknownName(f"unknown builtin {name!r}; known: {', '.join(self.names())}")

    def load(self, name: str) -> TowerSpec:
        key = self.resolve(name)
        if key not in self._loaded:
            self._loaded[key] = spec_to_tower(self.spec(key))
        return self._loaded[key]

    def tower(self, name: str):
        return self.load(name).tower

    def map(self, tower_name: str, map_name: str):
        loaded = self.load(tower_name)
        if map_name not in loaded.maps:
            raise UnknownName(f"builtin {tower_name} has no map {map_name!r}")
        return loaded.maps[map_name]

    def weighted(self) -> List[Tuple[str, List[str]]]:
        return list(self.WEIGHTED.items())

    def self_test(self, limit: Optional[float] = None) -> float:
        """Load and validate every fixed builtin; returns the elapsed seconds."""
        limit = SELF_TEST_LIMIT if limit is None else limit
        start = time.perf_counter()
        for name in self.names():
            loaded = self.load(name)
            loaded.tower.validate()
        elapsed = time.perf_counter() - start
        if elapsed >= limit:
            raise SelfTestTooSlow(f"builtin self-test took {elapsed:.2f}s, limit is {limit:.2f}s")
        logger.info(f"Builtin self-test passed for {len(self.names())} towers in {elapsed:.2f}s")
        return elapsed
