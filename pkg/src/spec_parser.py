"""
Element literals and tower/map spec files.

Element literals use the canonical rendering: generator symbols, `*` between
factors, `^` with an optional minus sign for exponents, `/` for division by a
unit. Spec files are JSON documents:

    {"name": "A1",
     "base": {"vars": [{"name": "x", "laurent": false}]},
     "levels": [{"name": "d", "invertible": false,
                 "sigma": {"x": "x"}, "delta": {"x": "1"}}],
     "maps": {"weyl_transpose": {"kind": "antiAutomorphism",
                                 "images": {"x": "x", "d": "-d"}}}}

A rational-function base is written {"ratfun": "x"}.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

try:
    from .endo import LinMap, MapKind, make_map
    from .errors import NotAUnit, OreForgeError, ParseError
    from .exact import BaseAlgebra, Variable
    from .tower import Element, Tower, render_element  # noqa: F401
except ImportError:
    from endo import LinMap, MapKind, make_map
    from errors import NotAUnit, OreForgeError, ParseError
    from exact import BaseAlgebra, Variable
    from tower import Element, Tower, render_element  # noqa: F401

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_TOKEN_RE = re.compile(r"(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*/^()])")


@dataclass
class _Token:
    kind: str
    text: str
    column: int


def _tokenize(text: str, line: int = 1) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line=line, column=pos + 1)
        tokens.append(_Token(match.lastgroup, match.group(), pos + 1))
        pos = match.end()
    tokens.append(_Token("end", "", len(text) + 1))
    return tokens


class ElementParser:
    """Recursive descent parser for element literals of one tower."""

    def __init__(self, tower: Tower, line: int = 1):
        self.tower = tower
        self.line = line
        self.tokens: List[_Token] = []
        self.pos = 0

    def parse(self, text: str) -> Element:
        self.tokens = _tokenize(text, self.line)
        self.pos = 0
        if self._peek().kind == "end":
            raise self._error("empty element literal")
        value = self._expr()
        if self._peek().kind != "end":
            raise self._error(f"unexpected {self._peek().text!r}")
        return value

    def _peek(self) -> _Token:
        return self.tokens[self.pos]

    def _take(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _accept(self, op: str) -> bool:
        token = self._peek()
        if token.kind == "op" and token.text == op:
            self.pos += 1
            return True
        return False

    def _error(self, message: str, token: Optional[_Token] = None) -> ParseError:
        token = token or self._peek()
        return ParseError(message, line=self.line, column=token.column)

    def _expr(self) -> Element:
        negate = False
        if self._accept("-"):
            negate = True
        else:
            self._accept("+")
        value = self._term()
        if negate:
            value = -value
        while True:
            if self._accept("+"):
                value = value + self._term()
            elif self._accept("-"):
                value = value - self._term()
            else:
                return value

    def _term(self) -> Element:
        value = self._power()
        while True:
            if self._accept("*"):
                value = value * self._power()
            elif self._peek().kind == "op" and self._peek().text == "/":
                token = self._take()
                divisor = self._power()
                inverse = self.tower.is_unit(divisor)
                if inverse is None:
                    raise self._error(f"division by {divisor.render()}, which is not a unit", token)
                value = value * inverse
            else:
                return value

    def _power(self) -> Element:
        base = self._atom()
        if not self._accept("^"):
            return base
        token = self._peek()
        sign = -1 if self._accept("-") else 1
        exponent = self._take()
        if exponent.kind != "int":
            raise self._error("expected an integer exponent", exponent)
        try:
            return base ** (sign * int(exponent.text))
        except NotAUnit as e:
            raise self._error(str(e), token)

    def _atom(self) -> Element:
        token = self._take()
        if token.kind == "int":
            return self.tower.scalar(int(token.text))
        if token.kind == "name":
            if token.text not in self.tower.generator_names:
                raise self._error(f"unknown generator {token.text!r}", token)
            return self.tower.gen(token.text)
        if token.kind == "op" and token.text == "(":
            value = self._expr()
            if not self._accept(")"):
                raise self._error("expected ')'")
            return value
        if token.kind == "end":
            raise self._error("unexpected end of input", token)
        raise self._error(f"unexpected {token.text!r}", token)


def parse_element(tower: Tower, text: str) -> Element:
    return ElementParser(tower).parse(str(text))


@dataclass
class TowerSpec:
    """A parsed spec file: the tower and the maps declared alongside it."""
    name: str
    tower: Tower
    maps: Dict[str, LinMap] = field(default_factory=dict)


def _parse_images(tower: Tower, images: Mapping[str, Any], where: str) -> Dict[str, Element]:
    if not isinstance(images, Mapping):
        raise ParseError(f"{where}: expected an object of generator images")
    out = {}
    for g, text in images.items():
        try:
            out[g] = parse_element(tower, text)
        except ParseError as e:
            raise ParseError(f"{where}.{g}: {e.message}", line=e.line, column=e.column)
    return out


def _parse_base(spec: Mapping[str, Any]) -> BaseAlgebra:
    base = spec.get("base", {})
    if not isinstance(base, Mapping):
        raise ParseError("base: expected an object")
    if "ratfun" in base:
        return BaseAlgebra.ratfun(str(base["ratfun"]))
    variables = []
    for entry in base.get("vars", []):
        if isinstance(entry, str):
            variables.append(Variable(entry))
        elif isinstance(entry, Mapping) and "name" in entry:
            variables.append(Variable(str(entry["name"]), bool(entry.get("laurent", False))))
        else:
            raise ParseError(f"base.vars: cannot read {entry!r}")
    return BaseAlgebra.polynomials(variables) if variables else BaseAlgebra.rationals()


def spec_to_tower(spec: Mapping[str, Any], validate: bool = True) -> TowerSpec:
    """Build and validate the tower (and maps) described by a spec document."""
    if not isinstance(spec, Mapping):
        raise ParseError("spec: expected a JSON object")
    if spec.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise ParseError(f"schema: unsupported version {spec['schema']!r}; expected {SCHEMA_VERSION}")
    name = str(spec.get("name", ""))
    tower = Tower(_parse_base(spec), name=name, noetherian_assumed=bool(spec.get("noetherian_assumed", False)))
    for k, level in enumerate(spec.get("levels", [])):
        where = f"levels[{k}]"
        if not isinstance(level, Mapping) or "name" not in level:
            raise ParseError(f"{where}: a level needs a name")
        sigma = _parse_images(tower, level.get("sigma", {}), f"{where}.sigma")
        delta = _parse_images(tower, level.get("delta", {}), f"{where}.delta")
        inverse = None
        if "sigma_inverse" in level:
            inverse = _parse_images(tower, level["sigma_inverse"], f"{where}.sigma_inverse")
        tower = tower.extend(str(level["name"]), bool(level.get("invertible", False)), sigma, delta or None,
                             inverse, validate=validate)
    maps: Dict[str, LinMap] = {}
    for map_name, entry in spec.get("maps", {}).items():
        where = f"maps.{map_name}"
        if not isinstance(entry, Mapping) or "kind" not in entry:
            raise ParseError(f"{where}: a map needs a kind")
        images = _parse_images(tower, entry.get("images", {}), f"{where}.images")
        inverse = None
        if "inverse_images" in entry:
            inverse = _parse_images(tower, entry["inverse_images"], f"{where}.inverse_images")
        maps[map_name] = make_map(tower, MapKind.parse(str(entry["kind"])), images, inverse, name=map_name,
                                  validate=validate)
    logger.info(f"Loaded spec {name or '(unnamed)'}: {tower.describe()} with {len(maps)} maps")
    return TowerSpec(name, tower, maps)


def _images_text(images: Optional[Mapping[str, Element]], skip) -> Dict[str, str]:
    if images is None:
        return {}
    return {g: img.render() for g, img in images.items() if not skip(g, img)}


def tower_to_spec(tower: Tower, maps: Optional[Mapping[str, LinMap]] = None) -> Dict[str, Any]:
    """Spec document of a tower; identity sigma images and zero delta images are left out."""
    base = tower.base
    if base.kind == BaseAlgebra.RATFUN:
        base_spec: Dict[str, Any] = {"ratfun": base.variable_names[0]}
    else:
        base_spec = {"vars": [{"name": v.name, "laurent": v.laurent} for v in base.variables]}
    levels = []
    for level in tower.levels:
        lower = level.parent
        entry: Dict[str, Any] = {"name": level.name, "invertible": level.invertible}
        entry["sigma"] = _images_text(level.sigma_images, lambda g, img: img == lower.gen(g))
        if level.sigma_inverse_images is not None and not level.sigma_is_identity():
            entry["sigma_inverse"] = _images_text(level.sigma_inverse_images, lambda g, img: img == lower.gen(g))
        entry["delta"] = _images_text(level.delta_images, lambda g, img: img.is_zero())
        levels.append(entry)
    spec: Dict[str, Any] = {"schema": SCHEMA_VERSION, "name": tower.name, "base": base_spec, "levels": levels}
    if maps:
        spec["maps"] = {}
        for map_name, m in maps.items():
            entry = {"kind": m.kind.value, "images": _images_text(m.images, lambda g, img: False)}
            if m.inverse_images is not None:
                entry["inverse_images"] = _images_text(m.inverse_images, lambda g, img: False)
            spec["maps"][map_name] = entry
    return spec


def loads_spec(text: str, validate: bool = True) -> TowerSpec:
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno, column=e.colno)
    return spec_to_tower(spec, validate=validate)


def import_spec(filename: str, validate: bool = True) -> TowerSpec:
    """Read a spec file from disk."""
    try:
        text = Path(filename).read_text()
    except OSError as e:
        raise ParseError(f"cannot read {filename}: {e.strerror}")
    try:
        loaded = loads_spec(text, validate=validate)
    except OreForgeError as e:
        logger.error(f"Failed to import spec {filename}: {e}")
        raise
    logger.info(f"Imported spec from {filename}")
    return loaded


def export_spec(tower: Tower, filename: str, maps: Optional[Mapping[str, LinMap]] = None) -> Dict[str, Any]:
    spec = tower_to_spec(tower, maps)
    Path(filename).parent.mkdir(parents=True, exist_ok=True)
    with open(filename, "w") as f:
        json.dump(spec, f, indent=2, ensure_ascii=False)
        f.write("\n")
    logger.info(f"Exported spec of {tower.describe()} to {filename}")
    return spec


def dumps_spec(tower: Tower, maps: Optional[Mapping[str, LinMap]] = None) -> str:
    return json.dumps(tower_to_spec(tower, maps), indent=2, ensure_ascii=False)

