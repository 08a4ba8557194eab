"""
Derivations, automorphisms and anti-automorphisms of towers.

A map is given by the images of the generators and validated on the defining
relations of its tower; that is enough for it to be well defined everywhere.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Mapping, Optional, Sequence, Tuple

try:
    from .errors import (
        ImageNotUnit, InverseMismatch, KindMismatch, MissingImage, NotAUnit, OwnerMismatch, RelationViolation,
    )
    from .tower import Element, ExtensionRule, GeneratorExtension, Tower
except ImportError:
    from errors import (
        ImageNotUnit, InverseMismatch, KindMismatch, MissingImage, NotAUnit, OwnerMismatch, RelationViolation,
    )
    from tower import Element, ExtensionRule, GeneratorExtension, Tower

logger = logging.getLogger(__name__)


class MapKind(Enum):
    DERIVATION = "derivation"
    AUTOMORPHISM = "automorphism"
    ANTI_AUTOMORPHISM = "antiAutomorphism"

    @classmethod
    def parse(cls, value: str) -> "MapKind":
        for kind in cls:
            if kind.value.lower() == value.replace("-", "").replace("_", "").lower():
                return kind
        raise KindMismatch(f"unknown map kind {value!r} (expected derivation, automorphism or antiAutomorphism)")

    @property
    def rule(self) -> ExtensionRule:
        return {
            MapKind.DERIVATION: ExtensionRule.TWISTED,
            MapKind.AUTOMORPHISM: ExtensionRule.HOM,
            MapKind.ANTI_AUTOMORPHISM: ExtensionRule.ANTI,
        }[self]


class LinMap:
    """A validated derivation, automorphism or anti-automorphism of `owner`."""

    def __init__(self, owner: Tower, kind: MapKind, images: Dict[str, Element],
                 inverse_images: Optional[Dict[str, Element]] = None, name: str = ""):
        self.owner = owner
        self.kind = kind
        self.images = images
        self.inverse_images = inverse_images
        self.name = name
        self._ext = GeneratorExtension(owner, owner, images, kind.rule, name=name)
        self._inverse_ext = None
        if inverse_images is not None:
            self._inverse_ext = GeneratorExtension(owner, owner, inverse_images, kind.rule, name=f"{name}^-1")

    @property
    def extension(self) -> GeneratorExtension:
        return self._ext

    def apply(self, a: Element) -> Element:
        return self._ext.apply(a)

    __call__ = apply

    def apply_inverse(self, a: Element) -> Element:
        if self._inverse_ext is None:
            raise InverseMismatch(f"map {self.name or self.kind.value} has no inverse images")
        return self._inverse_ext.apply(a)

    @property
    def has_inverse(self) -> bool:
        return self._inverse_ext is not None

    def describe(self) -> str:
        images = ", ".join(f"{g}->{img.render()}" for g, img in self.images.items())
        return f"{self.name or 'map'} ({self.kind.value}; {images})"

    def __repr__(self) -> str:
        return f"LinMap({self.describe()!r})"


def _coerce_images(owner: Tower, images: Mapping[str, object], what: str) -> Dict[str, Element]:
    missing = [g for g in owner.generator_names if g not in images]
    if missing:
        raise MissingImage(f"{what}: no image for {', '.join(missing)}")
    out = {}
    for g in owner.generator_names:
        image = images[g]
        if not isinstance(image, Element):
            image = owner.base_element(image)
        if image.owner is not owner:
            raise OwnerMismatch(f"{what}: image of {g} belongs to another tower")
        out[g] = image
    return out


def _check_relations(owner: Tower, ext: GeneratorExtension, what: str) -> None:
    for relation in owner.defining_relations():
        lhs, rhs = relation.mapped(ext)
        if lhs != rhs:
            raise RelationViolation(f"{what}({relation.label})", lhs.render(), rhs.render())


def make_map(owner: Tower, kind: MapKind, images: Mapping[str, object],
             inverse_images: Optional[Mapping[str, object]] = None, name: str = "",
             validate: bool = True) -> LinMap:
    """Build a map from generator images and check it on every defining relation."""
    if isinstance(kind, str):
        kind = MapKind.parse(kind)
    label = name or kind.value
    full = _coerce_images(owner, images, label)
    inverse = _coerce_images(owner, inverse_images, f"{label}^-1") if inverse_images is not None else None
    if inverse is not None and kind is MapKind.DERIVATION:
        raise KindMismatch("derivations do not take inverse images")
    linmap = LinMap(owner, kind, full, inverse, name=name)
    if validate:
        _check_relations(owner, linmap.extension, label)
        if linmap._inverse_ext is not None:
            _check_relations(owner, linmap._inverse_ext, f"{label}^-1")
            for g in owner.generator_names:
                x = owner.gen(g)
                there = linmap.apply(linmap.apply_inverse(x))
                back = linmap.apply_inverse(linmap.apply(x))
                if there != x or back != x:
                    bad = there if there != x else back
                    raise InverseMismatch(f"{label}: inverse images do not invert the map on {g} (got {bad.render()})")
        logger.debug(f"Validated {linmap.describe()}")
    return linmap


def apply_map(m: LinMap, a: Element) -> Element:
    if a.owner is not m.owner:
        raise OwnerMismatch(f"map on {m.owner.describe()} applied to an element of {a.owner.describe()}")
    return m.apply(a)


def _same_owner(maps: Sequence[LinMap]) -> Tower:
    owner = maps[0].owner
    for m in maps[1:]:
        if m.owner is not owner:
            raise OwnerMismatch("maps belong to different towers")
    return owner


def bracket(m1: LinMap, m2: LinMap, name: str = "") -> LinMap:
    """[m1, m2] = m1 m2 - m2 m1 for derivations."""
    if m1.kind is not MapKind.DERIVATION or m2.kind is not MapKind.DERIVATION:
        raise KindMismatch("bracket is defined for derivations only")
    owner = _same_owner([m1, m2])
    images = {g: m1(m2(owner.gen(g))) - m2(m1(owner.gen(g))) for g in owner.generator_names}
    return make_map(owner, MapKind.DERIVATION, images, name=name or f"[{m1.name},{m2.name}]")


def compose(m1: LinMap, m2: LinMap, name: str = "") -> LinMap:
    """m1 after m2, for automorphisms."""
    if m1.kind is not MapKind.AUTOMORPHISM or m2.kind is not MapKind.AUTOMORPHISM:
        raise KindMismatch("compose is defined for automorphisms only")
    owner = _same_owner([m1, m2])
    images = {g: m1(m2(owner.gen(g))) for g in owner.generator_names}
    inverse = None
    if m1.has_inverse and m2.has_inverse:
        inverse = {g: m2.apply_inverse(m1.apply_inverse(owner.gen(g))) for g in owner.generator_names}
    return make_map(owner, MapKind.AUTOMORPHISM, images, inverse, name=name or f"{m1.name}*{m2.name}")


@dataclass
class CommutingVerdict:
    commuting: bool
    pair: Optional[Tuple[str, str]] = None
    generator: Optional[str] = None
    lhs: Optional[str] = None
    rhs: Optional[str] = None

    def render(self) -> str:
        if self.commuting:
            return "commuting"
        return (f"not commuting: {self.pair[0]} and {self.pair[1]} differ on {self.generator} "
                f"({self.lhs} != {self.rhs})")


def commuting_check(maps: Sequence[LinMap]) -> CommutingVerdict:
    """Pairwise commutation on generators, with a witness on failure."""
    if not maps:
        return CommutingVerdict(True)
    kinds = {m.kind for m in maps}
    if len(kinds) > 1:
        raise KindMismatch(f"mixed map kinds {sorted(k.value for k in kinds)}")
    owner = _same_owner(maps)
    for i, m1 in enumerate(maps):
        for m2 in maps[i + 1:]:
            for g in owner.generator_names:
                x = owner.gen(g)
                lhs, rhs = m1(m2(x)), m2(m1(x))
                if lhs != rhs:
                    return CommutingVerdict(False, (m1.name or f"map{i}", m2.name or "map"), g,
                                            lhs.render(), rhs.render())
    return CommutingVerdict(True)


def inner_derivation(h: Element, name: str = "") -> LinMap:
    """ad(h): a -> h a - a h."""
    owner = h.owner
    images = {g: h * owner.gen(g) - owner.gen(g) * h for g in owner.generator_names}
    return make_map(owner, MapKind.DERIVATION, images, name=name or f"ad({h.render()})")


def conj_automorphism(u: Element, name: str = "") -> LinMap:
    """a -> u a u^-1, with inverse a -> u^-1 a u."""
    owner = u.owner
    inv = owner.is_unit(u)
    if inv is None:
        raise NotAUnit(f"{u.render()} is not a unit")
    images = {g: u * owner.gen(g) * inv for g in owner.generator_names}
    inverse = {g: inv * owner.gen(g) * u for g in owner.generator_names}
    return make_map(owner, MapKind.AUTOMORPHISM, images, inverse, name=name or f"conj({u.render()})")


def extend_to_unit_fraction(m: LinMap, s: Element, a: Element) -> Element:
    """
    m(s^-1 a) from m(s) and m(a).

    derivation: s^-1 m(a) - s^-1 m(s) s^-1 a
    automorphism: m(s)^-1 m(a)
    anti-automorphism: m(a) m(s)^-1
    """
    owner = m.owner
    if s.owner is not owner or a.owner is not owner:
        raise OwnerMismatch("fraction parts must belong to the map's tower")
    s_inv = owner.is_unit(s)
    if s_inv is None:
        raise NotAUnit(f"{s.render()} is not a unit")
    if m.kind is MapKind.DERIVATION:
        return s_inv * m(a) - s_inv * m(s) * s_inv * a
    image_inv = owner.is_unit(m(s))
    if image_inv is None:
        raise ImageNotUnit(f"{m.name or m.kind.value} sends the unit {s.render()} to {m(s).render()}")
    if m.kind is MapKind.AUTOMORPHISM:
        return image_inv * m(a)
    return m(a) * image_inv


def identity_map(owner: Tower) -> LinMap:
    images = {g: owner.gen(g) for g in owner.generator_names}
    return make_map(owner, MapKind.AUTOMORPHISM, images, images, name="id", validate=False)


def zero_derivation(owner: Tower) -> LinMap:
    images = {g: owner.zero() for g in owner.generator_names}
    return make_map(owner, MapKind.DERIVATION, images, name="0", validate=False)


def transpose_map(owner: Tower, name: str = "transpose") -> LinMap:
    """Anti-automorphism fixing the base and negating every level generator."""
    images = {g: owner.gen(g) for g in owner.base.variable_names}
    images.update({lv: -owner.gen(lv) for lv in owner.level_names})
    return make_map(owner, MapKind.ANTI_AUTOMORPHISM, images, images, name=name)


def negation_map(owner: Tower, name: str = "negation") -> LinMap:
    """Anti-automorphism g -> -g on every generator."""
    images = {g: -owner.gen(g) for g in owner.generator_names}
    return make_map(owner, MapKind.ANTI_AUTOMORPHISM, images, images, name=name)


def is_involution(m: LinMap) -> bool:
    owner = m.owner
    return all(m(m(owner.gen(g))) == owner.gen(g) for g in owner.generator_names)
