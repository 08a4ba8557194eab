"""
Iterated Ore / skew Laurent extension towers.

A tower is a commutative base algebra followed by ordered levels x_1, ..., x_n.
Level j carries an automorphism sigma_j and a sigma_j-derivation delta_j of the
sub-tower below it, subject to x_j a = sigma_j(a) x_j + delta_j(a). Invertible
levels have delta_j = 0 and x_j^-1 a = sigma_j^-1(a) x_j^-1.

Elements are kept in normal form: base coefficient on the left, generators in
tower order. Products are computed by left-multiplying by one generator at a
time, which only needs sigma_j and delta_j on monomials of the sub-tower.
"""

import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

try:
    from .errors import (
        DuplicateName, LaurentWithDelta, MissingImage, MissingInverse, NotAUnit,
        OreForgeError, OwnerMismatch, RelationViolation, UnknownVariable, UnsupportedBase,
    )
    from .exact import (
        BaseAlgebra, BasePoly, BaseRatFun, Variable, render_rational, render_terms,
    )
except ImportError:
    from errors import (
        DuplicateName, LaurentWithDelta, MissingImage, MissingInverse, NotAUnit,
        OreForgeError, OwnerMismatch, RelationViolation, UnknownVariable, UnsupportedBase,
    )
    from exact import (
        BaseAlgebra, BasePoly, BaseRatFun, Variable, render_rational, render_terms,
    )

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]
RawTerms = Dict[Exponents, Any]

# Per-tower and per-map memo tables are bounded LRU caches
MAX_CACHE_SIZE = 20000


def _accumulate(out: RawTerms, exps: Exponents, coef: Any) -> None:
    if exps in out:
        total = out[exps] + coef
        if total:
            out[exps] = total
        else:
            del out[exps]
    elif coef:
        out[exps] = coef


class _LRUCache:
    """Small OrderedDict-backed LRU cache, safe to share between threads."""

    def __init__(self, max_size: int = MAX_CACHE_SIZE):
        self.max_size = max_size
        self._data: "OrderedDict[Any, Any]" = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key: Any) -> Any:
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                self.hits += 1
                return self._data[key]
            self.misses += 1
            return None

    def put(self, key: Any, value: Any) -> None:
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            if len(self._data) > self.max_size:
                self._data.popitem(last=False)

    def __len__(self) -> int:
        return len(self._data)


class Element:
    """A normal-form element sum(c * x_1^e_1 ... x_n^e_n) of a tower."""

    __slots__ = ("owner", "_terms", "_hash")

    def __init__(self, owner: "Tower", terms: Optional[Mapping[Exponents, Any]] = None):
        self.owner = owner
        n = len(owner.levels)
        clean: RawTerms = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise OreForgeError(f"exponent vector {exps} does not match {n} levels")
            for level, e in zip(owner.levels, exps):
                if e < 0 and not level.invertible:
                    raise OreForgeError(f"negative exponent on non-invertible level {level.name}")
            _accumulate(clean, exps, owner.base.coerce(coef))
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, owner: "Tower", terms: RawTerms) -> "Element":
        obj = cls.__new__(cls)
        obj.owner = owner
        obj._terms = terms
        obj._hash = None
        return obj

    @property
    def terms(self) -> Dict[Exponents, Any]:
        return dict(self._terms)

    def items(self) -> List[Tuple[Exponents, Any]]:
        return sorted(self._terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_base(self) -> bool:
        """True when no tower generator occurs."""
        zero = (0,) * len(self.owner.levels)
        return all(exps == zero for exps in self._terms)

    def base_value(self) -> Any:
        """The coefficient of the empty generator monomial."""
        return self._terms.get((0,) * len(self.owner.levels), self.owner.base.zero())

    def is_scalar(self) -> bool:
        return self.is_base() and self.owner.base.is_scalar(self.base_value())

    def scalar_value(self) -> Fraction:
        return self.owner.base.scalar_value(self.base_value())

    def generator_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(abs(e) for e in exps) for exps in self._terms)

    def monomials(self) -> List["Element"]:
        return [Element._raw(self.owner, {exps: c}) for exps, c in self.items()]

    # arithmetic

    def _check_owner(self, other: "Element") -> None:
        if other.owner is not self.owner:
            raise OwnerMismatch(
                f"elements of different towers ({self.owner.describe()} vs {other.owner.describe()})"
            )

    def _lift_operand(self, other: Any) -> Any:
        if isinstance(other, Element):
            self._check_owner(other)
            return other
        if isinstance(other, (int, Fraction, BasePoly, BaseRatFun)) and not isinstance(other, bool):
            return self.owner.base_element(other)
        return NotImplemented

    def __add__(self, other: Any) -> "Element":
        other = self._lift_operand(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for exps, c in other._terms.items():
            _accumulate(out, exps, c)
        return Element._raw(self.owner, out)

    __radd__ = __add__

    def __neg__(self) -> "Element":
        return Element._raw(self.owner, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: Any) -> "Element":
        other = self._lift_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> "Element":
        other = self._lift_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def scale(self, q: Any) -> "Element":
        """Left multiplication by a base element."""
        q = self.owner.base.coerce(q)
        if not q:
            return self.owner.zero()
        out: RawTerms = {}
        for e, c in self._terms.items():
            _accumulate(out, e, q * c)
        return Element._raw(self.owner, out)

    def __mul__(self, other: Any) -> "Element":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._lift_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return self.owner.mul(self, other)

    def __rmul__(self, other: Any) -> "Element":
        if isinstance(other, (int, Fraction, BasePoly, BaseRatFun)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "Element":
        if k < 0:
            inv = self.owner.is_unit(self)
            if inv is None:
                raise NotAUnit(f"{self.render()} is not a unit")
            return inv ** (-k)
        result = self.owner.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, Element):
            return self.owner is other.owner and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_scalar() and self.scalar_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((id(self.owner), frozenset(self._terms.items())))
        return self._hash

    def render(self) -> str:
        return render_element(self)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Element({self.render()!r})"


def _monomial_text(names: Sequence[str], exps: Sequence[int]) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 0:
            continue
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def render_element(a: Element) -> str:
    """Canonical text: base monomials flattened into the generator monomials."""
    tower = a.owner
    base_names = tower.base.variable_names
    level_names = tower.level_names
    pieces: List[Tuple[Tuple, Fraction, str]] = []
    for exps, c in a._terms.items():
        gens = _monomial_text(level_names, exps)
        if isinstance(c, BaseRatFun) and not c.is_polynomial():
            q, text = _ratfun_piece(c)
            if gens:
                text = f"{text}*{gens}"
            shift = c.num.degree() - c.den.degree()
            pieces.append(((shift + sum(exps), (shift,) + exps, text), q, text))
            continue
        if isinstance(c, Fraction):
            monomials = [((), c)]
        elif isinstance(c, BaseRatFun):
            monomials = c.num.items()
        else:
            monomials = c.items()
        for bexps, q in monomials:
            mono = "*".join(p for p in (_monomial_text(base_names, bexps), gens) if p)
            full = tuple(bexps) + exps
            pieces.append(((sum(full), full, mono), q, mono))
    pieces.sort(key=lambda p: p[0], reverse=True)
    return render_terms([(q, text) for _, q, text in pieces])


def _ratfun_piece(c: BaseRatFun) -> Tuple[Fraction, str]:
    den = c.den.render()
    if len(c.den.terms) > 1:
        den = f"({den})"
    if c.num.is_monomial():
        (bexps, q), = c.num.items()
        mono = _monomial_text(c.names, bexps)
        if not mono:
            sign = Fraction(-1) if q < 0 else Fraction(1)
            return sign, f"{render_rational(abs(q))}/{den}"
        return q, f"{mono}/{den}"
    return Fraction(1), f"({c.num.render()})/{den}"


class ExtensionRule(Enum):
    """How a map given on generators extends to products."""
    HOM = "hom"
    ANTI = "anti"
    TWISTED = "twisted"


class GeneratorExtension:
    """
    Extension of generator images to a whole tower.

    HOM: f(ab) = f(a)f(b). ANTI: f(ab) = f(b)f(a). TWISTED: f(ab) = f(a)b + t(a)f(b)
    where t is the twist (a HOM extension on the same tower) or the identity.
    """

    def __init__(self, source: "Tower", target: "Tower", images: Mapping[str, Element],
                 rule: ExtensionRule, twist: Optional["GeneratorExtension"] = None, name: str = ""):
        self.source = source
        self.target = target
        self.rule = rule
        self.twist = twist
        self.name = name
        if rule is ExtensionRule.TWISTED and target is not source:
            raise OwnerMismatch("twisted derivations act within one tower")
        self.images: Dict[str, Element] = {}
        for gen in source.generator_names:
            if gen not in images:
                raise MissingImage(f"no image for generator {gen!r}{self._label()}")
            image = images[gen]
            if image.owner is not target:
                raise OwnerMismatch(f"image of {gen!r} does not live in {target.describe()}{self._label()}")
            self.images[gen] = image
        extra = set(images) - set(source.generator_names)
        if extra:
            raise UnknownVariable(f"images given for unknown generators {sorted(extra)}{self._label()}")
        self._cache = _LRUCache()

    def _label(self) -> str:
        return f" in {self.name}" if self.name else ""

    def image(self, gen: str) -> Element:
        return self.images[gen]

    def is_identity(self) -> bool:
        return self.source is self.target and all(
            img == self.source.gen(g) for g, img in self.images.items()
        )

    def is_zero(self) -> bool:
        return all(img.is_zero() for img in self.images.values())

    # atoms: a generator or the inverse of one

    def _atom_source(self, gen: str, sign: int) -> Element:
        element = self.source.gen(gen)
        if sign > 0:
            return element
        return self.source.gen_inverse(gen)

    def _image_power(self, gen: str, k: int) -> Element:
        key = ("pow", gen, k)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        image = self.images[gen]
        if k < 0:
            inv = self.target.is_unit(image)
            if inv is None:
                raise NotAUnit(f"image {image.render()} of {gen} must be a unit{self._label()}")
            result = inv ** (-k)
        else:
            result = image ** k
        self._cache.put(key, result)
        return result

    def _tau(self, a: Element) -> Element:
        return a if self.twist is None else self.twist.apply(a)

    def _tau_atom(self, gen: str, sign: int) -> Element:
        if self.twist is None:
            return self._atom_source(gen, sign)
        return self.twist._image_power(gen, sign)

    def _delta_atom(self, gen: str, sign: int) -> Element:
        if sign > 0:
            return self.images[gen]
        # d(g^-1) = -t(g)^-1 d(g) g^-1
        return -(self._tau_atom(gen, -1) * self.images[gen] * self.source.gen_inverse(gen))

    def _word(self, atoms: Sequence[Tuple[str, int]]) -> Element:
        """Image of the product of atoms (generator, +-1) under the rule."""
        if self.rule is ExtensionRule.TWISTED:
            derived = self.target.zero()
            twisted = self.target.one()
            for gen, sign in atoms:
                derived = derived * self._atom_source(gen, sign) + twisted * self._delta_atom(gen, sign)
                twisted = twisted * self._tau_atom(gen, sign)
            return derived
        result = self.target.one()
        # group consecutive equal atoms into powers
        runs: List[Tuple[str, int]] = []
        for gen, sign in atoms:
            if runs and runs[-1][0] == gen and (runs[-1][1] > 0) == (sign > 0):
                runs[-1] = (gen, runs[-1][1] + sign)
            else:
                runs.append((gen, sign))
        if self.rule is ExtensionRule.ANTI:
            runs.reverse()
        for gen, k in runs:
            result = result * self._image_power(gen, k)
        return result

    @staticmethod
    def _atoms(names: Sequence[str], exps: Sequence[int]) -> List[Tuple[str, int]]:
        atoms = []
        for name, e in zip(names, exps):
            sign = 1 if e > 0 else -1
            atoms.extend([(name, sign)] * abs(e))
        return atoms

    def _base_poly_image(self, poly: BasePoly) -> Element:
        total = self.target.zero()
        for bexps, q in poly.items():
            key = ("base", poly.names, bexps)
            image = self._cache.get(key)
            if image is None:
                image = self._word(self._atoms(poly.names, bexps))
                self._cache.put(key, image)
            total = total + image.scale(q)
        return total

    def _base_image(self, c: Any) -> Element:
        key = ("coef", c)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        if isinstance(c, Fraction):
            result = self.target.zero() if self.rule is ExtensionRule.TWISTED else self.target.scalar(c)
        elif isinstance(c, BaseRatFun):
            result = self._ratfun_image(c)
        else:
            result = self._base_poly_image(c)
        self._cache.put(key, result)
        return result

    def _ratfun_image(self, c: BaseRatFun) -> Element:
        num = self._base_poly_image(c.num)
        den = self._base_poly_image(c.den)
        if self.rule is ExtensionRule.TWISTED:
            if c.is_polynomial():
                return num.scale(1 / c.den.constant_value())
            # p = q*c  =>  d(c) = t(q)^-1 (d(p) - d(q) c)
            tq = self._tau(self.source.base_element(BaseRatFun(c.variable, c.den)))
            inv = self.target.is_unit(tq)
            if inv is None:
                raise NotAUnit(f"twist of {c.den.render()} is not a unit{self._label()}")
            return inv * (num - den * self.source.base_element(c))
        inv = self.target.is_unit(den)
        if inv is None:
            raise NotAUnit(f"image of denominator {c.den.render()} is not a unit{self._label()}")
        return inv * num if self.rule is ExtensionRule.HOM else num * inv

    def _generator_image(self, exps: Exponents) -> Element:
        key = ("gens", exps)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        result = self._word(self._atoms(self.source.level_names, exps))
        self._cache.put(key, result)
        return result

    def apply(self, a: Element) -> Element:
        if a.owner is not self.source:
            raise OwnerMismatch(f"element of {a.owner.describe()} given to a map on {self.source.describe()}")
        total = self.target.zero()
        for exps, c in a._terms.items():
            if self.rule is ExtensionRule.HOM:
                term = self._base_image(c) * self._generator_image(exps)
            elif self.rule is ExtensionRule.ANTI:
                term = self._generator_image(exps) * self._base_image(c)
            else:
                mono = Element._raw(self.source, {exps: self.source.base.one()})
                term = self._base_image(c) * mono
                if any(exps):
                    term = term + self._tau(self.source.base_element(c)) * self._generator_image(exps)
            total = total + term
        return total

    __call__ = apply

    def apply_word(self, factors: Sequence[Element]) -> Element:
        """Image of the product of arbitrary source elements, using the product rule."""
        if self.rule is ExtensionRule.TWISTED:
            derived = self.target.zero()
            twisted = self.target.one()
            for f in factors:
                derived = derived * f + twisted * self.apply(f)
                twisted = twisted * self._tau(f)
            return derived
        images = [self.apply(f) for f in factors]
        if self.rule is ExtensionRule.ANTI:
            images.reverse()
        result = self.target.one()
        for image in images:
            result = result * image
        return result

    def cache_stats(self) -> Dict[str, int]:
        return {"size": len(self._cache), "hits": self._cache.hits, "misses": self._cache.misses}


@dataclass
class Relation:
    """A defining relation sum(q * word) = sum(q * word) over tower elements."""
    label: str
    lhs: List[Tuple[Fraction, List[Element]]]
    rhs: List[Tuple[Fraction, List[Element]]]

    @staticmethod
    def _evaluate(side: List[Tuple[Fraction, List[Element]]], ext: GeneratorExtension) -> Element:
        total = ext.target.zero()
        for q, word in side:
            total = total + ext.apply_word(word).scale(q)
        return total

    def mapped(self, ext: GeneratorExtension) -> Tuple[Element, Element]:
        return self._evaluate(self.lhs, ext), self._evaluate(self.rhs, ext)


@dataclass(eq=False)
class Level:
    """One extension step x; sigma, delta over the tower `parent`."""
    name: str
    invertible: bool
    parent: "Tower"
    sigma_images: Dict[str, Element]
    delta_images: Dict[str, Element]
    sigma_inverse_images: Optional[Dict[str, Element]]
    sigma: GeneratorExtension = field(repr=False)
    delta: Optional[GeneratorExtension] = field(repr=False, default=None)
    sigma_inverse: Optional[GeneratorExtension] = field(repr=False, default=None)

    @property
    def has_delta(self) -> bool:
        return self.delta is not None

    def sigma_is_identity(self) -> bool:
        return all(img == self.parent.gen(g) for g, img in self.sigma_images.items())

    def describe(self) -> str:
        kind = "skew-laurent" if self.invertible else "ore"
        sigma = ", ".join(f"{g}->{img.render()}" for g, img in self.sigma_images.items())
        delta = ", ".join(f"{g}->{img.render()}" for g, img in self.delta_images.items() if img)
        return f"{self.name} ({kind}; sigma: {sigma or 'id'}; delta: {delta or '0'})"


class Tower:
    """An immutable iterated Ore / skew Laurent extension; `extend` returns a new tower."""

    def __init__(self, base: BaseAlgebra, name: str = "", noetherian_assumed: bool = False,
                 leibniz_twist: bool = True):
        self.base = base
        self.name = name
        self.levels: Tuple[Level, ...] = ()
        self.parent: Optional["Tower"] = None
        self.noetherian_assumed = noetherian_assumed
        self.leibniz_twist = leibniz_twist
        self._cache = _LRUCache()

    # construction

    def extend(self, name: str, invertible: bool = False,
               sigma: Optional[Mapping[str, Element]] = None,
               delta: Optional[Mapping[str, Element]] = None,
               sigma_inverse: Optional[Mapping[str, Element]] = None,
               validate: bool = True, tower_name: Optional[str] = None) -> "Tower":
        """Add level `name` on top of this tower. Missing images default to sigma = id, delta = 0."""
        if name in self.generator_names:
            raise DuplicateName(f"generator name {name!r} already used in {self.describe()}")
        sigma_images = self._complete_images(sigma, identity=True, what=f"sigma of {name}")
        delta_images = self._complete_images(delta, identity=False, what=f"delta of {name}")
        has_delta = any(img for img in delta_images.values())
        if invertible and has_delta:
            raise LaurentWithDelta(f"invertible level {name} has a nonzero delta")

        sigma_ext = GeneratorExtension(self, self, sigma_images, ExtensionRule.HOM, name=f"sigma of {name}")
        sigma_is_identity = all(img == self.gen(g) for g, img in sigma_images.items())
        inverse_images: Optional[Dict[str, Element]] = None
        if sigma_inverse is not None:
            inverse_images = self._complete_images(sigma_inverse, identity=True, what=f"sigma_inverse of {name}")
        elif sigma_is_identity:
            inverse_images = dict(sigma_images)
        elif invertible:
            raise MissingInverse(f"invertible level {name} needs sigma_inverse (sigma is not the identity)")
        inverse_ext = None
        if inverse_images is not None:
            inverse_ext = GeneratorExtension(self, self, inverse_images, ExtensionRule.HOM,
                                             name=f"sigma_inverse of {name}")
        delta_ext = None
        if has_delta:
            twist = sigma_ext if self.leibniz_twist else None
            delta_ext = GeneratorExtension(self, self, delta_images, ExtensionRule.TWISTED, twist=twist,
                                           name=f"delta of {name}")

        level = Level(name=name, invertible=invertible, parent=self, sigma_images=sigma_images,
                      delta_images=delta_images, sigma_inverse_images=inverse_images,
                      sigma=sigma_ext, delta=delta_ext, sigma_inverse=inverse_ext)
        if validate:
            self._validate_level(level)

        child = Tower(self.base, name=self.name if tower_name is None else tower_name,
                      noetherian_assumed=self.noetherian_assumed, leibniz_twist=self.leibniz_twist)
        child.levels = self.levels + (level,)
        child.parent = self
        logger.debug(f"Extended {self.describe()} by {level.describe()}")
        return child

    def _complete_images(self, images: Optional[Mapping[str, Any]], identity: bool, what: str) -> Dict[str, Element]:
        images = dict(images or {})
        unknown = set(images) - set(self.generator_names)
        if unknown:
            raise UnknownVariable(f"{what}: unknown generators {sorted(unknown)}")
        out = {}
        for g in self.generator_names:
            if g in images:
                image = images[g]
                if not isinstance(image, Element):
                    image = self.base_element(image)
                if image.owner is not self:
                    raise OwnerMismatch(f"{what}: image of {g} must live below the level being defined")
                out[g] = image
            else:
                out[g] = self.gen(g) if identity else self.zero()
        return out

    def _validate_level(self, level: Level) -> None:
        relations = self.defining_relations()
        for label, ext in (("sigma", level.sigma), ("sigma_inverse", level.sigma_inverse), ("delta", level.delta)):
            if ext is None:
                continue
            for rel in relations:
                lhs, rhs = rel.mapped(ext)
                if lhs != rhs:
                    raise RelationViolation(f"{label}({rel.label})", lhs.render(), rhs.render(), level=level.name)
        if level.sigma_inverse is not None:
            for g in self.generator_names:
                there = level.sigma.apply(level.sigma_inverse.apply(self.gen(g)))
                back = level.sigma_inverse.apply(level.sigma.apply(self.gen(g)))
                if there != self.gen(g):
                    raise RelationViolation(f"sigma(sigma_inverse({g})) = {g}", there.render(), g, level=level.name)
                if back != self.gen(g):
                    raise RelationViolation(f"sigma_inverse(sigma({g})) = {g}", back.render(), g, level=level.name)

    def validate(self) -> "Tower":
        """Re-run the relation checks of every level."""
        for level in self.levels:
            if level.invertible and level.has_delta:
                raise LaurentWithDelta(f"invertible level {level.name} has a nonzero delta")
            level.parent._validate_level(level)
        return self

    def with_flags(self, leibniz_twist: Optional[bool] = None, name: Optional[str] = None) -> "Tower":
        """Rebuild the tower level by level with different flags."""
        twist = self.leibniz_twist if leibniz_twist is None else leibniz_twist
        rebuilt = Tower(self.base, name=self.name if name is None else name,
                        noetherian_assumed=self.noetherian_assumed, leibniz_twist=twist)
        for level in self.levels:
            sub = rebuilt

            def move(images):
                if images is None:
                    return None
                return {g: sub.transport(img) for g, img in images.items()}

            rebuilt = rebuilt.extend(level.name, level.invertible, move(level.sigma_images),
                                     move(level.delta_images), move(level.sigma_inverse_images),
                                     validate=False)
        return rebuilt

    # structure

    @property
    def level_names(self) -> Tuple[str, ...]:
        return tuple(level.name for level in self.levels)

    @property
    def generator_names(self) -> Tuple[str, ...]:
        return self.base.variable_names + self.level_names

    def is_invertible_generator(self, gen: str) -> bool:
        for level in self.levels:
            if level.name == gen:
                return level.invertible
        if gen in self.base.variable_names:
            return self.base.is_unit_variable(gen)
        raise UnknownVariable(f"unknown generator {gen!r} in {self.describe()}")

    def level_index(self, name: str) -> int:
        for i, level in enumerate(self.levels):
            if level.name == name:
                return i
        raise UnknownVariable(f"{name!r} is not a level of {self.describe()}")

    def prefix(self, i: int) -> "Tower":
        """The sub-tower made of the base and the first i levels."""
        tower = self
        while len(tower.levels) > i:
            tower = tower.parent
        return tower

    def construction_kind(self) -> str:
        if not self.levels:
            return "commutative"
        kinds = {level.invertible for level in self.levels}
        if kinds == {True}:
            return "skew-laurent"
        if kinds == {False}:
            return "ore"
        return "mixed"

    def same_structure(self, other: "Tower") -> bool:
        """Structural equality of base and level data (generator images compared as text)."""
        if self.base != other.base or self.level_names != other.level_names:
            return False

        def images(level):
            inv = level.sigma_inverse_images or {}
            return (level.invertible,
                    {g: i.render() for g, i in level.sigma_images.items()},
                    {g: i.render() for g, i in level.delta_images.items()},
                    {g: i.render() for g, i in inv.items()})

        return all(images(a) == images(b) for a, b in zip(self.levels, other.levels))

    def describe(self) -> str:
        label = self.name or "tower"
        gens = "".join(f"[{lv.name}{'^±1' if lv.invertible else ''}]" for lv in self.levels)
        return f"{label} {self.base.describe()}{gens}"

    def __repr__(self) -> str:
        return f"Tower({self.describe()!r})"

    # elements

    def zero(self) -> Element:
        return Element._raw(self, {})

    def one(self) -> Element:
        return self.scalar(1)

    def scalar(self, q: Any) -> Element:
        return self.base_element(self.base.constant(Fraction(q)))

    def base_element(self, c: Any) -> Element:
        c = self.base.coerce(c)
        if not c:
            return self.zero()
        return Element._raw(self, {(0,) * len(self.levels): c})

    def monomial(self, exps: Sequence[int], coef: Any = 1) -> Element:
        return Element(self, {tuple(exps): coef})

    def gen(self, name: str) -> Element:
        if name in self.base.variable_names:
            return self.base_element(self.base.variable(name))
        idx = self.level_index(name)
        exps = tuple(1 if i == idx else 0 for i in range(len(self.levels)))
        return Element._raw(self, {exps: self.base.one()})

    def gen_inverse(self, name: str) -> Element:
        if name in self.base.variable_names:
            inv = self.base.is_unit(self.base.variable(name))
            if inv is None:
                raise NotAUnit(f"base variable {name} is not invertible")
            return self.base_element(inv)
        idx = self.level_index(name)
        if not self.levels[idx].invertible:
            raise NotAUnit(f"level {name} is not invertible")
        exps = tuple(-1 if i == idx else 0 for i in range(len(self.levels)))
        return Element._raw(self, {exps: self.base.one()})

    def lift(self, a: Element) -> Element:
        """Embed an element of a sub-tower (a prefix) into this tower."""
        if a.owner is self:
            return a
        k = len(a.owner.levels)
        if self.prefix(k) is not a.owner:
            raise OwnerMismatch(f"{a.owner.describe()} is not a sub-tower of {self.describe()}")
        pad = (0,) * (len(self.levels) - k)
        return Element._raw(self, {exps + pad: c for exps, c in a._terms.items()})

    def transport(self, a: Element) -> Element:
        """Re-own the terms of an element of a structurally identical tower."""
        if a.owner is self:
            return a
        if a.owner.level_names != self.level_names or a.owner.base != self.base:
            raise OwnerMismatch(f"cannot transport from {a.owner.describe()} to {self.describe()}")
        return Element._raw(self, dict(a._terms))

    # multiplication

    def _left_generator(self, j: int, sign: int, raw: RawTerms) -> RawTerms:
        """x_j^sign * raw, in normal form."""
        level = self.levels[j]
        lower = level.parent
        out: RawTerms = {}
        for exps, coef in raw.items():
            head, e, tail = exps[:j], exps[j], exps[j + 1:]
            low = Element._raw(lower, {head: coef})
            if sign > 0:
                image = level.sigma.apply(low)
                shifted = (e + 1,) + tail
            else:
                image = level.sigma_inverse.apply(low)
                shifted = (e - 1,) + tail
            for f, c in image._terms.items():
                _accumulate(out, f + shifted, c)
            if sign > 0 and level.delta is not None:
                unshifted = (e,) + tail
                for f, c in level.delta.apply(low)._terms.items():
                    _accumulate(out, f + unshifted, c)
        return out

    def _monomial_product(self, exps: Exponents, coef: Any, other_exps: Exponents) -> RawTerms:
        """x^exps * (coef x^other_exps)."""
        key = (exps, coef, other_exps)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        raw: RawTerms = {other_exps: coef}
        for j in reversed(range(len(self.levels))):
            e = exps[j]
            step = 1 if e > 0 else -1
            for _ in range(abs(e)):
                raw = self._left_generator(j, step, raw)
        self._cache.put(key, raw)
        return raw

    def mul(self, a: Element, b: Element) -> Element:
        if a.owner is not self or b.owner is not self:
            raise OwnerMismatch(f"multiplication in {self.describe()} of foreign elements")
        out: RawTerms = {}
        for e1, c1 in a._terms.items():
            for e2, c2 in b._terms.items():
                for f, c in self._monomial_product(e1, c2, e2).items():
                    _accumulate(out, f, c1 * c)
        return Element._raw(self, out)

    def is_unit(self, a: Element) -> Optional[Element]:
        """Inverse of a monomial unit, else None."""
        if a.owner is not self or len(a._terms) != 1:
            return None
        (exps, c), = a._terms.items()
        inv_c = self.base.is_unit(c)
        if inv_c is None:
            return None
        for level, e in zip(self.levels, exps):
            if e and not level.invertible:
                return None
        raw: RawTerms = {(0,) * len(self.levels): inv_c}
        for j, e in enumerate(exps):
            step = -1 if e > 0 else 1
            for _ in range(abs(e)):
                raw = self._left_generator(j, step, raw)
        return Element._raw(self, raw)

    def conjugate(self, u: Element, a: Element) -> Element:
        """u a u^-1."""
        inv = self.is_unit(u)
        if inv is None:
            raise NotAUnit(f"{u.render()} is not a unit of {self.describe()}")
        return u * a * inv

    def commutator(self, a: Element, b: Element) -> Element:
        return a * b - b * a

    # relations

    def defining_relations(self) -> List[Relation]:
        """Base commutativity, Laurent inverses and every level's rewrite relation."""
        key = ("relations",)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        one = Fraction(1)
        relations: List[Relation] = []
        names = self.base.variable_names
        for i, v in enumerate(names):
            for w in names[i + 1:]:
                relations.append(Relation(f"{v}*{w} = {w}*{v}", [(one, [self.gen(v), self.gen(w)])],
                                          [(one, [self.gen(w), self.gen(v)])]))
            if self.base.kind == BaseAlgebra.POLYNOMIALS and self.base.is_unit_variable(v):
                relations.append(Relation(f"{v}*{v}^-1 = 1", [(one, [self.gen(v), self.gen_inverse(v)])],
                                          [(one, [])]))
        for level in self.levels:
            x = self.gen(level.name)
            for g in level.parent.generator_names:
                sg = self.lift(level.sigma_images[g])
                dg = self.lift(level.delta_images[g])
                rhs = [(one, [sg, x])]
                if dg:
                    rhs.append((one, [dg]))
                label = f"{level.name}*{g} = {(sg * x + dg).render()}"
                relations.append(Relation(label, [(one, [x, self.gen(g)])], rhs))
            if level.invertible:
                x_inv = self.gen_inverse(level.name)
                relations.append(Relation(f"{level.name}*{level.name}^-1 = 1", [(one, [x, x_inv])], [(one, [])]))
                relations.append(Relation(f"{level.name}^-1*{level.name} = 1", [(one, [x_inv, x])], [(one, [])]))
        self._cache.put(key, relations)
        return relations

    def cache_stats(self) -> Dict[str, int]:
        return {"size": len(self._cache), "hits": self._cache.hits, "misses": self._cache.misses}


def validate_tower(tower: Tower) -> Tower:
    return tower.validate()


class OppositeMap:
    """The anti-isomorphism op: A -> A° sending every generator to its namesake."""

    def __init__(self, source: Tower, target: Tower, forward: GeneratorExtension, delta_sign: int = -1):
        self.source = source
        self.target = target
        self.forward = forward
        self.delta_sign = delta_sign

    def apply(self, a: Element) -> Element:
        return self.forward.apply(a)

    __call__ = apply

    def inverse(self) -> GeneratorExtension:
        images = {g: self.source.gen(g) for g in self.target.generator_names}
        return GeneratorExtension(self.target, self.source, images, ExtensionRule.ANTI, name="op^-1")


def _namesake_images(source: Tower, target: Tower) -> Dict[str, Element]:
    return {g: target.gen(g) for g in source.generator_names}


def opposite_tower(tower: Tower, delta_sign: int = -1, validate: bool = True) -> OppositeMap:
    """
    The opposite tower with levels (sigma^-1, delta_sign * delta sigma^-1) transported through op.

    delta_sign is -1 for the genuine opposite; +1 only builds deliberately wrong towers.
    """
    target = Tower(tower.base, name=f"{tower.name}°" if tower.name else "", noetherian_assumed=tower.noetherian_assumed,
                   leibniz_twist=tower.leibniz_twist)
    for i, level in enumerate(tower.levels):
        lower = level.parent
        if level.sigma_inverse is None:
            raise MissingInverse(f"level {level.name} needs sigma_inverse to build the opposite tower")
        op = GeneratorExtension(lower, target, _namesake_images(lower, target), ExtensionRule.ANTI, name="op")
        sigma, delta, sigma_inverse = {}, {}, {}
        for g in lower.generator_names:
            pre = level.sigma_inverse.apply(lower.gen(g))
            sigma[g] = op.apply(pre)
            sigma_inverse[g] = op.apply(level.sigma_images[g])
            if level.delta is not None:
                delta[g] = op.apply(level.delta.apply(pre)).scale(delta_sign)
        target = target.extend(level.name, level.invertible, sigma, delta or None, sigma_inverse,
                               validate=validate)
    forward = GeneratorExtension(tower, target, _namesake_images(tower, target), ExtensionRule.ANTI, name="op")
    logger.info(f"Built opposite of {tower.describe()}")
    return OppositeMap(tower, target, forward, delta_sign)


def opposite_inverse_check(opposite: OppositeMap, s: Element) -> bool:
    """op(s^-1) == op(s)^-1 for a unit s."""
    inv = opposite.source.is_unit(s)
    if inv is None:
        raise NotAUnit(f"{s.render()} is not a unit")
    image_inv = opposite.target.is_unit(opposite.apply(s))
    return image_inv is not None and opposite.apply(inv) == image_inv


class TowerEmbedding:
    """A homomorphism of a factor tower into a tensor product, with generator renaming."""

    def __init__(self, source: Tower, target: Tower, renaming: Dict[str, str]):
        self.source = source
        self.target = target
        self.renaming = renaming
        images = {g: target.gen(renaming[g]) for g in source.generator_names}
        self.extension = GeneratorExtension(source, target, images, ExtensionRule.HOM, name="embedding")

    def apply(self, a: Element) -> Element:
        return self.extension.apply(a)

    __call__ = apply


@dataclass
class TensorProduct:
    tower: Tower
    left: TowerEmbedding
    right: TowerEmbedding


def _fresh_name(name: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    while name in taken:
        name = f"{name}'"
    return name


def tensor_towers(a: Tower, b: Tower, name: str = "") -> TensorProduct:
    """A ⊗ B as one tower: merged polynomial base, A's levels, then B's levels."""
    for t in (a, b):
        if t.base.kind == BaseAlgebra.RATFUN:
            raise UnsupportedBase(f"rational-function base of {t.describe()} cannot be tensored")
    taken = list(a.generator_names)
    renaming_a = {g: g for g in a.generator_names}
    renaming_b: Dict[str, str] = {}
    for g in b.generator_names:
        fresh = _fresh_name(g, taken)
        renaming_b[g] = fresh
        taken.append(fresh)

    variables = list(a.base.variables) + [Variable(renaming_b[v.name], v.laurent) for v in b.base.variables]
    base = BaseAlgebra.polynomials(variables) if variables else BaseAlgebra.rationals()
    current = Tower(base, name=name, noetherian_assumed=a.noetherian_assumed and b.noetherian_assumed,
                    leibniz_twist=a.leibniz_twist and b.leibniz_twist)

    def add_level(level: Level, renaming: Dict[str, str]) -> None:
        nonlocal current
        lower = level.parent
        into = GeneratorExtension(lower, current, {g: current.gen(renaming[g]) for g in lower.generator_names},
                                  ExtensionRule.HOM, name="embedding")

        def move(images):
            if images is None:
                return None
            return {renaming[g]: into.apply(img) for g, img in images.items()}

        current = current.extend(renaming[level.name], level.invertible, move(level.sigma_images),
                                 move(level.delta_images), move(level.sigma_inverse_images))

    for level in a.levels:
        add_level(level, renaming_a)
    for level in b.levels:
        add_level(level, renaming_b)
    logger.info(f"Built tensor product {current.describe()}")
    return TensorProduct(current, TowerEmbedding(a, current, renaming_a), TowerEmbedding(b, current, renaming_b))


def enveloping_tower(tower: Tower) -> Tuple[TensorProduct, OppositeMap]:
    """A ⊗ A°, together with the opposite map used to build it."""
    opposite = opposite_tower(tower)
    product = tensor_towers(tower, opposite.target, name=f"{tower.name}^e" if tower.name else "")
    return product, opposite


@dataclass
class GoodConstructionReport:
    tower: str
    kind: str
    opposite_valid: bool
    opposite_kind: str
    tensor_square_valid: bool
    levels: List[Dict[str, str]]
    problems: List[str]

    @property
    def good(self) -> bool:
        return self.opposite_valid and self.tensor_square_valid and self.kind == self.opposite_kind


def good_construction_report(tower: Tower) -> GoodConstructionReport:
    """Check that the opposite and the tensor square are again towers of the same kind."""
    problems: List[str] = []
    levels: List[Dict[str, str]] = []
    opposite_valid = False
    opposite_kind = "unknown"
    try:
        opposite = opposite_tower(tower)
        opposite_valid = True
        opposite_kind = opposite.target.construction_kind()
        for level in opposite.target.levels:
            levels.append({
                "level": level.name,
                "sigma": ", ".join(f"{g}->{img.render()}" for g, img in level.sigma_images.items()) or "id",
                "delta": ", ".join(f"{g}->{img.render()}" for g, img in level.delta_images.items()) or "0",
            })
    except OreForgeError as e:
        problems.append(f"opposite: {e}")
    tensor_ok = False
    try:
        tensor_towers(tower, tower)
        tensor_ok = True
    except OreForgeError as e:
        problems.append(f"tensor square: {e}")
    report = GoodConstructionReport(tower.name or tower.describe(), tower.construction_kind(), opposite_valid,
                                    opposite_kind, tensor_ok, levels, problems)
    logger.info(f"Good-construction check for {report.tower}: {'good' if report.good else 'not good'}")
    return report
