"""
Weight theory for a commuting family of derivations or automorphisms.

Every generator must be a simultaneous eigenvector, so every monomial is one
and an element splits into homogeneous components monomial by monomial.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

try:
    from .abelian import Ambient, GroupStructure, Weight, group_from_generators, monoid_group_closure, render_weight
    from .endo import LinMap, MapKind, commuting_check, conj_automorphism
    from .errors import (
        KindMismatch, NoRepresentative, NoncommutativeConstants, NotAUnit, NotCommuting, NotDiagonal,
        NotHomogeneous, OwnerMismatch, SectionNotUnit,
    )
    from .exact import BasePoly, BaseRatFun, scalar_ratio
    from .tower import Element, Tower
except ImportError:
    from abelian import Ambient, GroupStructure, Weight, group_from_generators, monoid_group_closure, render_weight
    from endo import LinMap, MapKind, commuting_check, conj_automorphism
    from errors import (
        KindMismatch, NoRepresentative, NoncommutativeConstants, NotAUnit, NotCommuting, NotDiagonal,
        NotHomogeneous, OwnerMismatch, SectionNotUnit,
    )
    from exact import BasePoly, BaseRatFun, scalar_ratio
    from tower import Element, Tower

logger = logging.getLogger(__name__)

UNIT_DENOMINATOR_SCOPE = "unit-denominator scope"


def slot_monomial(tower: Tower, exps: Sequence[int], coef=1) -> Element:
    """coef times the monomial with exponents over all generators, base variables first."""
    nb = len(tower.base.variable_names)
    base_exps, level_exps = tuple(exps[:nb]), tuple(exps[nb:])
    base = tower.base
    if base.kind == base.RATIONALS:
        c = base.constant(coef)
    elif base.kind == base.RATFUN:
        c = base.variable(base.variable_names[0]) ** base_exps[0] * Fraction(coef)
    else:
        c = BasePoly(base.variables, {base_exps: coef})
    return tower.monomial(level_exps, c)


@dataclass
class WeightedTower:
    """A tower with a commuting family acting diagonally on its generators."""
    tower: Tower
    maps: List[LinMap]
    ambient: Ambient
    generator_weights: Dict[str, Weight]

    @property
    def kind(self) -> MapKind:
        return self.maps[0].kind

    @property
    def slots(self) -> List[Tuple[str, bool]]:
        """(generator, invertible) in exponent order: base variables then levels."""
        return [(g, self.tower.is_invertible_generator(g)) for g in self.tower.generator_names]

    def monomial_weight(self, base_exps: Sequence[int], level_exps: Sequence[int]) -> Weight:
        weight = self.ambient.identity()
        names = self.tower.base.variable_names + self.tower.level_names
        for g, e in zip(names, tuple(base_exps) + tuple(level_exps)):
            if e:
                weight = self.ambient.combine(weight, self.ambient.power(self.generator_weights[g], e))
        return weight

    def monomial(self, exps: Sequence[int]) -> Element:
        return slot_monomial(self.tower, exps)

    def weight_table(self) -> List[Tuple[str, str]]:
        return [(g, render_weight(w)) for g, w in self.generator_weights.items()]


def weigh_generators(tower: Tower, maps: Sequence[LinMap]) -> WeightedTower:
    """Eigenvalues of every generator under every map."""
    if not maps:
        raise KindMismatch("at least one map is needed")
    kinds = {m.kind for m in maps}
    if len(kinds) > 1 or MapKind.ANTI_AUTOMORPHISM in kinds:
        raise KindMismatch("weights need all derivations or all automorphisms")
    for m in maps:
        if m.owner is not tower:
            raise OwnerMismatch(f"map {m.name} does not act on {tower.describe()}")
    verdict = commuting_check(list(maps))
    if not verdict.commuting:
        raise NotCommuting(verdict.render())
    kind = maps[0].kind
    ambient = Ambient.additive(len(maps)) if kind is MapKind.DERIVATION else Ambient.multiplicative(len(maps))
    weights: Dict[str, Weight] = {}
    for g in tower.generator_names:
        x = tower.gen(g)
        (exps, coef), = x.terms.items()
        eigen = []
        for m in maps:
            image = m(x)
            ratio = scalar_ratio(image.terms.get(exps, tower.base.zero()), coef)
            if ratio is None or image != x.scale(ratio) or (kind is MapKind.AUTOMORPHISM and ratio == 0):
                raise NotDiagonal(f"generator {g} is not an eigenvector of {m.name or m.kind.value}: "
                                  f"image {image.render()}")
            eigen.append(ratio)
        weights[g] = tuple(eigen)
    logger.info(f"Weighed {tower.describe()}: " + ", ".join(f"{g}={render_weight(w)}" for g, w in weights.items()))
    return WeightedTower(tower, list(maps), ambient, weights)


def _coefficient_pieces(wt: WeightedTower, coef) -> List[Tuple[Weight, object]]:
    """Split a base coefficient into (weight, piece) by base monomials."""
    if isinstance(coef, Fraction):
        return [(wt.ambient.identity(), coef)]
    nb = len(wt.tower.base.variable_names)
    zeros = (0,) * len(wt.tower.levels)
    if isinstance(coef, BaseRatFun):
        if coef.is_polynomial():
            return [(wt.monomial_weight(e, zeros), BaseRatFun(coef.variable, BasePoly(coef.num.variables, {e: q})))
                    for e, q in coef.num.items()]
        num = {wt.monomial_weight(e, zeros) for e, _ in coef.num.items()}
        den = {wt.monomial_weight(e, zeros) for e, _ in coef.den.items()}
        if len(num) != 1 or len(den) != 1:
            raise NotHomogeneous(f"coefficient {coef.render()} is not homogeneous")
        return [(wt.ambient.difference(num.pop(), den.pop()), coef)]
    return [(wt.monomial_weight(e, zeros), BasePoly(coef.variables, {e: q})) for e, q in coef.items()]


@dataclass
class GradedElement:
    components: Dict[Weight, Element]

    def total(self, tower: Tower) -> Element:
        result = tower.zero()
        for part in self.components.values():
            result = result + part
        return result

    def render(self) -> str:
        return "{" + ", ".join(f"{render_weight(w)}: {e.render()}" for w, e in self.components.items()) + "}"


def homogeneous_components(wt: WeightedTower, a: Element) -> GradedElement:
    """Group the monomials of a by weight."""
    if a.owner is not wt.tower:
        raise OwnerMismatch("element does not belong to the weighted tower")
    buckets: Dict[Weight, Element] = {}
    order: List[Weight] = []
    for exps, coef in a.items():
        level_weight = wt.monomial_weight((0,) * len(wt.tower.base.variable_names), exps)
        for base_weight, piece in _coefficient_pieces(wt, coef):
            weight = wt.ambient.combine(base_weight, level_weight)
            term = wt.tower.monomial(exps, piece)
            if weight not in buckets:
                buckets[weight] = wt.tower.zero()
                order.append(weight)
            buckets[weight] = buckets[weight] + term
    return GradedElement({w: buckets[w] for w in order if buckets[w]})


def weight_of(wt: WeightedTower, a: Element, cross_check: bool = True) -> Weight:
    """The common weight of all monomials of a; NotHomogeneous otherwise."""
    if a.is_zero():
        raise NotHomogeneous("zero has no weight")
    graded = homogeneous_components(wt, a)
    if len(graded.components) != 1:
        raise NotHomogeneous(f"{a.render()} mixes weights {', '.join(render_weight(w) for w in graded.components)}")
    weight = next(iter(graded.components))
    if cross_check:
        for m, value in zip(wt.maps, weight):
            image = m(a)
            if image != a.scale(value):
                raise NotHomogeneous(f"{m.name} sends {a.render()} to {image.render()}, not {value} times it")
    return weight


@dataclass
class EvStructure:
    monoid_generators: List[Weight]
    group: GroupStructure
    weights: Dict[str, Weight]

    def render(self) -> str:
        return self.group.render()


def ev_structure(wt: WeightedTower) -> EvStructure:
    """Monoid generated by generator weights (inverses for invertible generators) and its group."""
    gens: List[Weight] = []
    for g, invertible in wt.slots:
        w = wt.generator_weights[g]
        candidates = [w, wt.ambient.inverse(w)] if invertible else [w]
        for c in candidates:
            if c not in gens:
                gens.append(c)
    closure = monoid_group_closure(gens, wt.ambient)
    logger.info(f"Ev structure: {closure.group.render()}")
    return EvStructure(closure.monoid_generators, closure.group, dict(wt.generator_weights))


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def exponent_vectors(slots: Sequence[Tuple[str, bool]], degree: int) -> Iterator[Tuple[int, ...]]:
    """Admissible exponent vectors with sum of absolute values equal to degree."""
    for magnitudes in _compositions(degree, len(slots)):
        choices = []
        for (g, invertible), e in zip(slots, magnitudes):
            choices.append((e, -e) if invertible and e else (e,))
        yield from itertools.product(*choices)


class Section:
    """Deterministic monomial representatives u_λ, with u_0 = 1."""

    def __init__(self, wt: WeightedTower, degree_bound: int = 8, group: Optional[GroupStructure] = None):
        self.wt = wt
        self.degree_bound = degree_bound
        self.group = group or ev_structure(wt).group
        self._chosen: Dict[Weight, Element] = {}

    def _key(self, exps: Tuple[int, ...]) -> Tuple:
        unit = self.wt.tower.is_unit(self.wt.monomial(exps)) is not None
        negatives = sum(1 for e in exps if e < 0)
        return (0 if unit else 1, negatives, tuple(-e for e in exps))

    def representative(self, weight: Sequence) -> Element:
        weight = self.wt.ambient.check(weight)
        if weight in self._chosen:
            return self._chosen[weight]
        if not self.group.contains(weight):
            raise NoRepresentative(f"weight {render_weight(weight)} is not in the weight group")
        slots = self.wt.slots
        for degree in range(self.degree_bound + 1):
            hits = [e for e in exponent_vectors(slots, degree)
                    if self.wt.monomial_weight(e[:len(self.wt.tower.base.variable_names)],
                                               e[len(self.wt.tower.base.variable_names):]) == weight]
            if hits:
                best = min(hits, key=self._key)
                element = self.wt.monomial(best)
                self._chosen[weight] = element
                return element
        raise NoRepresentative(f"no admissible monomial of weight {render_weight(weight)} "
                               f"up to degree {self.degree_bound}")

    __call__ = representative


def section_monomial(wt: WeightedTower, weight: Sequence, degree_bound: int = 8) -> Element:
    return Section(wt, degree_bound).representative(weight)


def cocycle(wt: WeightedTower, section: Section, lam: Sequence, mu: Sequence) -> Element:
    """c with u_λ u_μ = c u_{λ+μ}."""
    amb = wt.ambient
    lam, mu = amb.check(lam), amb.check(mu)
    target = section(amb.combine(lam, mu))
    inv = wt.tower.is_unit(target)
    if inv is None:
        raise SectionNotUnit(f"u_{render_weight(amb.combine(lam, mu))} = {target.render()} is not a unit")
    return section(lam) * section(mu) * inv


@dataclass
class CocycleTable:
    entries: Dict[Tuple[Weight, Weight], Element]
    coherent: bool
    associative: bool
    triples_checked: int
    failures: List[str] = field(default_factory=list)


def weight_ball(group: GroupStructure, height: int) -> List[Weight]:
    """Free coefficients in [-height, height] combined with every torsion element."""
    amb = group.ambient
    out: List[Weight] = []
    torsion = group.torsion_elements()
    for coeffs in itertools.product(range(-height, height + 1), repeat=group.rank):
        free = amb.linear_combination(group.free_basis, coeffs)
        for t in torsion:
            w = amb.combine(free, t)
            if w not in out:
                out.append(w)
    return out


def cocycle_table(wt: WeightedTower, section: Section, weights: Sequence[Weight],
                  triple_samples: int = 500, rng: Optional[random.Random] = None) -> CocycleTable:
    """
    All cocycle values on `weights`, checked for u_λ u_μ = c(λ,μ) u_{λ+μ} and for
    c(λ,μ) c(λ+μ,ν) = u_λ c(μ,ν) u_λ^-1 c(λ,μ+ν) on sampled triples.
    """
    amb = wt.ambient
    rng = rng or random.Random(0)
    entries: Dict[Tuple[Weight, Weight], Element] = {}
    failures: List[str] = []
    coherent = True
    for lam in weights:
        for mu in weights:
            c = cocycle(wt, section, lam, mu)
            if section(lam) * section(mu) != c * section(amb.combine(lam, mu)):
                coherent = False
                failures.append(f"u_{render_weight(lam)} u_{render_weight(mu)} != c u_{{sum}}")
            if c and weight_of(wt, c, cross_check=False) != amb.identity():
                coherent = False
                failures.append(f"c({render_weight(lam)}, {render_weight(mu)}) = {c.render()} has nonzero weight")
            entries[(lam, mu)] = c

    def value(a: Weight, b: Weight) -> Element:
        if (a, b) not in entries:
            entries[(a, b)] = cocycle(wt, section, a, b)
        return entries[(a, b)]

    associative = True
    weights = list(weights)
    triples = [(rng.choice(weights), rng.choice(weights), rng.choice(weights)) for _ in range(triple_samples)]
    for lam, mu, nu in triples:
        left = value(lam, mu) * value(amb.combine(lam, mu), nu)
        right = wt.tower.conjugate(section(lam), value(mu, nu)) * value(lam, amb.combine(mu, nu))
        if left != right:
            associative = False
            failures.append(f"associativity fails at ({render_weight(lam)}, {render_weight(mu)}, "
                            f"{render_weight(nu)}): {left.render()} != {right.render()}")
            break
    return CocycleTable(entries, coherent, associative, len(triples), failures)


@dataclass
class ConstantsSample:
    """Weight-zero monomials up to a degree bound."""
    monomials: List[Element]
    degree_bound: int
    commutative: bool

    def render(self) -> str:
        return ", ".join(m.render() for m in self.monomials)


# Pairwise commutation is only tested on this many weight-zero monomials
MAX_CONSTANTS_SAMPLE = 40


def constants_sample(wt: WeightedTower, degree_bound: int = 6) -> ConstantsSample:
    identity = wt.ambient.identity()
    nb = len(wt.tower.base.variable_names)
    found: List[Element] = []
    for degree in range(degree_bound + 1):
        for exps in exponent_vectors(wt.slots, degree):
            if wt.monomial_weight(exps[:nb], exps[nb:]) == identity:
                found.append(wt.monomial(exps))
    sample = found[:MAX_CONSTANTS_SAMPLE]
    commutative = all(a * b == b * a for a, b in itertools.combinations(sample, 2))
    if not commutative:
        logger.warning(f"Weight-zero constants of {wt.tower.describe()} do not commute on the sample")
    return ConstantsSample(found, degree_bound, commutative)


@dataclass
class Presentation:
    group: GroupStructure
    free_basis: List[Weight]
    representatives: List[Element]
    sigma_actions: List[LinMap]
    commutation_scalars: Dict[Tuple[int, int], Element]
    torsion: List[Weight]
    torsion_representatives: List[Element]
    constants: ConstantsSample
    relations_hold: bool
    action_preserves_constants: bool


def presentation(wt: WeightedTower, subgroup_gens: Optional[Sequence[Sequence]] = None,
                 section_degree_bound: int = 8, constants_degree_bound: int = 6) -> Presentation:
    """Skew Laurent presentation data of the eigen-algebra over the given (sub)group."""
    ev = ev_structure(wt).group
    if subgroup_gens is None:
        group = ev
    else:
        gens = [wt.ambient.check(g) for g in subgroup_gens]
        for g in gens:
            if not ev.contains(g):
                raise NoRepresentative(f"weight {render_weight(g)} is not in the weight group")
        group = group_from_generators(gens, wt.ambient)
    section = Section(wt, section_degree_bound, ev)
    reps = []
    for v in group.free_basis:
        u = section(v)
        if wt.tower.is_unit(u) is None:
            raise SectionNotUnit(f"representative {u.render()} of basis weight {render_weight(v)} is not a unit")
        reps.append(u)
    actions = [conj_automorphism(u, name=f"conj({u.render()})") for u in reps]
    scalars: Dict[Tuple[int, int], Element] = {}
    relations_hold = True
    for i in range(len(reps)):
        for j in range(i):
            ui, uj = reps[i], reps[j]
            lam = ui * uj * wt.tower.is_unit(ui) * wt.tower.is_unit(uj)
            scalars[(i + 1, j + 1)] = lam
            if ui * uj != lam * uj * ui:
                relations_hold = False
            if lam and weight_of(wt, lam, cross_check=False) != wt.ambient.identity():
                relations_hold = False
    torsion = group.torsion_elements() if group.invariant_factors else [wt.ambient.identity()]
    torsion_reps = [section(t) for t in torsion]
    constants = constants_sample(wt, constants_degree_bound)
    preserves = all(
        weight_of(wt, act(c), cross_check=False) == wt.ambient.identity()
        for act in actions for c in constants.monomials[:MAX_CONSTANTS_SAMPLE]
    )
    logger.info(f"Presentation over {group.render()}: {len(reps)} skew Laurent generators")
    return Presentation(group, list(group.free_basis), reps, actions, scalars, torsion, torsion_reps, constants,
                        relations_hold, preserves)


@dataclass
class TorsionBlock:
    torsion: List[Weight]
    basis: List[Element]
    dimension: int
    constants: ConstantsSample
    matrix: Optional[List[List[Element]]] = None
    determinant: Optional[Element] = None
    invertible: Optional[bool] = None
    division_check: str = "not requested"


def _determinant(matrix: List[List[Element]], zero: Element, one: Element) -> Element:
    """Leibniz expansion; entries are assumed to commute."""
    n = len(matrix)
    total = zero
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = one
        for row, col in enumerate(perm):
            term = term * matrix[row][col]
        total = total + (term if inversions % 2 == 0 else -term)
    return total


def torsion_block(wt: WeightedTower, section: Section, element: Optional[Element] = None,
                  constants_degree_bound: int = 6, strict: bool = False) -> TorsionBlock:
    """Basis {u_λ : λ in T} of D_T over D_0 and, for an element, its left-multiplication matrix."""
    group = section.group
    torsion = group.torsion_elements() if group.invariant_factors else [wt.ambient.identity()]
    basis = [section(t) for t in torsion]
    constants = constants_sample(wt, constants_degree_bound)
    block = TorsionBlock(torsion, basis, len(torsion), constants)
    if element is None:
        return block
    if not constants.commutative:
        if strict:
            raise NoncommutativeConstants("weight-zero constants do not commute; division check skipped")
        logger.warning("Skipping division check: weight-zero constants do not commute")
        block.division_check = "skipped (noncommutative constants)"
        return block
    inverses = []
    for t, u in zip(torsion, basis):
        inv = wt.tower.is_unit(u)
        if inv is None:
            raise SectionNotUnit(f"torsion representative {u.render()} of {render_weight(t)} is not a unit")
        inverses.append(inv)
    index = {t: k for k, t in enumerate(torsion)}
    zero = wt.tower.zero()
    size = len(torsion)
    matrix = [[zero for _ in range(size)] for _ in range(size)]
    for col, u_mu in enumerate(basis):
        product = element * u_mu
        for weight, part in homogeneous_components(wt, product).components.items():
            if weight not in index:
                raise NotHomogeneous(f"{element.render()} has a component of weight {render_weight(weight)} outside T")
            row = index[weight]
            matrix[row][col] = matrix[row][col] + part * inverses[row]
    entries = [e for row in matrix for e in row]
    if not all(a * b == b * a for a, b in itertools.combinations(entries, 2)):
        if strict:
            raise NoncommutativeConstants("left-multiplication matrix entries do not commute")
        block.division_check = "skipped (noncommuting entries)"
        return block
    det = _determinant(matrix, zero, wt.tower.one())
    block.matrix = matrix
    block.determinant = det
    block.invertible = not det.is_zero()
    block.division_check = "invertible over Frac(D_0)" if block.invertible else "singular"
    return block


@dataclass
class EigenFraction:
    denominator: Element
    numerator: Element
    value: Element
    weight: Weight
    scope: str = UNIT_DENOMINATOR_SCOPE


def eigen_fraction(wt: WeightedTower, s: Element, w: Element) -> EigenFraction:
    """v = s^-1 w for a homogeneous unit s and homogeneous w."""
    inv = wt.tower.is_unit(s)
    if inv is None:
        raise NotAUnit(f"{s.render()} is not a unit ({UNIT_DENOMINATOR_SCOPE})")
    ws = weight_of(wt, s)
    ww = weight_of(wt, w)
    value = inv * w
    if s * value != w:
        raise NotAUnit(f"clearing the denominator of {value.render()} does not give back {w.render()}")
    weight = wt.ambient.difference(ww, ws)
    if value and weight_of(wt, value) != weight:
        raise NotHomogeneous(f"{value.render()} does not have weight {render_weight(weight)}")
    return EigenFraction(s, w, value, weight)
