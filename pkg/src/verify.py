"""
Property suites over the builtin towers.

Each suite draws seeded random elements, checks algebraic identities exactly
and, on failure, shrinks the witness by dropping terms while it still fails.
Suites are independent and may run in parallel; each builds its own catalog.
"""

import itertools
import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

try:
    from .abelian import Ambient, IntMatrix, group_from_generators, smith_normal_form
    from .catalog import BuiltinCatalog
    from .config import SamplingConfig, EigenConfig
    from .eigen import (
        Section, WeightedTower, constants_sample, cocycle_table, ev_structure,
        homogeneous_components, presentation, slot_monomial, torsion_block, weigh_generators, weight_ball, weight_of,
    )
    from .endo import (
        MapKind, commuting_check, conj_automorphism, extend_to_unit_fraction, inner_derivation, is_involution,
        make_map, transpose_map,
    )
    from .errors import OreForgeError
    from .exact import BaseAlgebra, BaseElement, BasePoly, BaseRatFun, Variable, base_arith
    from .tower import Element, Tower, opposite_inverse_check, opposite_tower, tensor_towers
except ImportError:
    from abelian import Ambient, IntMatrix, group_from_generators, smith_normal_form
    from catalog import BuiltinCatalog
    from config import SamplingConfig, EigenConfig
    from eigen import (
        Section, WeightedTower, constants_sample, cocycle_table, ev_structure,
        homogeneous_components, presentation, slot_monomial, torsion_block, weigh_generators, weight_ball, weight_of,
    )
    from endo import (
        MapKind, commuting_check, conj_automorphism, extend_to_unit_fraction, inner_derivation, is_involution,
        make_map, transpose_map,
    )
    from errors import OreForgeError
    from exact import BaseAlgebra, BaseElement, BasePoly, BaseRatFun, Variable, base_arith
    from tower import Element, Tower, opposite_inverse_check, opposite_tower, tensor_towers

logger = logging.getLogger(__name__)

SUITES = ("tower", "endo", "eigen", "abelian")
MUTATIONS = ("opposite-sign", "drop-twist")

# brute-force quotient enumeration is skipped above this many points
MAX_COSET_POINTS = 50000


# ---------------------------------------------------------------- sampling

class ElementSampler:
    """Seeded random elements of one tower."""

    def __init__(self, tower: Tower, rng: random.Random, max_degree: int = 4, height: int = 8, max_terms: int = 4):
        self.tower = tower
        self.rng = rng
        self.max_degree = max_degree
        self.height = height
        self.max_terms = max_terms
        self.slots = [(g, tower.is_invertible_generator(g)) for g in tower.generator_names]

    def rational(self) -> Fraction:
        num = 0
        while num == 0:
            num = self.rng.randint(-self.height, self.height)
        return Fraction(num, self.rng.randint(1, self.height))

    def exponents(self, degree: int, units_only: bool = False) -> Tuple[int, ...]:
        slots = [k for k, (_, inv) in enumerate(self.slots) if inv or not units_only]
        exps = [0] * len(self.slots)
        if not slots:
            return tuple(exps)
        for _ in range(degree):
            exps[self.rng.choice(slots)] += 1
        for k, (_, invertible) in enumerate(self.slots):
            if invertible and exps[k] and self.rng.random() < 0.5:
                exps[k] = -exps[k]
        return tuple(exps)

    def monomial(self, max_degree: Optional[int] = None) -> Element:
        degree = self.rng.randint(0, self.max_degree if max_degree is None else max_degree)
        term = slot_monomial(self.tower, self.exponents(degree), self.rational())
        base = self.tower.base
        if base.kind == base.RATFUN and self.rng.random() < 0.3:
            shift = base.variable(base.variable_names[0]) + self.rng.randint(1, 3)
            term = term.scale(shift.inverse())
        return term

    def element(self, max_degree: Optional[int] = None) -> Element:
        total = self.tower.zero()
        for _ in range(self.rng.randint(1, self.max_terms)):
            total = total + self.monomial(max_degree)
        return total if total else self.tower.one()

    def unit(self, max_degree: int = 3) -> Element:
        return slot_monomial(self.tower, self.exponents(self.rng.randint(0, max_degree), units_only=True),
                             self.rational())

    def has_units(self) -> bool:
        return any(inv for _, inv in self.slots)


class BaseSampler:
    """Seeded random elements of a commutative base algebra."""

    def __init__(self, base: BaseAlgebra, rng: random.Random, max_degree: int = 3, height: int = 8,
                 max_terms: int = 3):
        self.base = base
        self.rng = rng
        self.max_degree = max_degree
        self.height = height
        self.max_terms = max_terms

    def rational(self) -> Fraction:
        return Fraction(self.rng.randint(-self.height, self.height), self.rng.randint(1, self.height))

    def polynomial(self) -> BasePoly:
        terms: Dict[Tuple[int, ...], Fraction] = {}
        for _ in range(self.rng.randint(1, self.max_terms)):
            exps = []
            for var in self.base.variables:
                e = self.rng.randint(0, self.max_degree)
                exps.append(-e if var.laurent and self.rng.random() < 0.5 else e)
            terms[tuple(exps)] = self.rational()
        return BasePoly(self.base.variables, terms)

    def element(self) -> BaseElement:
        if self.base.kind == self.base.RATIONALS:
            return self.rational()
        if self.base.kind == self.base.POLYNOMIALS:
            return self.polynomial()
        den = self.polynomial()
        while den.is_zero():
            den = self.polynomial()
        return BaseRatFun(self.base.variables[0], self.polynomial(), den)


def shrink_witness(args: Sequence[Element], fails: Callable[..., bool]) -> List[Element]:
    """Greedily drop terms from each argument while the property still fails."""
    current = list(args)
    changed = True
    while changed:
        changed = False
        for i in range(len(current)):
            if not isinstance(current[i], Element):
                continue
            for term in current[i].monomials():
                if len(current[i]) <= 1:
                    break
                trial = current[:i] + [current[i] - term] + current[i + 1:]
                try:
                    still = fails(*trial)
                except OreForgeError:
                    still = False
                if still:
                    current = trial
                    changed = True
    return current


# ---------------------------------------------------------------- results

@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    checked: int
    witness: Optional[str] = None
    skipped: Optional[str] = None

    @property
    def status(self) -> str:
        if self.skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"


@dataclass
class SuiteResult:
    suite: str
    checks: List[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]


class _SuiteRun:
    def __init__(self, suite: str, rng: random.Random, sampling: SamplingConfig, eigen: EigenConfig,
                 mutation: Optional[str] = None):
        self.result = SuiteResult(suite)
        self.rng = rng
        self.sampling = sampling
        self.eigen = eigen
        self.mutation = mutation
        self.catalog = BuiltinCatalog()

    def sampler(self, tower: Tower, max_degree: Optional[int] = None) -> ElementSampler:
        return ElementSampler(tower, self.rng, self.sampling.max_degree if max_degree is None else max_degree,
                              self.sampling.coefficient_height)

    def record(self, name: str, passed: bool, checked: int, witness: Optional[str] = None,
               skipped: Optional[str] = None) -> None:
        self.result.checks.append(CheckResult(self.result.suite, name, passed, checked, witness, skipped))
        if not passed:
            logger.warning(f"[{self.result.suite}] {name} FAILED: {witness}")

    def skip(self, name: str, reason: str) -> None:
        self.record(name, True, 0, skipped=reason)

    def for_all(self, name: str, samples: int, draw: Callable[[], Sequence[Element]],
                prop: Callable[..., bool]) -> None:
        """Check prop on `samples` drawn argument tuples; a raised kernel error counts as a failure."""

        def fails(*args) -> bool:
            return not prop(*args)

        for i in range(samples):
            args = list(draw())
            try:
                bad = fails(*args)
                error = None
            except OreForgeError as e:
                bad, error = True, str(e)
            if bad:
                if error is None:
                    args = shrink_witness(args, fails)
                shown = ", ".join(a.render() if isinstance(a, Element) else str(a) for a in args)
                self.record(name, False, i + 1, f"({shown})" + (f": {error}" if error else ""))
                return
        self.record(name, True, samples)

    def guarded(self, name: str, check: Callable[[], Optional[str]]) -> None:
        """A single deterministic check returning a witness string on failure."""
        try:
            witness = check()
        except OreForgeError as e:
            witness = str(e)
        self.record(name, witness is None, 1, witness)


# ---------------------------------------------------------------- tower suite

def act_on_polynomial(a: Element, p: BasePoly) -> BasePoly:
    """The Weyl element a acting on Q[x] as a differential operator."""
    name = a.owner.base.variable_names[0]
    total = BasePoly.zero(p.variables)
    for (k,), c in a.terms.items():
        q = p
        for _ in range(k):
            q = q.partial(name)
        total = total + c * q
    return total


BASE_ALGEBRAS = (
    ("Q", BaseAlgebra.rationals()),
    ("Q[x^±1, y]", BaseAlgebra.polynomials([Variable("x", laurent=True), Variable("y")])),
    ("Q(t)", BaseAlgebra.ratfun("t")),
)


def _base_checks(run: _SuiteRun) -> None:
    n = run.sampling.samples
    for label, base in BASE_ALGEBRAS:
        sampler = BaseSampler(base, run.rng, height=run.sampling.coefficient_height)

        def triple():
            return sampler.element(), sampler.element(), sampler.element()

        def associative(a, b, c) -> bool:
            return base_arith(base_arith(a, b, "mul"), c, "mul") == base_arith(a, base_arith(b, c, "mul"), "mul") \
                and base_arith(base_arith(a, b, "add"), c, "add") == base_arith(a, base_arith(b, c, "add"), "add")

        def commutative(a, b, c) -> bool:
            return base_arith(a, b, "mul") == base_arith(b, a, "mul") \
                and base_arith(a, c, "add") == base_arith(c, a, "add")

        def distributive(a, b, c) -> bool:
            return base_arith(a, base_arith(b, c, "add"), "mul") == \
                base_arith(base_arith(a, b, "mul"), base_arith(a, c, "mul"), "add")

        run.for_all(f"base {label}: associativity", n, triple, associative)
        run.for_all(f"base {label}: commutativity", n, triple, commutative)
        run.for_all(f"base {label}: distributivity", n, triple, distributive)


def _tower_suite(run: _SuiteRun) -> None:
    n = run.sampling.samples
    _base_checks(run)
    for name in BuiltinCatalog.OPPOSITE_SUITE:
        tower = run.catalog.tower(name)
        if run.mutation == "drop-twist":
            tower = tower.with_flags(leibniz_twist=False)
        sampler = run.sampler(tower)

        run.for_all(f"{name}: associativity", n, lambda: (sampler.element(), sampler.element(), sampler.element()),
                    lambda a, b, c: (a * b) * c == a * (b * c))
        run.for_all(f"{name}: distributivity", n, lambda: (sampler.element(), sampler.element(), sampler.element()),
                    lambda a, b, c: a * (b + c) == a * b + a * c and (a + b) * c == a * c + b * c)
        run.for_all(f"{name}: unit law", n, lambda: (sampler.element(),),
                    lambda a: tower.one() * a == a and a * tower.one() == a)

        delta_sign = 1 if run.mutation == "opposite-sign" else -1
        op = opposite_tower(tower, delta_sign=delta_sign, validate=run.mutation is None)
        run.for_all(f"{name}: opposite reverses products", n, lambda: (sampler.element(), sampler.element()),
                    lambda a, b: op(a * b) == op(b) * op(a))

        def double_opposite_check() -> Optional[str]:
            back = opposite_tower(op.target, delta_sign=delta_sign, validate=False)
            if not back.target.same_structure(tower):
                return f"opposite of the opposite is {back.target.describe()}"
            for _ in range(min(n, 100)):
                a = sampler.element()
                if back(op(a)) != back.target.transport(a):
                    return f"op(op({a.render()})) = {back(op(a)).render()}"
            return None

        run.guarded(f"{name}: double opposite is the identity", double_opposite_check)

        if sampler.has_units():
            run.for_all(f"{name}: opposite of a unit inverse", min(n, 50), lambda: (sampler.unit(),),
                        lambda s: opposite_inverse_check(op, s))

        if tower.base.kind == tower.base.RATFUN:
            run.skip(f"{name}: tensor square", "rational-function base")
            continue
        try:
            product = tensor_towers(tower, tower)
        except OreForgeError as e:
            run.record(f"{name}: tensor square", False, 1, str(e))
            continue

        def cross_commutation() -> Optional[str]:
            for g in tower.generator_names:
                for h in tower.generator_names:
                    left, right = product.left(tower.gen(g)), product.right(tower.gen(h))
                    if left * right != right * left:
                        return f"[{left.render()}, {right.render()}] = {(left * right - right * left).render()}"
            return None

        run.guarded(f"{name}: tensor factors commute", cross_commutation)
        run.for_all(f"{name}: tensor embedding is multiplicative", min(n, 100),
                    lambda: (sampler.element(), sampler.element()),
                    lambda a, b: product.left(a * b) == product.left(a) * product.left(b)
                    and product.right(a * b) == product.right(a) * product.right(b))

    weyl = run.catalog.tower("A1")
    small = run.sampler(weyl, max_degree=3)
    x = weyl.base.variables

    def operator_draw():
        degree = run.rng.randint(0, 8)
        p = BasePoly(x, {(e,): small.rational() for e in range(degree + 1)})
        return small.element(), small.element(), p

    def composes(a, b, p) -> bool:
        return act_on_polynomial(a * b, p) == act_on_polynomial(a, act_on_polynomial(b, p))

    run.for_all("A1: product agrees with operator composition", min(n, 100), operator_draw, composes)


# ---------------------------------------------------------------- endo suite

def _endo_suite(run: _SuiteRun) -> None:
    n = run.sampling.samples
    anti = [("A1", "weyl_transpose"), ("A2", "weyl_transpose"), ("LW1", "weyl_transpose"),
            ("RW1", "weyl_transpose"), ("U2", "negation")]
    for tower_name, map_name in anti:
        tower = run.catalog.tower(tower_name)
        m = run.catalog.map(tower_name, map_name)
        sampler = run.sampler(tower)
        label = f"{tower_name}/{map_name}"
        run.guarded(f"{label}: involution", lambda: None if is_involution(m) else "map squared is not the identity")
        run.for_all(f"{label}: reverses products", n, lambda: (sampler.element(), sampler.element()),
                    lambda a, b: m(a * b) == m(b) * m(a))
        run.for_all(f"{label}: squares to the identity", min(n, 100), lambda: (sampler.element(),),
                    lambda a: m(m(a)) == a)
        general = transpose_map(tower) if tower_name != "U2" else None
        if general is not None:
            run.for_all(f"{label}: agrees with transpose_map", min(n, 50), lambda: (sampler.element(),),
                        lambda a: general(a) == m(a))

    for tower_name, maps in BuiltinCatalog.WEIGHTED.items():
        tower = run.catalog.tower(tower_name)
        sampler = run.sampler(tower)
        for map_name in maps:
            m = run.catalog.map(tower_name, map_name)
            label = f"{tower_name}/{map_name}"
            if m.kind is MapKind.DERIVATION:
                run.for_all(f"{label}: Leibniz rule", n, lambda: (sampler.element(), sampler.element()),
                            lambda a, b: m(a * b) == m(a) * b + a * m(b))
            else:
                run.for_all(f"{label}: multiplicative", n, lambda: (sampler.element(), sampler.element()),
                            lambda a, b: m(a * b) == m(a) * m(b))
                run.for_all(f"{label}: inverse images invert", min(n, 100), lambda: (sampler.element(),),
                            lambda a: m(m.apply_inverse(a)) == a and m.apply_inverse(m(a)) == a)
        family = [run.catalog.map(tower_name, mn) for mn in maps]
        verdict = commuting_check(family)
        run.record(f"{tower_name}: map set commutes", verdict.commuting, 1,
                   None if verdict.commuting else verdict.render())

    fractions = [("LW1", "ad_xd"), ("RW1", "ad_xd"), ("T2", "conj_x"), ("LZ2", "sign")]
    for tower_name, map_name in fractions:
        tower = run.catalog.tower(tower_name)
        m = run.catalog.map(tower_name, map_name)
        sampler = run.sampler(tower, max_degree=3)

        def product_rule(s, a, m=m, tower=tower) -> bool:
            v = extend_to_unit_fraction(m, s, a)
            s_inv = tower.is_unit(s)
            direct = m(s_inv * a)
            if m.kind is MapKind.DERIVATION:
                return v == direct and m(s) * (s_inv * a) + s * v == m(a)
            return v == direct and m(s) * v == m(a)

        run.for_all(f"{tower_name}/{map_name}: extension to unit fractions", min(n, 100),
                    lambda: (sampler.unit(), sampler.element()), product_rule)

    weyl = run.catalog.tower("A1")
    small = run.sampler(weyl, max_degree=2)

    def brackets(h1, h2) -> bool:
        lhs = inner_derivation(h1)
        rhs = inner_derivation(h2)
        combined = inner_derivation(h1 * h2 - h2 * h1)
        return all(lhs(rhs(weyl.gen(g))) - rhs(lhs(weyl.gen(g))) == combined(weyl.gen(g))
                   for g in weyl.generator_names)

    run.for_all("A1: bracket of inner derivations", min(n, 25), lambda: (small.element(), small.element()), brackets)

    torus = run.catalog.tower("T2")
    units = run.sampler(torus, max_degree=3)
    run.for_all("T2: conjugation automorphism", min(n, 50), lambda: (units.unit(), units.element()),
                lambda u, a: conj_automorphism(u)(a) == u * a * torus.is_unit(u))

    product = tensor_towers(weyl, weyl)
    big = transpose_map(product.tower)
    t1 = run.catalog.map("A1", "weyl_transpose")
    factors = run.sampler(weyl)
    run.for_all("A1 x A1: transpose of the tensor is the tensor of transposes", min(n, 100),
                lambda: (factors.element(), factors.element()),
                lambda a, b: big(product.left(a)) == product.left(t1(a))
                and big(product.right(b)) == product.right(t1(b)))


# ---------------------------------------------------------------- eigen suite

class HomogeneousSampler:
    """Random homogeneous elements: a monomial times a combination of weight-zero monomials."""

    def __init__(self, wt: WeightedTower, sampler: ElementSampler, constants: List[Element]):
        self.wt = wt
        self.sampler = sampler
        self.constants = constants or [wt.tower.one()]

    def element(self) -> Element:
        s = self.sampler
        mono = slot_monomial(self.wt.tower, s.exponents(s.rng.randint(0, 3)), s.rational())
        factor = self.wt.tower.scalar(s.rational())
        if s.rng.random() < 0.5:
            mixed = factor + s.rng.choice(self.constants).scale(s.rational())
            if mixed:
                factor = mixed
        return factor * mono


def _unimodular(rng: random.Random, t: int) -> List[List[int]]:
    rows = [[1 if i == j else 0 for j in range(t)] for i in range(t)]
    for _ in range(3 * t):
        i, j = rng.randrange(t), rng.randrange(t)
        if i == j:
            rows[i] = [-v for v in rows[i]]
        else:
            c = rng.choice((-1, 1))
            rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    return rows


def _eigen_suite(run: _SuiteRun) -> None:
    n = run.sampling.samples
    for tower_name, map_names in BuiltinCatalog.WEIGHTED.items():
        tower = run.catalog.tower(tower_name)
        maps = [run.catalog.map(tower_name, mn) for mn in map_names]
        wt = weigh_generators(tower, maps)
        amb = wt.ambient
        sampler = run.sampler(tower, max_degree=3)
        constants = constants_sample(wt, min(run.eigen.constants_degree_bound, 4)).monomials
        homogeneous = HomogeneousSampler(wt, sampler, constants)

        run.for_all(f"{tower_name}: products of homogeneous elements", n,
                    lambda: (homogeneous.element(), homogeneous.element()),
                    lambda a, b: weight_of(wt, a * b) == amb.combine(weight_of(wt, a), weight_of(wt, b)))
        if sampler.has_units():
            run.for_all(f"{tower_name}: unit inverses have inverse weight", min(n, 100), lambda: (sampler.unit(),),
                        lambda u: weight_of(wt, tower.is_unit(u)) == amb.inverse(weight_of(wt, u)))
        run.for_all(f"{tower_name}: homogeneous components add up", n, lambda: (sampler.element(),),
                    lambda a: homogeneous_components(wt, a).total(tower) == a)

        ev = ev_structure(wt)
        if amb.is_additive:
            def basis_change() -> Optional[str]:
                t = len(maps)
                matrix = _unimodular(run.rng, t)
                changed = []
                for k, row in enumerate(matrix):
                    images = {g: sum((m(tower.gen(g)).scale(c) for m, c in zip(maps, row) if c), tower.zero())
                              for g in tower.generator_names}
                    changed.append(make_map(tower, MapKind.DERIVATION, images, name=f"delta'{k}"))
                other = ev_structure(weigh_generators(tower, changed)).group
                if (other.rank, other.invariant_factors) != (ev.group.rank, ev.group.invariant_factors):
                    return f"{other.render()} != {ev.group.render()}"
                return None

            run.guarded(f"{tower_name}: structure survives a unimodular change of maps", basis_change)

        section = Section(wt, run.eigen.section_degree_bound, ev.group)
        try:
            reps = [section(w) for w in ev.group.free_basis] + [section(t) for t in ev.group.torsion_elements()]
        except OreForgeError as e:
            run.skip(f"{tower_name}: cocycle table", str(e))
            continue
        if any(tower.is_unit(u) is None for u in reps):
            run.skip(f"{tower_name}: cocycle table", "section representatives are not units")
            continue
        ball = weight_ball(ev.group, run.eigen.weight_ball_height)
        table = cocycle_table(wt, section, ball, triple_samples=min(n, 500), rng=run.rng)
        run.record(f"{tower_name}: section and cocycle agree on the weight ball", table.coherent, len(table.entries),
                   "; ".join(table.failures[:1]) or None)
        run.record(f"{tower_name}: cocycle associativity", table.associative, table.triples_checked,
                   "; ".join(table.failures[-1:]) or None)
        pres = presentation(wt, section_degree_bound=run.eigen.section_degree_bound,
                            constants_degree_bound=min(run.eigen.constants_degree_bound, 4))
        run.record(f"{tower_name}: presentation relations", pres.relations_hold and pres.action_preserves_constants, 1,
                   None if pres.relations_hold and pres.action_preserves_constants else "relation check failed")

    lz2 = run.catalog.tower("LZ2")
    wt = weigh_generators(lz2, [run.catalog.map("LZ2", "sign")])
    section = Section(wt, run.eigen.section_degree_bound)

    def division_check() -> Optional[str]:
        block = torsion_block(wt, section, lz2.one() + lz2.gen("x"))
        if block.dimension != 2 or not block.invertible:
            return f"dimension {block.dimension}, determinant {block.determinant.render()}"
        return None

    run.guarded("LZ2: 1 + x is invertible in the torsion block", division_check)


# ---------------------------------------------------------------- abelian suite

def _coset_counts(matrix: IntMatrix) -> Optional[Dict[int, int]]:
    """
    For a full-column-rank integer matrix, the number of elements of Z^n / rowspace
    killed by k, found by enumerating (Z/D)^n for D = |det| of a nonsingular square
    row subset. None when the enumeration would be too large or the rank is short.
    """
    m, n = matrix.shape
    rows = matrix.rows
    det = 0
    for combo in itertools.combinations(range(m), n):
        det = abs(IntMatrix([rows[i] for i in combo], n_cols=n).determinant())
        if det:
            break
    if not det or det ** n > MAX_COSET_POINTS:
        return None
    points = list(itertools.product(range(det), repeat=n))
    sub: Set[Tuple[int, ...]] = {(0,) * n}
    frontier = [(0,) * n]
    gens = [tuple(v % det for v in row) for row in rows]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple((a + b) % det for a, b in zip(p, g))
                if q not in sub:
                    sub.add(q)
                    nxt.append(q)
        frontier = nxt
    counts = {}
    for k in (d for d in range(1, det + 1) if det % d == 0):
        killed = sum(1 for p in points if tuple((k * v) % det for v in p) in sub)
        counts[k] = killed // len(sub)
    return counts


def _predicted_counts(factors: List[int], ks: Sequence[int]) -> Dict[int, int]:
    counts = {}
    for k in ks:
        total = 1
        for d in factors:
            total *= gcd(k, d)
        counts[k] = total
    return counts


def random_square_matrix(rng: random.Random, size: int = 4, bound: int = 10) -> IntMatrix:
    return IntMatrix([[rng.randint(-bound, bound) for _ in range(size)] for _ in range(size)], n_cols=size)


def _abelian_suite(run: _SuiteRun) -> None:
    rng = run.rng
    matrices = []
    for _ in range(50):
        m, n = rng.randint(1, 4), rng.randint(1, 3)
        matrices.append(IntMatrix([[rng.randint(-6, 6) for _ in range(n)] for _ in range(m)], n_cols=n))
    squares = [random_square_matrix(rng) for _ in range(run.sampling.samples)]

    def snf_identities() -> Optional[str]:
        for matrix in matrices + squares:
            snf = smith_normal_form(matrix)
            if snf.U @ matrix @ snf.V != snf.S:
                return f"U M V != S for {matrix.rows}"
            if abs(snf.U.determinant()) != 1 or abs(snf.V.determinant()) != 1:
                return f"non-unimodular transform for {matrix.rows}"
            diag = [d for d in snf.S.diagonal() if d]
            if not snf.S.is_diagonal() or any(d < 0 for d in diag):
                return f"S is not a nonnegative diagonal for {matrix.rows}"
            if any(b % a for a, b in zip(diag, diag[1:])):
                return f"divisibility chain broken: {diag}"
        return None

    run.guarded("SNF: U M V = S with unimodular U, V", snf_identities)

    def coset_oracle() -> Optional[str]:
        compared = 0
        for matrix in matrices:
            counts = _coset_counts(matrix)
            if counts is None:
                continue
            compared += 1
            factors = [d for d in smith_normal_form(matrix).diagonal if d > 1]
            predicted = _predicted_counts(factors, sorted(counts))
            if counts != predicted:
                return f"{matrix.rows}: enumeration {counts} != invariant factors {factors}"
        logger.debug(f"Coset oracle compared {compared} of {len(matrices)} matrices")
        return None

    run.guarded("SNF: invariant factors match quotient enumeration", coset_oracle)

    def draw_additive():
        dim = rng.randint(1, 2)
        return [tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(dim))
                for _ in range(rng.randint(1, 4))], Ambient.additive(dim)

    def draw_multiplicative():
        dim = rng.randint(1, 2)
        values = [-1, 2, 3, Fraction(1, 2), Fraction(-3, 4), 6, Fraction(2, 9)]
        return [tuple(Fraction(rng.choice(values)) for _ in range(dim)) for _ in range(rng.randint(1, 4))], \
            Ambient.multiplicative(dim)

    def group_checks() -> Optional[str]:
        for draw in [draw_additive] * 25 + [draw_multiplicative] * 25:
            gens, amb = draw()
            group = group_from_generators(gens, amb)
            for w in gens:
                parts = group.express(w)
                if parts is None or group.element(*parts) != amb.check(w):
                    return f"{[list(map(str, g)) for g in gens]}: generator {w} not recovered"
            for t, d in zip(group.torsion_generators, group.invariant_factors):
                if amb.power(t, d) != amb.identity():
                    return f"torsion generator {t} does not have order {d}"
        return None

    run.guarded("groups: generators are expressed in the reported basis", group_checks)


# ---------------------------------------------------------------- runner

_SUITE_FUNCTIONS = {
    "tower": _tower_suite,
    "endo": _endo_suite,
    "eigen": _eigen_suite,
    "abelian": _abelian_suite,
}


def run_suite(suite: str, sampling: SamplingConfig, eigen: EigenConfig, mutation: Optional[str] = None) -> SuiteResult:
    if suite not in _SUITE_FUNCTIONS:
        raise OreForgeError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)} or all")
    if mutation is not None and mutation not in MUTATIONS:
        raise OreForgeError(f"unknown mutation {mutation!r}; expected one of {', '.join(MUTATIONS)}")
    rng = random.Random(f"{sampling.seed}:{suite}")
    run = _SuiteRun(suite, rng, sampling, eigen, mutation)
    logger.info(f"Running suite {suite} (seed {sampling.seed}, samples {sampling.samples})")
    start = time.perf_counter()
    try:
        _SUITE_FUNCTIONS[suite](run)
    except OreForgeError as e:
        run.record("suite aborted", False, 0, str(e))
    run.result.elapsed = time.perf_counter() - start
    logger.info(f"Suite {suite} finished in {run.result.elapsed:.2f}s: "
                f"{'PASS' if run.result.passed else 'FAIL'}")
    return run.result


def run_suites(suite: str, sampling: SamplingConfig, eigen: EigenConfig, workers: int = 4,
               mutation: Optional[str] = None) -> List[SuiteResult]:
    """Run one suite or all of them; results come back in suite order."""
    names = list(SUITES) if suite == "all" else [suite]
    if len(names) == 1 or workers <= 1:
        return [run_suite(s, sampling, eigen, mutation) for s in names]
    with ThreadPoolExecutor(max_workers=min(workers, len(names))) as pool:
        futures = [pool.submit(run_suite, s, sampling, eigen, mutation) for s in names]
        return [f.result() for f in futures]
