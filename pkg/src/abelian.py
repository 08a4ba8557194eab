"""
Finitely generated abelian groups of weights.

Weights are tuples of Fractions. Additive weights live in Q^t; multiplicative
weights live in (Q*)^t and are encoded as sign bits plus prime exponents, so
both cases reduce to integer lattices handled by one Smith normal form.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

try:
    from .errors import AmbientMismatch, OreForgeError, ZeroComponent
    from .exact import render_rational
except ImportError:
    from errors import AmbientMismatch, OreForgeError, ZeroComponent
    from exact import render_rational

logger = logging.getLogger(__name__)

Weight = Tuple[Fraction, ...]

# Enumerating the torsion subgroup beyond this many elements is refused
MAX_TORSION_ELEMENTS = 4096


class IntMatrix:
    """Dense matrix of Python ints."""

    def __init__(self, rows: Sequence[Sequence[int]], n_cols: Optional[int] = None):
        self.rows: List[List[int]] = [[int(v) for v in row] for row in rows]
        self.n_rows = len(self.rows)
        self.n_cols = len(self.rows[0]) if self.rows else (n_cols or 0)
        if any(len(row) != self.n_cols for row in self.rows):
            raise ValueError("ragged integer matrix")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n_cols=n)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "IntMatrix":
        return cls([[0] * n_cols for _ in range(n_rows)], n_cols=n_cols)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n_rows, self.n_cols

    def copy(self) -> "IntMatrix":
        return IntMatrix(self.rows, n_cols=self.n_cols)

    def __getitem__(self, idx: Tuple[int, int]) -> int:
        i, j = idx
        return self.rows[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.n_cols != other.n_rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.rows)) if other.rows else []
        out = [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.rows]
        return IntMatrix(out, n_cols=other.n_cols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def transpose(self) -> "IntMatrix":
        return IntMatrix([list(col) for col in zip(*self.rows)] if self.rows else [], n_cols=self.n_rows)

    def diagonal(self) -> List[int]:
        return [self.rows[i][i] for i in range(min(self.shape))]

    def is_diagonal(self) -> bool:
        return all(v == 0 for i, row in enumerate(self.rows) for j, v in enumerate(row) if i != j)

    def determinant(self) -> int:
        if self.n_rows != self.n_cols:
            raise ValueError("determinant of a non-square matrix")
        if self.n_rows == 0:
            return 1
        return int(sympy.Matrix(self.rows).det())

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows})"


@dataclass
class SmithForm:
    """S = U * M * V with U, V unimodular; inverses kept alongside."""
    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def diagonal(self) -> List[int]:
        return self.S.diagonal()

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_normal_form(matrix: IntMatrix) -> SmithForm:
    """
    Smith normal form with transforms.

    Pivot: smallest nonzero absolute value in the active block, ties broken
    row-then-column. The diagonal ends up nonnegative with d_1 | d_2 | ...
    """
    A = [row[:] for row in matrix.rows]
    m, n = matrix.shape
    U = IntMatrix.identity(m).rows
    U_inv = IntMatrix.identity(m).rows
    V = IntMatrix.identity(n).rows
    V_inv = IntMatrix.identity(n).rows

    def swap_rows(i: int, k: int) -> None:
        if i == k:
            return
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]
        for row in U_inv:
            row[i], row[k] = row[k], row[i]

    def add_row(i: int, k: int, c: int) -> None:
        # row_i += c * row_k
        if c == 0:
            return
        A[i] = [a + c * b for a, b in zip(A[i], A[k])]
        U[i] = [a + c * b for a, b in zip(U[i], U[k])]
        for row in U_inv:
            row[k] -= c * row[i]

    def negate_row(i: int) -> None:
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]
        for row in U_inv:
            row[i] = -row[i]

    def swap_cols(j: int, l: int) -> None:
        if j == l:
            return
        for row in A:
            row[j], row[l] = row[l], row[j]
        for row in V:
            row[j], row[l] = row[l], row[j]
        V_inv[j], V_inv[l] = V_inv[l], V_inv[j]

    def add_col(j: int, l: int, c: int) -> None:
        # col_j += c * col_l
        if c == 0:
            return
        for row in A:
            row[j] += c * row[l]
        for row in V:
            row[j] += c * row[l]
        V_inv[l] = [a - c * b for a, b in zip(V_inv[l], V_inv[j])]

    t = 0
    while t < min(m, n):
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (pivot is None or abs(A[i][j]) < abs(A[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        p = A[t][t]
        for i in range(t + 1, m):
            add_row(i, t, -(A[i][t] // p))
        for j in range(t + 1, n):
            add_col(j, t, -(A[t][j] // p))
        if any(A[i][t] for i in range(t + 1, m)) or any(A[t][j] for j in range(t + 1, n)):
            continue
        bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
        if bad is not None:
            add_row(t, bad[0], 1)
            continue
        if p < 0:
            negate_row(t)
        t += 1

    return SmithForm(U=IntMatrix(U, n_cols=m), S=IntMatrix(A, n_cols=n), V=IntMatrix(V, n_cols=n),
                     U_inv=IntMatrix(U_inv, n_cols=m), V_inv=IntMatrix(V_inv, n_cols=n))


def solve_integer(matrix: IntMatrix, target: Sequence[int], snf: Optional[SmithForm] = None) -> Optional[List[int]]:
    """An integer row vector x with x * matrix = target, or None."""
    snf = snf or smith_normal_form(matrix)
    m, n = matrix.shape
    if len(target) != n:
        raise ValueError("target length does not match matrix columns")
    # x M = w  <=>  (x U^-1) S = w V
    wv = [sum(target[k] * snf.V.rows[k][j] for k in range(n)) for j in range(n)]
    y = [0] * m
    diag = snf.diagonal
    for j in range(n):
        d = diag[j] if j < len(diag) else 0
        if d == 0:
            if wv[j] != 0:
                return None
            continue
        if wv[j] % d:
            return None
        y[j] = wv[j] // d
    return [sum(y[k] * snf.U.rows[k][i] for k in range(m)) for i in range(m)]


# multiplicative encoding

def _factor_rational(q: Fraction) -> Dict[int, int]:
    exps: Dict[int, int] = {}
    for p, e in sympy.factorint(abs(q.numerator)).items():
        exps[int(p)] = exps.get(int(p), 0) + int(e)
    for p, e in sympy.factorint(q.denominator).items():
        exps[int(p)] = exps.get(int(p), 0) - int(e)
    return {p: e for p, e in exps.items() if e}


@dataclass(frozen=True)
class MultiplicativeWeight:
    """A vector in (Q*)^t as sign bits and exponents over a fixed prime list."""
    signs: Tuple[int, ...]
    primes: Tuple[int, ...]
    exponents: Tuple[Tuple[int, ...], ...]

    def decode(self) -> Weight:
        out = []
        for sign, row in zip(self.signs, self.exponents):
            value = Fraction(1)
            for p, e in zip(self.primes, row):
                value *= Fraction(p) ** e
            out.append(-value if sign else value)
        return tuple(out)

    def _aligned(self, primes: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
        index = {p: i for i, p in enumerate(self.primes)}
        return tuple(tuple(row[index[p]] if p in index else 0 for p in primes) for row in self.exponents)

    def __mul__(self, other: "MultiplicativeWeight") -> "MultiplicativeWeight":
        if len(self.signs) != len(other.signs):
            raise AmbientMismatch("multiplicative weights of different lengths")
        primes = tuple(sorted(set(self.primes) | set(other.primes)))
        a, b = self._aligned(primes), other._aligned(primes)
        signs = tuple(s ^ u for s, u in zip(self.signs, other.signs))
        exps = tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))
        return MultiplicativeWeight(signs, primes, exps)

    def vector(self) -> List[int]:
        """Lattice coordinates: sign bits then exponents row by row."""
        return list(self.signs) + [e for row in self.exponents for e in row]

    def is_identity(self) -> bool:
        return not any(self.signs) and not any(e for row in self.exponents for e in row)


def encode_multiplicative(q: Sequence[Fraction], primes: Optional[Sequence[int]] = None) -> MultiplicativeWeight:
    """Encode a nonzero rational vector; `primes` fixes the prime list (must cover q)."""
    q = tuple(Fraction(v) for v in q)
    for i, v in enumerate(q):
        if v == 0:
            raise ZeroComponent(f"component {i} of {render_weight(q)} is zero")
    factored = [_factor_rational(v) for v in q]
    needed = sorted({p for f in factored for p in f})
    if primes is None:
        primes = needed
    else:
        missing = set(needed) - set(primes)
        if missing:
            raise AmbientMismatch(f"primes {sorted(missing)} not in the encoding prime set")
    primes = tuple(primes)
    signs = tuple(1 if v < 0 else 0 for v in q)
    exps = tuple(tuple(f.get(p, 0) for p in primes) for f in factored)
    return MultiplicativeWeight(signs, primes, exps)


# ambient groups

@dataclass(frozen=True)
class Ambient:
    """Q^t under addition or (Q*)^t under multiplication."""
    kind: str
    dim: int

    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"

    @classmethod
    def additive(cls, dim: int) -> "Ambient":
        return cls(cls.ADDITIVE, dim)

    @classmethod
    def multiplicative(cls, dim: int) -> "Ambient":
        return cls(cls.MULTIPLICATIVE, dim)

    @property
    def is_additive(self) -> bool:
        return self.kind == self.ADDITIVE

    def check(self, w: Sequence) -> Weight:
        w = tuple(Fraction(v) for v in w)
        if len(w) != self.dim:
            raise AmbientMismatch(f"weight {render_weight(w)} does not live in {self.describe()}")
        if not self.is_additive and any(v == 0 for v in w):
            raise ZeroComponent(f"multiplicative weight {render_weight(w)} has a zero component")
        return w

    def identity(self) -> Weight:
        return tuple(Fraction(0 if self.is_additive else 1) for _ in range(self.dim))

    def combine(self, a: Weight, b: Weight) -> Weight:
        if self.is_additive:
            return tuple(x + y for x, y in zip(a, b))
        return tuple(x * y for x, y in zip(a, b))

    def inverse(self, a: Weight) -> Weight:
        if self.is_additive:
            return tuple(-x for x in a)
        return tuple(1 / x for x in a)

    def power(self, a: Weight, k: int) -> Weight:
        if self.is_additive:
            return tuple(x * k for x in a)
        return tuple(x ** k for x in a)

    def difference(self, a: Weight, b: Weight) -> Weight:
        return self.combine(a, self.inverse(b))

    def linear_combination(self, gens: Sequence[Weight], coeffs: Sequence[int]) -> Weight:
        result = self.identity()
        for g, c in zip(gens, coeffs):
            if c:
                result = self.combine(result, self.power(g, c))
        return result

    def describe(self) -> str:
        return f"Q^{self.dim}" if self.is_additive else f"(Q*)^{self.dim}"


def render_weight(w: Sequence[Fraction]) -> str:
    if len(w) == 1:
        return render_rational(Fraction(w[0]))
    return "(" + ", ".join(render_rational(Fraction(v)) for v in w) + ")"


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class _Lattice:
    """Integer coordinates for a finite set of weights, plus the relation rows to quotient by."""

    def __init__(self, ambient: Ambient, gens: Sequence[Weight]):
        self.ambient = ambient
        if ambient.is_additive:
            self.scales = [1] * ambient.dim
            for g in gens:
                for k, v in enumerate(g):
                    self.scales[k] = _lcm(self.scales[k], v.denominator)
            self.primes: Tuple[int, ...] = ()
            self.relations: List[List[int]] = []
        else:
            self.scales = []
            self.primes = tuple(sorted({p for g in gens for v in g for p in _factor_rational(v)}))
            width = ambient.dim * (1 + len(self.primes))
            self.relations = [[2 if j == i else 0 for j in range(width)] for i in range(ambient.dim)]

    @property
    def width(self) -> int:
        if self.ambient.is_additive:
            return self.ambient.dim
        return self.ambient.dim * (1 + len(self.primes))

    def coordinates(self, w: Weight) -> Optional[List[int]]:
        """Integer vector of w, or None when w cannot lie in the lattice."""
        if self.ambient.is_additive:
            out = []
            for v, s in zip(w, self.scales):
                scaled = v * s
                if scaled.denominator != 1:
                    return None
                out.append(scaled.numerator)
            return out
        try:
            return encode_multiplicative(w, self.primes).vector()
        except AmbientMismatch:
            return None


@dataclass
class GroupStructure:
    """T ⊕ Z^r structure of the subgroup generated by `generators`."""
    ambient: Ambient
    generators: List[Weight]
    rank: int
    invariant_factors: List[int]
    free_basis: List[Weight]
    torsion_generators: List[Weight]
    witnesses: List[Tuple[List[int], List[int]]] = field(default_factory=list)
    _lattice: Optional[_Lattice] = field(default=None, repr=False)
    _stacked: Optional[IntMatrix] = field(default=None, repr=False)
    _stacked_snf: Optional[SmithForm] = field(default=None, repr=False)
    _quotient_v: Optional[IntMatrix] = field(default=None, repr=False)
    _factors: List[int] = field(default_factory=list, repr=False)
    _basis_index: List[int] = field(default_factory=list, repr=False)
    _basis_inverse: Optional[List[List[Fraction]]] = field(default=None, repr=False)
    _basis_torsion: List[List[int]] = field(default_factory=list, repr=False)

    @property
    def torsion_order(self) -> int:
        order = 1
        for d in self.invariant_factors:
            order *= d
        return order

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.invariant_factors

    def _quotient_coordinates(self, w: Weight) -> Optional[List[int]]:
        """Coordinates of w in the SNF basis of Z^g / K, or None if w is not in the group."""
        if self._lattice is None:
            return None
        target = self._lattice.coordinates(w)
        if target is None:
            return None
        g = len(self.generators)
        if g == 0:
            return [] if not any(target) or self._in_relations(target) else None
        x = solve_integer(self._stacked, target, self._stacked_snf)
        if x is None:
            return None
        c = x[:g]
        v = self._quotient_v.rows
        return [sum(c[k] * v[k][j] for k in range(g)) for j in range(g)]

    def _in_relations(self, target: List[int]) -> bool:
        if not self._lattice.relations:
            return False
        rel = IntMatrix(self._lattice.relations)
        return solve_integer(rel, target) is not None

    def express(self, w: Sequence) -> Optional[Tuple[List[int], List[int]]]:
        """(torsion coefficients, free coefficients) of w on the reported generators, or None."""
        w = self.ambient.check(w)
        z = self._quotient_coordinates(w)
        if z is None:
            return None
        torsion_idx = [i for i, d in enumerate(self._factors) if d >= 2]
        free_idx = [i for i, d in enumerate(self._factors) if d == 0]
        z_free = [z[i] for i in free_idx]
        if self._basis_inverse is not None:
            free = [sum(Fraction(z_free[k]) * self._basis_inverse[k][j] for k in range(len(z_free)))
                    for j in range(len(z_free))]
            free = [int(v) for v in free]
            torsion = []
            for pos, i in enumerate(torsion_idx):
                value = z[i] - sum(free[b] * self._basis_torsion[b][pos] for b in range(len(free)))
                torsion.append(value % self._factors[i])
        else:
            free = z_free
            torsion = [z[i] % self._factors[i] for i in torsion_idx]
        return torsion, free

    def contains(self, w: Sequence) -> bool:
        return self.express(w) is not None

    def element(self, torsion: Sequence[int], free: Sequence[int]) -> Weight:
        amb = self.ambient
        return amb.combine(amb.linear_combination(self.torsion_generators, torsion),
                           amb.linear_combination(self.free_basis, free))

    def torsion_elements(self) -> List[Weight]:
        """Every element of T, in lexicographic order of coefficients."""
        if self.torsion_order > MAX_TORSION_ELEMENTS:
            raise OreForgeError(f"torsion subgroup of order {self.torsion_order} is too large to enumerate")
        out = []
        for coeffs in itertools.product(*[range(d) for d in self.invariant_factors]):
            out.append(self.ambient.linear_combination(self.torsion_generators, coeffs))
        return out

    def render(self) -> str:
        torsion = " ⊕ ".join(f"Z/{d}" for d in self.invariant_factors) or "0"
        basis = ", ".join(render_weight(b) for b in self.free_basis)
        return f"T = {torsion}; rank r = {self.rank}; basis = [{basis}]"

    def __str__(self) -> str:
        return self.render()


def group_from_generators(gens: Sequence[Sequence], ambient: Ambient) -> GroupStructure:
    """Structure of the subgroup of the ambient group generated by `gens`."""
    gens = [ambient.check(g) for g in gens]
    lattice = _Lattice(ambient, gens)
    g = len(gens)
    if g == 0:
        return GroupStructure(ambient, [], 0, [], [], [], [], _lattice=lattice)

    rows = [lattice.coordinates(w) for w in gens]
    stacked = IntMatrix(rows + lattice.relations, n_cols=lattice.width)
    stacked_snf = smith_normal_form(stacked)
    # left kernel of the stacked matrix, projected to generator coordinates
    kernel = [stacked_snf.U.rows[i][:g] for i in range(stacked_snf.rank, stacked.n_rows)]
    kernel = [row for row in kernel if any(row)]
    kernel_matrix = IntMatrix(kernel, n_cols=g)
    quotient = smith_normal_form(kernel_matrix)
    diag = quotient.diagonal
    factors = [diag[i] if i < len(diag) else 0 for i in range(g)]

    torsion_idx = [i for i, d in enumerate(factors) if d >= 2]
    free_idx = [i for i, d in enumerate(factors) if d == 0]
    v_inv = quotient.V_inv.rows
    torsion_generators = [ambient.linear_combination(gens, v_inv[i]) for i in torsion_idx]
    snf_basis = [ambient.linear_combination(gens, v_inv[i]) for i in free_idx]

    structure = GroupStructure(
        ambient=ambient, generators=list(gens), rank=len(free_idx),
        invariant_factors=[factors[i] for i in torsion_idx], free_basis=snf_basis,
        torsion_generators=torsion_generators, _lattice=lattice, _stacked=stacked,
        _stacked_snf=stacked_snf, _quotient_v=quotient.V, _factors=factors,
    )
    _prefer_input_basis(structure, free_idx, torsion_idx)
    structure.witnesses = [structure.express(w) for w in gens]
    logger.debug(f"Subgroup of {ambient.describe()} on {g} generators: {structure.render()}")
    return structure


def _prefer_input_basis(structure: GroupStructure, free_idx: List[int], torsion_idx: List[int]) -> None:
    """Use input generators as the free basis when some r of them span the free quotient."""
    r = len(free_idx)
    if r == 0:
        return
    coords = [structure._quotient_coordinates(w) for w in structure.generators]
    free_coords = [[z[i] for i in free_idx] for z in coords]
    for combo in itertools.combinations(range(len(structure.generators)), r):
        matrix = sympy.Matrix([free_coords[k] for k in combo])
        if abs(matrix.det()) != 1:
            continue
        inverse = matrix.inv()
        structure._basis_index = list(combo)
        structure._basis_inverse = [[Fraction(int(inverse[i, j].p), int(inverse[i, j].q)) for j in range(r)]
                                    for i in range(r)]
        structure._basis_torsion = [[coords[k][i] for i in torsion_idx] for k in combo]
        structure.free_basis = [structure.generators[k] for k in combo]
        return


@dataclass
class MonoidClosure:
    monoid_generators: List[Weight]
    group: GroupStructure


def monoid_group_closure(gens: Sequence[Sequence], ambient: Ambient) -> MonoidClosure:
    """The group enveloping the monoid generated by `gens`; the generators are echoed back."""
    checked = [ambient.check(g) for g in gens]
    return MonoidClosure(checked, group_from_generators(checked, ambient))


def invariant_factors(matrix: IntMatrix) -> List[int]:
    """Nonzero diagonal of the Smith normal form."""
    return [d for d in smith_normal_form(matrix).diagonal if d]
