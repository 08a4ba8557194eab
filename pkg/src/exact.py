"""
Exact scalar and commutative-coefficient arithmetic.

Scalars are fractions.Fraction. Coefficient algebras are multivariate
polynomials over Q (each variable optionally Laurent) and univariate rational
functions over Q. Univariate gcd and exact division are delegated to sympy.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy

try:
    from .errors import MixedBase, OreForgeError, UnknownVariable
except ImportError:
    from errors import MixedBase, OreForgeError, UnknownVariable

logger = logging.getLogger(__name__)

Rational = Fraction
Exponents = Tuple[int, ...]


def to_rational(value: Union[int, str, Fraction]) -> Fraction:
    """Coerce an int, a Fraction or a 'p/q' string to a Fraction."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def render_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Variable:
    """A named commuting indeterminate."""
    name: str
    laurent: bool = False


def _graded_key(exps: Exponents) -> Tuple[int, Exponents]:
    return (sum(exps), exps)


def _render_monomial(names: Sequence[str], exps: Exponents) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 0:
            continue
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def render_terms(pieces: List[Tuple[Fraction, str]]) -> str:
    """Join (coefficient, monomial-text) pairs into canonical '+'/'-' form."""
    if not pieces:
        return "0"
    out = []
    for k, (q, mono) in enumerate(pieces):
        sign = "-" if q < 0 else "+"
        a = -q if q < 0 else q
        if not mono:
            body = render_rational(a)
        elif a == 1:
            body = mono
        else:
            body = f"{render_rational(a)}*{mono}"
        if k == 0:
            out.append(f"-{body}" if sign == "-" else body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


class BasePoly:
    """Multivariate polynomial over Q; Laurent variables admit negative exponents."""

    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables: Sequence[Variable], terms: Optional[Mapping[Exponents, Any]] = None):
        self.variables: Tuple[Variable, ...] = tuple(variables)
        n = len(self.variables)
        clean: Dict[Exponents, Fraction] = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise OreForgeError(f"exponent vector {exps} does not match {n} variables")
            for var, e in zip(self.variables, exps):
                if e < 0 and not var.laurent:
                    raise OreForgeError(f"negative exponent on non-Laurent variable {var.name}")
            coef = Fraction(coef)
            if coef:
                clean[exps] = clean.get(exps, Fraction(0)) + coef
                if not clean[exps]:
                    del clean[exps]
        self._terms = clean
        self._hash = None

    # constructors

    @classmethod
    def zero(cls, variables: Sequence[Variable]) -> "BasePoly":
        return cls(variables)

    @classmethod
    def constant(cls, variables: Sequence[Variable], q: Union[int, Fraction]) -> "BasePoly":
        return cls(variables, {(0,) * len(variables): q})

    @classmethod
    def gen(cls, variables: Sequence[Variable], name: str) -> "BasePoly":
        names = [v.name for v in variables]
        if name not in names:
            raise UnknownVariable(f"unknown variable {name!r}")
        exps = tuple(1 if n == name else 0 for n in names)
        return cls(variables, {exps: 1})

    @classmethod
    def _raw(cls, variables: Tuple[Variable, ...], terms: Dict[Exponents, Fraction]) -> "BasePoly":
        obj = cls.__new__(cls)
        obj.variables = variables
        obj._terms = terms
        obj._hash = None
        return obj

    # inspection

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def terms(self) -> Mapping[Exponents, Fraction]:
        return dict(self._terms)

    def items(self) -> List[Tuple[Exponents, Fraction]]:
        """Terms in graded-lex order, highest first."""
        return sorted(self._terms.items(), key=lambda kv: _graded_key(kv[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        zero = (0,) * len(self.variables)
        return all(exps == zero for exps in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((0,) * len(self.variables), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def degree(self, name: Optional[str] = None) -> int:
        if not self._terms:
            return -1
        if name is None:
            return max(sum(e) for e in self._terms)
        idx = self._index(name)
        return max(e[idx] for e in self._terms)

    def leading(self) -> Tuple[Exponents, Fraction]:
        return self.items()[0]

    def _index(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise UnknownVariable(f"unknown variable {name!r} (have {', '.join(self.names) or 'none'})")

    # arithmetic

    def _coerce(self, other: Any) -> Any:
        if isinstance(other, BasePoly):
            if other.variables != self.variables:
                raise MixedBase(f"polynomials over ({', '.join(self.names)}) and ({', '.join(other.names)})")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return BasePoly.constant(self.variables, other)
        return NotImplemented

    def __add__(self, other: Any) -> "BasePoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for exps, c in other._terms.items():
            v = terms.get(exps, Fraction(0)) + c
            if v:
                terms[exps] = v
            else:
                terms.pop(exps, None)
        return BasePoly._raw(self.variables, terms)

    __radd__ = __add__

    def __neg__(self) -> "BasePoly":
        return BasePoly._raw(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: Any) -> "BasePoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> "BasePoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: Any) -> "BasePoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            q = Fraction(other)
            if not q:
                return BasePoly.zero(self.variables)
            return BasePoly._raw(self.variables, {e: c * q for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms: Dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = terms.get(e, Fraction(0)) + c1 * c2
                if v:
                    terms[e] = v
                else:
                    terms.pop(e, None)
        return BasePoly._raw(self.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "BasePoly":
        if k < 0:
            inv = self.inverse()
            if inv is None:
                raise OreForgeError(f"{self.render()} is not a unit")
            return inv ** (-k)
        result = BasePoly.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> Optional["BasePoly"]:
        """Inverse of a monomial unit (nonzero scalar times Laurent variables), else None."""
        if len(self._terms) != 1:
            return None
        (exps, c), = self._terms.items()
        for var, e in zip(self.variables, exps):
            if e and not var.laurent:
                return None
        return BasePoly._raw(self.variables, {tuple(-e for e in exps): 1 / c})

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, BasePoly):
            return self.variables == other.variables and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_value())
            else:
                self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    # calculus and substitution

    def partial(self, name: str) -> "BasePoly":
        idx = self._index(name)
        terms: Dict[Exponents, Fraction] = {}
        for exps, c in self._terms.items():
            e = exps[idx]
            if e == 0:
                continue
            new = list(exps)
            new[idx] = e - 1
            terms[tuple(new)] = c * e
        return BasePoly._raw(self.variables, terms)

    def substitute(self, images: Mapping[str, Any], one: Any) -> Any:
        """Evaluate with every variable replaced by images[name]; `one` is the target unit."""
        powers: Dict[Tuple[int, int], Any] = {}

        def power(idx: int, e: int) -> Any:
            key = (idx, e)
            if key not in powers:
                powers[key] = images[self.variables[idx].name] ** e
            return powers[key]

        total = one * 0
        for exps, c in self.items():
            term = one * c
            for idx, e in enumerate(exps):
                if e:
                    term = term * power(idx, e)
            total = total + term
        return total

    # rendering

    def render(self) -> str:
        names = self.names
        return render_terms([(c, _render_monomial(names, e)) for e, c in self.items()])

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"BasePoly({self.render()!r})"


def _to_sympy(poly: BasePoly) -> sympy.Poly:
    if len(poly.variables) != 1:
        raise MixedBase("univariate polynomial expected")
    sym = sympy.Symbol(poly.variables[0].name)
    if poly.is_zero():
        return sympy.Poly.from_list([0], sym, domain=sympy.QQ)
    deg = poly.degree()
    if min(e[0] for e in poly._terms) < 0:
        raise OreForgeError("Laurent polynomials have no univariate gcd")
    coeffs = []
    for power in range(deg, -1, -1):
        c = poly._terms.get((power,), Fraction(0))
        coeffs.append(sympy.Rational(c.numerator, c.denominator))
    return sympy.Poly.from_list(coeffs, sym, domain=sympy.QQ)


def _from_sympy(p: sympy.Poly, variables: Tuple[Variable, ...]) -> BasePoly:
    coeffs = p.all_coeffs()
    deg = len(coeffs) - 1
    terms = {}
    for i, c in enumerate(coeffs):
        if c != 0:
            c = sympy.Rational(c)
            terms[(deg - i,)] = Fraction(int(c.p), int(c.q))
    return BasePoly._raw(variables, terms)


def base_gcd_uni(a: BasePoly, b: BasePoly) -> BasePoly:
    """Monic gcd of two univariate polynomials in the same variable; gcd(0, 0) = 0."""
    if a.variables != b.variables:
        raise MixedBase(f"gcd of polynomials in ({', '.join(a.names)}) and ({', '.join(b.names)})")
    return _from_sympy(_to_sympy(a).gcd(_to_sympy(b)), a.variables)


def _exquo(a: BasePoly, b: BasePoly) -> BasePoly:
    return _from_sympy(_to_sympy(a).exquo(_to_sympy(b)), a.variables)


class BaseRatFun:
    """Univariate rational function num/den over Q with den monic and coprime to num."""

    __slots__ = ("variable", "num", "den", "_hash")

    def __init__(self, variable: Variable, num: Any, den: Any = None):
        if variable.laurent:
            variable = Variable(variable.name, False)
        self.variable = variable
        vs = (variable,)
        num = self._as_poly(num)
        den = BasePoly.constant(vs, 1) if den is None else self._as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = BasePoly.zero(vs), BasePoly.constant(vs, 1)
        elif not den.is_constant():
            g = base_gcd_uni(num, den)
            if not g.is_constant():
                num, den = _exquo(num, g), _exquo(den, g)
        lc = den.leading()[1]
        if lc != 1:
            num, den = num * (1 / lc), den * (1 / lc)
        self.num = num
        self.den = den
        self._hash = None

    def _as_poly(self, value: Any) -> BasePoly:
        vs = (self.variable,)
        if isinstance(value, BasePoly):
            if value.names != (self.variable.name,):
                raise MixedBase(f"polynomial over ({', '.join(value.names)}) in Q({self.variable.name})")
            return BasePoly._raw(vs, dict(value._terms))
        return BasePoly.constant(vs, value)

    @classmethod
    def gen(cls, name: str) -> "BaseRatFun":
        var = Variable(name)
        return cls(var, BasePoly.gen((var,), name))

    @property
    def names(self) -> Tuple[str, ...]:
        return (self.variable.name,)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() if self.is_constant() else Fraction(0)

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def _coerce(self, other: Any) -> Any:
        if isinstance(other, BaseRatFun):
            if other.variable.name != self.variable.name:
                raise MixedBase(f"Q({self.variable.name}) and Q({other.variable.name})")
            return other
        if isinstance(other, BasePoly):
            return BaseRatFun(self.variable, other)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return BaseRatFun(self.variable, other)
        return NotImplemented

    def __add__(self, other: Any) -> "BaseRatFun":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return BaseRatFun(self.variable, self.num + other.num, self.den)
        return BaseRatFun(self.variable, self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "BaseRatFun":
        return BaseRatFun(self.variable, -self.num, self.den)

    def __sub__(self, other: Any) -> "BaseRatFun":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> "BaseRatFun":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: Any) -> "BaseRatFun":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return BaseRatFun(self.variable, self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> Optional["BaseRatFun"]:
        if self.is_zero():
            return None
        return BaseRatFun(self.variable, self.den, self.num)

    def __truediv__(self, other: Any) -> "BaseRatFun":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        inv = other.inverse()
        if inv is None:
            raise ZeroDivisionError("division by zero rational function")
        return self * inv

    def __rtruediv__(self, other: Any) -> "BaseRatFun":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, k: int) -> "BaseRatFun":
        if k < 0:
            inv = self.inverse()
            if inv is None:
                raise ZeroDivisionError("zero rational function has no inverse")
            return inv ** (-k)
        return BaseRatFun(self.variable, self.num ** k, self.den ** k)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, BaseRatFun):
            return self.variable.name == other.variable.name and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_constant() and self.constant_value() == other
        if isinstance(other, BasePoly) and other.names == self.names:
            return self.den == 1 and self.num._terms == other._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_value())
            else:
                self._hash = hash((self.variable.name, self.num, self.den))
        return self._hash

    def partial(self, name: str) -> "BaseRatFun":
        if name != self.variable.name:
            raise UnknownVariable(f"unknown variable {name!r} in Q({self.variable.name})")
        num = self.num.partial(name) * self.den - self.num * self.den.partial(name)
        return BaseRatFun(self.variable, num, self.den * self.den)

    def substitute(self, image: "BaseRatFun") -> "BaseRatFun":
        """Compose with the variable replaced by `image`."""
        one = BaseRatFun(image.variable, 1)
        images = {self.variable.name: image}
        return self.num.substitute(images, one) / self.den.substitute(images, one)

    def render(self) -> str:
        if self.den == 1:
            return self.num.render()
        num = self.num.render()
        if len(self.num._terms) > 1:
            num = f"({num})"
        den = self.den.render()
        if len(self.den._terms) > 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"BaseRatFun({self.render()!r})"


BaseElement = Union[Fraction, BasePoly, BaseRatFun]


@dataclass(frozen=True)
class BaseAlgebra:
    """The commutative coefficient algebra of a tower."""
    kind: str
    variables: Tuple[Variable, ...] = ()

    RATIONALS = "rationals"
    POLYNOMIALS = "polynomials"
    RATFUN = "ratfun"

    @classmethod
    def rationals(cls) -> "BaseAlgebra":
        return cls(cls.RATIONALS, ())

    @classmethod
    def polynomials(cls, variables: Iterable[Variable]) -> "BaseAlgebra":
        variables = tuple(variables)
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise OreForgeError(f"duplicate base variable names in {names}")
        return cls(cls.POLYNOMIALS, variables)

    @classmethod
    def ratfun(cls, name: str) -> "BaseAlgebra":
        return cls(cls.RATFUN, (Variable(name),))

    @property
    def variable_names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def is_unit_variable(self, name: str) -> bool:
        """True when the variable is invertible in the base (Laurent or a field variable)."""
        if self.kind == self.RATFUN:
            return name in self.variable_names
        return any(v.name == name and v.laurent for v in self.variables)

    def zero(self) -> BaseElement:
        return self.constant(0)

    def one(self) -> BaseElement:
        return self.constant(1)

    def constant(self, q: Union[int, Fraction]) -> BaseElement:
        if self.kind == self.RATIONALS:
            return Fraction(q)
        if self.kind == self.POLYNOMIALS:
            return BasePoly.constant(self.variables, q)
        return BaseRatFun(self.variables[0], q)

    def variable(self, name: str) -> BaseElement:
        if name not in self.variable_names:
            raise UnknownVariable(f"unknown base variable {name!r}")
        if self.kind == self.RATFUN:
            return BaseRatFun.gen(name)
        return BasePoly.gen(self.variables, name)

    def owns(self, c: Any) -> bool:
        if self.kind == self.RATIONALS:
            return isinstance(c, Fraction)
        if self.kind == self.POLYNOMIALS:
            return isinstance(c, BasePoly) and c.variables == self.variables
        return isinstance(c, BaseRatFun) and c.variable.name == self.variables[0].name

    def coerce(self, c: Any) -> BaseElement:
        if self.owns(c):
            return c
        if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
            return self.constant(c)
        if self.kind == self.RATFUN and isinstance(c, BasePoly):
            return BaseRatFun(self.variables[0], c)
        if isinstance(c, BasePoly) and c.is_constant():
            return self.constant(c.constant_value())
        raise MixedBase(f"{c!r} is not an element of {self.describe()}")

    def is_unit(self, c: BaseElement) -> Optional[BaseElement]:
        """Inverse of c when c is a unit of the base, else None."""
        if isinstance(c, Fraction):
            return 1 / c if c else None
        return c.inverse()

    def is_scalar(self, c: BaseElement) -> bool:
        return isinstance(c, Fraction) or c.is_constant()

    def scalar_value(self, c: BaseElement) -> Fraction:
        return c if isinstance(c, Fraction) else c.constant_value()

    def describe(self) -> str:
        if self.kind == self.RATIONALS:
            return "Q"
        if self.kind == self.RATFUN:
            return f"Q({self.variables[0].name})"
        names = [f"{v.name}^±1" if v.laurent else v.name for v in self.variables]
        return f"Q[{', '.join(names)}]"


def algebra_of(c: Any) -> BaseAlgebra:
    if isinstance(c, BasePoly):
        return BaseAlgebra(BaseAlgebra.POLYNOMIALS, c.variables)
    if isinstance(c, BaseRatFun):
        return BaseAlgebra.ratfun(c.variable.name)
    if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
        return BaseAlgebra.rationals()
    raise TypeError(f"{c!r} is not a base element")


def base_arith(a: BaseElement, b: Optional[BaseElement], op: str) -> BaseElement:
    """Exact add/mul/neg of base elements from one base algebra."""
    if op == "neg":
        return -a
    if algebra_of(a) != algebra_of(b):
        raise MixedBase(f"{render_base(a)} and {render_base(b)} come from different base algebras")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown base operation {op!r}")


def base_partial(f: BaseElement, name: str) -> BaseElement:
    """Formal partial derivative d/d(name)."""
    if isinstance(f, Fraction):
        raise UnknownVariable(f"unknown variable {name!r} in Q")
    return f.partial(name)


def scalar_ratio(a: BaseElement, b: BaseElement) -> Optional[Fraction]:
    """The rational q with a == q*b, or None. b must be nonzero."""
    if isinstance(b, Fraction):
        if isinstance(a, Fraction):
            return a / b
        return a.constant_value() / b if a.is_constant() else None
    if isinstance(a, Fraction):
        return a / b.constant_value() if b.is_constant() else (Fraction(0) if not a else None)
    if not a:
        return Fraction(0)
    if isinstance(b, BaseRatFun):
        a_lead = a.num.leading()[1] if isinstance(a, BaseRatFun) else a.leading()[1]
        q = a_lead / b.num.leading()[1]
    else:
        q = a.leading()[1] / b.leading()[1]
    return q if a == b * q else None


def base_monomials(c: BaseElement) -> List[Tuple[Exponents, Fraction]]:
    """(exponents, coefficient) pairs of a polynomial-like base element."""
    if isinstance(c, Fraction):
        return [((), c)] if c else []
    if isinstance(c, BaseRatFun):
        if not c.is_polynomial():
            raise OreForgeError("rational function with nontrivial denominator has no monomial expansion")
        return c.num.items()
    return c.items()


def render_base(c: Any) -> str:
    if isinstance(c, Fraction):
        return render_rational(c)
    if isinstance(c, int):
        return str(c)
    return c.render()
