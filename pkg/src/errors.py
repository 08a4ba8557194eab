"""
Error types raised by the oreforge kernel.

All errors derive from OreForgeError (a ValueError) so callers that only care
about bad input can catch ValueError, while the CLI maps each family to an
exit code.
"""

from typing import Any, Optional


class OreForgeError(ValueError):
    """Base class for every error raised by the kernel."""


# exact

class MixedBase(OreForgeError):
    """Operands come from different base algebras."""


class UnknownVariable(OreForgeError):
    """A variable name is not part of the base algebra."""


# abelian

class ZeroComponent(OreForgeError):
    """A multiplicative weight has a zero component."""


class AmbientMismatch(OreForgeError):
    """Weights do not live in the declared ambient group."""


# tower / endo

class RelationViolation(OreForgeError):
    """A map does not respect one of the defining relations of a tower."""

    def __init__(self, relation: str, lhs: Any, rhs: Any, level: Optional[str] = None):
        self.relation = relation
        self.lhs = lhs
        self.rhs = rhs
        self.level = level
        where = f" at level {level}" if level else ""
        super().__init__(f"relation {relation} violated{where}: {lhs} != {rhs}")


class MissingInverse(OreForgeError):
    """A level needs sigma_inverse but none was supplied."""


class LaurentWithDelta(OreForgeError):
    """An invertible level carries a nonzero sigma-derivation."""


class DuplicateName(OreForgeError):
    """A generator name is used twice in one tower."""


class OwnerMismatch(OreForgeError):
    """Elements or maps belong to different towers."""


class NotAUnit(OreForgeError):
    """An element required to be invertible is not a (monomial) unit."""


class UnsupportedBase(OreForgeError):
    """The requested construction is not available for this base algebra."""


class MissingImage(OreForgeError):
    """A map definition leaves a generator without an image."""


class InverseMismatch(OreForgeError):
    """Supplied inverse images do not invert the map."""


class KindMismatch(OreForgeError):
    """Maps of incompatible kinds were combined."""


class ImageNotUnit(OreForgeError):
    """An automorphism sends a unit to a non-unit."""


# eigen

class NotDiagonal(OreForgeError):
    """A generator is not a simultaneous eigenvector of the map set."""


class NotCommuting(OreForgeError):
    """The map set does not commute."""


class NotHomogeneous(OreForgeError):
    """An element is not homogeneous for the weight grading."""


class NoRepresentative(OreForgeError):
    """No admissible monomial represents the requested weight."""


class SectionNotUnit(OreForgeError):
    """A section monomial that must be inverted is not a unit."""


class NoncommutativeConstants(OreForgeError):
    """The weight-zero constants are not commutative."""


# cli

class ParseError(OreForgeError):
    """A spec file or element literal could not be parsed."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class UnknownName(OreForgeError):
    """A tower or map name is not registered."""


class SelfTestTooSlow(OreForgeError):
    """The builtin self-test exceeded its time limit."""
