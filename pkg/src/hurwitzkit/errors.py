"""Exception types shared across the toolkit."""

from __future__ import annotations


class HurwitzKitError(Exception):
    """Base class for every error raised by the toolkit."""


class ParseError(HurwitzKitError, ValueError):
    """Malformed cycle notation or input file."""


class InvalidPermutation(HurwitzKitError, ValueError):
    """A generator is not a bijection of its base set."""


class CapExceeded(HurwitzKitError):
    """A configured size limit was hit before the computation finished."""

    def __init__(self, what: str, cap: int):
        super().__init__(f"{what} exceeded cap {cap}")
        self.what = what
        self.cap = cap


class PositionOutOfRange(HurwitzKitError, IndexError):
    """A move position does not address an adjacent pair."""


class Undecided(HurwitzKitError):
    """A bounded search ended without settling the question."""

    def __init__(self, message: str = "undecided within caps", **budget):
        super().__init__(message)
        self.budget = budget


class NotAmple(HurwitzKitError):
    """The chosen labels do not connect every component."""


class PartitionViolation(HurwitzKitError):
    """Refined classes do not cover the bounded word universe exactly."""

    def __init__(self, message: str, dump: dict | None = None):
        super().__init__(message)
        self.dump = dump or {}


class NotAGroup(HurwitzKitError):
    """A class multiplication table fails a group axiom."""

    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(f"{message}: witness {witness}")
        self.witness = witness


class NonConstantEvaluation(HurwitzKitError):
    """Words of a single class evaluate to different group elements."""

    def __init__(self, message: str, witnesses: tuple = ()):
        super().__init__(message)
        self.witnesses = witnesses


class GeneratingPrecondition(HurwitzKitError):
    """The equipment does not generate the group."""


class DivisibilityViolation(HurwitzKitError, ArithmeticError):
    """An order that must divide another does not."""


class InsufficientData(HurwitzKitError):
    """A coefficient sequence is too short to judge its tail."""
