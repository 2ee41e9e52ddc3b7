"""Exception hierarchy for arcmatch."""

from __future__ import annotations


class ArcMatchError(Exception):
    """Base class for every error raised by this package."""


class InputError(ArcMatchError, ValueError):
    """Malformed or invalid arc-annotated input."""


class LengthMismatch(InputError):
    pass


class UnbalancedStructure(InputError):
    pass


class InvalidStructureChar(InputError):
    pass


class InvalidBase(InputError):
    pass


class SharedEndpoint(InputError):
    pass


class CrossingArcs(InputError):
    pass


class OutOfRange(ArcMatchError, IndexError):
    pass


class MissingRootArc(ArcMatchError, ValueError):
    pass


class PreconditionViolated(ArcMatchError, ValueError):
    pass


class IntervalMismatch(ArcMatchError, ValueError):
    pass


class InvalidSequence(ArcMatchError, ValueError):
    """A Gamma sequence violates the monotonicity bounds."""


class MalformedEncoding(ArcMatchError, ValueError):
    pass


class NotEnoughOnes(ArcMatchError, IndexError):
    pass


class InstanceTooLarge(ArcMatchError, ValueError):
    pass
