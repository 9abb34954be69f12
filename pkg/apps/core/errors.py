"""Exception hierarchy and CLI exit codes."""


class SyzError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code = 1


class InputError(SyzError, ValueError):
    """Malformed input or a violated precondition."""

    exit_code = 4


class ValidationFailure(SyzError, RuntimeError):
    """An invariant failed during computation."""

    exit_code = 3


class RouteDisagreement(SyzError, RuntimeError):
    """Independent routes produced different Betti numbers."""

    exit_code = 2


class DimensionMismatchError(InputError):
    """Matrix or vector shapes do not fit together."""


class BaseConstructionError(InputError):
    """The polytope, triangulation or chart data cannot produce a base."""


class FlipError(InputError):
    """A scripted flip violates its preconditions."""


class TransvectionError(InputError):
    """Transvection data with <n, d> != 0, or a non-unimodular matrix."""


class FormError(InputError):
    """Intersection form file is malformed or asymmetric."""


class HypothesisError(InputError):
    """A conditional formula was requested without its declared hypotheses."""


class ComplexError(ValidationFailure):
    """A cochain complex with d o d != 0."""


class StalkError(ValidationFailure):
    """Stalk computation failed (disconnected star complement, bad restriction)."""


class CoverError(ValidationFailure):
    """Open-star cover fails the Leray or triple-intersection condition."""


class AuditError(ValidationFailure):
    """Sheaf maps fail to commute, or a sequence is not exact."""


class InvarianceError(ValidationFailure):
    """A quantity expected to be invariant under flips changed."""
