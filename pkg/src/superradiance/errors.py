"""Exception taxonomy shared by all solver modules."""


class SuperradianceError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(SuperradianceError, ValueError):
    """A physical parameter violates its constraints (delta <= 0, g < 0, ...)."""


class SchemaError(SuperradianceError, ValueError):
    """A serialized document is structurally malformed; the message names the field."""


class DomainError(SuperradianceError, ValueError):
    """A numerical function was evaluated outside its domain."""


class NumericalFailureError(SuperradianceError, RuntimeError):
    """An internal consistency guard failed (should not happen for valid input)."""


class ResourceLimitError(SuperradianceError, RuntimeError):
    """A requested computation exceeds the configured size guard."""


class TruncationError(SuperradianceError, RuntimeError):
    """A truncated-basis construction lost more norm than allowed."""
