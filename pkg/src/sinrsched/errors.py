class SinrError(Exception):
    """Base class for all errors raised by sinrsched."""


class ValidationError(SinrError, ValueError):
    pass


class DomainError(SinrError, ValueError):
    pass


class FadingViolation(ValidationError):
    """The path-loss exponent does not exceed the doubling dimension."""


class ColocationError(SinrError, ValueError):
    """A sender sits on another link's receiver, so affectance is unbounded."""


class ParseError(ValidationError):
    def __init__(self, message, *, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


class PreconditionError(SinrError, ValueError):
    pass


class OracleScaleError(SinrError, ValueError):
    """Instance too large for exhaustive enumeration."""


class InvalidPropertyError(SinrError, ValueError):
    """A set property rejected a singleton, so it is not a usable pi-test."""


class InvariantError(SinrError, AssertionError):
    """An internal guarantee was violated; indicates a bug."""
