"""Exception types shared across the package."""


class FgsError(Exception):
    """Base class for all errors raised by this package."""


class PddlParseError(FgsError):
    """Syntax or unsupported-feature error while reading a PDDL file."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + where)


class ValidationError(FgsError):
    """A parsed model or data file violates a structural invariant."""


class GroundingError(FgsError):
    """Grounding failed: bad schema instantiation or explosion guard tripped."""


class ConfigError(FgsError):
    """Invalid search / scoring / experiment configuration."""


class InternalError(FgsError):
    """A broken internal invariant, e.g. an invalid extracted plan."""
