"""Exception hierarchy shared by every circdeg module."""


class CircDegError(Exception):
    """Base class for all errors raised by circdeg."""


class JumpTooLarge(CircDegError, ValueError):
    """A phase step is too large for the grid to resolve the map.

    Raised when a lift step reaches ``pi * (1 - margin)``; the map must be
    sampled (or refined) more finely.
    """


class NonIntegerWinding(CircDegError, ValueError):
    """The closing increment of a lift is not an integer multiple of 2*pi."""


class InvalidExponent(CircDegError, ValueError):
    pass


class InvalidThreshold(CircDegError, ValueError):
    pass


class NoConvergence(CircDegError, RuntimeError):
    """Refinement cap reached before the requested tolerance was met."""


class ConfigError(CircDegError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class ValidationError(ConfigError):
    """Config is well formed but violates constraints; ``problems`` lists all of them."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid config:\n  " + "\n  ".join(self.problems))
