"""Exception hierarchy shared by all modules."""


class LevelHomError(Exception):
    """Base class for every error raised by this package."""


class OutOfRange(LevelHomError, ValueError):
    pass


class MissingResponses(LevelHomError, ValueError):
    pass


class MissingBound(LevelHomError, ValueError):
    pass


class CapacityExceeded(LevelHomError, RuntimeError):
    """Raised when a complex would grow past the simplex budget."""

    def __init__(self, budget, message=None):
        self.budget = budget
        super().__init__(message or f"simplex count exceeds budget of {budget}")


class UnsupportedDimension(LevelHomError, ValueError):
    pass


class WrongField(LevelHomError, ValueError):
    pass


class NotASubcomplex(LevelHomError, ValueError):
    pass


class UnsupportedFormat(LevelHomError, ValueError):
    pass


class NoStableLevel(LevelHomError, RuntimeError):
    """The downward level scan found no level with a rank-one top-degree image."""

    def __init__(self, message, trace=None):
        self.trace = list(trace or [])
        super().__init__(message)


class ParseError(LevelHomError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(LevelHomError, ValueError):
    pass
