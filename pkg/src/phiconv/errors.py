"""Exception hierarchy shared by every phiconv module."""


class PhiConvexError(Exception):
    """Base class for all library errors."""


class MetricViolation(PhiConvexError):
    pass


class MissingCoords(PhiConvexError):
    pass


class UnknownPoint(PhiConvexError):
    pass


class DimensionMismatch(PhiConvexError):
    pass


class EmptySet(PhiConvexError):
    pass


class NotSubset(PhiConvexError):
    pass


class NotSeparable(PhiConvexError):
    """Raised when a separation certificate is requested for a hull member."""


class HypothesisViolated(PhiConvexError):
    """The hypotheses of a theorem being checked do not hold for the input.

    This signals a property of the instance, not a bug in the library.
    """


class ImproperFunction(PhiConvexError):
    """An extended-real function has no finite value."""


class IllFormed(PhiConvexError):
    """A linear program has inconsistent dimensions or non-finite data."""


class ParseError(PhiConvexError):
    """A problem file is not valid JSON; ``line``/``column`` are 1-based."""

    def __init__(self, message: str, source: str = "<input>", line: int = 0, column: int = 0):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.source = source
        self.line = line
        self.column = column


class ValidationError(PhiConvexError):
    """A problem file parses but violates the schema or the data model.

    ``path`` is the JSON location of the offending field, e.g. ``"phi.kind"``.
    """

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path or '<root>'}: {message}")
        self.path = path


class UnknownGallery(PhiConvexError):
    pass
