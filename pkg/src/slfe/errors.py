"""Exception hierarchy shared by all slfe modules."""


class SLFEError(Exception):
    """Base class for every error raised by slfe."""


class GraphFormatError(SLFEError, ValueError):
    """Structurally invalid graph input (e.g. an endpoint out of range)."""


class EdgeListParseError(GraphFormatError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class DomainError(SLFEError, ValueError):
    """A numeric argument outside the domain an algorithm is defined on."""


class VertexError(SLFEError, ValueError):
    """A vertex id that does not exist in the graph."""


class GuidanceFormatError(SLFEError, ValueError):
    """Corrupt or truncated guidance file."""


class StaleGuidanceError(SLFEError):
    """Guidance was generated for a different graph."""


class UsageError(SLFEError):
    """The engine API was driven in a way its contract forbids."""


class DivergenceError(SLFEError, RuntimeError):
    """A min/max application exceeded its round cap without converging."""
