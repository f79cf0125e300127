"""Exception types shared across the package.

Everything derives from ``ValueError`` so callers that only care about
"bad input" can catch that; the CLI maps these to exit code 1.
"""


class GraphValidationError(ValueError):
    """Graph invariants violated (self-loop, duplicate edge, id out of range)."""


class EdgeListParseError(ValueError):
    """A line of an edge-list file could not be parsed."""

    def __init__(self, lineno: int, line: str, reason: str):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


class DomainError(ValueError):
    """A numeric argument lies outside the domain of the function."""


class ComplexityUndefinedError(DomainError):
    """Complexity of a graph without edges is undefined."""


class SingularComplexityError(DomainError):
    """K_E equals |E|: the network has no redundancy to exploit."""
