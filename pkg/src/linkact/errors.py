class LinkactError(Exception):
    """Base class for package errors."""


class ParseError(LinkactError):
    """Malformed instance/solution file; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class GenerationError(LinkactError):
    """Topology generation could not place a link within the retry budget."""


class StructuralError(LinkactError):
    """A solution violates structural rules (as opposed to SINR conditions)."""
