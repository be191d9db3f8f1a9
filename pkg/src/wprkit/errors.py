"""Exception types shared across the toolkit."""


class WprkitError(Exception):
    pass


class DomainError(WprkitError, ValueError):
    """Inputs live over incompatible rings, or violate an operation's preconditions."""


class ParseError(WprkitError, ValueError):
    """Syntax error in a polynomial or session script, with a 0-based position."""

    def __init__(self, message: str, position: int = 0, line: int | None = None):
        self.message = message
        self.position = position
        self.line = line
        where = f"column {position + 1}" if line is None else f"line {line}, column {position + 1}"
        super().__init__(f"{where}: {message}")


class RefusedError(WprkitError):
    """An operation declined to answer; ``witness`` explains why."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotSurjectiveError(RefusedError):
    """The reduction of a map modulo the ideal is not surjective."""
