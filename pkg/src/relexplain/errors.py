"""Exception types raised by relexplain."""


class RelExplainError(Exception):
    """Base class for all library errors."""


class KBParseError(RelExplainError):
    """A knowledge-base file line could not be parsed."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class UnknownEntityError(RelExplainError, KeyError):
    """An entity id is not present in the knowledge base."""

    def __init__(self, entity: str):
        super().__init__(entity)
        self.entity = entity

    def __str__(self) -> str:
        return f"unknown entity: {self.entity!r}"


class PatternError(RelExplainError, ValueError):
    """A pattern or path violates its structural invariants."""


class PatternSizeError(PatternError):
    """A pattern exceeds the configured size bound."""


class ConfigurationError(RelExplainError, ValueError):
    """Invalid measure, strategy or ranking configuration."""


class ResourceLimitError(RelExplainError):
    """Enumeration exceeded the explanation cap."""


class BudgetExceeded(RelExplainError):
    """A time-budgeted computation ran past its deadline."""
