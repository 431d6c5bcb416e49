"""Exception types shared across the package."""


class CrnError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(CrnError):
    """Syntax or semantic error in a CRN text document."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None and column is not None:
            message = f"line {line}, column {column}: {message}"
        elif line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotApplicableError(CrnError):
    """A reaction was applied to a configuration lacking its reactants."""


class UnsupportedReactionOrderError(CrnError):
    """The kinetic model only supports reactions with one or two reactants."""


class DomainError(CrnError):
    """An argument is outside the domain an operation is defined on."""


class HypothesisViolationError(DomainError):
    """A closed-form bound was requested outside its hypotheses."""
