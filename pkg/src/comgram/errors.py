"""Exception hierarchy shared by every comgram module."""


class ComgramError(Exception):
    """Base class for all library errors."""


class GrammarError(ComgramError):
    """A grammar is malformed or of the wrong class for an operation."""


class ParseError(ComgramError):
    """Input text (grammar, formula, JSON) could not be parsed."""


class FormulaError(ComgramError):
    """A Presburger sentence is outside the supported fragment."""


class DimensionError(ComgramError, ValueError):
    """Vectors or semilinear components disagree on dimension."""


class BudgetExceeded(ComgramError):
    """An enumeration ran past its configured budget or wall-clock deadline."""


class VerificationError(ComgramError):
    """A self-certifying construction failed its verification step."""


class ConsistencyError(ComgramError):
    """An internal invariant (e.g. a proven norm bound) was violated."""
