"""
Exception hierarchy for lssreduce
"""


class LssError(Exception):
    """Base class for every error raised by the toolkit"""


class InvalidInputError(LssError, ValueError):
    """Non-finite data, malformed words or malformed JSON"""


class ModelValidationError(InvalidInputError):
    """
    Raised when a model fails validation.

    Attributes:
        issues: list of ValidationIssue describing every violation found
    """

    def __init__(self, issues):
        self.issues = list(issues)
        summary = "; ".join(str(issue) for issue in self.issues)
        super().__init__(f"Model validation failed: {summary}")


class DimensionError(InvalidInputError):
    """Shapes of two systems or signals do not agree"""


class RankError(LssError, ArithmeticError):
    """A matrix required to have full rank does not"""


class RankConditionError(LssError):
    """
    Two-sided projection guard failed.

    Attributes:
        ranks: (rank V, rank W, rank WV)
    """

    def __init__(self, ranks, context: str = "two-sided projection"):
        self.ranks = tuple(int(r) for r in ranks)
        rv, rw, rwv = self.ranks
        super().__init__(
            f"Rank condition failed for {context}: "
            f"rank(V)={rv}, rank(W)={rw}, rank(WV)={rwv}"
        )


class SizeLimitError(LssError):
    """Word enumeration would exceed the configured guard"""


class CoverageError(LssError, ValueError):
    """Input signal does not cover the switching horizon"""


class InfeasibleError(LssError, ValueError):
    """Request cannot be satisfied (dwell times, selection size, ...)"""


class PreconditionError(LssError, ValueError):
    """An algorithm precondition does not hold"""


class ConfigError(LssError, ValueError):
    """Bad environment setting"""


class LetterError(InvalidInputError, IndexError):
    """A word holds a letter outside the mode alphabet 1..D"""
