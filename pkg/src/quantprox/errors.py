"""Exception types shared across the package."""


class QuantproxError(Exception):
    """Base class for all package errors."""


class InstanceFormatError(QuantproxError, ValueError):
    """Instance file or array inputs violate the input contract."""

    def __init__(self, message, details=()):
        super().__init__(message)
        self.details = tuple(details)


class InfeasibleError(QuantproxError):
    """The requested fidelity constraint set is empty."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class ZeroBallMassError(QuantproxError):
    """An output distribution puts no mass on a distortion ball that needs some."""

    def __init__(self, letter):
        super().__init__(f"distortion ball of source letter {letter} carries zero output mass")
        self.letter = letter


class ZeroComplementMassError(QuantproxError):
    """A partial-success row needs mass outside a ball that covers everything."""

    def __init__(self, letter):
        super().__init__(
            f"ball complement of source letter {letter} carries zero output mass "
            "but the row must place mass there"
        )
        self.letter = letter


class InfeasibleBudgetError(QuantproxError):
    """Success-probability budget cannot be met even with certainty everywhere."""


class NotConvergedError(QuantproxError):
    """Iteration budget exhausted before the convergence criteria were met.

    Carries the best iterate found so far in ``solution``.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class SearchTooLargeError(QuantproxError):
    """Exhaustive search space exceeds the configured enumeration limit."""

    def __init__(self, size, limit):
        super().__init__(f"search space of {size} combinations exceeds limit {limit}")
        self.size = size
        self.limit = limit


class TooLargeError(QuantproxError):
    """Grid oracle requested on an alphabet too large to enumerate."""


class DminViolationError(QuantproxError):
    """Expected-distortion target at or below the minimum achievable distortion."""


class CodebookExhaustedError(QuantproxError):
    """No codeword inside the distortion ball within the available codebook."""

    def __init__(self, letter, length):
        super().__init__(
            f"no match for source letter {letter} in a codebook of length {length}"
        )
        self.letter = letter
        self.length = length
