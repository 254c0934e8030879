"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`DfmaError`.
The CLI maps the three families onto exit codes 2 (parameter), 3 (data) and
4 (domain).
"""


class DfmaError(Exception):
    """Base class for library errors."""


class ParameterError(DfmaError, ValueError):
    """An argument lies outside the domain the operation accepts."""


class InsufficientCandidatesError(ParameterError):
    """Fewer than three beta candidates were given to a sweep."""


class LeakageError(ParameterError):
    """A discriminative spectrum was requested from a non-training split."""


class DataError(DfmaError, ValueError):
    """Input data is malformed or inconsistent."""


class ShapeError(DataError):
    """Array shapes or lengths do not match."""


class FormatError(DataError):
    """A file does not follow the expected on-disk layout."""


class DegenerateClassError(DataError):
    """A class has fewer than two samples, so its unbiased variance is undefined."""


class KindError(DataError):
    """Layer kinds are not arranged the way an energy model requires."""


class DomainError(DfmaError):
    """The computation is well-posed but has no meaningful answer for this input."""


class NoDiscriminationError(DomainError):
    """Between-class scatter is zero at every bin, so no PMF can be formed."""
