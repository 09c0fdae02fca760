"""Exception hierarchy for ssa_diffspace.

Every error raised on purpose by the library derives from :class:`SSADiffspaceError`.
Each class carries the process exit code the command-line interface uses for it:

- 1: usage or parameter problems
- 2: data problems (unreadable/malformed input, too-short series, unusable labels)
- 3: numerical problems (degenerate subspaces, ill-conditioned systems)
"""

from typing import Optional


class SSADiffspaceError(Exception):
    """Base class for all library errors."""

    exit_code: int = 2


class ParameterError(SSADiffspaceError, ValueError):
    """A parameter is outside its admissible range."""

    exit_code = 1


class BoundsError(SSADiffspaceError, ValueError):
    """An index, width or count violates a bound; the message names the inequality."""

    exit_code = 2


class ShapeError(SSADiffspaceError, ValueError):
    """Two subspaces or matrices do not share the required dimensions."""

    exit_code = 2


class DegenerateInputError(SSADiffspaceError):
    """The input carries no usable structure (all-zero spectrum, empty subspace, ...)."""

    exit_code = 3


class DegenerateTrainingError(DegenerateInputError):
    """Every difference subspace seen during training was empty."""


class ConditioningError(SSADiffspaceError):
    """The autocovariance system of an AR fit is singular or ill-conditioned."""

    exit_code = 3

    def __init__(self, message: str, order: int) -> None:
        super().__init__(message)
        self.order = order


class EvaluationError(SSADiffspaceError):
    """Scores and labels cannot be evaluated (e.g. a single label class)."""

    exit_code = 2


class ParseError(SSADiffspaceError):
    """A data, model or configuration file could not be parsed."""

    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
