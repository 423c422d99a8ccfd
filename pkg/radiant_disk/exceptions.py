"""Exception hierarchy for radiant-disk."""

from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from radiant_disk.models import SolveReport


class RadiantDiskError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(RadiantDiskError, ValueError):
    """Configuration file or override could not be used."""


class SolverError(RadiantDiskError, RuntimeError):
    """A numerical solve failed."""


class SingularSystemError(SolverError):
    """The Newton linear system could not be factorized."""


class ConvergenceError(SolverError):
    """A solve required by a study did not converge."""

    def __init__(self, message: str, report: Optional["SolveReport"] = None):
        super().__init__(message)
        self.report = report


class StudyError(RadiantDiskError, RuntimeError):
    """A study produced no usable result."""
