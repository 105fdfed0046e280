"""Error types raised across the pipeline"""
from typing import Iterable, List, Optional


class StrainError(Exception):
    """Base class for every pipeline error"""


class DataError(StrainError, ValueError):
    """Input data cannot support the requested computation (exit code 1)"""


class SchemaError(DataError):
    """A required file or column is missing"""


class ErrorBudgetExceeded(DataError):
    """Too many malformed rows to trust the file"""


class PlayWindowError(DataError):
    """A rusher track is missing frames inside its window"""


class DesignError(DataError):
    """Design matrix has empty or aliased columns"""

    def __init__(self, message: str, columns: Iterable[str] = ()):
        self.columns: List[str] = list(columns)
        super().__init__(message)


class UnknownPositionError(DataError):
    """A raw position code has no grouping"""

    def __init__(self, code: Optional[str], role: str):
        self.code = code
        self.role = role
        super().__init__(f"Unknown {role} position code: {code!r}")


class InsufficientDataError(DataError):
    """Too few qualifying records for a report"""


class ModelFitError(StrainError, RuntimeError):
    """Model fitting failed (exit code 2)"""


class ConvergenceError(ModelFitError):
    """Optimizer did not converge within its budget"""

    def __init__(self, message: str, trace: Optional[list] = None):
        self.trace = trace or []
        super().__init__(message)


class BootstrapFailure(ModelFitError):
    """Too many bootstrap replicates failed"""


__all__ = [
    "StrainError",
    "DataError",
    "SchemaError",
    "ErrorBudgetExceeded",
    "PlayWindowError",
    "DesignError",
    "UnknownPositionError",
    "InsufficientDataError",
    "ModelFitError",
    "ConvergenceError",
    "BootstrapFailure",
]
