"""Exception hierarchy for scsvm."""
from pathlib import Path
from typing import Optional


class ScsvmError(Exception):
    """Base class for all scsvm errors."""


class ConfigError(ScsvmError, ValueError):
    """A solver or oracle configuration value is out of range."""


class DimensionMismatchError(ScsvmError, ValueError):
    """Vector, dataset or mask dimensions do not agree."""

    def __init__(self, what: str, expected: int, actual: int):
        super().__init__(f"{what}: expected dimension {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class DualInfeasibleError(ScsvmError, ValueError):
    """A dual vector has entries outside the box [0, 1]."""


class NegativeGapError(ScsvmError):
    """A duality gap fell below the numerical floor."""

    def __init__(self, gap: float):
        super().__init__(f"duality gap {gap:.3e} is below the numerical floor")
        self.gap = gap


class NonFiniteObjectiveError(ScsvmError):
    """An objective value became NaN or infinite during training."""

    def __init__(self, solver: str, iteration: int, value: float):
        super().__init__(f"{solver}: non-finite objective {value} at iteration {iteration}")
        self.solver = solver
        self.iteration = iteration
        self.value = value


class InternalInvariantError(ScsvmError):
    """A mathematical invariant the algorithms rely on was violated."""


class DataFileNotFoundError(ScsvmError, FileNotFoundError):
    """An input file does not exist."""

    def __init__(self, path: Path | str):
        super().__init__(f"file not found: {path}")
        self.path = Path(path)


class DatasetFormatError(ScsvmError, ValueError):
    """An input file could not be parsed."""

    def __init__(self, path: Path | str, line: Optional[int], message: str):
        location = f"{path}:{line}" if line is not None else f"{path}"
        super().__init__(f"{location}: {message}")
        self.path = Path(path)
        self.line = line


class SignMaskError(ScsvmError, ValueError):
    """Sign-constraint index sets are invalid."""


class SingleClassError(ScsvmError, ValueError):
    """Only one class label is present where both are required."""


class OracleSizeError(ScsvmError, ValueError):
    """An enumeration oracle was asked for an instance that is too large."""
