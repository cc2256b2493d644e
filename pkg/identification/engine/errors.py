"""
Exception hierarchy for the identification engine.

Every error raised on purpose by the engine derives from IdentificationError so
callers (the CLI in particular) can map failures to exit codes without
catching unrelated exceptions. Shape and value problems additionally derive from
ValueError so ordinary validation code keeps working.
"""

from typing import Optional


class IdentificationError(Exception):
    """Base class for all engine errors."""


class DimensionError(IdentificationError, ValueError):
    """Array shapes disagree with a model, dataset or problem layout."""


class InsufficientDataError(IdentificationError, ValueError):
    """Dataset is too short for the requested model order."""


class DataError(IdentificationError):
    """Dataset file is unreadable or malformed."""


class ConfigError(IdentificationError, ValueError):
    """Invalid configuration value; `key` names the offending setting."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class DivergedSimulationError(IdentificationError):
    """A rollout produced a non-finite value at sample `index` (0-based)."""

    def __init__(self, index: int, message: Optional[str] = None):
        self.index = index
        super().__init__(message or f"simulation diverged at sample {index}")


class MaglevAbortError(DivergedSimulationError):
    """Levitated object reached the magnet (z <= 0) at sample `index`."""

    def __init__(self, index: int, position: float):
        self.position = position
        super().__init__(index, f"maglev position z={position:.6g} <= 0 at sample {index}, simulation aborted")


class DegenerateReferenceError(IdentificationError, ValueError):
    """Reference channel is constant, so the best-fit rate is undefined."""

    def __init__(self, channel: int):
        self.channel = channel
        super().__init__(f"reference channel {channel} is constant; BFR undefined")


class RankBreakdownError(IdentificationError):
    """Householder pivot vanished while factorizing column `column`."""

    def __init__(self, column: int, pivot: float, column_norm: float):
        self.column = column
        self.pivot = pivot
        self.column_norm = column_norm
        super().__init__(
            f"rank breakdown at column {column}: |R_kk|={abs(pivot):.3e} "
            f"below tolerance relative to column norm {column_norm:.3e}"
        )


class FillPatternError(IdentificationError):
    """Reflected column `column` left the predicted band-plus-fill pattern."""

    def __init__(self, column: int, expected: int, found: int):
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(
            f"column {column} has {found} structural nonzeros, predicted pattern has {expected}"
        )


class RankDeficientRegressorError(IdentificationError):
    """Least-squares regressor lost rank at column `column`."""

    def __init__(self, column: int):
        self.column = column
        super().__init__(f"regressor matrix is rank deficient at column {column}")


class SolverDivergenceError(IdentificationError):
    """An iteration produced non-finite values."""

    def __init__(self, iteration: int, message: Optional[str] = None):
        self.iteration = iteration
        super().__init__(
            message or f"non-finite step at iteration {iteration}; try a smaller step size tau"
        )
