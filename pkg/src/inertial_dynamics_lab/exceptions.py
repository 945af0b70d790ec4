"""Exception hierarchy for the lab.

Every error carries the diagnostic payload a caller needs to report what went
wrong (achieved residual, last finite state, offending parameters, ...).
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .dynamics import PhaseState


class LabError(Exception):
    """Base class for all lab errors."""


class DimensionMismatchError(LabError, ValueError):
    """Operands of incompatible dimensions."""

    def __init__(self, expected: int, actual: int, what: str = "vector") -> None:
        super().__init__(f"{what} dimension mismatch: expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class SingularMatrixError(LabError):
    """Linear system is singular to the requested tolerance."""

    def __init__(self, residual: float, message: str = "matrix is singular to tolerance") -> None:
        super().__init__(f"{message} (best residual {residual:.3e})")
        self.residual = residual


class ConvergenceError(LabError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, what: str, best_residual: float, iterations: int) -> None:
        super().__init__(
            f"{what} did not converge in {iterations} iterations "
            f"(best residual {best_residual:.3e})"
        )
        self.best_residual = best_residual
        self.iterations = iterations


class BlowUpError(LabError):
    """Integration produced a non-finite or exploding state."""

    def __init__(self, last_state: PhaseState, reason: str) -> None:
        super().__init__(f"integration aborted at t={last_state.t:.6g}: {reason}")
        self.last_state = last_state


class ParameterConditionError(LabError, ValueError):
    """Parameters violate a condition a system builder needs."""

    def __init__(self, message: str, parameters: dict[str, float] | None = None) -> None:
        super().__init__(message)
        self.parameters = parameters or {}


class DegenerateSampleError(LabError):
    """A sampled estimator saw no usable pair."""


class UnsupportedOperationError(LabError):
    """The operation is not defined for the given inputs."""


class DegenerateParametersError(LabError):
    """Closed-form analysis breaks down at these parameters."""

    def __init__(self, gamma: float, lam: float, reason: str) -> None:
        super().__init__(f"degenerate parameters gamma={gamma!r}, lambda={lam!r}: {reason}")
        self.gamma = gamma
        self.lam = lam


class InconsistentCriteriaError(LabError):
    """Equivalent stability criteria disagree beyond tolerance."""

    def __init__(self, margins: dict[str, float]) -> None:
        detail = ", ".join(f"{k}={v:.3e}" for k, v in margins.items())
        super().__init__(f"stability criteria disagree: {detail}")
        self.margins = margins


class ScenarioError(LabError):
    """Unknown scenario or invalid scenario override."""

    def __init__(self, message: str, details: Any = None) -> None:
        super().__init__(message)
        self.details = details


class TrajectoryFormatError(LabError):
    """A stored trajectory does not match the lab's formats."""

    def __init__(self, path: str, message: str, row: int | None = None) -> None:
        where = f"{path}, row {row}" if row is not None else path
        super().__init__(f"{where}: {message}")
        self.path = path
        self.row = row


class ConfigError(LabError):
    """A run configuration could not be parsed or validated."""

    def __init__(
        self,
        message: str,
        key: str | None = None,
        line: int | None = None,
        column: int | None = None,
    ) -> None:
        super().__init__(message)
        self.key = key
        self.line = line
        self.column = column
