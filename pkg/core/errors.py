"""
Error types for collective heavy top computations.

Every error raised by the library derives from CollectiveTopError so callers
(the CLI in particular) can turn failures into one-line diagnostics.
"""

from typing import Any, Dict, Optional


class CollectiveTopError(Exception):
    """Base exception for the collective heavy top library"""

    def __init__(self, message: str, step_index: Optional[int] = None):
        self.step_index = step_index
        super().__init__(message)

    def __str__(self) -> str:
        message = super().__str__()
        if self.step_index is not None:
            return f"{message} (at step {self.step_index})"
        return message

    def __reduce__(self):
        # subclasses take different ctor arguments; rebuild from args and attributes
        return _rebuild_error, (type(self), self.args, dict(self.__dict__))


def _rebuild_error(cls: type, args: tuple, state: Dict[str, Any]) -> CollectiveTopError:
    error = cls.__new__(cls)
    error.args = args
    error.__dict__.update(state)
    return error


class ZeroGammaError(CollectiveTopError):
    """Raised when a lift is requested for a target with Gamma = 0"""


class GaugeUnsolvableError(CollectiveTopError):
    """Raised when the Re(chi_1) gauge equation has no solution (p_1 = 0)"""


class PresetMismatchError(CollectiveTopError):
    """Raised when a preset-specific formula is used with other parameters"""


class InvalidParametersError(CollectiveTopError, ValueError):
    """Raised for physically inadmissible top parameters or stepper settings"""


class NewtonDivergedError(CollectiveTopError):
    """Raised when the implicit midpoint Newton iteration does not converge"""

    def __init__(self, iterations: int, residual: float, step_index: Optional[int] = None):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"Newton iteration did not converge after {iterations} iterations "
            f"(residual {residual:.3e})",
            step_index=step_index,
        )


class NonFiniteStateError(CollectiveTopError):
    """Raised when a stepper produces NaN or infinite components"""


class SeriesTooShortError(CollectiveTopError):
    """Raised when a drift report is requested for fewer than two samples"""


class InsufficientDataError(CollectiveTopError):
    """Raised when a convergence order is requested from fewer than three pairs"""


class NonPositiveValueError(CollectiveTopError):
    """Raised when a log-log regression receives a non-positive step or error"""


class UnknownExperimentError(CollectiveTopError):
    """Raised for experiment names without a preset"""

    def __init__(self, name: str, available: Optional[list] = None):
        self.name = name
        self.available = available or []
        hint = f"; available: {', '.join(self.available)}" if self.available else ""
        super().__init__(f"Unknown experiment '{name}'{hint}")


class ConfigError(CollectiveTopError):
    """Raised for run configurations that fail validation or parsing"""

    def __init__(self, message: str, errors: Optional[list] = None):
        self.errors = errors or []
        super().__init__(message)
