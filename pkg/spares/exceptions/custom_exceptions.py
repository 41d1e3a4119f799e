# spares/exceptions/custom_exceptions.py

from typing import Any, Optional

class SpareStrategyException(Exception):
    """
    Base class for every error the analyzer reports on purpose.
    Carries a stable error code and the process exit code the CLI returns for it.
    """
    code: str = "SPARES_ERROR"
    exit_code: int = 1

    def __init__(self, detail: str = "Spare strategy error.", details: Optional[dict[str, Any]] = None):
        super().__init__(detail)
        self.detail = detail
        self.details = details or {}

# --- Input and Configuration Exceptions ---

class ScenarioValidationException(SpareStrategyException):
    """
    Raised when a scenario file cannot be parsed or violates a model invariant.
    Details carry the field path and line number of each problem.
    Maps to exit code 2.
    """
    code = "SCENARIO_INVALID"
    exit_code = 2

    def __init__(self, detail: str = "Scenario file is invalid.", details: Optional[dict[str, Any]] = None):
        super().__init__(detail, details)

class InvalidParameterException(SpareStrategyException, ValueError):
    """
    Raised by library functions when a precondition on their arguments does not hold.
    Maps to exit code 2.
    """
    code = "INVALID_PARAMETER"
    exit_code = 2

    def __init__(self, detail: str = "Invalid parameter.", details: Optional[dict[str, Any]] = None):
        super().__init__(detail, details)

class DimensionMismatchException(SpareStrategyException, ValueError):
    """
    Raised when two distributions or matrices that must share a level range do not.
    Maps to exit code 2.
    """
    code = "DIMENSION_MISMATCH"
    exit_code = 2

    def __init__(self, detail: str = "Dimension mismatch.", details: Optional[dict[str, Any]] = None):
        super().__init__(detail, details)

class GeometryException(SpareStrategyException):
    """
    Raised when the orbit geometry admits no contact schedule.
    Maps to exit code 2.
    """
    code = "GEOMETRY_INFEASIBLE"
    exit_code = 2

    def __init__(self, detail: str = "no relative RAAN drift; indirect strategy infeasible", details: Optional[dict[str, Any]] = None):
        super().__init__(detail, details)

# --- Numerical Exceptions ---

class SolverConvergenceException(SpareStrategyException):
    """
    Raised when a power iteration or the coupling fixed point hits its iteration cap.
    Details carry the last residual (and the residual trace for the fixed point).
    Maps to exit code 3.
    """
    code = "SOLVER_NOT_CONVERGED"
    exit_code = 3

    def __init__(self, detail: str = "Solver did not converge.", details: Optional[dict[str, Any]] = None):
        super().__init__(detail, details)

class SingularSystemException(SpareStrategyException):
    """
    Raised when a series closed form needs the inverse of a singular matrix.
    Maps to exit code 3.
    """
    code = "SINGULAR_SYSTEM"
    exit_code = 3

    def __init__(self, detail: str = "Linear system is singular.", details: Optional[dict[str, Any]] = None):
        super().__init__(detail, details)

# --- Optimization Exceptions ---

class InfeasibleDesignException(SpareStrategyException):
    """
    Raised when no evaluated (r,q) design satisfies the shortfall constraint.
    Details carry the least-infeasible design.
    Maps to exit code 4.
    """
    code = "NO_FEASIBLE_DESIGN"
    exit_code = 4

    def __init__(self, detail: str = "No feasible design in the searched ranges.", details: Optional[dict[str, Any]] = None):
        super().__init__(detail, details)
