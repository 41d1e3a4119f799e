# spares/main.py

import sys
import argparse
import logging
from pathlib import Path
from typing import Callable, Optional, Sequence

from pydantic import ValidationError

from spares.config import settings
from spares.schemas import ErrorResponse
from spares.middleware.run_context import RunIDLogFilter, RunIDMiddleware, current_run_id
from spares.routers import analysis_router, optimization_router
from spares.exceptions.custom_exceptions import (
    SpareStrategyException, ScenarioValidationException, InvalidParameterException, DimensionMismatchException,
    GeometryException, SolverConvergenceException, SingularSystemException, InfeasibleDesignException
)

logger = logging.getLogger(__name__)

def configure_logging(level: Optional[str] = None) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.addFilter(RunIDLogFilter())
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s [%(run_id)s] %(name)s: %(message)s",
        handlers=[handler],
        force=True,
    )

# --- Global Exception Handlers ---
ExceptionHandler = Callable[[Exception], int]
_handlers: list[tuple[type[Exception], ExceptionHandler]] = []

def exception_handler(exc_type: type[Exception]) -> Callable[[ExceptionHandler], ExceptionHandler]:
    """Registers a handler; lookup walks registrations in order, so register specific classes first."""
    def decorator(func: ExceptionHandler) -> ExceptionHandler:
        _handlers.append((exc_type, func))
        return func
    return decorator

def _respond(code: str, message: str, details: Optional[dict] = None) -> None:
    print(ErrorResponse(code=code, message=message, details=details or None).model_dump_json(), file=sys.stderr)

def _spares_error(exc: SpareStrategyException) -> int:
    logger.warning(f"{type(exc).__name__}: {exc.detail} - Run ID: {current_run_id()}")
    _respond(exc.code, exc.detail, exc.details)
    return exc.exit_code

@exception_handler(ScenarioValidationException)
def scenario_validation_exception_handler(exc: ScenarioValidationException) -> int:
    return _spares_error(exc)

@exception_handler(GeometryException)
def geometry_exception_handler(exc: GeometryException) -> int:
    return _spares_error(exc)

@exception_handler(DimensionMismatchException)
def dimension_mismatch_exception_handler(exc: DimensionMismatchException) -> int:
    return _spares_error(exc)

@exception_handler(InvalidParameterException)
def invalid_parameter_exception_handler(exc: InvalidParameterException) -> int:
    return _spares_error(exc)

@exception_handler(SolverConvergenceException)
def solver_convergence_exception_handler(exc: SolverConvergenceException) -> int:
    return _spares_error(exc)

@exception_handler(SingularSystemException)
def singular_system_exception_handler(exc: SingularSystemException) -> int:
    return _spares_error(exc)

@exception_handler(InfeasibleDesignException)
def infeasible_design_exception_handler(exc: InfeasibleDesignException) -> int:
    return _spares_error(exc)

@exception_handler(SpareStrategyException)
def spare_strategy_exception_handler(exc: SpareStrategyException) -> int:
    return _spares_error(exc)

# Model invariants violated by derived inputs (e.g. an --strategy override)
@exception_handler(ValidationError)
def validation_error_handler(exc: ValidationError) -> int:
    errors = [{"field": ".".join(str(p) for p in err["loc"]) or None, "line": None, "message": err["msg"]}
              for err in exc.errors()]
    logger.warning(f"ValidationError: {len(errors)} error(s) - Run ID: {current_run_id()}")
    _respond(InvalidParameterException.code, f"{exc.title} failed validation: {errors[0]['message']}",
             {"errors": errors})
    return InvalidParameterException.exit_code

def handle_exception(exc: Exception) -> int:
    for exc_type, handler in _handlers:
        if isinstance(exc, exc_type):
            return handler(exc)
    logger.exception(f"Unhandled error: {exc} - Run ID: {current_run_id()}")
    _respond("INTERNAL_ERROR", f"Internal error: {exc}")
    return 1

# --- CLI Construction ---
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", type=Path, required=True, help="Scenario JSON file")
    common.add_argument("--out", type=Path, default=Path("out"), help="Output directory")
    common.add_argument("--seed", type=int, default=None, help="Simulation seed (overrides the scenario)")
    common.add_argument("--format", choices=["json", "csv", "both"], default="both")
    common.add_argument("--workers", type=int, default=None, help="Worker processes for Monte Carlo trials")
    common.add_argument("--strategy", choices=["direct", "indirect"], default=None,
                        help="Override the scenario's strategy")

    parser = argparse.ArgumentParser(prog="spares", description=settings.APP_DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    parser.add_argument("--log-level", default=None, help="Override SPARES_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)
    analysis_router.register(subparsers, common)
    optimization_router.register(subparsers, common)
    return parser

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    if getattr(args, "seed", None) is not None and not 0 <= args.seed < 2**64:
        parser.error("--seed must be an unsigned 64-bit integer")
    command = RunIDMiddleware(args.handler, args.command, error_handler=handle_exception)
    return command(args)

def run() -> None:
    sys.exit(main())

if __name__ == "__main__":
    run()
