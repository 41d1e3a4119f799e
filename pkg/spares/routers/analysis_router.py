# spares/routers/analysis_router.py

import argparse
import json
import logging
from pathlib import Path
from typing import Optional

from spares import __version__
from spares.schemas import CommandOutput, MessageResponse, Provenance, ReportBundle, ScenarioFile
from spares.services.analysis_service import AnalysisService
from spares.services.simulation_service import SimulationService
from spares.repositories.scenario_repository import ScenarioRepository
from spares.repositories.report_repository import ReportRepository
from spares.middleware.run_context import current_run_id

logger = logging.getLogger(__name__)

# --- Dependencies for Services ---
def get_scenario_repository(path: Path) -> ScenarioRepository:
    return ScenarioRepository(path)

def get_report_repository(out_dir: Path, fmt: str) -> ReportRepository:
    return ReportRepository(out_dir, fmt)

def get_analysis_service(scenario: ScenarioFile, workers: Optional[int] = None) -> AnalysisService:
    """
    Provides an AnalysisService with its own SimulationService.
    """
    return AnalysisService(scenario, SimulationService(workers))

# --- Shared Helpers ---
def load_scenario(args: argparse.Namespace) -> tuple[ScenarioRepository, ScenarioFile]:
    """
    Loads the scenario; --strategy, when given, replaces the file's strategy and
    the result is validated again.
    """
    repo = get_scenario_repository(args.scenario)
    scenario = repo.load()
    if args.strategy and args.strategy != scenario.strategy:
        scenario = ScenarioFile.model_validate({**scenario.model_dump(), "strategy": args.strategy})
        logger.info(f"Strategy overridden to '{args.strategy}'")
    return repo, scenario

def emit_report(command: str, scenario: ScenarioFile, repo: ScenarioRepository, output: CommandOutput,
                out_dir: Path, fmt: str, seed: Optional[int] = None) -> ReportBundle:
    bundle = ReportBundle(
        command=command,
        strategy=scenario.strategy,
        provenance=Provenance(tool_version=__version__, scenario_hash=repo.hash,
                              scenario_path=str(repo.path), seed=seed, run_id=current_run_id()),
        analysis=output.analysis,
        simulation=output.simulation,
        comparison=output.comparison,
        optimization=output.optimization,
        timings_ms=output.timings_ms,
    )
    return get_report_repository(out_dir, fmt).write(bundle, output)

def _done(message: str) -> int:
    print(MessageResponse(message=message).model_dump_json())
    return 0

def _sim_seed(args: argparse.Namespace, scenario: ScenarioFile) -> Optional[int]:
    if args.seed is not None:
        return args.seed
    return scenario.simulation.seed if scenario.simulation else None

# --- Command Handlers ---
def analyze(args: argparse.Namespace) -> int:
    """
    Stationary analysis of the scenario's strategy.
    """
    repo, scenario = load_scenario(args)
    output = get_analysis_service(scenario, args.workers).analyze()
    emit_report("analyze", scenario, repo, output, args.out, args.format)
    return _done(f"Analysis report written to {args.out}")

def simulate(args: argparse.Namespace) -> int:
    """
    Monte Carlo histograms for the scenario.
    """
    repo, scenario = load_scenario(args)
    output = get_analysis_service(scenario, args.workers).simulate(seed=args.seed)
    emit_report("simulate", scenario, repo, output, args.out, args.format, seed=_sim_seed(args, scenario))
    return _done(f"Simulation report written to {args.out}")

def validate(args: argparse.Namespace) -> int:
    """
    Analysis against simulation. With --lambdas, one sub-report per failure
    rate under lambda_<rate>/ plus a sweep summary at the top level.
    """
    repo, scenario = load_scenario(args)
    service = get_analysis_service(scenario, args.workers)
    seed = _sim_seed(args, scenario)

    if not args.lambdas:
        output = service.validate(seed=args.seed)
        emit_report("validate", scenario, repo, output, args.out, args.format, seed=seed)
        return _done(f"Validation report written to {args.out}")

    sweep = []
    for rate in args.lambdas:
        swept = service.with_failure_rate(rate)
        output = swept.validate(seed=args.seed)
        emit_report("validate", swept.scenario, repo, output, args.out / f"lambda_{rate:g}", args.format, seed=seed)
        sweep.append({"lambda_per_year": rate, "directory": f"lambda_{rate:g}",
                      **{name: {"tv": c["tv"], "max_abs": c["max_abs"],
                                "analytic_mean_level": c["analytic_mean_level"]}
                         for name, c in output.comparison.items()}})
    emit_report("validate", scenario, repo, CommandOutput(comparison={"sweep": sweep}), args.out, args.format, seed=seed)
    return _done(f"Validation sweep over {len(sweep)} failure rate(s) written to {args.out}")

def schema(args: argparse.Namespace) -> int:
    """
    Prints the JSON schema of scenario files.
    """
    print(json.dumps(ScenarioFile.model_json_schema(), indent=2))
    return 0

def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    """Adds the analysis commands to the CLI."""
    cmd = subparsers.add_parser("analyze", parents=[common], help="Stationary Markov analysis of a scenario")
    cmd.set_defaults(handler=analyze)

    cmd = subparsers.add_parser("simulate", parents=[common], help="Monte Carlo simulation of a scenario")
    cmd.set_defaults(handler=simulate)

    cmd = subparsers.add_parser("validate", parents=[common], help="Compare analysis with simulation")
    cmd.add_argument("--lambdas", type=float, nargs="+", default=None,
                     help="Failure rates per satellite-year to sweep; one sub-report each")
    cmd.set_defaults(handler=validate)

    cmd = subparsers.add_parser("schema", help="Print the scenario file JSON schema")
    cmd.set_defaults(handler=schema)
