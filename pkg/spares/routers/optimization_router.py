# spares/routers/optimization_router.py

import argparse
import json
import logging

from spares.routers.analysis_router import emit_report, get_analysis_service, load_scenario

logger = logging.getLogger(__name__)

# --- Command Handlers ---
def optimize(args: argparse.Namespace) -> int:
    """
    (r,q) design optimization of the direct strategy: full design map and optimum.
    """
    repo, scenario = load_scenario(args)
    output = get_analysis_service(scenario, args.workers).optimize()
    emit_report("optimize", scenario, repo, output, args.out, args.format)
    best = output.optimization["best"]
    logger.info(f"Optimum (r={best['r']}, q={best['q']}) with c_total={best['c_total']:.4f}/yr")
    print(json.dumps({"message": f"Optimization report written to {args.out}", "best": {"r": best["r"], "q": best["q"]}}))
    return 0

def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    cmd = subparsers.add_parser("optimize", parents=[common], help="Cost-optimal (r,q) design for the direct strategy")
    cmd.set_defaults(handler=optimize)
