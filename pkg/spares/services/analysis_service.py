# spares/services/analysis_service.py

import math
import time
import logging
from typing import Any, Optional, Union

import numpy as np
import pandas as pd

from spares.config import settings
from spares.schemas import (
    CommandOutput, ComparisonMetrics, ContactGeometry, CostParams, DirectPolicy, DirectResult,
    EmpiricalDistribution, GAParams, IndirectPolicy, IndirectResult, OrbitGeometry, ScenarioFile,
    ScenarioOrbit, SimulationConfig, StateDistribution
)
from spares.analysis.direct import solve_direct
from spares.analysis.indirect import solve_indirect
from spares.analysis.orbit import contact_periods, quantize_contact_periods
from spares.services.simulation_service import SimulationService, compare_distributions
from spares.services.optimization_service import OptimizationService
from spares.exceptions.custom_exceptions import ScenarioValidationException

logger = logging.getLogger(__name__)

Policy = Union[DirectPolicy, IndirectPolicy]

# --- Table Builders ---

def distribution_frame(dist: StateDistribution) -> pd.DataFrame:
    return pd.DataFrame({"level": np.arange(dist.level_max + 1), "probability": dist.ascending()})

def histogram_frame(hist: EmpiricalDistribution) -> pd.DataFrame:
    counts = hist.counts[::-1]
    probability = counts / hist.samples if hist.samples else np.zeros(counts.size)
    return pd.DataFrame({"level": np.arange(hist.level_max + 1), "count": counts, "probability": probability})

def comparison_frame(analytic: StateDistribution, hist: EmpiricalDistribution,
                     metrics: ComparisonMetrics) -> pd.DataFrame:
    empirical = hist.to_distribution().ascending()
    exact = analytic.ascending()
    return pd.DataFrame({
        "level": np.arange(analytic.level_max + 1),
        "analytic": exact,
        "empirical": empirical,
        "abs_error": np.abs(exact - empirical),
        "relative_error": metrics.relative_error[::-1],
    })

def distribution_summary(dist: StateDistribution) -> dict[str, Any]:
    return {"mean_level": dist.mean_level(), "probabilities": dist.ascending().tolist()}

def histogram_summary(hist: EmpiricalDistribution) -> dict[str, Any]:
    summary: dict[str, Any] = {"sampling_mode": hist.sampling_mode, "samples": hist.samples,
                               "counts": hist.counts[::-1].tolist()}
    if hist.samples:
        summary["mean_level"] = hist.to_distribution().mean_level()
    return summary

def _elapsed_ms(start: float) -> float:
    return round((time.perf_counter() - start) * 1000.0, 3)

def _orbit(block: ScenarioOrbit) -> OrbitGeometry:
    return OrbitGeometry(semi_major_axis=block.semi_major_axis_km, inclination=math.radians(block.inclination_deg))

class AnalysisService:
    """
    Turns a validated scenario into policies and runs analysis, simulation and
    validation on them. Optimization is delegated to OptimizationService.
    """
    def __init__(self, scenario: ScenarioFile, simulation_service: Optional[SimulationService] = None):
        self.scenario = scenario
        self.simulation_service = simulation_service or SimulationService()
        logger.debug("AnalysisService initialized.")

    def with_failure_rate(self, lambda_per_year: float) -> "AnalysisService":
        """Same scenario at another failure rate."""
        failure = self.scenario.failure.model_copy(update={"lambda_per_year": lambda_per_year})
        return AnalysisService(self.scenario.model_copy(update={"failure": failure}), self.simulation_service)

    # --- Policy Construction ---

    def build_direct_policy(self) -> DirectPolicy:
        s = self.scenario
        return DirectPolicy.build(
            r=s.policy.r, q=s.policy.q, lambda_per_year=s.failure.lambda_per_year,
            n_sat=s.constellation.n_sats, mean_lead_days=s.lead_time.mean_exp_days,
            t_lv=s.lead_time.t_lv, t_mc=s.failure.t_mc,
        )

    def contact_periods(self) -> tuple[float, float]:
        """
        (t_plane, t_park) [day]: explicit values when the scenario gives them,
        otherwise derived from the orbits and rounded onto the T_mc grid.
        """
        c = self.scenario.constellation
        if c.t_plane is not None and c.t_park is not None:
            return c.t_plane, c.t_park
        geometry = ContactGeometry(n_planes=c.n_planes, n_park=c.n_park,
                                   plane_orbit=_orbit(c.plane_orbit), park_orbit=_orbit(c.park_orbit))
        _, t_park = contact_periods(geometry)
        return quantize_contact_periods(t_park, c.n_planes, c.n_park, self.scenario.failure.t_mc)

    def build_indirect_policy(self) -> IndirectPolicy:
        s = self.scenario
        t_plane, t_park = self.contact_periods()
        return IndirectPolicy.build(
            r_i=s.policy.r, q_i=s.policy.q, r_p=s.policy.r_p, q_p=s.policy.q_p,
            lambda_per_year=s.failure.lambda_per_year, n_sat=s.constellation.n_sats,
            mean_lead_days=s.lead_time.mean_exp_days, t_lv=s.lead_time.t_lv,
            t_plane=t_plane, t_park=t_park, t_mc=s.failure.t_mc,
        )

    def build_policy(self) -> Policy:
        return self.build_direct_policy() if self.scenario.strategy == "direct" else self.build_indirect_policy()

    def build_cost_params(self) -> CostParams:
        if self.scenario.costs is None:
            raise ScenarioValidationException("Optimization needs a 'costs' block.",
                                              details={"errors": [{"field": "costs", "line": None,
                                                                   "message": "Field required"}]})
        return CostParams(**self.scenario.costs.model_dump(), n_planes=self.scenario.constellation.n_planes)

    def build_simulation_config(self, policy: Policy, cycle_days: float, seed: Optional[int] = None) -> SimulationConfig:
        """
        Monte Carlo configuration from the simulation block. Without an explicit
        warmup, SIM_WARMUP_CYCLES analytic cycles are discarded, capped at half the horizon.
        """
        block = self.scenario.simulation
        if block is None:
            raise ScenarioValidationException("Simulation needs a 'simulation' block.",
                                              details={"errors": [{"field": "simulation", "line": None,
                                                                   "message": "Field required"}]})
        warmup = block.warmup_days
        if warmup is None:
            warmup = settings.SIM_WARMUP_CYCLES * cycle_days if math.isfinite(cycle_days) else 0.0
            if warmup >= 0.5 * block.horizon_days:
                logger.warning(f"Default warmup {warmup:.1f} d exceeds half the horizon; using {0.5 * block.horizon_days:.1f} d")
                warmup = 0.5 * block.horizon_days
        return SimulationConfig(
            strategy=self.scenario.strategy, policy=policy,
            n_planes=self.scenario.constellation.n_planes,
            n_park=self.scenario.constellation.n_park or 1,
            horizon=block.horizon_days, warmup=warmup,
            seed=block.seed if seed is None else seed,
            trials=block.trials, contact_phase_steps=block.contact_phase_steps,
        )

    # --- Analysis ---

    def _policy_summary(self, policy: Policy) -> dict[str, Any]:
        s = self.scenario
        summary: dict[str, Any] = {
            "lambda_per_year": s.failure.lambda_per_year, "t_mc": s.failure.t_mc,
            "n_sat": s.constellation.n_sats, "n_planes": s.constellation.n_planes,
            "mean_exp_days": s.lead_time.mean_exp_days, "t_lv": s.lead_time.t_lv,
        }
        if isinstance(policy, DirectPolicy):
            summary.update(r=policy.r, q=policy.q, n_bar=policy.n_bar)
        else:
            summary.update(r_i=policy.r_i, q_i=policy.q_i, r_p=policy.r_p, q_p=policy.q_p,
                           n_park=s.constellation.n_park, t_plane=policy.t_plane, t_park=policy.t_park,
                           k_i=policy.k_i, k_p=policy.k_p)
        return summary

    def analyze_direct(self, policy: DirectPolicy) -> tuple[DirectResult, CommandOutput]:
        start = time.perf_counter()
        result = solve_direct(policy)
        elapsed = _elapsed_ms(start)
        distributions = {name: getattr(result, name) for name in ("pi_q", "pi_r", "pi_np", "pi_wp", "pi_dr")
                         if getattr(result, name) is not None}
        output = CommandOutput(
            analysis={
                "policy": self._policy_summary(policy),
                "t_np_steps": result.t_np, "t_wp_steps": result.t_wp, "t_cycle_days": result.t_cycle,
                "shortfall_probability": result.pi_dr.prob_below(policy.failure.n_sat),
                "degenerate": result.degenerate,
                "distributions": {name: distribution_summary(d) for name, d in distributions.items()},
            },
            tables={name: distribution_frame(d) for name, d in distributions.items()},
            units={name: "probability" for name in distributions},
            timings_ms={"analysis": elapsed},
        )
        logger.info(f"Direct analysis (r={policy.r}, q={policy.q}) finished in {elapsed} ms")
        return result, output

    def analyze_indirect(self, policy: IndirectPolicy) -> tuple[IndirectResult, CommandOutput]:
        start = time.perf_counter()
        result = solve_indirect(policy)
        elapsed = _elapsed_ms(start)
        distributions = {name: getattr(result, name) for name in ("pi_ir_i", "pi_ir_p", "pi_q_i", "pi_r_i",
                                                                  "pi_q_p", "pi_r_p")
                         if getattr(result, name) is not None}
        output = CommandOutput(
            analysis={
                "policy": self._policy_summary(policy),
                "iterations": result.iterations, "residual": result.residual,
                "residual_trace": result.residual_trace,
                "t_cycle_park_days": result.t_cycle_p,
                "shortfall_probability": result.pi_ir_i.prob_below(policy.failure.n_sat),
                "degenerate": result.degenerate,
                "kappa": result.coupling.kappa.tolist(),
                "eta": result.coupling.eta.tolist(),
                "distributions": {name: distribution_summary(d) for name, d in distributions.items()},
            },
            tables={name: distribution_frame(d) for name, d in distributions.items()},
            units={name: "probability" for name in distributions},
            timings_ms={"analysis": elapsed},
        )
        logger.info(f"Indirect analysis finished in {result.iterations} iterations, {elapsed} ms")
        return result, output

    def analyze(self) -> CommandOutput:
        policy = self.build_policy()
        if isinstance(policy, DirectPolicy):
            return self.analyze_direct(policy)[1]
        return self.analyze_indirect(policy)[1]

    # --- Simulation ---

    def _cycle_days(self, policy: Policy, result: Union[DirectResult, IndirectResult]) -> float:
        if isinstance(result, DirectResult):
            return result.t_cycle
        return max(result.t_cycle_p, policy.t_plane)

    def _simulate(self, cfg: SimulationConfig) -> tuple[dict[str, EmpiricalDistribution], CommandOutput]:
        start = time.perf_counter()
        if cfg.strategy == "direct":
            per_step, at_reorder, at_replenish = self.simulation_service.run_direct_sim(cfg)
            histograms = {"per_step": per_step, "at_reorder": at_reorder, "at_replenish": at_replenish}
        else:
            inplane, parking = self.simulation_service.run_indirect_sim(cfg)
            histograms = {"inplane": inplane, "parking": parking}
        elapsed = _elapsed_ms(start)
        output = CommandOutput(
            simulation={
                "horizon_days": cfg.horizon, "warmup_days": cfg.warmup, "seed": cfg.seed, "trials": cfg.trials,
                "n_planes": cfg.n_planes, "n_park": cfg.n_park, "contact_phase_steps": cfg.contact_phase_steps,
                "histograms": {name: histogram_summary(h) for name, h in histograms.items()},
            },
            tables={f"sim_{name}": histogram_frame(h) for name, h in histograms.items()},
            units={f"sim_{name}": "count" for name in histograms},
            timings_ms={"simulation": elapsed},
        )
        return histograms, output

    def simulate(self, seed: Optional[int] = None) -> CommandOutput:
        policy = self.build_policy()
        result = solve_direct(policy) if isinstance(policy, DirectPolicy) else solve_indirect(policy)
        cfg = self.build_simulation_config(policy, self._cycle_days(policy, result), seed)
        return self._simulate(cfg)[1]

    # --- Validation ---

    def validate(self, seed: Optional[int] = None) -> CommandOutput:
        """
        Analysis and simulation of the same scenario, compared level by level.
        """
        policy = self.build_policy()
        if isinstance(policy, DirectPolicy):
            result, output = self.analyze_direct(policy)
            pairs = {"pi_dr": (result.pi_dr, "per_step"), "pi_r": (result.pi_r, "at_reorder"),
                     "pi_q": (result.pi_q, "at_replenish")}
        else:
            result, output = self.analyze_indirect(policy)
            pairs = {"pi_ir_i": (result.pi_ir_i, "inplane"), "pi_ir_p": (result.pi_ir_p, "parking")}

        cfg = self.build_simulation_config(policy, self._cycle_days(policy, result), seed)
        histograms, sim_output = self._simulate(cfg)

        comparison: dict[str, Any] = {}
        tables = {**output.tables, **sim_output.tables}
        units = {**output.units, **sim_output.units}
        for name, (analytic, key) in pairs.items():
            hist = histograms[key]
            if analytic is None or hist.samples == 0:
                continue
            metrics = compare_distributions(analytic, hist)
            comparison[name] = {"histogram": key, "tv": metrics.tv, "max_abs": metrics.max_abs,
                                "analytic_mean_level": analytic.mean_level(),
                                "empirical_mean_level": hist.to_distribution().mean_level()}
            tables[f"compare_{name}"] = comparison_frame(analytic, hist, metrics)
            units[f"compare_{name}"] = "probability"
            logger.info(f"Validation {name} vs {key}: TV={metrics.tv:.4f}, max_abs={metrics.max_abs:.4f}")

        return CommandOutput(analysis=output.analysis, simulation=sim_output.simulation, comparison=comparison,
                             tables=tables, units=units, timings_ms={**output.timings_ms, **sim_output.timings_ms})

    # --- Optimization ---

    def optimize(self) -> CommandOutput:
        """
        Grid search over the scenario's (r, q) ranges, plus a genetic cross-check
        when enabled. Defaults: r from n_sat to n_sat + 10, q from 1 to q_max.
        """
        if self.scenario.strategy != "direct":
            raise ScenarioValidationException(
                "Optimization is defined for the direct strategy only.",
                details={"errors": [{"field": "strategy", "line": None, "message": "must be 'direct' for optimize"}]},
            )
        costs = self.build_cost_params()
        block = self.scenario.optimization
        n_sat = self.scenario.constellation.n_sats
        r_range = block.r_range if block and block.r_range else (n_sat, n_sat + 10)
        q_range = block.q_range if block and block.q_range else (1, costs.q_max)

        service = OptimizationService(self.build_direct_policy(), costs)
        start = time.perf_counter()
        best, design_map = service.grid_search(r_range, q_range)
        timings = {"grid_search": _elapsed_ms(start)}
        optimization: dict[str, Any] = {
            "r_range": list(r_range), "q_range": list(q_range), "costs": costs.model_dump(),
            "best": best.model_dump(), "evaluated": len(design_map),
            "feasible": sum(p.feasible for p in design_map),
        }

        ga = block.ga if block else None
        if ga is not None and ga.enabled:
            overrides = {k: v for k, v in ga.model_dump(exclude={"enabled"}).items() if v is not None}
            if "population" in overrides:
                overrides["parents_mating"] = min(settings.GA_PARENTS_MATING, overrides["population"])
            params = GAParams(**overrides)
            start = time.perf_counter()
            ga_best = service.ga_search(r_range, q_range, params)
            timings["ga_search"] = _elapsed_ms(start)
            optimization["ga"] = {"params": params.model_dump(), "best": ga_best.model_dump(),
                                  "matches_grid": (ga_best.r, ga_best.q) == (best.r, best.q)}

        design_frame = pd.DataFrame(
            [{"r": p.r, "q": p.q, "feasible": p.feasible, "c_build": p.c_build, "c_launch": p.c_launch,
              "c_holding": p.c_holding, "c_total": p.c_total, "shortfall": p.shortfall, "status": p.status}
             for p in design_map]
        )
        return CommandOutput(optimization=optimization, tables={"design_map": design_frame},
                             units={"design_map": "cost/year"}, timings_ms=timings)
