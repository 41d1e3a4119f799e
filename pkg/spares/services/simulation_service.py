# spares/services/simulation_service.py

import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Callable, Optional

import numpy as np
from scipy import stats

from spares.config import settings
from spares.schemas import (
    ComparisonMetrics, DirectPolicy, EmpiricalDistribution, FailureModel, IndirectPolicy,
    SimulationConfig, StateDistribution
)
from spares.analysis.indirect import demand_batches
from spares.exceptions.custom_exceptions import DimensionMismatchException, InvalidParameterException

logger = logging.getLogger(__name__)

FAILURE_STREAM = 0
LEAD_STREAM = 1

Counts = tuple[np.ndarray, ...]

# --- Random Streams ---

def entity_stream(seed: int, trial: int, entity: int, kind: int) -> np.random.Generator:
    """
    Counter-based generator keyed by (seed, trial, entity, kind); independent of
    how trials are spread over workers.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial, entity, kind])))

class BlockDraws:
    """
    Draws for a group of entities, generated in fixed-size blocks of steps so
    row(t) depends only on the stream keys, never on which rows were read.
    """
    def __init__(self, generators: list[np.random.Generator], draw: Callable[[np.random.Generator, int], np.ndarray],
                 block: Optional[int] = None):
        self.generators = generators
        self.draw = draw
        self.block = block or settings.SIM_BLOCK_STEPS
        self._index = -1
        self._rows: Optional[np.ndarray] = None

    def row(self, t: int) -> np.ndarray:
        wanted = (t - 1) // self.block
        while self._index < wanted:
            self._rows = np.stack([self.draw(g, self.block) for g in self.generators], axis=1)
            self._index += 1
        return self._rows[(t - 1) % self.block]

class FailureSampler:
    """
    Inverse-CDF Poisson failure draws. A plane at stock x has min(x, n_sat)
    operating satellites; draws are capped at that count.
    """
    def __init__(self, model: FailureModel):
        self.n_sat = model.n_sat
        means = np.arange(model.n_sat + 1) * model.lambda_sat_per_step
        # thresholds[c, k] = P(Poisson(c * lambda) <= k)
        self.thresholds = stats.poisson.cdf(np.arange(model.n_sat)[None, :], means[:, None])

    def draw(self, uniforms: np.ndarray, stock: np.ndarray) -> np.ndarray:
        operating = np.minimum(stock, self.n_sat)
        failures = (uniforms[:, None] > self.thresholds[operating]).sum(axis=1)
        return np.minimum(failures, operating)

def _lead_delays(mu_lv: float, t_mc: float) -> Callable[[np.random.Generator, int], np.ndarray]:
    scale = 1.0 / mu_lv
    return lambda g, size: np.floor(g.exponential(scale, size) / t_mc).astype(np.int64)

def _uniforms(g: np.random.Generator, size: int) -> np.ndarray:
    return g.random(size)

# --- Trials ---

def _direct_trial(cfg: SimulationConfig, trial: int) -> Counts:
    """
    One trial of n_planes independent direct-resupply planes.

    Per step: failures, then deliveries that arrived during the step, then the
    reorder review; the recorded state is the one after the review.
    """
    policy: DirectPolicy = cfg.policy
    n_bar, r, q = policy.n_bar, policy.r, policy.q
    planes = range(cfg.n_planes)
    sampler = FailureSampler(policy.failure)
    failures = BlockDraws([entity_stream(cfg.seed, trial, p, FAILURE_STREAM) for p in planes], _uniforms)
    delays = BlockDraws([entity_stream(cfg.seed, trial, p, LEAD_STREAM) for p in planes],
                        _lead_delays(policy.lead.mu_lv, policy.failure.t_mc))
    offset = policy.lead.m + 1
    warmup = cfg.warmup_steps

    per_step = np.zeros(n_bar + 1, dtype=np.int64)
    at_reorder = np.zeros(n_bar + 1, dtype=np.int64)
    at_replenish = np.zeros(n_bar + 1, dtype=np.int64)
    stock = np.full(cfg.n_planes, n_bar, dtype=np.int64)
    due = np.full(cfg.n_planes, -1, dtype=np.int64)

    for t in range(1, cfg.horizon_steps + 1):
        stock -= sampler.draw(failures.row(t), stock)
        recording = t > warmup

        arrived = due == t
        if arrived.any():
            stock[arrived] += q
            due[arrived] = -1
            if recording:
                at_replenish += np.bincount(stock[arrived], minlength=n_bar + 1)

        reorder = (stock <= r) & (due < 0)
        if reorder.any():
            due[reorder] = t + offset + delays.row(t)[reorder]
            if recording:
                at_reorder += np.bincount(stock[reorder], minlength=n_bar + 1)

        if recording:
            per_step += np.bincount(stock, minlength=n_bar + 1)

    return per_step, at_reorder, at_replenish

def _indirect_trial(cfg: SimulationConfig, trial: int) -> Counts:
    """
    One trial of the full indirect system: every plane and every parking orbit.

    Parking orbit j meets plane ((t + j*k_i + phase) / k_p) mod n_planes whenever
    that numerator is a multiple of k_p, so each parking orbit sees the next plane
    every T_park and each plane sees the next parking orbit every T_plane.
    Per step: plane failures, ground deliveries to parking, then contacts (transfer
    min(demand, stock) batches, then parking review).
    """
    policy: IndirectPolicy = cfg.policy
    n_bar_i, n_bar_p = policy.n_bar_i, policy.n_bar_p
    k_i, k_p = policy.k_i, policy.k_p
    sampler = FailureSampler(policy.failure)
    failures = BlockDraws([entity_stream(cfg.seed, trial, p, FAILURE_STREAM) for p in range(cfg.n_planes)],
                          _uniforms)
    delays = BlockDraws([entity_stream(cfg.seed, trial, cfg.n_planes + j, LEAD_STREAM) for j in range(cfg.n_park)],
                        _lead_delays(policy.lead.mu_lv, policy.t_mc))
    demand = np.array([demand_batches(x, policy.r_i, policy.q_i) for x in range(n_bar_i + 1)])
    phase_offsets = np.arange(cfg.n_park) * k_i + cfg.contact_phase_steps
    offset = policy.lead.m + 1
    warmup = cfg.warmup_steps

    inplane = np.zeros(n_bar_i + 1, dtype=np.int64)
    parking = np.zeros(n_bar_p + 1, dtype=np.int64)
    plane_stock = np.full(cfg.n_planes, n_bar_i, dtype=np.int64)
    park_stock = np.full(cfg.n_park, n_bar_p, dtype=np.int64)
    due = np.full(cfg.n_park, -1, dtype=np.int64)

    for t in range(1, cfg.horizon_steps + 1):
        plane_stock -= sampler.draw(failures.row(t), plane_stock)

        arrived = due == t
        if arrived.any():
            park_stock[arrived] += policy.q_p
            due[arrived] = -1

        phase = t + phase_offsets
        for j in np.flatnonzero(phase % k_p == 0):
            p = (phase[j] // k_p) % cfg.n_planes
            transfer = min(demand[plane_stock[p]], park_stock[j])
            park_stock[j] -= transfer
            plane_stock[p] += transfer * policy.q_i
            if park_stock[j] <= policy.r_p and due[j] < 0:
                due[j] = t + offset + delays.row(t)[j]

        if t > warmup:
            inplane += np.bincount(plane_stock, minlength=n_bar_i + 1)
            parking += np.bincount(park_stock, minlength=n_bar_p + 1)

    return inplane, parking

# --- Service ---

class SimulationService:
    """
    Runs Monte Carlo trials, optionally across worker processes, and merges
    their histograms. Merging sums integer counts, so the result does not
    depend on the number of workers.
    """
    def __init__(self, workers: Optional[int] = None):
        self.workers = workers or settings.SIM_WORKERS
        logger.debug("SimulationService initialized.")

    def _run_trials(self, trial_fn: Callable[[SimulationConfig, int], Counts], cfg: SimulationConfig) -> Counts:
        if self.workers <= 1 or cfg.trials == 1:
            results = [trial_fn(cfg, trial) for trial in range(cfg.trials)]
        else:
            with ProcessPoolExecutor(max_workers=min(self.workers, cfg.trials)) as pool:
                results = list(pool.map(trial_fn, repeat(cfg), range(cfg.trials)))
        logger.info(f"Completed {cfg.trials} {cfg.strategy} trial(s) of {cfg.horizon_steps} steps "
                    f"(seed {cfg.seed}, {self.workers} worker(s)).")
        return tuple(np.sum(parts, axis=0) for parts in zip(*results))

    def run_direct_sim(self, cfg: SimulationConfig) -> tuple[EmpiricalDistribution, EmpiricalDistribution, EmpiricalDistribution]:
        """
        Returns (per_step, at_reorder, at_replenish) histograms, the empirical
        counterparts of pi_dr, pi_r and pi_q.
        """
        if cfg.strategy != "direct":
            raise InvalidParameterException("run_direct_sim needs a direct-strategy configuration.")
        per_step, at_reorder, at_replenish = self._run_trials(_direct_trial, cfg)
        return (
            EmpiricalDistribution.from_ascending_counts(per_step, "per-step"),
            EmpiricalDistribution.from_ascending_counts(at_reorder, "at-reorder"),
            EmpiricalDistribution.from_ascending_counts(at_replenish, "at-replenishment"),
        )

    def run_indirect_sim(self, cfg: SimulationConfig) -> tuple[EmpiricalDistribution, EmpiricalDistribution]:
        """
        Returns (inplane, parking) per-step histograms pooled over all planes
        and all parking orbits.
        """
        if cfg.strategy != "indirect":
            raise InvalidParameterException("run_indirect_sim needs an indirect-strategy configuration.")
        inplane, parking = self._run_trials(_indirect_trial, cfg)
        return (
            EmpiricalDistribution.from_ascending_counts(inplane, "per-step"),
            EmpiricalDistribution.from_ascending_counts(parking, "per-step"),
        )

def compare_distributions(a: StateDistribution, b: EmpiricalDistribution) -> ComparisonMetrics:
    """
    Total-variation distance, largest per-level gap and per-level relative error
    between an analytic distribution and a histogram.
    """
    if a.level_max != b.level_max:
        raise DimensionMismatchException(
            f"Analytic distribution covers 0..{a.level_max} but histogram covers 0..{b.level_max}."
        )
    empirical = b.to_distribution().probs
    gap = np.abs(a.probs - empirical)
    relative = np.divide(gap, a.probs, out=np.zeros_like(gap), where=a.probs > 0)
    return ComparisonMetrics(tv=0.5 * float(gap.sum()), max_abs=float(gap.max()), relative_error=relative)
