# spares/analysis/direct.py

import math
import logging

import numpy as np

from spares.schemas import DirectPolicy, DirectResult, StateDistribution
from spares.analysis.chain_core import (
    TransitionMatrix, build_failure_matrix, build_replenishment_matrix,
    solve_left, state_division, stationary_distribution
)
from spares.exceptions.custom_exceptions import InvalidParameterException

logger = logging.getLogger(__name__)

def reorder_transition(policy: DirectPolicy) -> TransitionMatrix:
    """
    P_{r/q} = C-(I - P_f C+)^-1: from the state right after a delivery to the
    state at the next reorder. Each failure step either stays above r (C+) or
    triggers the reorder (C-).
    """
    p_f = build_failure_matrix(policy.failure)
    c_plus, c_minus = state_division(policy.r, policy.n_bar)
    identity = np.eye(policy.n_bar + 1)
    return c_minus @ solve_left(identity - p_f @ c_plus, "I - P_f C+")

def replenish_transition(policy: DirectPolicy) -> TransitionMatrix:
    """
    P_{q/r} = (1 - a) P_q P_f^(m+1) (I - a P_f)^-1 with a = e^(-mu T_mc): from the
    reorder state to the state right after the delivery, summed over the lead time.
    """
    p_f = build_failure_matrix(policy.failure)
    p_q = build_replenishment_matrix(policy.r, policy.q)
    a = policy.lead.step_survival
    identity = np.eye(policy.n_bar + 1)
    offset = np.linalg.matrix_power(p_f, policy.lead.m + 1)
    return (1.0 - a) * p_q @ offset @ solve_left(identity - a * p_f, "I - a P_f")

def _degenerate_result(policy: DirectPolicy) -> DirectResult:
    logger.warning(f"Failure rate is zero for (r={policy.r}, q={policy.q}); no reorder ever triggers.")
    full = StateDistribution.point_mass(policy.n_bar, policy.n_bar)
    return DirectResult(pi_q=full, pi_np=full, pi_dr=full, t_np=math.inf, t_wp=0.0,
                        t_cycle=math.inf, degenerate=True)

def solve_direct(policy: DirectPolicy) -> DirectResult:
    """
    Stationary analysis of the direct (r,q) strategy.

    pi_q and pi_r are the states right after delivery and at the reorder instant.
    pi_np / pi_wp average the non-reordering and waiting periods per step, and
    pi_dr mixes them by their expected lengths.
    """
    if policy.failure.lambda_sat_per_step == 0.0:
        return _degenerate_result(policy)

    size = policy.n_bar + 1
    identity = np.eye(size)
    p_f = build_failure_matrix(policy.failure)
    c_plus, _ = state_division(policy.r, policy.n_bar)
    a = policy.lead.step_survival
    m = policy.lead.m

    p_rq = reorder_transition(policy)
    p_qr = replenish_transition(policy)
    pi_q = stationary_distribution(p_qr @ p_rq)
    pi_r = StateDistribution.from_vector(p_rq @ pi_q.probs)

    # Non-reordering period: steps from delivery until the reorder step
    np_rel = c_plus @ solve_left(identity - p_f @ c_plus, "I - P_f C+") @ pi_q.probs
    t_np = float(np_rel.sum())

    # Waiting period: m + 1 certain steps, then each further step survives with probability a
    certain = sum(np.linalg.matrix_power(p_f, i) for i in range(m + 1))
    tail = a * np.linalg.matrix_power(p_f, m + 1) @ solve_left(identity - a * p_f, "I - a P_f")
    wp_rel = (certain + tail) @ pi_r.probs
    t_wp = float(wp_rel.sum())

    pi_np = StateDistribution.from_vector(np_rel)
    pi_wp = StateDistribution.from_vector(wp_rel)
    pi_dr = StateDistribution.from_vector((t_np * pi_np.probs + t_wp * pi_wp.probs) / (t_np + t_wp))
    t_cycle = (t_np + t_wp) * policy.failure.t_mc
    logger.debug(f"Direct (r={policy.r}, q={policy.q}): T_np={t_np:.3f}, T_wp={t_wp:.3f} steps, T_cycle={t_cycle:.2f} d")

    return DirectResult(pi_q=pi_q, pi_r=pi_r, pi_np=pi_np, pi_wp=pi_wp, pi_dr=pi_dr,
                        t_np=t_np, t_wp=t_wp, t_cycle=t_cycle)

def shortfall_probability(result: DirectResult, y: int) -> float:
    """
    Long-run P(X < y) under pi_dr.
    """
    if not 0 <= y <= result.pi_dr.level_max + 1:
        raise InvalidParameterException(f"Threshold {y} outside 0..{result.pi_dr.level_max + 1}.")
    return result.pi_dr.prob_below(y)
