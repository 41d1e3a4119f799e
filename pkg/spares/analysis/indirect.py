# spares/analysis/indirect.py

"""
Indirect resupply: planes restock from parking orbits at RAAN contacts, and
parking orbits restock from the ground. The two chains are coupled through the
parking availability kappa and the plane demand eta, and solved as a fixed point.
"""

import logging
from typing import Callable, Optional

import numpy as np
import numpy.typing as npt

from spares.config import settings
from spares.schemas import (
    CouplingState, IndirectPolicy, IndirectResult, InplaneSolution, ParkingSolution, StateDistribution
)
from spares.analysis.chain_core import (
    TransitionMatrix, build_failure_matrix, build_replenishment_matrix, level_index,
    solve_left, state_division, stationary_distribution
)
from spares.exceptions.custom_exceptions import InvalidParameterException, SolverConvergenceException

logger = logging.getLogger(__name__)

# --- In-plane Chain ---

def demand_batches(x_i: int, r_i: int, q_i: int) -> int:
    """Batches a plane at stock x_i asks for at a contact."""
    if x_i > r_i:
        return 0
    return -(-(r_i + 1 - x_i) // q_i)

def max_demand(r_i: int, q_i: int) -> int:
    return demand_batches(0, r_i, q_i)

def _validate_kappa(kappa: npt.ArrayLike) -> np.ndarray:
    kappa = np.asarray(kappa, dtype=float)
    tol = settings.STOCHASTIC_TOL
    if kappa.ndim != 1 or kappa.size == 0 or abs(kappa[0] - 1.0) > tol:
        raise InvalidParameterException("kappa must be a vector starting at 1.")
    if np.any(np.diff(kappa) > tol) or np.any(kappa < -tol):
        raise InvalidParameterException("kappa must be nonincreasing and nonnegative.")
    return kappa

def inplane_replenishment_matrix(kappa: npt.ArrayLike, r_i: int, q_i: int) -> TransitionMatrix:
    """
    Contact transition P_{q_i}. A plane short by d batches receives all d with
    probability kappa_d and exactly j < d with probability kappa_j - kappa_{j+1}.
    """
    kappa = _validate_kappa(kappa)
    d_max = max_demand(r_i, q_i)
    padded = np.zeros(d_max + 2)
    used = min(kappa.size, padded.size)
    padded[:used] = kappa[:used]

    n_bar = r_i + q_i
    p_qi = np.zeros((n_bar + 1, n_bar + 1))
    for x in range(n_bar + 1):
        col = level_index(x, n_bar)
        d = demand_batches(x, r_i, q_i)
        if d == 0:
            p_qi[col, col] = 1.0
            continue
        p_qi[level_index(x + d * q_i, n_bar), col] += padded[d]
        for j in range(d):
            p_qi[level_index(x + j * q_i, n_bar), col] += padded[j] - padded[j + 1]
    return p_qi

def demand_distribution(pi_r_i: StateDistribution, r_i: int, q_i: int) -> np.ndarray:
    """eta_d = P(D = d) under the pre-contact distribution."""
    levels = pi_r_i.levels
    demands = np.array([demand_batches(int(x), r_i, q_i) for x in levels])
    return np.bincount(demands, weights=pi_r_i.probs, minlength=max_demand(r_i, q_i) + 1)

def solve_inplane(policy: IndirectPolicy, kappa: npt.ArrayLike) -> InplaneSolution:
    """
    In-plane (r_i, q_i, T_plane) chain for a given parking availability.
    """
    n_bar = policy.n_bar_i
    if policy.failure.lambda_sat_per_step == 0.0:
        full = StateDistribution.point_mass(n_bar, n_bar)
        eta = np.zeros(max_demand(policy.r_i, policy.q_i) + 1)
        eta[0] = 1.0
        return InplaneSolution(pi_q_i=full, pi_r_i=full, pi_ir_i=full, eta=eta, degenerate=True)

    p_f = build_failure_matrix(policy.failure)
    p_review = np.linalg.matrix_power(p_f, policy.k_i)
    p_qi = inplane_replenishment_matrix(kappa, policy.r_i, policy.q_i)

    pi_q = stationary_distribution(p_qi @ p_review)
    pi_r = StateDistribution.from_vector(p_review @ pi_q.probs)

    total = np.zeros(n_bar + 1)
    current = pi_q.probs.copy()
    for _ in range(policy.k_i):
        total += current
        current = p_f @ current
    pi_ir = StateDistribution.from_vector(total / policy.k_i)

    return InplaneSolution(pi_q_i=pi_q, pi_r_i=pi_r, pi_ir_i=pi_ir,
                           eta=demand_distribution(pi_r, policy.r_i, policy.q_i))

# --- Parking Chain ---

def parking_demand_matrix(eta: npt.ArrayLike, n_bar_p: int) -> TransitionMatrix:
    """
    Contact transition of a parking orbit, P_{f_p}: stock s drops by d < s with
    probability eta_d; any demand of s or more empties it.
    """
    eta = np.asarray(eta, dtype=float)
    if eta.ndim != 1 or np.any(eta < -settings.STOCHASTIC_TOL) or abs(eta.sum() - 1.0) > settings.NORMALIZATION_TOL:
        raise InvalidParameterException("eta must be a probability vector.")
    p_fp = np.zeros((n_bar_p + 1, n_bar_p + 1))
    for s in range(n_bar_p + 1):
        col = level_index(s, n_bar_p)
        if s == 0:
            p_fp[col, col] = 1.0
            continue
        ds = np.arange(min(s, eta.size))
        p_fp[level_index(s - ds, n_bar_p), col] = eta[ds]
        p_fp[level_index(0, n_bar_p), col] += max(0.0, 1.0 - float(eta[ds].sum()))
    return p_fp

def segment_probabilities(policy: IndirectPolicy) -> tuple[float, float]:
    """
    (rho_p3, rho_p4). rho_p3: delivery lands before the first contact after the
    offset. rho_p4 * b^(j-1): exactly j further contacts pass first, with
    b = e^(-mu T_park).
    """
    a = policy.lead.step_survival
    _, _, remaining = _lead_split(policy)
    b = a**policy.k_p
    return 1.0 - a**remaining, a**remaining * (1.0 - b)

def _lead_split(policy: IndirectPolicy) -> tuple[int, int, int]:
    """(m_p, T_lp, T_rp) in steps."""
    m = policy.lead.m
    m_p = m // policy.k_p
    leading = m - m_p * policy.k_p
    remaining = (m_p + 1) * policy.k_p - m
    return m_p, leading, remaining

def _weighted_steps(a: float, n: int) -> float:
    """Sum over i < n of a^i: expected waiting steps in a segment of n steps."""
    return float(np.sum(a ** np.arange(n)))

def _steps_to_contact(a: float, n: int) -> float:
    """
    Expected steps between a delivery and the next contact when delivery falls
    in a window of n steps, weighted by the lead-time probability of each slot.
    """
    i = np.arange(n)
    return float(np.sum(a**i * (1.0 - a) * (n - 1 - i)))

def _degenerate_parking(policy: IndirectPolicy) -> ParkingSolution:
    logger.warning("Parking orbits see no demand; stock stays at its first fill.")
    full = StateDistribution.point_mass(policy.n_bar_p, policy.n_bar_p)
    return ParkingSolution(pi_q_p=full, pi_np_p=full, pi_ir_p=full, t_np_p=np.inf, t_wp_p=0.0,
                           t_cycle_p=np.inf, degenerate=True)

def solve_parking(policy: IndirectPolicy, eta: npt.ArrayLike) -> ParkingSolution:
    """
    Parking (r_p, q_p, T_park) chain for a given plane demand distribution.

    Demand and review happen only at contacts; ground deliveries arrive at any step.
    The waiting average splits the lead time into four segments: whole park periods
    inside the offset, the rest of the offset, the part of the first post-offset
    period, and every later period.
    """
    eta = np.asarray(eta, dtype=float)
    if eta[0] >= 1.0 - settings.STOCHASTIC_TOL:
        return _degenerate_parking(policy)

    n_bar = policy.n_bar_p
    identity = np.eye(n_bar + 1)
    k_p = policy.k_p
    a = policy.lead.step_survival
    b = a**k_p
    m_p, leading, remaining = _lead_split(policy)
    rho3, rho4 = segment_probabilities(policy)

    p_fp = parking_demand_matrix(eta, n_bar)
    p_q = build_replenishment_matrix(policy.r_p, policy.q_p)
    c_plus, c_minus = state_division(policy.r_p, n_bar)

    # Each contact applies demand first, then reviews
    no_reorder = solve_left(identity - c_plus @ p_fp, "I - C+ P_fp")
    p_rq = c_minus @ p_fp @ no_reorder
    later = p_fp @ solve_left(identity - b * p_fp, "I - b P_fp") # sum_{j>=1} b^(j-1) P_fp^j
    offset = np.linalg.matrix_power(p_fp, m_p)
    p_qr = p_q @ offset @ (rho3 * identity + rho4 * later)

    pi_q = stationary_distribution(p_qr @ p_rq)
    pi_r = StateDistribution.from_vector(p_rq @ pi_q.probs)

    # Waiting period, four segments
    wp_1 = k_p * sum(np.linalg.matrix_power(p_fp, i) for i in range(m_p)) @ pi_r.probs if m_p else 0.0
    wp_2 = leading * offset @ pi_r.probs
    wp_3 = _weighted_steps(a, remaining) * offset @ pi_r.probs
    wp_4 = a**remaining * _weighted_steps(a, k_p) * offset @ later @ pi_r.probs
    wp_rel = wp_1 + wp_2 + wp_3 + wp_4
    t_wp = float(wp_rel.sum())

    # Non-reorder period: steps until the first contact after delivery, then whole periods
    arrival = (_steps_to_contact(a, remaining) * p_q @ offset
               + a**remaining * _steps_to_contact(a, k_p) * p_q @ offset @ later) @ pi_r.probs
    np_rel = k_p * c_plus @ p_fp @ no_reorder @ pi_q.probs + arrival
    t_np = float(np_rel.sum())

    pi_np = StateDistribution.from_vector(np_rel)
    pi_wp = StateDistribution.from_vector(wp_rel)
    pi_ir = StateDistribution.from_vector((t_np * pi_np.probs + t_wp * pi_wp.probs) / (t_np + t_wp))
    t_cycle = (t_np + t_wp) * policy.t_mc
    logger.debug(f"Parking: m_p={m_p}, T_lp={leading}, T_rp={remaining} steps; T_np={t_np:.2f}, T_wp={t_wp:.2f}")

    return ParkingSolution(pi_q_p=pi_q, pi_r_p=pi_r, pi_np_p=pi_np, pi_wp_p=pi_wp, pi_ir_p=pi_ir,
                           t_np_p=t_np, t_wp_p=t_wp, t_cycle_p=t_cycle)

def parking_availability(pi_ir_p: StateDistribution) -> np.ndarray:
    """kappa_j = P(X_p >= j), j = 0..n_bar_p."""
    kappa = np.clip(pi_ir_p.survival(), 0.0, 1.0)
    kappa[0] = 1.0
    return np.minimum.accumulate(kappa)

# --- Coupled Fixed Point ---

def solve_indirect(policy: IndirectPolicy, initial: Optional[CouplingState] = None,
                   tol: Optional[float] = None, max_iter: Optional[int] = None,
                   callback: Optional[Callable[[int, CouplingState], None]] = None) -> IndirectResult:
    """
    Alternates the in-plane and parking chains until kappa and eta stop moving.
    Starts from unconstrained parking (kappa all ones, eta = no demand) unless
    `initial` is given. `callback` receives every intermediate coupling state.
    """
    tol = settings.FIXED_POINT_TOL if tol is None else tol
    max_iter = settings.FIXED_POINT_MAX_ITER if max_iter is None else max_iter

    if initial is None:
        kappa = np.ones(policy.n_bar_p + 1)
        eta = np.zeros(max_demand(policy.r_i, policy.q_i) + 1)
        eta[0] = 1.0
    else:
        kappa, eta = np.array(initial.kappa), np.array(initial.eta)

    trace: list[float] = []
    for iteration in range(1, max_iter + 1):
        inplane = solve_inplane(policy, kappa)
        parking = solve_parking(policy, inplane.eta)
        new_kappa = parking_availability(parking.pi_ir_p)

        residual = max(float(np.max(np.abs(inplane.eta - eta))), float(np.max(np.abs(new_kappa - kappa))))
        trace.append(residual)
        logger.debug(f"Fixed point iteration {iteration}: residual {residual:.3e}")
        kappa, eta = new_kappa, inplane.eta
        if callback is not None:
            callback(iteration, CouplingState(kappa=kappa, eta=eta))

        if residual <= tol:
            logger.info(f"Indirect fixed point converged in {iteration} iterations (residual {residual:.2e}).")
            return IndirectResult(
                pi_ir_i=inplane.pi_ir_i, pi_ir_p=parking.pi_ir_p,
                pi_q_i=inplane.pi_q_i, pi_r_i=inplane.pi_r_i,
                pi_q_p=parking.pi_q_p, pi_r_p=parking.pi_r_p,
                coupling=CouplingState(kappa=kappa, eta=eta),
                iterations=iteration, residual=residual, residual_trace=trace,
                t_cycle_p=parking.t_cycle_p,
                degenerate=inplane.degenerate or parking.degenerate,
            )

    raise SolverConvergenceException(
        f"Indirect fixed point did not converge within {max_iter} iterations.",
        details={"residual_trace": trace},
    )
