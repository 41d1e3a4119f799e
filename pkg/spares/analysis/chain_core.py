# spares/analysis/chain_core.py

"""
Markov machinery shared by both resupply strategies.

Vectors and matrices use the descending-level convention: index i holds level
n_bar - i, and transition matrices act on columns (pi' = P @ pi).
"""

import logging
from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy import stats

from spares.config import settings
from spares.schemas import FailureModel, LeadTimeModel, StateDistribution
from spares.exceptions.custom_exceptions import (
    InvalidParameterException, SingularSystemException, SolverConvergenceException
)

logger = logging.getLogger(__name__)

TransitionMatrix = npt.NDArray[np.float64]

# --- Level Indexing ---

def level_index(level: npt.ArrayLike, level_max: int) -> npt.NDArray[np.int64]:
    """Position of `level` in a descending-level vector."""
    return level_max - np.asarray(level, dtype=np.int64)

def levels_descending(level_max: int) -> npt.NDArray[np.int64]:
    return np.arange(level_max, -1, -1)

def is_column_stochastic(p: TransitionMatrix, tol: Optional[float] = None) -> bool:
    tol = settings.STOCHASTIC_TOL if tol is None else tol
    return bool(np.all(p >= -tol) and np.all(np.abs(p.sum(axis=0) - 1.0) <= tol))

def solve_left(a: TransitionMatrix, name: str) -> TransitionMatrix:
    """
    Inverse of a (I - A)-type matrix; raises SingularSystemException instead of LinAlgError.
    """
    try:
        inverse = np.linalg.inv(a)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemException(f"{name} is singular.", details={"matrix": name}) from exc
    if not np.all(np.isfinite(inverse)):
        raise SingularSystemException(f"{name} is numerically singular.", details={"matrix": name})
    return inverse

# --- Failure Process ---

def failure_pmf(model: FailureModel, k: int, n: int) -> float:
    """
    Probability of k failures in one step at stock level n.
    Only min(n, n_sat) satellites are operating, so the Poisson mean is min(n, n_sat)*lambda.
    """
    if k < 0 or k > model.n_sat:
        raise InvalidParameterException(f"Failure count {k} outside 0..{model.n_sat}.")
    if n < 0:
        raise InvalidParameterException(f"Stock level {n} is negative.")
    return float(stats.poisson.pmf(k, min(n, model.n_sat) * model.lambda_sat_per_step))

def build_failure_matrix(model: FailureModel) -> TransitionMatrix:
    """
    One-step failure transition P_f over levels n_bar..0.

    Column n spreads nu_{k,n} over levels n-k for k < min(n, n_sat); the remaining
    mass (every operating satellite lost) lands on level max(n - n_sat, 0).
    """
    size = model.n_bar + 1
    p_f = np.zeros((size, size))
    for n in range(size):
        col = level_index(n, model.n_bar)
        operating = min(n, model.n_sat)
        if operating == 0:
            p_f[col, col] = 1.0
            continue
        ks = np.arange(operating)
        pmf = stats.poisson.pmf(ks, operating * model.lambda_sat_per_step)
        p_f[level_index(n - ks, model.n_bar), col] = pmf
        p_f[level_index(n - operating, model.n_bar), col] += max(0.0, 1.0 - float(pmf.sum()))
    return p_f

# --- Replenishment and Division ---

def build_replenishment_matrix(r: int, q: int) -> TransitionMatrix:
    """
    Delivery of q units: level x <= r moves to x + q, higher levels stay put.
    """
    if q < 1 or r < 0:
        raise InvalidParameterException(f"Replenishment needs q >= 1 and r >= 0 (got r={r}, q={q}).")
    n_bar = r + q
    p_q = np.zeros((n_bar + 1, n_bar + 1))
    levels = np.arange(n_bar + 1)
    targets = np.where(levels <= r, levels + q, levels)
    p_q[level_index(targets, n_bar), level_index(levels, n_bar)] = 1.0
    return p_q

def state_division(r: int, n_bar: int) -> tuple[TransitionMatrix, TransitionMatrix]:
    """
    (C+, C-): diagonal selectors of levels above r and of levels at or below r.
    """
    if not 0 <= r <= n_bar:
        raise InvalidParameterException(f"Reorder level {r} outside 0..{n_bar}.")
    above = (levels_descending(n_bar) > r).astype(float)
    return np.diag(above), np.diag(1.0 - above)

# --- Lead Time ---

def lead_time_pmf(model: LeadTimeModel, k: int) -> float:
    """
    Probability that delivery falls in the k-th step after the constant offset t_lv.
    """
    if k < 0:
        raise InvalidParameterException(f"Lead time step {k} is negative.")
    survive = model.step_survival
    return survive**k * (1.0 - survive)

# --- Stationary Solver ---

def stationary_distribution(
    p: TransitionMatrix,
    initial: Optional[npt.ArrayLike] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> StateDistribution:
    """
    Fixed point of pi = P pi by power iteration from a uniform (or given) start.

    Iterates the lazy chain (I + P)/2, which has the same fixed points as P and
    cannot oscillate on periodic chains. Each iterate is renormalized.
    """
    tol = settings.STATIONARY_TOL if tol is None else tol
    max_iter = settings.STATIONARY_MAX_ITER if max_iter is None else max_iter
    size = p.shape[0]
    if p.shape != (size, size):
        raise InvalidParameterException(f"Transition matrix must be square, got {p.shape}.")

    pi = np.full(size, 1.0 / size) if initial is None else np.asarray(initial, dtype=float).copy()
    if pi.shape != (size,) or pi.sum() <= 0.0:
        raise InvalidParameterException("Initial guess must be a nonzero vector matching the matrix dimension.")
    pi = pi / pi.sum()

    residual = np.inf
    for iteration in range(1, max_iter + 1):
        nxt = 0.5 * (pi + p @ pi)
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - pi).sum())
        pi = nxt
        if residual <= tol:
            logger.debug(f"Power iteration converged in {iteration} iterations (residual {residual:.2e}).")
            return StateDistribution.from_vector(pi)

    raise SolverConvergenceException(
        f"Power iteration did not converge within {max_iter} iterations.",
        details={"residual": residual, "iterations": max_iter},
    )
