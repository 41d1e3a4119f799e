# spares/services/optimization_service.py

import math
import logging
from typing import Optional

import numpy as np
import pygad

from spares.config import settings
from spares.schemas import CostParams, DesignPoint, DirectPolicy, GAParams
from spares.analysis.direct import solve_direct
from spares.exceptions.custom_exceptions import InfeasibleDesignException, InvalidParameterException

logger = logging.getLogger(__name__)

Range = tuple[int, int]

def _out_of_bounds(r: int, q: int, reason: str) -> DesignPoint:
    return DesignPoint(r=r, q=q, feasible=False, c_build=math.inf, c_launch=math.inf, c_holding=math.inf,
                       status="out_of_bounds", reason=reason)

def evaluate_design(policy: DirectPolicy, costs: CostParams) -> DesignPoint:
    """
    Yearly cost and shortfall of one direct (r,q) design.

    Build and launch costs are paid once per replenishment cycle; the launch
    discount gamma applies only to full launches (q == q_max). Holding is
    charged on the whole stock level k for every level above n_sat.
    Designs outside n_sat <= r and 1 <= q <= q_max come back as out_of_bounds.
    """
    r, q, n_sat = policy.r, policy.q, policy.failure.n_sat
    if r < n_sat:
        return _out_of_bounds(r, q, f"reorder level {r} below nominal {n_sat}")
    if not 1 <= q <= costs.q_max:
        return _out_of_bounds(r, q, f"order size {q} outside 1..{costs.q_max}")

    result = solve_direct(policy)
    cycles_per_year = settings.DAYS_PER_YEAR / result.t_cycle
    launch_price = (1.0 - costs.gamma) * costs.p_launch if q == costs.q_max else costs.p_launch

    c_build = costs.n_planes * costs.p_build * q * cycles_per_year
    c_launch = costs.n_planes * launch_price * q * cycles_per_year
    levels = np.arange(policy.n_bar + 1)
    held = levels > n_sat
    c_holding = costs.n_planes * costs.p_holding * float(np.sum(levels[held] * result.pi_dr.ascending()[held]))

    shortfall = result.pi_dr.prob_below(n_sat)
    return DesignPoint(
        r=r, q=q, feasible=shortfall <= costs.xi,
        c_build=c_build, c_launch=c_launch, c_holding=c_holding,
        shortfall=shortfall, t_cycle=result.t_cycle,
        status="degenerate" if result.degenerate else "ok",
    )

def _rank(point: DesignPoint) -> tuple[float, int, int]:
    return point.c_total, point.r, point.q

def _least_infeasible(points: list[DesignPoint]) -> Optional[DesignPoint]:
    scored = [p for p in points if p.shortfall is not None]
    return min(scored, key=lambda p: (p.shortfall, _rank(p))) if scored else None

def _check_range(name: str, bounds: Range) -> None:
    if bounds[0] > bounds[1]:
        raise InvalidParameterException(f"{name} range {bounds} is empty.")

class OptimizationService:
    """
    (r,q) design search for the direct strategy around a fixed policy template
    (failure, lead time and n_sat) and cost model. Evaluations are cached per (r,q).
    """
    def __init__(self, template: DirectPolicy, costs: CostParams):
        self.template = template
        self.costs = costs
        self._cache: dict[tuple[int, int], DesignPoint] = {}
        logger.debug("OptimizationService initialized.")

    def evaluate(self, r: int, q: int) -> DesignPoint:
        key = (int(r), int(q))
        if key not in self._cache:
            if key[0] < 0 or key[1] < 1:
                self._cache[key] = _out_of_bounds(key[0], key[1], "r must be >= 0 and q >= 1")
            else:
                self._cache[key] = evaluate_design(self.template.with_rq(*key), self.costs)
        return self._cache[key]

    def grid_search(self, r_range: Range, q_range: Range) -> tuple[DesignPoint, list[DesignPoint]]:
        """
        Exhaustive search over inclusive ranges. Returns the cheapest feasible design
        (ties broken by smaller r, then smaller q) and the full map, ordered by (r, q).
        """
        _check_range("r", r_range)
        _check_range("q", q_range)
        design_map = [self.evaluate(r, q)
                      for r in range(r_range[0], r_range[1] + 1)
                      for q in range(q_range[0], q_range[1] + 1)]
        feasible = [p for p in design_map if p.feasible]
        if not feasible:
            closest = _least_infeasible(design_map)
            raise InfeasibleDesignException(
                f"No feasible design for r in {list(r_range)}, q in {list(q_range)} at xi = {self.costs.xi}.",
                details={"least_infeasible": closest.model_dump() if closest else None},
            )
        best = min(feasible, key=_rank)
        logger.info(f"Grid search over {len(design_map)} designs: best (r={best.r}, q={best.q}), "
                    f"c_total={best.c_total:.4f}/yr, {len(feasible)} feasible")
        return best, design_map

    def _fitness(self, point: DesignPoint) -> float:
        penalty = settings.GA_INFEASIBLE_PENALTY
        if point.status == "out_of_bounds":
            return -10.0 * penalty
        if point.feasible:
            return -point.c_total
        return -(point.c_total + penalty * (1.0 + point.shortfall - self.costs.xi))

    def ga_search(self, r_bounds: Range, q_bounds: Range, params: Optional[GAParams] = None) -> DesignPoint:
        """
        Genetic search with integer genes (r, q): tournament selection of size 3,
        single-point crossover, uniform random mutation within the bounds and one
        elite. Infeasible designs get an additive penalty. The result is the
        cheapest feasible design the run evaluated.
        """
        _check_range("r", r_bounds)
        _check_range("q", q_bounds)
        params = params or GAParams()
        visited: set[tuple[int, int]] = set()

        def fitness_func(ga_instance, solution, solution_idx):
            r, q = int(solution[0]), int(solution[1])
            visited.add((r, q))
            return self._fitness(self.evaluate(r, q))

        def on_generation(ga_instance):
            _, fitness, _ = ga_instance.best_solution(pop_fitness=ga_instance.last_generation_fitness)
            logger.info(f"GA generation {ga_instance.generations_completed}: best fitness {fitness:.4f}")

        ga_instance = pygad.GA(
            num_generations=params.generations,
            num_parents_mating=params.parents_mating,
            fitness_func=fitness_func,
            sol_per_pop=params.population,
            num_genes=2,
            gene_space=[list(range(r_bounds[0], r_bounds[1] + 1)), list(range(q_bounds[0], q_bounds[1] + 1))],
            gene_type=int,
            initial_population=[list(g) for g in params.initial_population] if params.initial_population else None,
            parent_selection_type="tournament",
            K_tournament=3,
            crossover_type="single_point",
            mutation_type="random",
            mutation_probability=params.mutation_probability,
            keep_elitism=1,
            random_seed=params.seed,
            on_generation=on_generation,
            suppress_warnings=True,
        )
        ga_instance.run()

        feasible = [self._cache[key] for key in sorted(visited) if self._cache[key].feasible]
        if not feasible:
            closest = _least_infeasible([self._cache[key] for key in sorted(visited)])
            raise InfeasibleDesignException(
                f"Genetic search found no feasible design after {params.generations} generations.",
                details={"least_infeasible": closest.model_dump() if closest else None},
            )
        best = min(feasible, key=_rank)
        logger.info(f"GA search evaluated {len(visited)} distinct designs: best (r={best.r}, q={best.q}), "
                    f"c_total={best.c_total:.4f}/yr")
        return best
