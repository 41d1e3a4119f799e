# tests/test_optimization.py

import math

import pytest

from spares.schemas import CostParams, DesignPoint, DirectPolicy, GAParams
from spares.services.optimization_service import OptimizationService, evaluate_design
from spares.exceptions.custom_exceptions import InfeasibleDesignException, InvalidParameterException

@pytest.fixture
def small_costs() -> CostParams:
    return CostParams(p_build=0.5, p_launch=10, p_holding=0.5, gamma=0.02, q_max=4, xi=0.5, n_planes=10)

@pytest.fixture
def service(small_direct_policy, small_costs) -> OptimizationService:
    return OptimizationService(small_direct_policy, small_costs)

class TestEvaluateDesign:
    def test_total_is_derived_from_components(self):
        point = DesignPoint(r=42, q=4, feasible=True, c_build=0.1, c_launch=0.2, c_holding=0.3)
        assert point.c_total == 0.1 + 0.2 + 0.3
        assert point.model_dump()["c_total"] == point.c_total

    def test_free_satellites_cost_nothing(self, small_direct_policy, small_costs):
        free = small_costs.model_copy(update={"p_build": 0.0, "p_launch": 0.0, "p_holding": 0.0})
        point = evaluate_design(small_direct_policy.with_rq(5, 3), free)
        assert point.c_total == 0.0
        assert point.status == "ok"

    def test_discount_only_on_full_launches(self, small_direct_policy, small_costs):
        undiscounted = small_costs.model_copy(update={"gamma": 0.0})
        full = small_direct_policy.with_rq(5, small_costs.q_max)
        partial = small_direct_policy.with_rq(5, small_costs.q_max - 1)
        assert evaluate_design(full, small_costs).c_launch == pytest.approx(
            0.98 * evaluate_design(full, undiscounted).c_launch, rel=1e-12)
        assert evaluate_design(partial, small_costs).c_launch == pytest.approx(
            evaluate_design(partial, undiscounted).c_launch, rel=1e-12)

    def test_build_cost_follows_cycle_length(self, small_direct_policy, small_costs):
        point = evaluate_design(small_direct_policy.with_rq(5, 3), small_costs)
        expected = small_costs.n_planes * small_costs.p_build * 3 * 365.0 / point.t_cycle
        assert point.c_build == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("r, q", [(3, 2), (5, 5)])
    def test_out_of_bounds(self, small_direct_policy, small_costs, r, q):
        point = evaluate_design(small_direct_policy.with_rq(r, q), small_costs)
        assert point.status == "out_of_bounds"
        assert not point.feasible
        assert math.isinf(point.c_total)
        assert point.reason

    def test_zero_failure_rate_is_degenerate(self, small_costs):
        policy = DirectPolicy.build(r=5, q=3, lambda_per_year=0.0, n_sat=4, mean_lead_days=5, t_lv=3)
        point = evaluate_design(policy, small_costs)
        assert point.status == "degenerate"
        assert point.feasible and point.shortfall == 0.0
        assert point.c_build == 0.0 and point.c_launch == 0.0
        assert point.c_holding == pytest.approx(small_costs.n_planes * small_costs.p_holding * 8)

    @pytest.mark.parametrize("xi_low, xi_high", [(0.01, 0.1), (0.1, 0.5), (0.5, 1.0)])
    def test_feasibility_monotone_in_xi(self, small_direct_policy, small_costs, xi_low, xi_high):
        for r in range(4, 8):
            policy = small_direct_policy.with_rq(r, 2)
            low = evaluate_design(policy, small_costs.model_copy(update={"xi": xi_low}))
            high = evaluate_design(policy, small_costs.model_copy(update={"xi": xi_high}))
            assert not low.feasible or high.feasible

    def test_holding_grows_with_reorder_level(self, service):
        holding = [service.evaluate(r, 3).c_holding for r in range(4, 9)]
        assert all(a <= b + 1e-9 for a, b in zip(holding, holding[1:]))

class TestGridSearch:
    def test_map_covers_ranges_in_order(self, service):
        _, design_map = service.grid_search((4, 6), (1, 4))
        assert [(p.r, p.q) for p in design_map] == [(r, q) for r in range(4, 7) for q in range(1, 5)]

    def test_everything_feasible_at_unit_xi(self, small_direct_policy, small_costs):
        service = OptimizationService(small_direct_policy, small_costs.model_copy(update={"xi": 1.0}))
        best, design_map = service.grid_search((4, 7), (1, 4))
        assert all(p.feasible for p in design_map)
        assert (best.r, best.q) == min(((p.c_total, p.r, p.q) for p in design_map))[1:]

    def test_best_is_cheapest_feasible(self, service):
        best, design_map = service.grid_search((4, 8), (1, 4))
        assert best.feasible
        assert all(best.c_total <= p.c_total for p in design_map if p.feasible)

    def test_narrower_range_around_best_keeps_it(self, service):
        best, _ = service.grid_search((4, 8), (1, 4))
        narrowed, _ = service.grid_search((best.r, 8), (best.q, 4))
        assert (narrowed.r, narrowed.q) == (best.r, best.q)

    def test_infeasible_reports_closest_design(self, direct_policy, cost_params):
        service = OptimizationService(direct_policy, cost_params.model_copy(update={"xi": 1e-6}))
        with pytest.raises(InfeasibleDesignException) as excinfo:
            service.grid_search((40, 41), (1, 2))
        closest = excinfo.value.details["least_infeasible"]
        assert closest["r"] in (40, 41) and closest["shortfall"] > 1e-6
        assert excinfo.value.exit_code == 4

    def test_empty_range_rejected(self, service):
        with pytest.raises(InvalidParameterException):
            service.grid_search((6, 4), (1, 4))

    def test_evaluations_are_cached(self, service):
        assert service.evaluate(5, 2) is service.evaluate(5, 2)

class TestGASearch:
    def test_seeded_population_returns_grid_optimum(self, service):
        best, _ = service.grid_search((4, 8), (1, 4))
        params = GAParams(population=4, generations=2, parents_mating=2, initial_population=[(best.r, best.q)] * 4)
        found = service.ga_search((4, 8), (1, 4), params)
        assert (found.r, found.q) == (best.r, best.q)

    def test_same_seed_same_design(self, small_direct_policy, small_costs):
        params = GAParams(population=6, generations=5, parents_mating=3, seed=7)
        first = OptimizationService(small_direct_policy, small_costs).ga_search((4, 8), (1, 4), params)
        second = OptimizationService(small_direct_policy, small_costs).ga_search((4, 8), (1, 4), params)
        assert (first.r, first.q) == (second.r, second.q)

    def test_never_beats_grid(self, service):
        best, _ = service.grid_search((4, 8), (1, 4))
        found = service.ga_search((4, 8), (1, 4), GAParams(population=6, generations=5, parents_mating=3))
        assert found.feasible
        assert found.c_total >= best.c_total

    def test_parents_cannot_exceed_population(self):
        with pytest.raises(ValueError):
            GAParams(population=4, parents_mating=5)

@pytest.mark.acceptance
def test_baseline_optimum(optimization_policy, cost_params):
    service = OptimizationService(optimization_policy, cost_params)
    best, design_map = service.grid_search((40, 50), (1, 6))
    assert (best.r, best.q) == (42, 4)
    assert best.shortfall == pytest.approx(0.0435, abs=5e-4)
    assert best.c_total == pytest.approx(3055.89, rel=1e-5)
    assert len(design_map) == 66
    by_design = {(p.r, p.q): p for p in design_map}
    assert not by_design[(41, 6)].feasible
    assert not by_design[(42, 3)].feasible

@pytest.mark.acceptance
def test_moderate_failure_rate_design_costs(direct_policy, cost_params):
    # at 0.1/yr the (42,4) design stays feasible, but (41,4) is cheaper and also feasible
    service = OptimizationService(direct_policy, cost_params)
    point = service.evaluate(42, 4)
    assert point.feasible
    assert point.shortfall == pytest.approx(0.0183, abs=5e-4)
    assert point.c_total == pytest.approx(2513.07, rel=1e-5)
    assert service.evaluate(42, 3).c_total == pytest.approx(2485.19, rel=1e-5)

    best, _ = service.grid_search((40, 50), (1, 6))
    assert (best.r, best.q) == (41, 4)
    assert best.shortfall == pytest.approx(0.0446, abs=5e-4)
    assert best.c_total == pytest.approx(2441.56, rel=1e-5)

@pytest.mark.slow
@pytest.mark.acceptance
def test_baseline_ga_matches_grid(optimization_policy, cost_params):
    service = OptimizationService(optimization_policy, cost_params)
    best, _ = service.grid_search((40, 50), (1, 6))
    found = service.ga_search((40, 50), (1, 6), GAParams())
    assert (found.r, found.q) == (best.r, best.q)
