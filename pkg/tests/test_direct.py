# tests/test_direct.py

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spares.schemas import DirectPolicy
from spares.analysis.chain_core import (
    build_failure_matrix, build_replenishment_matrix, is_column_stochastic, lead_time_pmf
)
from spares.analysis.direct import replenish_transition, reorder_transition, shortfall_probability, solve_direct
from spares.exceptions.custom_exceptions import InvalidParameterException

@st.composite
def direct_policies(draw):
    n_sat = draw(st.integers(min_value=1, max_value=8))
    r = draw(st.integers(min_value=n_sat, max_value=n_sat + 4))
    q = draw(st.integers(min_value=1, max_value=5))
    rate = draw(st.floats(min_value=1.0, max_value=60.0))
    mean_lead = draw(st.floats(min_value=0.5, max_value=20.0))
    t_lv = draw(st.integers(min_value=0, max_value=6))
    return DirectPolicy.build(r=r, q=q, lambda_per_year=rate, n_sat=n_sat, mean_lead_days=mean_lead, t_lv=t_lv)

def test_transitions_are_column_stochastic(direct_policy):
    assert is_column_stochastic(reorder_transition(direct_policy), tol=1e-10)
    assert is_column_stochastic(replenish_transition(direct_policy), tol=1e-10)

def test_instant_delivery_limit():
    policy = DirectPolicy.build(r=3, q=2, lambda_per_year=20, n_sat=3, mean_lead_days=1e-9, t_lv=0)
    expected = build_replenishment_matrix(3, 2) @ build_failure_matrix(policy.failure)
    assert np.allclose(replenish_transition(policy), expected, atol=1e-12)

def test_replenish_transition_matches_truncated_series(direct_policy):
    # sum over delivery steps k >= m of rho_k P_q P_f^(k+1), truncated after 2000 tail steps
    p_f = build_failure_matrix(direct_policy.failure)
    p_q = build_replenishment_matrix(direct_policy.r, direct_policy.q)
    term = np.linalg.matrix_power(p_f, direct_policy.lead.m + 1)
    series = np.zeros_like(p_f)
    for k in range(2000):
        series += lead_time_pmf(direct_policy.lead, k) * term
        term = p_f @ term
    assert np.allclose(replenish_transition(direct_policy), p_q @ series, atol=1e-10, rtol=0.0)

def test_delivery_distribution_is_self_consistent(direct_policy):
    result = solve_direct(direct_policy)
    cycled = replenish_transition(direct_policy) @ reorder_transition(direct_policy) @ result.pi_q.probs
    assert np.allclose(cycled, result.pi_q.probs, atol=1e-10, rtol=0.0)
    assert np.allclose(reorder_transition(direct_policy) @ result.pi_q.probs, result.pi_r.probs, atol=1e-12)

def test_cycle_shortens_as_failure_rate_rises():
    cycles = [
        solve_direct(DirectPolicy.build(r=42, q=4, lambda_per_year=rate, n_sat=40, mean_lead_days=60, t_lv=30))
        .t_cycle
        for rate in (0.05, 0.10, 0.15, 0.30)
    ]
    assert all(longer > shorter for longer, shorter in zip(cycles, cycles[1:]))

def test_baseline_scenario_is_normalized(direct_policy):
    result = solve_direct(direct_policy)
    for dist in (result.pi_q, result.pi_r, result.pi_np, result.pi_wp, result.pi_dr):
        assert dist.probs.sum() == pytest.approx(1.0, abs=1e-9)
        assert dist.level_max == 46
    assert not result.degenerate

def test_mixing_identity(direct_policy):
    result = solve_direct(direct_policy)
    mixed = (result.t_np * result.pi_np.probs + result.t_wp * result.pi_wp.probs) / (result.t_np + result.t_wp)
    assert np.allclose(result.pi_dr.probs, mixed, atol=1e-15)
    assert result.t_cycle == pytest.approx((result.t_np + result.t_wp) * direct_policy.failure.t_mc)

def test_delivery_and_reorder_supports(direct_policy):
    result = solve_direct(direct_policy)
    # Deliveries land on levels >= q; reorders fire at levels <= r
    assert result.pi_q.ascending()[:direct_policy.q].sum() < 1e-12
    assert result.pi_r.ascending()[direct_policy.r + 1:].sum() == 0.0

def test_waiting_period_exceeds_offset(direct_policy):
    result = solve_direct(direct_policy)
    # m + 1 certain steps plus the expected tail a / (1 - a)
    a = direct_policy.lead.step_survival
    assert result.t_wp == pytest.approx(direct_policy.lead.m + 1 + a / (1 - a), rel=1e-9)

def test_higher_failure_rate_lowers_mean_level():
    means = [
        solve_direct(DirectPolicy.build(r=42, q=4, lambda_per_year=rate, n_sat=40, mean_lead_days=60, t_lv=30))
        .pi_dr.mean_level()
        for rate in (0.05, 0.10, 0.15)
    ]
    assert means[0] > means[1] > means[2]

def test_zero_failure_rate_is_degenerate():
    policy = DirectPolicy.build(r=42, q=4, lambda_per_year=0.0, n_sat=40, mean_lead_days=60, t_lv=30)
    result = solve_direct(policy)
    assert result.degenerate
    assert result.pi_dr.prob(46) == 1.0
    assert result.pi_r is None and result.pi_wp is None
    assert math.isinf(result.t_np) and math.isinf(result.t_cycle)

def test_shortfall_probability(direct_policy):
    result = solve_direct(direct_policy)
    assert shortfall_probability(result, 0) == 0.0
    assert shortfall_probability(result, 47) == pytest.approx(1.0)
    assert 0.0 < shortfall_probability(result, 40) < 1.0
    with pytest.raises(InvalidParameterException):
        shortfall_probability(result, 48)

def test_policy_requires_consistent_levels(direct_policy):
    with pytest.raises(ValueError):
        DirectPolicy(r=40, q=4, failure=direct_policy.failure, lead=direct_policy.lead)

@pytest.mark.property
class TestDirectProperties:
    @given(direct_policies())
    def test_all_distributions_normalized(self, policy):
        result = solve_direct(policy)
        for dist in (result.pi_q, result.pi_r, result.pi_np, result.pi_wp, result.pi_dr):
            assert abs(dist.probs.sum() - 1.0) <= 1e-9
            assert np.all(dist.probs >= 0.0)

    @given(direct_policies())
    def test_mixing_identity_holds(self, policy):
        result = solve_direct(policy)
        mixed = (result.t_np * result.pi_np.probs + result.t_wp * result.pi_wp.probs) / (result.t_np + result.t_wp)
        assert np.allclose(result.pi_dr.probs, mixed, atol=1e-12)

    @given(direct_policies())
    def test_delivery_distribution_is_fixed_point(self, policy):
        pi_q = solve_direct(policy).pi_q.probs
        cycled = replenish_transition(policy) @ reorder_transition(policy) @ pi_q
        assert np.allclose(cycled, pi_q, atol=1e-10, rtol=0.0)

    @given(direct_policies())
    def test_cycle_time_positive(self, policy):
        result = solve_direct(policy)
        assert result.t_np > 0.0
        assert result.t_wp >= policy.lead.m + 1 - 1e-9
