"""Fleet cost ratios, break-even throughput, and rack capacity accounting."""

import pytest
from hypothesis import given, settings, strategies as st

import infercost as ic

positive = st.floats(0.01, 100.0)


def test_ratio_identity_point():
    assert ic.tco_ratio(ic.CostInputs(1.0, 1.0, 1.0, 1.0, 1.0)) == 1.0


def test_ratio_known_points():
    assert ic.tco_ratio(ic.CostInputs(1.0, 1.0, 0.5, 1.0, 0.75)) == 1.0
    assert ic.tco_ratio(ic.CostInputs(1.0, 1.0, 1.0, 1.0, 0.8)) == 1.25


def test_ratio_equal_costs_closed_form():
    for r_sc in (0.25, 0.6, 1.0, 1.75):
        for r_th in (0.5, 1.0, 2.0):
            got = ic.tco_ratio(ic.CostInputs(1.0, 1.0, r_sc, 1.0, r_th))
            assert got == (r_sc + 1.0) / (2.0 * r_th)


def test_ratio_cost_weighting():
    # infra-dominated fleets track r_ic, server-dominated ones track r_sc
    infra_heavy = ic.tco_ratio(ic.CostInputs(1e-9, 1.0, 5.0, 1.2, 1.0))
    assert infra_heavy == pytest.approx(1.2, rel=1e-6)
    server_heavy = ic.tco_ratio(ic.CostInputs(1.0, 1e-9, 5.0, 1.2, 1.0))
    assert server_heavy == pytest.approx(5.0, rel=1e-6)


def test_ratio_validation():
    with pytest.raises(ic.InfercostError):
        ic.tco_ratio(ic.CostInputs(0.0, 1.0, 1.0, 1.0, 1.0))
    with pytest.raises(ic.InfercostError):
        ic.tco_ratio(ic.CostInputs(1.0, 1.0, -1.0, 1.0, 1.0))
    with pytest.raises(ic.InfercostError):
        ic.tco_ratio(ic.CostInputs(1.0, 1.0, 1.0, 1.0, 0.0))
    with pytest.raises(ic.InfercostError):
        ic.tco_ratio(ic.CostInputs(1.0, 1.0, 1.0, float("inf"), 1.0))


def test_ratio_monotonicity():
    low = ic.tco_ratio(ic.CostInputs(1.0, 1.0, 0.5, 1.0, 1.0))
    high = ic.tco_ratio(ic.CostInputs(1.0, 1.0, 2.0, 1.0, 1.0))
    assert low < high
    fast = ic.tco_ratio(ic.CostInputs(1.0, 1.0, 1.0, 1.0, 2.0))
    slow = ic.tco_ratio(ic.CostInputs(1.0, 1.0, 1.0, 1.0, 0.5))
    assert fast < slow


def test_break_even_known_points():
    assert ic.break_even_rth(1.0, 1.0, 0.6, 1.0) == 0.8
    assert ic.break_even_rth(1.0, 1.0, 1.0, 1.0) == 1.0
    assert ic.break_even_rth(1.0, 1e-9, 3.0, 1.0) == pytest.approx(3.0, rel=1e-6)


@settings(max_examples=200, deadline=None)
@given(cs=positive, ci=positive, r_sc=positive, r_ic=positive)
def test_break_even_round_trip(cs, ci, r_sc, r_ic):
    r_th = ic.break_even_rth(cs, ci, r_sc, r_ic)
    assert abs(ic.tco_ratio(ic.CostInputs(cs, ci, r_sc, r_ic, r_th)) - 1.0) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(cs=positive, ci=positive, r_sc=positive, r_ic=positive, r_th=positive, c=positive)
def test_ratio_cost_scale_invariance(cs, ci, r_sc, r_ic, r_th, c):
    base = ic.tco_ratio(ic.CostInputs(cs, ci, r_sc, r_ic, r_th))
    scaled = ic.tco_ratio(ic.CostInputs(c * cs, c * ci, r_sc, r_ic, r_th))
    assert scaled == pytest.approx(base, rel=1e-12)


def test_grid_values_and_shape():
    grid = ic.tco_grid(1.0, 1.0, 1.0, [0.5, 1.0], [0.5, 1.0])
    assert grid.r_sc_axis == (0.5, 1.0)
    assert grid.r_th_axis == (0.5, 1.0)
    assert grid.cells == ((1.5, 2.0), (0.75, 1.0))


def test_grid_matches_pointwise_ratio():
    grid = ic.tco_grid(2.0, 3.0, 1.1, [0.25, 0.7, 1.3], [0.4, 1.0])
    for i, r_th in enumerate(grid.r_th_axis):
        for j, r_sc in enumerate(grid.r_sc_axis):
            expected = ic.tco_ratio(ic.CostInputs(2.0, 3.0, r_sc, 1.1, r_th))
            assert grid.cells[i][j] == expected


def test_grid_assumptions_recorded():
    grid = ic.tco_grid(2.0, 3.0, 1.1, [1.0], [1.0])
    assert grid.cost_server_b == 2.0
    assert grid.cost_infra_b == 3.0
    assert grid.r_ic == 1.1


def test_grid_axis_validation():
    with pytest.raises(ic.InfercostError):
        ic.tco_grid(1.0, 1.0, 1.0, [], [1.0])
    with pytest.raises(ic.InfercostError):
        ic.tco_grid(1.0, 1.0, 1.0, [1.0, 0.5], [1.0])  # not ascending
    with pytest.raises(ic.InfercostError):
        ic.tco_grid(1.0, 1.0, 1.0, [1.0, 1.0], [1.0])  # repeated
    with pytest.raises(ic.InfercostError):
        ic.tco_grid(1.0, 1.0, 1.0, [0.0, 1.0], [1.0])


def test_servers_needed():
    assert ic.servers_needed(100.0, 24.0) == 5
    assert ic.servers_needed(96.0, 24.0) == 4
    assert ic.servers_needed(1.0, 1000.0) == 1
    assert ic.servers_needed(100.0, 24.0, allow_fractional=True) == pytest.approx(100 / 24)
    with pytest.raises(ic.InfercostError):
        ic.servers_needed(0.0, 24.0)
    with pytest.raises(ic.InfercostError):
        ic.servers_needed(100.0, 0.0)


def test_rack_model_known_point():
    rack = ic.RackModel(
        rack_power_budget=80_000,
        server_power=8_000,
        rack_fixed_cost=100_000,
        energy_price=0.10,
        avg_server_power=5_000,
        horizon_hours=26_280,
    )
    assert rack.servers_per_rack == 10
    assert ic.infra_cost_per_server(rack) == 23_140.0


def test_rack_model_floor_division():
    rack = ic.RackModel(50_000, 8_000, 1.0, 0.1, 1_000, 1.0)
    assert rack.servers_per_rack == 6


def test_rack_fixed_share_scales_with_density():
    dense = ic.RackModel(80_000, 4_000, 100_000, 0.10, 5_000, 26_280)
    sparse = ic.RackModel(80_000, 8_000, 100_000, 0.10, 5_000, 26_280)
    # twice the servers per rack, so half the fixed share; energy unchanged
    assert ic.infra_cost_per_server(sparse) - ic.infra_cost_per_server(dense) == 5_000.0


def test_rack_zero_horizon_is_fixed_share_only():
    rack = ic.RackModel(80_000, 8_000, 100_000, 0.10, 5_000, 0.0)
    assert ic.infra_cost_per_server(rack) == 10_000.0


def test_rack_validation():
    with pytest.raises(ic.InfercostError):
        ic.RackModel(5_000, 8_000, 1.0, 0.1, 1.0, 1.0)  # server exceeds budget
    with pytest.raises(ic.InfercostError):
        ic.RackModel(80_000, 8_000, 1.0, -0.1, 1.0, 1.0)
    with pytest.raises(ic.InfercostError):
        ic.RackModel(80_000, 8_000, 1.0, 0.1, 1.0, -1.0)


def test_infra_cost_ratio():
    a = ic.RackModel(80_000, 8_000, 100_000, 0.10, 5_000, 26_280)
    b = ic.RackModel(80_000, 4_000, 100_000, 0.10, 5_000, 26_280)
    assert ic.infra_cost_ratio(a, b) == 23_140.0 / 18_140.0
    assert ic.infra_cost_ratio(a, a) == 1.0
