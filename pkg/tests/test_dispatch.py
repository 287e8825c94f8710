import numpy as np
import pytest

from gridline.dispatch import (DispatchProblem, FlowRow, HourData, base_flow_rows,
                               build_lp, build_problem, hour_data, solve_base_dcopf,
                               solve_copperplate, solve_penalized_dcopf, solve_problem)
from gridline.factors import build_factors
from gridline.lp import solve_lp
from gridline.util import parse_hour

from helpers import triangle_network, two_bus_network

HOUR = parse_hour("2016-07-01T00:00:00Z")


def two_bus_setup(line_limit=100.0, demand=80.0, cheap=10.0, dear=30.0):
    net = two_bus_network(line_limit, cheap, dear)
    factors = build_factors(net, slack_bus=2)
    data = HourData(HOUR, np.array([0.0, demand]),
                    np.zeros(2), np.array([100.0, 100.0]))
    return net, factors, data


def test_uncongested_two_bus():
    net, factors, data = two_bus_setup(line_limit=100.0, demand=80.0)
    result = solve_base_dcopf(net, factors, data, np.array([100.0]))
    assert result.status == "optimal"
    assert result.p_gen == pytest.approx([80.0, 0.0], abs=1e-6)
    assert result.flows[0] == pytest.approx(80.0, abs=1e-6)
    assert result.objective == pytest.approx(800.0, abs=1e-6)
    assert result.row_duals[0] == pytest.approx(0.0, abs=1e-9)
    assert result.balance_dual == pytest.approx(10.0, abs=1e-9)


def test_congested_two_bus_dual_is_cost_difference():
    net, factors, data = two_bus_setup(line_limit=50.0, demand=80.0)
    result = solve_base_dcopf(net, factors, data, np.array([50.0]))
    assert result.p_gen == pytest.approx([50.0, 30.0], abs=1e-6)
    assert result.objective == pytest.approx(50 * 10 + 30 * 30, abs=1e-6)
    assert result.row_duals[0] == pytest.approx(20.0, abs=1e-6)
    assert result.balance_dual == pytest.approx(30.0, abs=1e-6)


def test_zero_demand_zero_dispatch():
    net, factors, _ = two_bus_setup()
    data = HourData(HOUR, np.zeros(2), np.zeros(2), np.array([100.0, 100.0]))
    result = solve_base_dcopf(net, factors, data, np.array([100.0]))
    assert result.objective == pytest.approx(0.0, abs=1e-9)
    assert result.p_gen == pytest.approx([0.0, 0.0], abs=1e-9)


def test_infeasible_hour_reported():
    net, factors, _ = two_bus_setup()
    data = HourData(HOUR, np.array([0.0, 500.0]), np.zeros(2),
                    np.array([100.0, 100.0]))
    result = solve_base_dcopf(net, factors, data, np.array([100.0]))
    assert result.status == "infeasible"
    assert result.objective is None


def test_piecewise_segments_fill_cheapest_first():
    net = triangle_network(rating=1000.0)
    factors = build_factors(net, slack_bus=3)
    data = HourData(HOUR, np.array([0.0, 150.0, 0.0]), np.zeros(2),
                    np.array([200.0, 150.0]))
    result = solve_base_dcopf(net, factors, data, np.full(3, 1000.0))
    # gen 1 fills 100 @ 12 then 50 @ 18 before the 35 $/MWh unit runs
    assert result.p_gen == pytest.approx([150.0, 0.0], abs=1e-6)
    assert result.objective == pytest.approx(100 * 12 + 50 * 18, abs=1e-6)


def test_availability_caps_output():
    net = triangle_network(rating=1000.0)
    factors = build_factors(net, slack_bus=3)
    data = HourData(HOUR, np.array([0.0, 150.0, 0.0]), np.zeros(2),
                    np.array([60.0, 150.0]))  # gen 1 derated this hour
    result = solve_base_dcopf(net, factors, data, np.full(3, 1000.0))
    assert result.p_gen == pytest.approx([60.0, 90.0], abs=1e-6)


def penalized_two_bus(row_limit, dear=2500.0, demand=100.0):
    """Cheap unit behind a contingency-style row; avoidance requires the dear
    unit at bus 2."""
    net = two_bus_network(1000.0, cheap=10.0, dear=dear)
    factors = build_factors(net, slack_bus=2)
    data = HourData(HOUR, np.array([0.0, demand]), np.zeros(2),
                    np.array([100.0, 100.0]))
    rows = base_flow_rows(net, factors.ptdf, np.array([1000.0]))
    rows.append(FlowRow(factors.ptdf[0], row_limit, True, 0, 0))
    problem = build_problem(net, data, rows, penalty_price=2000.0)
    return net, factors, problem


def test_slack_free_when_row_is_loose():
    _, factors, problem = penalized_two_bus(row_limit=150.0)
    result = solve_penalized_dcopf(problem, ptdf=factors.ptdf)
    assert result.slack_values[1] == pytest.approx(0.0, abs=1e-9)
    assert result.p_gen == pytest.approx([100.0, 0.0], abs=1e-6)


def test_penalty_caps_shadow_price():
    # violating by 10 MW costs 2000 * 10; avoiding it costs (2500 - 10) * 10
    _, factors, problem = penalized_two_bus(row_limit=90.0, dear=2500.0)
    result = solve_penalized_dcopf(problem, ptdf=factors.ptdf)
    assert result.slack_values[1] == pytest.approx(10.0, abs=1e-6)
    assert result.row_duals[1] == pytest.approx(2000.0, abs=1e-6)
    assert result.p_gen == pytest.approx([100.0, 0.0], abs=1e-6)


def test_cheap_avoidance_beats_penalty():
    _, factors, problem = penalized_two_bus(row_limit=90.0, dear=30.0)
    result = solve_penalized_dcopf(problem, ptdf=factors.ptdf)
    assert result.slack_values[1] == pytest.approx(0.0, abs=1e-9)
    assert result.p_gen == pytest.approx([90.0, 10.0], abs=1e-6)


def test_duplicate_rows_leave_dispatch_and_objective_unchanged():
    # only meaningful while slacks stay at zero: a duplicated *violated* row
    # would double the penalty, which is why the screening loop deduplicates
    _, factors, problem = penalized_two_bus(row_limit=90.0, dear=30.0)
    duplicated = DispatchProblem(
        problem.hour, problem.demand, problem.gen_bus, problem.gen_min,
        problem.gen_max, problem.cost_curves,
        problem.flow_rows + (problem.flow_rows[-1],), problem.penalty_price)
    single = solve_penalized_dcopf(problem, ptdf=factors.ptdf)
    double = solve_penalized_dcopf(duplicated, ptdf=factors.ptdf)
    assert single.slack_values[1] == pytest.approx(0.0, abs=1e-9)
    assert double.objective == pytest.approx(single.objective, rel=1e-9)
    assert double.p_gen == pytest.approx(single.p_gen, abs=1e-6)
    # duals may split across the duplicates but their sum is preserved
    assert (double.row_duals[1] + double.row_duals[2]) == pytest.approx(
        single.row_duals[1], abs=1e-6)


def test_copperplate_is_relaxation(networks, serieses, factors_map):
    net = networks["case30"]
    series = serieses["case30"]
    factors = factors_map["case30"]
    rating = net.static_rating
    for hour in list(series.hours)[::6]:
        data = hour_data(net, series, hour)
        constrained = solve_base_dcopf(net, factors, data, rating)
        copper = solve_copperplate(net, data, factors)
        assert copper.objective <= constrained.objective + 1e-6
        assert copper.flows is not None  # informational PTDF flows


def test_copperplate_equals_base_on_single_bus():
    # single-bus case is not representable (branches need two buses); the
    # equivalent statement: with no congestion possible, objectives match
    net = two_bus_network(line_limit=1e6)
    factors = build_factors(net, slack_bus=2)
    data = HourData(HOUR, np.array([0.0, 70.0]), np.zeros(2), np.array([100.0, 100.0]))
    base = solve_base_dcopf(net, factors, data, np.array([1e6]))
    copper = solve_copperplate(net, data, factors)
    assert copper.objective == pytest.approx(base.objective, rel=1e-9)


def test_lp_duality_euler_identity():
    # objective equals marginals dotted with every RHS and bound (strong
    # duality for LP), on a congested problem with slack rows
    _, _, problem = penalized_two_bus(row_limit=90.0, dear=2500.0)
    lp, _ = build_lp(problem)
    solution = solve_lp(lp)
    assert solution.status == "optimal"
    lower = np.array([b[0] for b in lp.bounds])
    upper = np.array([1e9 if b[1] is None else b[1] for b in lp.bounds])
    total = float(solution.eq_marginals @ lp.b_eq)
    total += float(solution.ineq_marginals @ lp.b_ub)
    total += float(solution.lower_marginals @ lower)
    total += float(solution.upper_marginals @ upper)
    assert total == pytest.approx(solution.objective, rel=1e-6)


def test_result_feasibility_audited(networks, serieses, factors_map):
    net = networks["case5"]
    series = serieses["case5"]
    factors = factors_map["case5"]
    for hour in list(series.hours)[::5]:
        data = hour_data(net, series, hour)
        result = solve_base_dcopf(net, factors, data, net.static_rating)
        assert result.status == "optimal"
        assert abs(result.p_gen.sum() - data.demand.sum()) <= 1e-6
        assert np.all(result.p_gen >= data.gen_min - 1e-6)
        assert np.all(result.p_gen <= data.gen_max + 1e-6)
        assert np.all(np.abs(result.flows) <= net.static_rating + 1e-6 * net.static_rating)


def test_true_single_bus_copperplate_equals_base():
    from helpers import make_network
    net = make_network(
        buses=[(1, 31.0, -99.0, 115.0)], branches=[],
        gens=[(1, 1, "natural_gas", 0.0, 100.0, [(100.0, 10.0)])])
    factors = build_factors(net, slack_bus=1)
    data = HourData(HOUR, np.array([60.0]), np.zeros(1), np.array([100.0]))
    base = solve_base_dcopf(net, factors, data, np.array([]))
    copper = solve_copperplate(net, data, factors)
    assert base.objective == pytest.approx(copper.objective, rel=1e-12)
    assert base.p_gen == pytest.approx([60.0], abs=1e-9)


def test_slack_extension_to_base_rows():
    from gridline.scopf import solve_scdcopf
    # base-case overload: demand 80 behind a 50 MVA line with no alternative;
    # hard base rows are infeasible, slack-extended base rows absorb it
    net = two_bus_network(line_limit=50.0, cheap=10.0, dear=30.0)
    factors = build_factors(net, slack_bus=2)
    data = HourData(HOUR, np.array([0.0, 80.0]), np.zeros(2),
                    np.array([100.0, 0.0]))  # bus-2 unit unavailable
    limits = np.array([50.0])
    hard = solve_scdcopf(net, factors, data, limits, 1.146 * limits)
    assert hard.dispatch.status == "infeasible"
    soft = solve_scdcopf(net, factors, data, limits, 1.146 * limits,
                         slack_base_rows=True)
    assert soft.dispatch.status == "optimal"
    assert soft.dispatch.slack_values[0] == pytest.approx(30.0, abs=1e-6)
    assert soft.dispatch.row_duals[0] == pytest.approx(2000.0, abs=1e-6)
