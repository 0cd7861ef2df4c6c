import math

import numpy as np
import pytest

import crowdflow as cf
from crowdflow.errors import ConfigurationError, ContractError, DegenerateEdgeError
from util import ternary_min_speed

WIDE = cf.SpeedLimits(1e-3, 1e3)
BOUNDS = (0.0, 0.0, 20.0, 20.0)


def fs(rho, v, var):
    return cf.FlowSample(rho, np.asarray(v, dtype=float), var)


def random_samples(rng, count):
    out = []
    for _ in range(count):
        speed = rng.uniform(0.0, 2.5)
        ang = rng.uniform(0.0, 2.0 * np.pi)
        out.append(fs(
            rng.uniform(0.0, 3.0),
            (speed * np.cos(ang), speed * np.sin(ang)),
            rng.uniform(0.0, 2.0),
        ))
    return out


def unit(ang):
    return np.array([np.cos(ang), np.sin(ang)])


# --- instantaneous invasiveness ---

def test_instantaneous_matching_flow_is_free():
    assert cf.instantaneous_invasiveness(fs(1, (1, 0), 0), (1, 0)) == 0.0


def test_instantaneous_direct_substitution():
    assert cf.instantaneous_invasiveness(fs(2, (0, 0), 0.25), (1, 0)) == 2.5


def test_instantaneous_head_on():
    assert cf.instantaneous_invasiveness(fs(1, (0, 1), 0.5), (0, -1)) == 4.5


def test_instantaneous_deterministic_special_case():
    # with zero variance this is exactly density times squared relative speed
    rng = np.random.default_rng(0)
    for s in random_samples(rng, 100):
        s0 = fs(s.density, s.mean_velocity, 0.0)
        v = rng.uniform(-2, 2, 2)
        dv = s0.mean_velocity - v
        assert cf.instantaneous_invasiveness(s0, v) == s0.density * float(dv @ dv)


# --- optimal speed ---

def test_optimal_speed_examples():
    assert cf.optimal_speed(fs(1, (3, 4), 0), WIDE) == 5.0
    assert cf.optimal_speed(fs(1, (0, 0), 1.0), WIDE) == 1.0
    assert cf.optimal_speed(fs(1, (0, 0), 0.0), cf.SpeedLimits(0.2, 2.0)) == 0.2


def test_optimal_speed_minimizes_cost_per_distance():
    rng = np.random.default_rng(1)
    limits = cf.SpeedLimits(0.05, 5.0)
    v_grid = np.linspace(limits.v_min, limits.v_max, 200)
    for s in random_samples(rng, 1000):
        u = unit(rng.uniform(0, 2 * np.pi))
        v_star = cf.optimal_speed(s, limits)
        best = cf.instantaneous_invasiveness(s, v_star * u) / v_star
        # vectorized I(s, v*u)/v over the speed grid
        dvx = s.mean_velocity[0] - v_grid * u[0]
        dvy = s.mean_velocity[1] - v_grid * u[1]
        cost = s.density * (dvx * dvx + dvy * dvy + s.variance) / v_grid
        assert np.all(cost >= best - 1e-9)
        # spot-check the vectorization against the scalar definition
        k = rng.integers(len(v_grid))
        assert abs(cost[k] - cf.instantaneous_invasiveness(s, v_grid[k] * u) / v_grid[k]) < 1e-12


def test_optimal_speed_direction_independent():
    rng = np.random.default_rng(2)
    limits = cf.SpeedLimits(0.1, 4.0)
    for s in random_samples(rng, 20):
        v_star = cf.optimal_speed(s, limits)
        for _ in range(10):
            u = unit(rng.uniform(0, 2 * np.pi))
            assert abs(ternary_min_speed(s, u, limits.v_min, limits.v_max) - v_star) < 1e-6


# --- cost density ---

def test_cost_density_still_crowd():
    # numerical speed minimization confirms the closed form 2*rho*(v* - V.u)
    s = fs(1, (0, 0), 1.0)
    u = unit(0.7)
    v_opt = ternary_min_speed(s, u, WIDE.v_min, WIDE.v_max)
    oracle = cf.instantaneous_invasiveness(s, v_opt * u) / v_opt
    assert abs(oracle - 2.0) < 1e-9
    assert abs(cf.cost_density(s, u, WIDE) - 2.0) < 1e-12


def test_cost_density_empty_space_is_free():
    assert cf.cost_density(fs(0, (1, 1), 3.0), unit(1.0), WIDE) == 0.0


def test_cost_density_with_flow_is_free():
    assert cf.cost_density(fs(1, (1, 0), 0.0), np.array([1.0, 0.0]), WIDE) == 0.0


def test_cost_density_requires_unit_direction():
    with pytest.raises(ContractError):
        cf.cost_density(fs(1, (0, 0), 1.0), (1.0001, 0.0), WIDE)
    with pytest.raises(ContractError):
        cf.cost_density(fs(1, (0, 0), 1.0), (0.0, 0.0), WIDE)
    # within the documented tolerance is accepted
    cf.cost_density(fs(1, (0, 0), 1.0), (1.0 + 5e-10, 0.0), WIDE)


def test_cost_density_closed_form_matches_general():
    rng = np.random.default_rng(3)
    for s in random_samples(rng, 500):
        u = unit(rng.uniform(0, 2 * np.pi))
        v_star = math.sqrt(float(s.mean_velocity @ s.mean_velocity) + s.variance)
        if not WIDE.v_min <= v_star <= WIDE.v_max:
            continue
        closed = 2.0 * s.density * (v_star - float(s.mean_velocity @ u))
        assert abs(cf.cost_density(s, u, WIDE) - closed) <= 1e-12


def test_cost_density_nonnegative_and_zero_conditions():
    rng = np.random.default_rng(4)
    for s in random_samples(rng, 500):
        u = unit(rng.uniform(0, 2 * np.pi))
        cd = cf.cost_density(s, u, cf.SpeedLimits(0.2, 2.0))
        assert cd >= 0.0
        if cd == 0.0:
            aligned = s.variance == 0.0 and np.allclose(
                s.mean_velocity, cf.optimal_speed(s, cf.SpeedLimits(0.2, 2.0)) * u
            )
            assert s.density == 0.0 or aligned


def test_cost_density_rotational_equivariance():
    rng = np.random.default_rng(5)
    for s in random_samples(rng, 100):
        ang_u = rng.uniform(0, 2 * np.pi)
        base = cf.cost_density(s, unit(ang_u), WIDE)
        theta = rng.uniform(0, 2 * np.pi)
        c, sn = np.cos(theta), np.sin(theta)
        rot = np.array([[c, -sn], [sn, c]])
        s_rot = fs(s.density, rot @ s.mean_velocity, s.variance)
        u_rot = rot @ unit(ang_u)
        u_rot = u_rot / np.hypot(u_rot[0], u_rot[1])  # renormalize rounding
        assert abs(cf.cost_density(s_rot, u_rot, WIDE) - base) <= 1e-12


# --- edge costs ---

def uniform_flow(rho, v, var):
    return cf.AnalyticFlow([cf.uniform(rho, v, var)], BOUNDS)


def test_edge_cost_uniform_closed_form():
    flow = uniform_flow(1.0, (0.0, 0.0), 1.0)
    ec = cf.edge_cost(flow, (2.0, 5.0), (5.0, 5.0), WIDE)
    assert abs(ec.invasiveness - 6.0) <= 1e-12
    assert abs(ec.travel_time - 3.0) <= 1e-12
    assert ec.length == 3.0


def test_edge_cost_with_flow_travel():
    flow = uniform_flow(1.0, (1.0, 0.0), 0.0)
    ec = cf.edge_cost(flow, (3.0, 4.0), (5.0, 4.0), WIDE)
    assert abs(ec.invasiveness) <= 1e-12
    assert abs(ec.travel_time - 2.0) <= 1e-12


def test_edge_cost_direction_matters():
    flow = uniform_flow(1.0, (1.0, 0.0), 0.0)
    downstream = cf.edge_cost(flow, (3.0, 4.0), (7.0, 4.0), WIDE)
    upstream = cf.edge_cost(flow, (7.0, 4.0), (3.0, 4.0), WIDE)
    assert upstream.invasiveness > downstream.invasiveness
    assert abs(upstream.invasiveness - 16.0) < 1e-9  # 2*rho*(1 - (-1)) * 4 m
    assert upstream.travel_time == downstream.travel_time


def test_edge_cost_bump_matches_refined_quadrature():
    # refinement oracle: the same integrator at step/100 stands in for truth
    flow = cf.AnalyticFlow([cf.bump(0.5, 1.5, (10.0, 10.0), 3.0, variance=1.0)], BOUNDS)
    a, b = (4.0, 10.0), (16.0, 10.0)  # straight through the peak
    step = 0.02
    coarse = cf.edge_cost(flow, a, b, WIDE, quadrature_step=step)
    fine = cf.edge_cost(flow, a, b, WIDE, quadrature_step=step / 100)
    assert abs(coarse.invasiveness - fine.invasiveness) / fine.invasiveness < 1e-6
    assert abs(coarse.travel_time - fine.travel_time) / fine.travel_time < 1e-6


def test_edge_cost_degenerate_edge():
    flow = uniform_flow(1.0, (0.0, 0.0), 1.0)
    with pytest.raises(DegenerateEdgeError):
        cf.edge_cost(flow, (1.0, 1.0), (1.0, 1.0), WIDE)


def test_edge_cost_travel_time_speed_limit():
    flow = cf.AnalyticFlow(
        [cf.bump(0.0, 2.0, (10.0, 10.0), 4.0, velocity=(1.5, 0.3), variance=0.7)], BOUNDS
    )
    limits = cf.SpeedLimits(0.1, 1.2)
    rng = np.random.default_rng(6)
    for _ in range(50):
        a = rng.uniform(1, 19, 2)
        b = rng.uniform(1, 19, 2)
        if np.array_equal(a, b):
            continue
        ec = cf.edge_cost(flow, a, b, limits)
        assert ec.travel_time >= ec.length / limits.v_max - 1e-12
        assert ec.invasiveness >= 0.0


def test_quadrature_second_order_convergence():
    flow = cf.AnalyticFlow([cf.bump(0.5, 1.5, (10.0, 10.0), 3.0, variance=1.0)], BOUNDS)
    a, b = (5.0, 7.0), (14.0, 13.0)
    length = math.hypot(b[0] - a[0], b[1] - a[1])
    h = length / math.ceil(length / 0.2)  # divides the edge exactly
    c1 = cf.edge_cost(flow, a, b, WIDE, h).invasiveness
    c2 = cf.edge_cost(flow, a, b, WIDE, h / 2).invasiveness
    c4 = cf.edge_cost(flow, a, b, WIDE, h / 4).invasiveness
    assert 3.0 < abs(c1 - c2) / abs(c2 - c4) < 5.0


# --- path costs ---

def test_path_single_segment_equals_edge():
    flow = uniform_flow(1.2, (0.3, -0.1), 0.5)
    a, b = (2.0, 3.0), (9.0, 11.0)
    assert cf.path_invasiveness(flow, [a, b], WIDE) == cf.edge_cost(flow, a, b, WIDE)


def test_path_subdivision_additivity():
    flow = cf.AnalyticFlow([cf.bump(0.5, 1.5, (10.0, 10.0), 3.0, variance=1.0)], BOUNDS)
    a, mid, b = (4.0, 10.0), (10.0, 10.0), (16.0, 10.0)
    whole = cf.path_invasiveness(flow, [a, b], WIDE)
    split = cf.path_invasiveness(flow, [a, mid, b], WIDE)
    assert abs(whole.invasiveness - split.invasiveness) / whole.invasiveness < 1e-3
    assert abs(whole.length - split.length) < 1e-12


def test_path_three_legs_uniform_closed_form():
    flow = uniform_flow(1.0, (0.0, 0.0), 1.0)
    wpts = [(2.0, 2.0), (8.0, 2.0), (8.0, 10.0), (15.0, 10.0)]
    total_len = 6.0 + 8.0 + 7.0
    ec = cf.path_invasiveness(flow, wpts, WIDE)
    assert abs(ec.invasiveness - 2.0 * total_len) <= 1e-9
    assert abs(ec.length - total_len) <= 1e-12


def test_path_requires_two_waypoints():
    flow = uniform_flow(1.0, (0.0, 0.0), 1.0)
    with pytest.raises(ContractError):
        cf.path_invasiveness(flow, [(1.0, 1.0)], WIDE)
    with pytest.raises(DegenerateEdgeError):
        cf.path_invasiveness(flow, [(1.0, 1.0), (1.0, 1.0), (2.0, 2.0)], WIDE)


def test_speed_limits_validation():
    with pytest.raises(ConfigurationError):
        cf.SpeedLimits(0.0, 1.0)
    with pytest.raises(ConfigurationError):
        cf.SpeedLimits(2.0, 1.0)
    with pytest.raises(ConfigurationError):
        cf.SpeedLimits(-1.0, 1.0)
