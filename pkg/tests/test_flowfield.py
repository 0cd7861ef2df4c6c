import math

import numpy as np
import pytest

import crowdflow as cf
from crowdflow.errors import ConfigurationError, ResourceLimitError

BOUNDS = (0.0, 0.0, 20.0, 20.0)


def test_uniform_sample_interior():
    flow = cf.AnalyticFlow([cf.uniform(1.0, (1.0, 0.0), 0.25)], BOUNDS)
    s = cf.sample(flow, (5.0, 7.0))
    assert s.density == 1.0
    assert np.array_equal(s.mean_velocity, [1.0, 0.0])
    assert s.variance == 0.25


def test_sample_outside_workspace_is_zero():
    flow = cf.AnalyticFlow([cf.uniform(1.0, (1.0, 0.0), 0.25)], BOUNDS)
    for p in [(1010.0, 10.0), (-990.0, 10.0), (10.0, 1020.0), (20.001, 10.0)]:
        s = cf.sample(flow, p)
        assert s.density == 0.0
        assert np.array_equal(s.mean_velocity, [0.0, 0.0])
        assert s.variance == 0.0


def test_bump_peak_and_floor():
    flow = cf.AnalyticFlow([cf.bump(0.5, 1.5, (10.0, 10.0), 3.0)], BOUNDS)
    assert cf.sample(flow, (10.0, 10.0)).density == 1.5
    assert abs(cf.sample(flow, (0.0, 0.0)).density - 0.5) < 1e-3


def test_mixture_opposing_flows():
    comps = [cf.uniform(1.0, (0.0, 1.0)), cf.uniform(1.0, (0.0, -1.0))]
    s = cf.mixture(comps, (3.0, 3.0))
    assert s.density == 2.0
    assert np.allclose(s.mean_velocity, [0.0, 0.0], atol=0)
    assert s.variance == 1.0


def test_mixture_single_component_identity():
    c = cf.uniform(0.7, (1.0, 0.0), 0.2)
    s = cf.mixture([c], (4.0, 4.0))
    assert s.density == 0.7
    assert np.array_equal(s.mean_velocity, [1.0, 0.0])
    assert s.variance == 0.2


def test_mixture_three_weighted_moments():
    comps = [
        cf.uniform(1.0, (0.0, 1.0)),
        cf.uniform(2.0, (0.0, -1.0)),
        cf.uniform(1.0, (0.0, 0.0)),
    ]
    s = cf.mixture(comps, (1.0, 1.0))
    assert s.density == 4.0
    assert abs(s.mean_velocity[1] - (-0.25)) < 1e-15
    assert abs(s.variance - 0.6875) < 1e-12


def test_mixture_variance_matches_monte_carlo():
    # Pick a random pedestrian (weighted by component density) and measure
    # the spread of its velocity; must agree with the analytic mixture.
    rng = np.random.default_rng(12345)
    velocities = np.array([[0.0, 1.0], [0.0, -1.0], [0.0, 0.0]])
    weights = np.array([1.0, 2.0, 1.0])
    draws = velocities[rng.choice(3, size=400_000, p=weights / weights.sum())]
    mean = draws.mean(axis=0)
    mc_var = float(np.mean(np.sum((draws - mean) ** 2, axis=1)))
    assert abs(mc_var - 0.6875) < 5e-3
    assert abs(mean[1] - (-0.25)) < 5e-3


def test_mixture_empty_raises():
    with pytest.raises(ConfigurationError):
        cf.mixture([], (0.0, 0.0))


def _assorted_components():
    return [
        cf.bump(0.2, 1.1, (4.0, 5.0), 2.0, velocity=(0.5, -0.2), variance=0.3),
        cf.vortex(0.4, 0.3, (10.0, 10.0), variance=0.1),
        cf.orbit(0.6, 1.2, (14.0, 6.0), variance=0.05),
        cf.ramp(0.1, 0.9, (2.0, 0.0), (18.0, 4.0), velocity=(0.0, 1.0)),
        cf.lane(0.8, (1.0, 1.0), (3.0, 3.0, 12.0, 9.0), variance=0.2),
    ]


def test_mixture_permutation_invariance():
    comps = _assorted_components()
    rng = np.random.default_rng(7)
    pts = rng.uniform(0, 20, size=(50, 2))
    for p in pts:
        base = cf.mixture(comps, p)
        for perm_seed in range(3):
            perm = list(rng.permutation(len(comps)))
            s = cf.mixture([comps[i] for i in perm], p)
            assert abs(s.density - base.density) <= 1e-12
            assert np.all(np.abs(s.mean_velocity - base.mean_velocity) <= 1e-12)
            assert abs(s.variance - base.variance) <= 1e-12


def test_sampled_fields_nonnegative():
    flow = cf.AnalyticFlow(_assorted_components(), BOUNDS)
    rng = np.random.default_rng(21)
    pts = rng.uniform(-2, 22, size=(10_000, 2))
    rho, _, _, var = flow.sample_many(pts)
    assert np.all(rho >= 0.0)
    assert np.all(var >= 0.0)


def test_scalar_sample_matches_kernel_batch():
    flow = cf.AnalyticFlow(_assorted_components(), BOUNDS)
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 20, size=(200, 2))
    rho, vx, vy, var = flow.sample_many(pts)
    for k, p in enumerate(pts):
        s = flow.sample(p)
        assert abs(s.density - rho[k]) <= 1e-12
        assert abs(s.mean_velocity[0] - vx[k]) <= 1e-12
        assert abs(s.mean_velocity[1] - vy[k]) <= 1e-12
        assert abs(s.variance - var[k]) <= 1e-12


def _small_grid():
    density = np.array([[0.0, 0.0], [1.0, 1.0]])
    vx = np.array([[0.0, 1.0], [0.0, 1.0]])
    vy = np.zeros((2, 2))
    var = np.array([[0.5, 0.5], [0.5, 0.5]])
    return cf.GridField((0.0, 0.0), 1.0, density, vx, vy, var)


def test_grid_sample_node_identity():
    g = _small_grid()
    s = cf.grid_sample(g, (0.0, 1.0))
    assert s.density == 1.0
    assert s.variance == 0.5
    assert cf.grid_sample(g, (1.0, 0.0)).density == 0.0


def test_grid_sample_bilinear_midpoint():
    g = _small_grid()
    assert abs(cf.grid_sample(g, (0.5, 0.5)).density - 0.5) < 1e-15


def test_grid_sample_outside_zero():
    g = _small_grid()
    s = cf.grid_sample(g, (2.5, 0.5))
    assert s.density == 0.0 and s.variance == 0.0
    assert np.array_equal(s.mean_velocity, [0.0, 0.0])


def test_grid_sample_continuous_across_cell_boundary():
    rng = np.random.default_rng(11)
    vals = rng.uniform(0, 2, size=(6, 6))
    g = cf.GridField((0.0, 0.0), 0.5, vals, vals * 0.3, vals * -0.2, vals * 0.1)
    eps = 1e-7
    for x_edge in (0.5, 1.0, 1.5, 2.0):
        lo = g.sample((x_edge - eps, 1.23))
        hi = g.sample((x_edge + eps, 1.23))
        assert abs(lo.density - hi.density) < 1e-4
        assert abs(lo.variance - hi.variance) < 1e-4


def test_bake_roundtrip_at_nodes():
    flow = cf.AnalyticFlow([cf.bump(0.5, 1.5, (10.0, 10.0), 3.0, variance=1.0)], BOUNDS)
    g = cf.bake(flow, BOUNDS, 0.5)
    nodes = [(0.0, 0.0), (10.0, 10.0), (4.5, 7.5), (20.0, 20.0)]
    for p in nodes:
        got = cf.grid_sample(g, p)
        want = cf.sample(flow, p)
        assert abs(got.density - want.density) <= 1e-12
        assert abs(got.variance - want.variance) <= 1e-12


def test_bake_uniform_all_nodes_identical():
    flow = cf.AnalyticFlow([cf.uniform(0.8, (0.2, 0.1), 0.4)], BOUNDS)
    g = cf.bake(flow, BOUNDS, 1.0)
    assert np.all(g.density == 0.8)
    assert np.all(g.velocity_x == 0.2)
    assert np.all(g.velocity_y == 0.1)
    assert np.all(g.variance == 0.4)


def test_bake_bump_interpolation_error_bound():
    # Bilinear error for a C^2 field is bounded by (|fxx| + |fyy|) h^2 / 8;
    # the bump's second derivative peaks at amplitude / std^2 per axis.
    amp, std, h = 1.0, 3.0, 0.1
    bound = amp * h * h / (4.0 * std * std)
    flow = cf.AnalyticFlow([cf.bump(0.5, 0.5 + amp, (10.0, 10.0), std, variance=1.0)], BOUNDS)
    g = cf.bake(flow, BOUNDS, h)
    rng = np.random.default_rng(5)
    pts = rng.uniform(1.0, 19.0, size=(100, 2))
    errs = [abs(cf.grid_sample(g, p).density - cf.sample(flow, p).density) for p in pts]
    assert max(errs) <= bound


def test_bake_node_cap():
    flow = cf.AnalyticFlow([cf.uniform(1.0)], BOUNDS)
    with pytest.raises(ResourceLimitError):
        cf.bake(flow, BOUNDS, 0.5, node_cap=100)


def test_component_validation():
    with pytest.raises(ConfigurationError):
        cf.uniform(-0.1)
    with pytest.raises(ConfigurationError):
        cf.uniform(1.0, variance=-0.5)
    with pytest.raises(ConfigurationError):
        cf.bump(0.5, 0.4, (0, 0), 1.0)  # peak below floor
    with pytest.raises(ConfigurationError):
        cf.bump(0.5, 1.5, (0, 0), 0.0)
    with pytest.raises(ConfigurationError):
        cf.ramp(0.1, 0.5, (1.0, 1.0), (1.0, 1.0))
    with pytest.raises(ConfigurationError):
        cf.lane(1.0, (1.0, 0.0), (5.0, 5.0, 5.0, 9.0))


def test_grid_field_validation():
    ok = np.ones((2, 2))
    with pytest.raises(ConfigurationError):
        cf.GridField((0, 0), 1.0, -ok, ok, ok, ok)
    with pytest.raises(ConfigurationError):
        cf.GridField((0, 0), 0.0, ok, ok, ok, ok)
    with pytest.raises(ConfigurationError):
        cf.GridField((0, 0), 1.0, np.ones((1, 2)), np.ones((1, 2)), np.ones((1, 2)), np.ones((1, 2)))
    with pytest.raises(ConfigurationError):
        cf.GridField((0, 0), 1.0, ok, np.ones((2, 3)), ok, ok)


def test_orbit_speed_constant_and_zero_at_center():
    c = cf.orbit(1.0, 1.0, (10.0, 10.0))
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = rng.uniform(0, 20, 2)
        v = c.velocity(p)
        assert abs(math.hypot(v[0], v[1]) - 1.0) < 1e-12
    assert np.array_equal(c.velocity((10.0, 10.0)), [0.0, 0.0])


def test_vortex_speed_grows_with_radius():
    c = cf.vortex(1.0, 0.5, (0.0, 0.0))
    v1 = c.velocity((1.0, 0.0))
    v2 = c.velocity((2.0, 0.0))
    assert abs(math.hypot(*v1) - 0.5) < 1e-12
    assert abs(math.hypot(*v2) - 1.0) < 1e-12
