"""Invasiveness measure, speed law, and line-integral edge costs.

The instantaneous invasiveness of a robot moving at velocity ``v`` through a
flow sample ``(rho, V, var)`` is ``rho * (|V - v|^2 + var)``: the rate of
disruptive encounters scales with density and with the squared relative
velocity, plus the crowd's own velocity spread. The planner minimizes the
time integral of this quantity along the path.

For straight-line travel the integrand per unit length is ``I / v``, which is
convex in the speed ``v`` and minimized at ``v* = sqrt(|V|^2 + var)``
independent of heading; we clamp ``v*`` to the robot's speed limits (an
unclamped ``v* = 0`` in empty still space would make travel time infinite,
and real robots are speed-limited anyway). Substituting the unclamped ``v*``
gives the closed-form cost density ``2 rho (v* - V . u)`` along unit heading
``u``, nonnegative because ``V . u <= |V| <= v*``.

Edge costs integrate the cost density with composite midpoint quadrature
(second-order accurate, never evaluates shared endpoints twice), using the
same kernels the roadmap builder uses, so planned totals and re-evaluated
path costs agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import ConfigurationError, ContractError, DegenerateEdgeError
from .flowfield import CrowdFlow, FlowSample

DEFAULT_QUADRATURE_STEP = 0.05

DEFAULT_V_MIN = 0.1
DEFAULT_V_MAX = 2.0

_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class SpeedLimits:
    """Admissible robot speed interval, 0 < v_min <= v_max."""

    v_min: float = DEFAULT_V_MIN
    v_max: float = DEFAULT_V_MAX

    def __post_init__(self):
        if not (0.0 < self.v_min <= self.v_max) or not math.isfinite(self.v_min):
            raise ConfigurationError(
                f"require 0 < v_min <= v_max, got v_min={self.v_min}, v_max={self.v_max}"
            )

    def clamp(self, v: float) -> float:
        return min(max(v, self.v_min), self.v_max)


class EdgeCost(NamedTuple):
    """Accumulated line-integral quantities along one or more segments."""

    invasiveness: float
    travel_time: float
    length: float


def instantaneous_invasiveness(s: FlowSample, v_robot) -> float:
    """Disruption rate ``rho * (|V - v|^2 + var)`` for a robot velocity."""
    v = np.asarray(v_robot, dtype=np.float64).reshape(2)
    dv = s.mean_velocity - v
    return s.density * (float(dv @ dv) + s.variance)


def optimal_speed(s: FlowSample, limits: SpeedLimits) -> float:
    """Minimally invasive speed ``sqrt(|V|^2 + var)`` clamped to the limits.

    Direction does not enter: the per-distance invasiveness splits into a
    convex speed term and a heading term, and only the former depends on
    speed magnitude.
    """
    v = s.mean_velocity
    return limits.clamp(math.sqrt(float(v @ v) + s.variance))


def cost_density(s: FlowSample, direction, limits: SpeedLimits) -> float:
    """Invasiveness per meter along unit heading ``direction`` at optimal speed.

    Evaluates ``rho * ((|V|^2 + var)/v + v - 2 V . u)`` with ``v`` the clamped
    optimal speed; when unclamped this reduces to ``2 rho (v* - V . u)``.
    """
    u = np.asarray(direction, dtype=np.float64).reshape(2)
    norm = math.hypot(u[0], u[1])
    if abs(norm - 1.0) > _UNIT_TOL:
        raise ContractError(f"direction must be a unit vector, |u| = {norm}")
    if s.density <= 0.0:
        return 0.0
    w = s.mean_velocity
    s2 = float(w @ w) + s.variance
    v = limits.clamp(math.sqrt(s2))
    return max(s.density * (s2 / v + v - 2.0 * float(w @ u)), 0.0)


def _as_point(p, name: str) -> np.ndarray:
    v = np.asarray(p, dtype=np.float64).reshape(2)
    if not np.all(np.isfinite(v)):
        raise ContractError(f"{name} must be finite, got {p!r}")
    return v


def edge_cost(flow: CrowdFlow, a, b, limits: SpeedLimits,
              quadrature_step: float = DEFAULT_QUADRATURE_STEP) -> EdgeCost:
    """Cost of traversing the straight segment ``a -> b`` at optimal speed.

    Composite midpoint quadrature with ``ceil(|b-a| / quadrature_step)`` equal
    subintervals. Not symmetric in the endpoints: the heading term flips sign
    with direction.
    """
    a = _as_point(a, "a")
    b = _as_point(b, "b")
    if np.array_equal(a, b):
        raise DegenerateEdgeError(f"edge endpoints coincide at {tuple(a)}")
    if quadrature_step <= 0.0:
        raise ContractError(f"quadrature_step must be > 0, got {quadrature_step}")
    impl = kernels.get_kernels()
    inv_f, _, time, length = impl.edge_costs(
        flow.kernel_spec(),
        np.array([a[0]]), np.array([a[1]]), np.array([b[0]]), np.array([b[1]]),
        limits.v_min, limits.v_max, quadrature_step,
    )
    return EdgeCost(float(inv_f[0]), float(time[0]), float(length[0]))


def path_invasiveness(flow: CrowdFlow, waypoints, limits: SpeedLimits,
                      quadrature_step: float = DEFAULT_QUADRATURE_STEP) -> EdgeCost:
    """Sum of ``edge_cost`` over consecutive waypoint pairs."""
    pts = np.asarray(waypoints, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] < 2:
        raise ContractError(f"need at least 2 waypoints, got {pts.shape[0]}")
    if not np.all(np.isfinite(pts)):
        raise ContractError("waypoints must be finite")
    same = np.all(pts[1:] == pts[:-1], axis=1)
    if np.any(same):
        raise DegenerateEdgeError(
            f"consecutive waypoints coincide at index {int(np.flatnonzero(same)[0])}"
        )
    if quadrature_step <= 0.0:
        raise ContractError(f"quadrature_step must be > 0, got {quadrature_step}")
    impl = kernels.get_kernels()
    inv_f, _, time, length = impl.edge_costs(
        flow.kernel_spec(),
        pts[:-1, 0].copy(), pts[:-1, 1].copy(), pts[1:, 0].copy(), pts[1:, 1].copy(),
        limits.v_min, limits.v_max, quadrature_step,
    )
    return EdgeCost(float(np.sum(inv_f)), float(np.sum(time)), float(np.sum(length)))
