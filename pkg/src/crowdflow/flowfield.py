"""Crowds as stochastic flow fields.

A crowd is summarized by three queryable fields over 2D space: pedestrian
density (1/m^2), mean walking velocity (m/s), and the scalar velocity
variance (m^2/s^2) — the expected squared Euclidean deviation from the mean
velocity. Zero variance describes a coherent stream; a large variance with a
near-zero mean describes people criss-crossing with no dominant direction.

Fields are built from parametric component streams (uniform, gaussian bump,
linear ramp, vortex, orbit, lane) combined as density-weighted mixtures, or
loaded as bilinearly interpolated grids. All flow objects are immutable after
construction and safe to query from any number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels
from .errors import ConfigurationError, ContractError, ResourceLimitError

UNBOUNDED = (-math.inf, -math.inf, math.inf, math.inf)

DEFAULT_GRID_NODE_CAP = 4_000_000


class FlowSample(NamedTuple):
    """Field values at one point."""

    density: float
    mean_velocity: np.ndarray
    variance: float


def _vec(p) -> np.ndarray:
    v = np.asarray(p, dtype=np.float64).reshape(2)
    if not np.all(np.isfinite(v)):
        raise ContractError(f"expected finite 2D point, got {p!r}")
    return v


_ZERO_SAMPLE = FlowSample(0.0, np.zeros(2), 0.0)


@dataclass(frozen=True)
class ComponentFlow:
    """One pedestrian stream: parametric density, velocity and variance fields.

    Build instances through the factory functions (``uniform``, ``bump``,
    ``ramp``, ``vortex``, ``orbit``, ``lane``) rather than directly; they
    validate nonnegativity of the density and variance fields.
    """

    density_kind: int
    density_params: tuple
    velocity_kind: int
    velocity_params: tuple
    variance: float = 0.0
    support: tuple | None = None  # (x0, y0, x1, y1) or None for everywhere

    def density(self, p) -> float:
        x, y = _vec(p)
        if self.support is not None:
            x0, y0, x1, y1 = self.support
            if x < x0 or y < y0 or x > x1 or y > y1:
                return 0.0
        q = self.density_params
        if self.density_kind == kernels.DENSITY_CONST:
            return q[0]
        if self.density_kind == kernels.DENSITY_GAUSSIAN:
            floor, amp, cx, cy, std = q
            return floor + amp * math.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2.0 * std * std))
        v0, v1, p0x, p0y, p1x, p1y = q
        dx, dy = p1x - p0x, p1y - p0y
        t = ((x - p0x) * dx + (y - p0y) * dy) / (dx * dx + dy * dy)
        return v0 + (v1 - v0) * min(max(t, 0.0), 1.0)

    def velocity(self, p) -> np.ndarray:
        x, y = _vec(p)
        q = self.velocity_params
        if self.velocity_kind == kernels.VEL_CONST:
            return np.array([q[0], q[1]])
        if self.velocity_kind == kernels.VEL_VORTEX:
            omega, cx, cy = q
            return np.array([-omega * (y - cy), omega * (x - cx)])
        speed, cx, cy = q
        rx, ry = x - cx, y - cy
        r = math.hypot(rx, ry)
        if r == 0.0:
            return np.zeros(2)
        return np.array([-speed * ry / r, speed * rx / r])

    def packed(self) -> np.ndarray:
        row = np.zeros(kernels.COMPONENT_COLS)
        row[0] = self.density_kind
        row[1 : 1 + len(self.density_params)] = self.density_params
        row[7] = self.velocity_kind
        row[8 : 8 + len(self.velocity_params)] = self.velocity_params
        row[11] = self.variance
        row[12:16] = self.support if self.support is not None else UNBOUNDED
        return row


def _check_nonneg(name, value):
    if value < 0.0 or not math.isfinite(value):
        raise ConfigurationError(f"{name} must be finite and >= 0, got {value}")


def _check_support(support):
    if support is None:
        return None
    x0, y0, x1, y1 = (float(v) for v in support)
    if not (x0 < x1 and y0 < y1):
        raise ConfigurationError(f"degenerate support rectangle {support!r}")
    return (x0, y0, x1, y1)


def uniform(density: float, velocity=(0.0, 0.0), variance: float = 0.0, support=None) -> ComponentFlow:
    """Constant-density stream with constant velocity."""
    _check_nonneg("density", density)
    _check_nonneg("variance", variance)
    vx, vy = (float(v) for v in velocity)
    return ComponentFlow(
        kernels.DENSITY_CONST, (float(density),), kernels.VEL_CONST, (vx, vy),
        float(variance), _check_support(support),
    )


def bump(floor: float, peak: float, center, std: float,
         velocity=(0.0, 0.0), variance: float = 0.0, support=None) -> ComponentFlow:
    """Isotropic gaussian density bump: ``floor`` far away, ``peak`` at ``center``."""
    _check_nonneg("floor", floor)
    _check_nonneg("variance", variance)
    if peak < floor:
        raise ConfigurationError(f"peak ({peak}) must be >= floor ({floor})")
    if std <= 0.0:
        raise ConfigurationError(f"std must be > 0, got {std}")
    cx, cy = _vec(center)
    vx, vy = (float(v) for v in velocity)
    return ComponentFlow(
        kernels.DENSITY_GAUSSIAN, (float(floor), float(peak - floor), cx, cy, float(std)),
        kernels.VEL_CONST, (vx, vy), float(variance), _check_support(support),
    )


def ramp(v0: float, v1: float, p0, p1,
         velocity=(0.0, 0.0), variance: float = 0.0, support=None) -> ComponentFlow:
    """Density varying linearly from ``v0`` at ``p0`` to ``v1`` at ``p1``.

    Constant before ``p0`` and after ``p1`` along the ``p0 -> p1`` axis,
    constant across it.
    """
    _check_nonneg("v0", v0)
    _check_nonneg("v1", v1)
    _check_nonneg("variance", variance)
    a = _vec(p0)
    b = _vec(p1)
    if np.array_equal(a, b):
        raise ConfigurationError("ramp endpoints must differ")
    vx, vy = (float(v) for v in velocity)
    return ComponentFlow(
        kernels.DENSITY_RAMP, (float(v0), float(v1), a[0], a[1], b[0], b[1]),
        kernels.VEL_CONST, (vx, vy), float(variance), _check_support(support),
    )


def vortex(density: float, omega: float, center, variance: float = 0.0, support=None) -> ComponentFlow:
    """Solid-rotation stream: velocity ``omega * (-(y-cy), x-cx)`` about ``center``."""
    _check_nonneg("density", density)
    _check_nonneg("variance", variance)
    cx, cy = _vec(center)
    return ComponentFlow(
        kernels.DENSITY_CONST, (float(density),), kernels.VEL_VORTEX,
        (float(omega), cx, cy), float(variance), _check_support(support),
    )


def orbit(density: float, speed: float, center, variance: float = 0.0, support=None) -> ComponentFlow:
    """Constant-speed circular stream about ``center`` (zero exactly at it).

    Unlike ``vortex`` the speed does not grow with radius; this models a crowd
    circling a point of interest at walking pace.
    """
    _check_nonneg("density", density)
    _check_nonneg("variance", variance)
    cx, cy = _vec(center)
    return ComponentFlow(
        kernels.DENSITY_CONST, (float(density),), kernels.VEL_ORBIT,
        (float(speed), cx, cy), float(variance), _check_support(support),
    )


def lane(density: float, velocity, rect, variance: float = 0.0) -> ComponentFlow:
    """Constant stream restricted to an axis-aligned rectangle."""
    return uniform(density, velocity, variance, support=rect)


def mixture(components: Sequence[ComponentFlow], p) -> FlowSample:
    """Density-weighted mixture of component streams at one point.

    Total density is the sum of component densities (each is an expected
    pedestrian count per area, so moments weight by it). The mean velocity is
    the density-weighted mean, and the variance is the density-weighted second
    moment minus the squared mean, i.e. the spread of the velocity
    distribution induced by picking a pedestrian at random.
    """
    if not components:
        raise ConfigurationError("mixture requires at least one component flow")
    x = _vec(p)
    if len(components) == 1:  # identity, exactly
        c = components[0]
        d = c.density(x)
        if d <= 0.0:
            return _ZERO_SAMPLE
        return FlowSample(d, c.velocity(x), c.variance)
    rho = 0.0
    mx = my = 0.0
    m2 = 0.0
    for c in components:
        d = c.density(x)
        if d <= 0.0:
            continue
        w = c.velocity(x)
        rho += d
        mx += d * w[0]
        my += d * w[1]
        m2 += d * (w[0] * w[0] + w[1] * w[1] + c.variance)
    if rho <= 0.0:
        return _ZERO_SAMPLE
    vx = mx / rho
    vy = my / rho
    var = max(m2 / rho - (vx * vx + vy * vy), 0.0)
    return FlowSample(rho, np.array([vx, vy]), var)


class CrowdFlow:
    """Queryable (density, mean velocity, variance) field over a workspace."""

    bounds: tuple

    def sample(self, p) -> FlowSample:
        raise NotImplementedError

    def kernel_spec(self) -> tuple:
        """Field description consumed by the numeric kernels."""
        raise NotImplementedError

    def sample_many(self, points, backend: str | None = None):
        """Vectorized sampling; returns (rho, vx, vy, var) arrays."""
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        impl = kernels.get_kernels(backend)
        return impl.field_samples(self.kernel_spec(), pts[:, 0].copy(), pts[:, 1].copy())


class AnalyticFlow(CrowdFlow):
    """Mixture of parametric component streams over a rectangular workspace.

    Queries outside the workspace return the zero sample (empty space), so
    planners probing beyond the bounds see no crowd rather than an error.
    """

    def __init__(self, components: Iterable[ComponentFlow], bounds):
        components = tuple(components)
        if not components:
            raise ConfigurationError("AnalyticFlow requires at least one component")
        x0, y0, x1, y1 = (float(v) for v in bounds)
        if not (x0 < x1 and y0 < y1):
            raise ConfigurationError(f"degenerate workspace bounds {bounds!r}")
        self.components = components
        self.bounds = (x0, y0, x1, y1)
        self._packed = np.vstack([c.packed() for c in components])
        self._spec = ("components", self._packed, np.array(self.bounds))

    def sample(self, p) -> FlowSample:
        x = _vec(p)
        x0, y0, x1, y1 = self.bounds
        if x[0] < x0 or x[1] < y0 or x[0] > x1 or x[1] > y1:
            return _ZERO_SAMPLE
        return mixture(self.components, x)

    def kernel_spec(self) -> tuple:
        return self._spec


class GridField(CrowdFlow):
    """Bilinearly interpolated field on a regular node grid.

    Node arrays have shape ``(ny, nx)`` indexed ``[j, i]`` for the node at
    ``origin + (i, j) * cell_size``. Outside the grid extent the sample is
    zero. Interpolation of nonnegative nodes stays nonnegative; density and
    variance are clamped at zero against rounding either way.
    """

    def __init__(self, origin, cell_size: float, density, velocity_x, velocity_y, variance):
        if cell_size <= 0.0:
            raise ConfigurationError(f"cell_size must be > 0, got {cell_size}")
        self.origin = tuple(_vec(origin))
        self.cell_size = float(cell_size)
        self.density = np.ascontiguousarray(density, np.float64)
        self.velocity_x = np.ascontiguousarray(velocity_x, np.float64)
        self.velocity_y = np.ascontiguousarray(velocity_y, np.float64)
        self.variance = np.ascontiguousarray(variance, np.float64)
        shape = self.density.shape
        if len(shape) != 2 or shape[0] < 2 or shape[1] < 2:
            raise ConfigurationError(f"grid needs at least 2x2 nodes, got shape {shape}")
        for name, arr in (("velocity_x", self.velocity_x), ("velocity_y", self.velocity_y),
                          ("variance", self.variance)):
            if arr.shape != shape:
                raise ConfigurationError(f"{name} shape {arr.shape} != density shape {shape}")
        if np.any(self.density < 0.0) or np.any(self.variance < 0.0):
            raise ConfigurationError("grid density and variance nodes must be >= 0")
        if not all(np.all(np.isfinite(a)) for a in
                   (self.density, self.velocity_x, self.velocity_y, self.variance)):
            raise ConfigurationError("grid nodes must be finite")
        self.ny, self.nx = shape
        self.bounds = (
            self.origin[0], self.origin[1],
            self.origin[0] + (self.nx - 1) * self.cell_size,
            self.origin[1] + (self.ny - 1) * self.cell_size,
        )
        self._spec = ("grid", np.array(self.origin), self.cell_size,
                      self.density, self.velocity_x, self.velocity_y, self.variance)

    def sample(self, p) -> FlowSample:
        rho, vx, vy, var = self.sample_many(np.asarray(p, np.float64).reshape(1, 2), backend="numpy")
        return FlowSample(float(rho[0]), np.array([vx[0], vy[0]]), float(var[0]))

    def kernel_spec(self) -> tuple:
        return self._spec


def sample(flow: CrowdFlow, p) -> FlowSample:
    """Field values at ``p``; the zero sample outside the flow's workspace."""
    return flow.sample(p)


def grid_sample(field: GridField, p) -> FlowSample:
    """Bilinear interpolation of a grid field; zero outside the grid extent."""
    return field.sample(p)


def bake(flow: CrowdFlow, bounds, cell_size: float, node_cap: int = DEFAULT_GRID_NODE_CAP) -> GridField:
    """Sample ``flow`` onto a regular grid covering ``bounds``.

    Node values equal ``flow.sample`` at node positions exactly; the grid may
    extend slightly past ``bounds`` so the last cell is complete.
    """
    x0, y0, x1, y1 = (float(v) for v in bounds)
    if not (x0 < x1 and y0 < y1):
        raise ContractError(f"degenerate bake bounds {bounds!r}")
    if cell_size <= 0.0:
        raise ContractError(f"cell_size must be > 0, got {cell_size}")
    nx = max(2, int(math.ceil((x1 - x0) / cell_size - 1e-9)) + 1)
    ny = max(2, int(math.ceil((y1 - y0) / cell_size - 1e-9)) + 1)
    if nx * ny > node_cap:
        raise ResourceLimitError(
            f"grid of {nx}x{ny} nodes exceeds the cap of {node_cap}; "
            f"use a coarser cell_size"
        )
    xs = x0 + cell_size * np.arange(nx)
    ys = y0 + cell_size * np.arange(ny)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    rho, vx, vy, var = flow.sample_many(pts)
    return GridField(
        (x0, y0), cell_size,
        rho.reshape(ny, nx), vx.reshape(ny, nx), vy.reshape(ny, nx), var.reshape(ny, nx),
    )
