"""Pure-numpy implementations of the hot kernels.

Functionally equivalent to ``_kernels_numba``; used as the fallback backend
and as a cross-check in tests. See ``crowdflow.kernels`` for the shared data
layout.
"""

from __future__ import annotations

import numpy as np

_CEIL_SLACK = 1.0 - 1e-12  # ceil(L/step) without tipping exact multiples up


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _component_eval(c, px, py):
    """Density and velocity of one packed component at each point."""
    n = px.shape[0]
    mask = (px >= c[12]) & (py >= c[13]) & (px <= c[14]) & (py <= c[15])
    kind = int(c[0])
    if kind == 0:
        d = np.full(n, c[1])
    elif kind == 1:
        d = c[1] + c[2] * np.exp(
            -((px - c[3]) ** 2 + (py - c[4]) ** 2) / (2.0 * c[5] * c[5])
        )
    else:
        rdx = c[5] - c[3]
        rdy = c[6] - c[4]
        t = ((px - c[3]) * rdx + (py - c[4]) * rdy) / (rdx * rdx + rdy * rdy)
        d = c[1] + (c[2] - c[1]) * np.clip(t, 0.0, 1.0)
    d = np.where(mask, d, 0.0)

    vkind = int(c[7])
    if vkind == 0:
        wx = np.full(n, c[8])
        wy = np.full(n, c[9])
    elif vkind == 1:
        wx = -c[8] * (py - c[10])
        wy = c[8] * (px - c[9])
    else:
        rx = px - c[9]
        ry = py - c[10]
        r = np.sqrt(rx * rx + ry * ry)
        inv = np.divide(1.0, r, out=np.zeros(n), where=r > 0.0)
        wx = -c[8] * ry * inv
        wy = c[8] * rx * inv
    return d, wx, wy


def _components_samples(comps, workspace, px, py):
    inside = (
        (px >= workspace[0])
        & (py >= workspace[1])
        & (px <= workspace[2])
        & (py <= workspace[3])
    )
    if comps.shape[0] == 1:
        # single stream: no moment normalization, values pass through exactly
        d, wx, wy = _component_eval(comps[0], px, py)
        rho = np.where(inside & (d > 0.0), d, 0.0)
        pos = rho > 0.0
        return (
            rho,
            np.where(pos, wx, 0.0),
            np.where(pos, wy, 0.0),
            np.where(pos, comps[0][11], 0.0),
        )
    n = px.shape[0]
    rho = np.zeros(n)
    mx = np.zeros(n)
    my = np.zeros(n)
    m2 = np.zeros(n)
    for c in comps:
        d, wx, wy = _component_eval(c, px, py)
        rho += d
        mx += d * wx
        my += d * wy
        m2 += d * (wx * wx + wy * wy + c[11])
    rho = np.where(inside & (rho > 0.0), rho, 0.0)
    pos = rho > 0.0
    vx = np.divide(mx, rho, out=np.zeros_like(rho), where=pos)
    vy = np.divide(my, rho, out=np.zeros_like(rho), where=pos)
    e2 = np.divide(m2, rho, out=np.zeros_like(rho), where=pos)
    var = np.maximum(e2 - (vx * vx + vy * vy), 0.0)
    var = np.where(pos, var, 0.0)
    return rho, vx, vy, var


def _grid_samples(origin, cell, g_rho, g_vx, g_vy, g_var, px, py):
    ny, nx = g_rho.shape
    gx = (px - origin[0]) / cell
    gy = (py - origin[1]) / cell
    inside = (gx >= 0.0) & (gy >= 0.0) & (gx <= nx - 1.0) & (gy <= ny - 1.0)
    gx = np.clip(gx, 0.0, nx - 1.0)
    gy = np.clip(gy, 0.0, ny - 1.0)
    i0 = np.minimum(gx.astype(np.int64), nx - 2)
    j0 = np.minimum(gy.astype(np.int64), ny - 2)
    fx = gx - i0
    fy = gy - j0
    w00 = (1.0 - fx) * (1.0 - fy)
    w10 = fx * (1.0 - fy)
    w01 = (1.0 - fx) * fy
    w11 = fx * fy

    def lerp(arr):
        v = (
            arr[j0, i0] * w00
            + arr[j0, i0 + 1] * w10
            + arr[j0 + 1, i0] * w01
            + arr[j0 + 1, i0 + 1] * w11
        )
        return np.where(inside, v, 0.0)

    rho = np.maximum(lerp(g_rho), 0.0)
    vx = lerp(g_vx)
    vy = lerp(g_vy)
    var = np.maximum(lerp(g_var), 0.0)
    return rho, vx, vy, var


def field_samples(field, px, py):
    """Evaluate (density, mean velocity x/y, variance) at each point."""
    px = _f64(px)
    py = _f64(py)
    if field[0] == "components":
        return _components_samples(_f64(field[1]), _f64(field[2]), px, py)
    _, origin, cell, g_rho, g_vx, g_vy, g_var = field
    return _grid_samples(
        _f64(origin), float(cell), _f64(g_rho), _f64(g_vx), _f64(g_vy), _f64(g_var), px, py
    )


def edge_costs(field, ax, ay, bx, by, v_min, v_max, step):
    """Midpoint-quadrature edge weights for a batch of directed segments.

    Returns (invasiveness a->b, invasiveness b->a, travel time, length); the
    time integral is direction-independent because the speed law is.
    """
    ax, ay, bx, by = map(_f64, (ax, ay, bx, by))
    dx = bx - ax
    dy = by - ay
    length = np.sqrt(dx * dx + dy * dy)
    m = np.maximum(np.ceil(length / step * _CEIL_SLACK).astype(np.int64), 1)
    h = length / m
    ux = dx / length
    uy = dy / length

    n_edges = len(length)
    total = int(m.sum())
    eidx = np.repeat(np.arange(n_edges), m)
    first = np.concatenate(([0], np.cumsum(m)[:-1]))
    k = np.arange(total) - np.repeat(first, m)
    t = (k + 0.5) * h[eidx]
    px = ax[eidx] + ux[eidx] * t
    py = ay[eidx] + uy[eidx] * t

    rho, wx, wy, var = field_samples(field, px, py)
    s2 = wx * wx + wy * wy + var
    v = np.clip(np.sqrt(s2), v_min, v_max)
    a_term = rho * (s2 / v + v)
    b_term = rho * (wx * ux[eidx] + wy * uy[eidx])
    sum_a = np.bincount(eidx, weights=a_term, minlength=n_edges)
    sum_b = np.bincount(eidx, weights=b_term, minlength=n_edges)
    sum_t = np.bincount(eidx, weights=1.0 / v, minlength=n_edges)

    inv_fwd = np.maximum((sum_a - 2.0 * sum_b) * h, 0.0)
    inv_rev = np.maximum((sum_a + 2.0 * sum_b) * h, 0.0)
    travel_time = sum_t * h
    return inv_fwd, inv_rev, travel_time, length


def points_blocked(px, py, circles, rects):
    """True where a point lies inside any obstacle (circles strict interior)."""
    px = _f64(px)
    py = _f64(py)
    blocked = np.zeros(px.shape[0], dtype=bool)
    for cx, cy, r in np.atleast_2d(_f64(circles)) if len(circles) else []:
        blocked |= (px - cx) ** 2 + (py - cy) ** 2 < r * r
    for x0, y0, x1, y1 in np.atleast_2d(_f64(rects)) if len(rects) else []:
        blocked |= (px >= x0) & (px <= x1) & (py >= y0) & (py <= y1)
    return blocked


def _slab_interval(a, d, lo, hi):
    parallel = d == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ta = (lo - a) / d
        tb = (hi - a) / d
    inside = (a >= lo) & (a <= hi)
    tlo = np.where(parallel, np.where(inside, -np.inf, np.inf), np.minimum(ta, tb))
    thi = np.where(parallel, np.where(inside, np.inf, -np.inf), np.maximum(ta, tb))
    return tlo, thi


def segments_blocked(ax, ay, bx, by, circles, rects):
    """True where segment a->b intersects any obstacle.

    Exact tests: closest-point distance for circles (strict interior), slab
    clipping for axis-aligned rectangles (touching counts as blocked).
    """
    ax, ay, bx, by = map(_f64, (ax, ay, bx, by))
    dx = bx - ax
    dy = by - ay
    dd = dx * dx + dy * dy
    blocked = np.zeros(ax.shape[0], dtype=bool)

    for cx, cy, r in np.atleast_2d(_f64(circles)) if len(circles) else []:
        fx = ax - cx
        fy = ay - cy
        t = np.divide(-(fx * dx + fy * dy), dd, out=np.zeros_like(dd), where=dd > 0.0)
        t = np.clip(t, 0.0, 1.0)
        qx = fx + t * dx
        qy = fy + t * dy
        blocked |= qx * qx + qy * qy < r * r

    for x0, y0, x1, y1 in np.atleast_2d(_f64(rects)) if len(rects) else []:
        tlo_x, thi_x = _slab_interval(ax, dx, x0, x1)
        tlo_y, thi_y = _slab_interval(ay, dy, y0, y1)
        t0 = np.maximum(np.maximum(tlo_x, tlo_y), 0.0)
        t1 = np.minimum(np.minimum(thi_x, thi_y), 1.0)
        blocked |= t0 <= t1

    return blocked
