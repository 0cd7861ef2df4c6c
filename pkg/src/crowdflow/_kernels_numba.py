"""Numba-jitted implementations of the hot kernels.

Scalar inner loops compiled with ``@njit(cache=True)``; compiled artifacts are
cached on disk so the JIT cost is paid once per install. Layout documented in
``crowdflow.kernels``. All loops are single-threaded and accumulate in a fixed
order, so results are reproducible run to run.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_CEIL_SLACK = 1.0 - 1e-12


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


@njit(cache=True)
def _component_at(comps, c, x, y):
    """(density, wx, wy) of packed component row ``c``; density 0 off support."""
    if x < comps[c, 12] or y < comps[c, 13] or x > comps[c, 14] or y > comps[c, 15]:
        return 0.0, 0.0, 0.0
    kind = int(comps[c, 0])
    if kind == 0:
        d = comps[c, 1]
    elif kind == 1:
        ddx = x - comps[c, 3]
        ddy = y - comps[c, 4]
        s = comps[c, 5]
        d = comps[c, 1] + comps[c, 2] * math.exp(-(ddx * ddx + ddy * ddy) / (2.0 * s * s))
    else:
        rdx = comps[c, 5] - comps[c, 3]
        rdy = comps[c, 6] - comps[c, 4]
        t = ((x - comps[c, 3]) * rdx + (y - comps[c, 4]) * rdy) / (rdx * rdx + rdy * rdy)
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        d = comps[c, 1] + (comps[c, 2] - comps[c, 1]) * t
    if d <= 0.0:
        return 0.0, 0.0, 0.0
    vkind = int(comps[c, 7])
    if vkind == 0:
        wx = comps[c, 8]
        wy = comps[c, 9]
    elif vkind == 1:
        wx = -comps[c, 8] * (y - comps[c, 10])
        wy = comps[c, 8] * (x - comps[c, 9])
    else:
        rx = x - comps[c, 9]
        ry = y - comps[c, 10]
        rr = math.sqrt(rx * rx + ry * ry)
        if rr > 0.0:
            wx = -comps[c, 8] * ry / rr
            wy = comps[c, 8] * rx / rr
        else:
            wx = 0.0
            wy = 0.0
    return d, wx, wy


@njit(cache=True)
def _components_at(comps, wx0, wy0, wx1, wy1, x, y):
    if x < wx0 or y < wy0 or x > wx1 or y > wy1:
        return 0.0, 0.0, 0.0, 0.0
    if comps.shape[0] == 1:
        # single stream: no moment normalization, values pass through exactly
        d, wx, wy = _component_at(comps, 0, x, y)
        if d <= 0.0:
            return 0.0, 0.0, 0.0, 0.0
        return d, wx, wy, comps[0, 11]
    rho = 0.0
    mx = 0.0
    my = 0.0
    m2 = 0.0
    for c in range(comps.shape[0]):
        d, wx, wy = _component_at(comps, c, x, y)
        if d <= 0.0:
            continue
        rho += d
        mx += d * wx
        my += d * wy
        m2 += d * (wx * wx + wy * wy + comps[c, 11])
    if rho <= 0.0:
        return 0.0, 0.0, 0.0, 0.0
    vx = mx / rho
    vy = my / rho
    var = m2 / rho - (vx * vx + vy * vy)
    if var < 0.0:
        var = 0.0
    return rho, vx, vy, var


@njit(cache=True)
def _grid_at(ox, oy, cell, g_rho, g_vx, g_vy, g_var, x, y):
    ny, nx = g_rho.shape
    gx = (x - ox) / cell
    gy = (y - oy) / cell
    if gx < 0.0 or gy < 0.0 or gx > nx - 1.0 or gy > ny - 1.0:
        return 0.0, 0.0, 0.0, 0.0
    i0 = int(gx)
    if i0 > nx - 2:
        i0 = nx - 2
    j0 = int(gy)
    if j0 > ny - 2:
        j0 = ny - 2
    fx = gx - i0
    fy = gy - j0
    w00 = (1.0 - fx) * (1.0 - fy)
    w10 = fx * (1.0 - fy)
    w01 = (1.0 - fx) * fy
    w11 = fx * fy
    rho = (
        g_rho[j0, i0] * w00
        + g_rho[j0, i0 + 1] * w10
        + g_rho[j0 + 1, i0] * w01
        + g_rho[j0 + 1, i0 + 1] * w11
    )
    vx = (
        g_vx[j0, i0] * w00
        + g_vx[j0, i0 + 1] * w10
        + g_vx[j0 + 1, i0] * w01
        + g_vx[j0 + 1, i0 + 1] * w11
    )
    vy = (
        g_vy[j0, i0] * w00
        + g_vy[j0, i0 + 1] * w10
        + g_vy[j0 + 1, i0] * w01
        + g_vy[j0 + 1, i0 + 1] * w11
    )
    var = (
        g_var[j0, i0] * w00
        + g_var[j0, i0 + 1] * w10
        + g_var[j0 + 1, i0] * w01
        + g_var[j0 + 1, i0 + 1] * w11
    )
    if rho < 0.0:
        rho = 0.0
    if var < 0.0:
        var = 0.0
    return rho, vx, vy, var


@njit(cache=True)
def _components_samples(comps, wx0, wy0, wx1, wy1, px, py):
    n = px.shape[0]
    rho = np.empty(n)
    vx = np.empty(n)
    vy = np.empty(n)
    var = np.empty(n)
    for i in range(n):
        rho[i], vx[i], vy[i], var[i] = _components_at(comps, wx0, wy0, wx1, wy1, px[i], py[i])
    return rho, vx, vy, var


@njit(cache=True)
def _grid_samples(ox, oy, cell, g_rho, g_vx, g_vy, g_var, px, py):
    n = px.shape[0]
    rho = np.empty(n)
    vx = np.empty(n)
    vy = np.empty(n)
    var = np.empty(n)
    for i in range(n):
        rho[i], vx[i], vy[i], var[i] = _grid_at(
            ox, oy, cell, g_rho, g_vx, g_vy, g_var, px[i], py[i]
        )
    return rho, vx, vy, var


@njit(cache=True)
def _edge_costs_components(ax, ay, bx, by, comps, wx0, wy0, wx1, wy1, v_min, v_max, step):
    n_edges = ax.shape[0]
    inv_fwd = np.empty(n_edges)
    inv_rev = np.empty(n_edges)
    travel = np.empty(n_edges)
    length = np.empty(n_edges)
    for e in range(n_edges):
        dx = bx[e] - ax[e]
        dy = by[e] - ay[e]
        seg = math.sqrt(dx * dx + dy * dy)
        length[e] = seg
        m = int(math.ceil(seg / step * _CEIL_SLACK))
        if m < 1:
            m = 1
        h = seg / m
        ux = dx / seg
        uy = dy / seg
        sum_a = 0.0
        sum_b = 0.0
        sum_t = 0.0
        for k in range(m):
            t = (k + 0.5) * h
            rho, wx, wy, var = _components_at(
                comps, wx0, wy0, wx1, wy1, ax[e] + ux * t, ay[e] + uy * t
            )
            s2 = wx * wx + wy * wy + var
            v = math.sqrt(s2)
            if v < v_min:
                v = v_min
            elif v > v_max:
                v = v_max
            sum_t += 1.0 / v
            if rho > 0.0:
                sum_a += rho * (s2 / v + v)
                sum_b += rho * (wx * ux + wy * uy)
        f = (sum_a - 2.0 * sum_b) * h
        r = (sum_a + 2.0 * sum_b) * h
        inv_fwd[e] = f if f > 0.0 else 0.0
        inv_rev[e] = r if r > 0.0 else 0.0
        travel[e] = sum_t * h
    return inv_fwd, inv_rev, travel, length


@njit(cache=True)
def _edge_costs_grid(ax, ay, bx, by, ox, oy, cell, g_rho, g_vx, g_vy, g_var, v_min, v_max, step):
    n_edges = ax.shape[0]
    inv_fwd = np.empty(n_edges)
    inv_rev = np.empty(n_edges)
    travel = np.empty(n_edges)
    length = np.empty(n_edges)
    for e in range(n_edges):
        dx = bx[e] - ax[e]
        dy = by[e] - ay[e]
        seg = math.sqrt(dx * dx + dy * dy)
        length[e] = seg
        m = int(math.ceil(seg / step * _CEIL_SLACK))
        if m < 1:
            m = 1
        h = seg / m
        ux = dx / seg
        uy = dy / seg
        sum_a = 0.0
        sum_b = 0.0
        sum_t = 0.0
        for k in range(m):
            t = (k + 0.5) * h
            rho, wx, wy, var = _grid_at(
                ox, oy, cell, g_rho, g_vx, g_vy, g_var, ax[e] + ux * t, ay[e] + uy * t
            )
            s2 = wx * wx + wy * wy + var
            v = math.sqrt(s2)
            if v < v_min:
                v = v_min
            elif v > v_max:
                v = v_max
            sum_t += 1.0 / v
            if rho > 0.0:
                sum_a += rho * (s2 / v + v)
                sum_b += rho * (wx * ux + wy * uy)
        f = (sum_a - 2.0 * sum_b) * h
        r = (sum_a + 2.0 * sum_b) * h
        inv_fwd[e] = f if f > 0.0 else 0.0
        inv_rev[e] = r if r > 0.0 else 0.0
        travel[e] = sum_t * h
    return inv_fwd, inv_rev, travel, length


@njit(cache=True)
def _points_blocked(px, py, circles, rects):
    n = px.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        x = px[i]
        y = py[i]
        hit = False
        for c in range(circles.shape[0]):
            ddx = x - circles[c, 0]
            ddy = y - circles[c, 1]
            if ddx * ddx + ddy * ddy < circles[c, 2] * circles[c, 2]:
                hit = True
                break
        if not hit:
            for r in range(rects.shape[0]):
                if (
                    rects[r, 0] <= x <= rects[r, 2]
                    and rects[r, 1] <= y <= rects[r, 3]
                ):
                    hit = True
                    break
        out[i] = hit
    return out


@njit(cache=True)
def _segment_hits_rect(ax, ay, bx, by, x0, y0, x1, y1):
    # Liang-Barsky slab clipping against the closed rectangle.
    t0 = 0.0
    t1 = 1.0
    dx = bx - ax
    dy = by - ay
    if dx == 0.0:
        if ax < x0 or ax > x1:
            return False
    else:
        ta = (x0 - ax) / dx
        tb = (x1 - ax) / dx
        lo = min(ta, tb)
        hi = max(ta, tb)
        if lo > t0:
            t0 = lo
        if hi < t1:
            t1 = hi
        if t0 > t1:
            return False
    if dy == 0.0:
        if ay < y0 or ay > y1:
            return False
    else:
        ta = (y0 - ay) / dy
        tb = (y1 - ay) / dy
        lo = min(ta, tb)
        hi = max(ta, tb)
        if lo > t0:
            t0 = lo
        if hi < t1:
            t1 = hi
        if t0 > t1:
            return False
    return True


@njit(cache=True)
def _segments_blocked(ax, ay, bx, by, circles, rects):
    n = ax.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        dx = bx[i] - ax[i]
        dy = by[i] - ay[i]
        dd = dx * dx + dy * dy
        hit = False
        for c in range(circles.shape[0]):
            fx = ax[i] - circles[c, 0]
            fy = ay[i] - circles[c, 1]
            if dd > 0.0:
                t = -(fx * dx + fy * dy) / dd
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            else:
                t = 0.0
            qx = fx + t * dx
            qy = fy + t * dy
            if qx * qx + qy * qy < circles[c, 2] * circles[c, 2]:
                hit = True
                break
        if not hit:
            for r in range(rects.shape[0]):
                if _segment_hits_rect(
                    ax[i], ay[i], bx[i], by[i], rects[r, 0], rects[r, 1], rects[r, 2], rects[r, 3]
                ):
                    hit = True
                    break
        out[i] = hit
    return out


def field_samples(field, px, py):
    """Evaluate (density, mean velocity x/y, variance) at each point."""
    px = _f64(px)
    py = _f64(py)
    if field[0] == "components":
        ws = _f64(field[2])
        return _components_samples(_f64(field[1]), ws[0], ws[1], ws[2], ws[3], px, py)
    _, origin, cell, g_rho, g_vx, g_vy, g_var = field
    origin = _f64(origin)
    return _grid_samples(
        origin[0], origin[1], float(cell), _f64(g_rho), _f64(g_vx), _f64(g_vy), _f64(g_var), px, py
    )


def edge_costs(field, ax, ay, bx, by, v_min, v_max, step):
    """Midpoint-quadrature edge weights for a batch of directed segments."""
    ax, ay, bx, by = map(_f64, (ax, ay, bx, by))
    if field[0] == "components":
        ws = _f64(field[2])
        return _edge_costs_components(
            ax, ay, bx, by, _f64(field[1]), ws[0], ws[1], ws[2], ws[3],
            float(v_min), float(v_max), float(step),
        )
    _, origin, cell, g_rho, g_vx, g_vy, g_var = field
    origin = _f64(origin)
    return _edge_costs_grid(
        ax, ay, bx, by, origin[0], origin[1], float(cell),
        _f64(g_rho), _f64(g_vx), _f64(g_vy), _f64(g_var),
        float(v_min), float(v_max), float(step),
    )


def points_blocked(px, py, circles, rects):
    """True where a point lies inside any obstacle (circles strict interior)."""
    return _points_blocked(_f64(px), _f64(py), _obstacle_array(circles, 3), _obstacle_array(rects, 4))


def segments_blocked(ax, ay, bx, by, circles, rects):
    """True where segment a->b intersects any obstacle."""
    return _segments_blocked(
        _f64(ax), _f64(ay), _f64(bx), _f64(by), _obstacle_array(circles, 3), _obstacle_array(rects, 4)
    )


def _obstacle_array(rows, width):
    arr = _f64(rows) if len(rows) else np.zeros((0, width))
    return arr.reshape(-1, width)
