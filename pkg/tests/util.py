"""Shared test helpers: independent oracles and schema loading."""

import json
from importlib import resources

import numpy as np

from crowdflow._schema import validate_instance
from crowdflow.invasiveness import instantaneous_invasiveness


def load_schema(name: str) -> dict:
    text = resources.files("crowdflow").joinpath(f"schemas/{name}").read_text()
    return json.loads(text)


def validate_json(obj, schema_name: str):
    validate_instance(obj, load_schema(schema_name))


def ternary_min_speed(sample, direction, v_lo, v_hi, iters=64):
    """Independent 1-D minimizer of invasiveness-per-distance over speed.

    Golden-ratio-free ternary search; the objective I(s, v*u)/v is convex in
    v, so this converges to the constrained minimizer.
    """
    lo, hi = float(v_lo), float(v_hi)
    ux, uy = float(direction[0]), float(direction[1])
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        g1 = instantaneous_invasiveness(sample, (m1 * ux, m1 * uy)) / m1
        g2 = instantaneous_invasiveness(sample, (m2 * ux, m2 * uy)) / m2
        if g1 <= g2:
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def flow_alignment(flow, waypoints, step=0.05):
    """Path-length-weighted mean of (mean velocity . heading) along a polyline."""
    pts = np.asarray(waypoints, dtype=float)
    num = 0.0
    den = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        d = b - a
        seg = float(np.hypot(d[0], d[1]))
        if seg == 0.0:
            continue
        m = max(int(np.ceil(seg / step)), 1)
        t = (np.arange(m) + 0.5) * (seg / m)
        px = a[0] + d[0] / seg * t
        py = a[1] + d[1] / seg * t
        _, vx, vy, _ = flow.sample_many(np.column_stack([px, py]))
        num += float(np.sum(vx * d[0] / seg + vy * d[1] / seg)) * (seg / m)
        den += seg
    return num / den


def bellman_ford(n_nodes, edge_from, edge_to, weights, source):
    """Reference single-source shortest paths by repeated full edge relaxation."""
    dist = np.full(n_nodes, np.inf)
    dist[source] = 0.0
    for _ in range(n_nodes):
        changed = False
        for k in range(len(weights)):
            du = dist[edge_from[k]]
            if np.isfinite(du) and du + weights[k] < dist[edge_to[k]]:
                dist[edge_to[k]] = du + weights[k]
                changed = True
        if not changed:
            break
    return dist


def splitmix_reference(seed: int, index: int) -> float:
    """Pure-int reimplementation of the documented sampling stream."""
    mask = (1 << 64) - 1
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    z = z ^ (z >> 31)
    return (z >> 11) * 2.0 ** -53
