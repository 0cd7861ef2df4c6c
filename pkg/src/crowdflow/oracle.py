"""Brute-force lattice planner used to validate roadmap results.

Plans on a dense regular lattice over the workspace with 8- or 16-connected
moves, the same edge-cost quadrature, and Dijkstra. With enough resolution
the lattice cost upper-bounds the true optimum up to the connectivity's
metric distortion (the worst heading sits between two available move
directions), so it is an independent yardstick for PRM* costs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CollisionError, ContractError
from .roadmap import dijkstra_csr
from .scenarios import Scenario

# Half-set of neighbor moves; the full move set is these plus their negations.
_HALF_OFFSETS = {
    8: ((1, 0), (0, 1), (1, 1), (1, -1)),
    16: ((1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (2, -1), (1, -2)),
}

MIN_RESOLUTION = 16


@dataclass(frozen=True)
class LatticePlan:
    """Start -> goal plan on the dense lattice."""

    resolution: int
    connectivity: int
    cost: float
    path: np.ndarray  # (K, 2) lattice node polyline


def lattice_plan(scenario: Scenario, resolution: int, connectivity: int = 16) -> LatticePlan:
    """Dijkstra over a ``resolution``-cells-per-side lattice of the workspace.

    Cells are square (sized by the longer workspace side); nodes inside
    obstacles are removed and every remaining neighbor move whose segment is
    collision-free becomes a directed edge weighted by the invasiveness
    integral at the scenario's quadrature step.
    """
    if resolution < MIN_RESOLUTION:
        raise ContractError(f"resolution must be >= {MIN_RESOLUTION}, got {resolution}")
    if connectivity not in _HALF_OFFSETS:
        raise ContractError(f"connectivity must be 8 or 16, got {connectivity}")

    env = scenario.environment
    x0, y0, x1, y1 = env.bounds.as_tuple()
    w, h = x1 - x0, y1 - y0
    cell = max(w, h) / resolution
    nx = int(round(w / cell)) + 1
    ny = int(round(h / cell)) + 1

    xs = x0 + cell * np.arange(nx)
    ys = y0 + cell * np.arange(ny)
    gx, gy = np.meshgrid(xs, ys)  # (ny, nx)
    px = gx.ravel()
    py = gy.ravel()

    impl = kernels.get_kernels()
    has_obstacles = len(env.obstacles) > 0
    if has_obstacles:
        blocked = impl.points_blocked(px, py, env._circles, env._rects)
    else:
        blocked = np.zeros(px.shape[0], dtype=bool)

    def node_of(p, label):
        i = min(max(int(round((p[0] - x0) / cell)), 0), nx - 1)
        j = min(max(int(round((p[1] - y0) / cell)), 0), ny - 1)
        nid = j * nx + i
        if blocked[nid]:
            raise CollisionError(f"{label} cell at node ({i}, {j}) is blocked")
        return nid

    start_id = node_of(scenario.start, "start")
    goal_id = node_of(scenario.goal, "goal")

    from_parts = []
    to_parts = []
    w_parts = []
    for di, dj in _HALF_OFFSETS[connectivity]:
        # all (j, i) with both endpoints on the lattice (di >= 0 in the half set)
        i_range = np.arange(0, nx - di)
        j_range = np.arange(max(0, -dj), ny - max(0, dj))
        jj, ii = np.meshgrid(j_range, i_range, indexing="ij")
        a_ids = (jj * nx + ii).ravel()
        b_ids = ((jj + dj) * nx + (ii + di)).ravel()
        free = ~(blocked[a_ids] | blocked[b_ids])
        a_ids = a_ids[free]
        b_ids = b_ids[free]
        if a_ids.size == 0:
            continue
        ax, ay = px[a_ids], py[a_ids]
        bx, by = px[b_ids], py[b_ids]
        if has_obstacles:
            seg_free = ~impl.segments_blocked(ax, ay, bx, by, env._circles, env._rects)
            a_ids, b_ids, ax, ay, bx, by = (
                arr[seg_free] for arr in (a_ids, b_ids, ax, ay, bx, by)
            )
            if a_ids.size == 0:
                continue
        inv_f, inv_r, _, _ = impl.edge_costs(
            scenario.flow.kernel_spec(), ax, ay, bx, by,
            env.limits.v_min, env.limits.v_max, scenario.defaults.quadrature_step,
        )
        from_parts.extend((a_ids, b_ids))
        to_parts.extend((b_ids, a_ids))
        w_parts.extend((inv_f, inv_r))

    n_nodes = nx * ny
    if from_parts:
        edge_from = np.concatenate(from_parts)
        edge_to = np.concatenate(to_parts)
        weights = np.concatenate(w_parts)
        order = np.lexsort((edge_to, edge_from))
        edge_from, edge_to, weights = edge_from[order], edge_to[order], weights[order]
    else:
        edge_from = edge_to = np.zeros(0, np.int64)
        weights = np.zeros(0)
    offsets = np.searchsorted(edge_from, np.arange(n_nodes + 1))

    dist, parent = dijkstra_csr(n_nodes, offsets, edge_to, weights, start_id)
    if not math.isfinite(dist[goal_id]):
        raise CollisionError("goal cell unreachable on the lattice")
    node_path = [goal_id]
    while node_path[-1] != start_id:
        node_path.append(int(parent[node_path[-1]]))
    node_path.reverse()
    coords = np.column_stack([px[node_path], py[node_path]])
    return LatticePlan(
        resolution=int(resolution),
        connectivity=int(connectivity),
        cost=float(dist[goal_id]),
        path=coords,
    )
