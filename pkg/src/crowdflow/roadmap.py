"""PRM* roadmaps and minimally invasive shortest-path trees.

The roadmap samples free configurations uniformly (counter-based PRNG, see
``crowdflow._rng``), connects every ordered pair within the shrinking PRM*
radius whose segment is collision-free, and weights each directed edge with
the invasiveness line integral, its length, and its travel time. Dijkstra
from the start node then yields the minimally invasive tree; running it with
length weights on the same roadmap gives the shortest-distance baseline,
scored afterwards under the same speed policy so the two planners differ only
in route geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from heapq import heappop, heappush

import numpy as np

from . import kernels
from ._rng import uniform_stream
from .errors import (
    CollisionError,
    ConfigurationError,
    ContractError,
    InfeasibleEnvironmentError,
    NoPathError,
)
from .flowfield import CrowdFlow
from .invasiveness import DEFAULT_QUADRATURE_STEP, SpeedLimits

# Pair scan is exact either way; the bucket index only pays off for larger n.
BRUTE_FORCE_MAX_N = 2000

# Safety factor over the asymptotic-optimality lower bound for the radius.
GAMMA_MARGIN = 1.1

REJECTION_ATTEMPT_FACTOR = 100


@dataclass(frozen=True)
class Circle:
    """Circular obstacle; interior is blocked (boundary is free)."""

    x: float
    y: float
    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ConfigurationError(f"circle radius must be positive, got {self.radius}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ConfigurationError("circle center must be finite")

    @property
    def area(self) -> float:
        return math.pi * self.radius * self.radius


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle; as an obstacle the closed box is blocked."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x0, self.y0, self.x1, self.y1)):
            raise ConfigurationError("rectangle coordinates must be finite")
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ConfigurationError(
                f"degenerate rectangle ({self.x0}, {self.y0}, {self.x1}, {self.y1})"
            )

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, p) -> bool:
        x, y = float(p[0]), float(p[1])
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def as_tuple(self) -> tuple:
        return (self.x0, self.y0, self.x1, self.y1)


@dataclass(frozen=True)
class Environment:
    """Rectangular workspace with static obstacles and robot speed limits."""

    bounds: Rect
    obstacles: tuple = ()
    limits: SpeedLimits = field(default_factory=SpeedLimits)

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        for ob in self.obstacles:
            if not isinstance(ob, (Circle, Rect)):
                raise ConfigurationError(f"unsupported obstacle type {type(ob).__name__}")
        circles = np.array(
            [[o.x, o.y, o.radius] for o in self.obstacles if isinstance(o, Circle)], dtype=np.float64
        ).reshape(-1, 3)
        rects = np.array(
            [[o.x0, o.y0, o.x1, o.y1] for o in self.obstacles if isinstance(o, Rect)],
            dtype=np.float64,
        ).reshape(-1, 4)
        object.__setattr__(self, "_circles", circles)
        object.__setattr__(self, "_rects", rects)
        if self.free_area <= 0.0:
            raise ConfigurationError("environment has no free area")

    @property
    def free_area(self) -> float:
        # Obstacles are assumed disjoint and inside bounds; overlap would only
        # shrink the connection radius, which stays valid.
        return self.bounds.area - sum(o.area for o in self.obstacles)


def point_free(env: Environment, p) -> bool:
    """True iff ``p`` is inside the bounds and outside every obstacle."""
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)) or not env.bounds.contains((x, y)):
        return False
    impl = kernels.get_kernels()
    return not bool(
        impl.points_blocked(np.array([x]), np.array([y]), env._circles, env._rects)[0]
    )


def collision_free(env: Environment, a, b) -> bool:
    """True iff segment ``a -> b`` stays in bounds and misses every obstacle.

    Exact segment/circle and segment/rectangle tests, no sampling. The bounds
    are convex, so checking both endpoints suffices for containment.
    """
    a = np.asarray(a, dtype=np.float64).reshape(2)
    b = np.asarray(b, dtype=np.float64).reshape(2)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        return False
    if not (env.bounds.contains(a) and env.bounds.contains(b)):
        return False
    impl = kernels.get_kernels()
    return not bool(
        impl.segments_blocked(
            np.array([a[0]]), np.array([a[1]]), np.array([b[0]]), np.array([b[1]]),
            env._circles, env._rects,
        )[0]
    )


def connection_radius(n: int, free_area: float) -> float:
    """PRM* connection radius ``gamma * sqrt(ln n / n)``.

    ``gamma`` is 1.1x the planar asymptotic-optimality lower bound
    ``2 * sqrt(1.5 * free_area / pi)``.
    """
    if n < 2:
        raise ContractError(f"need n >= 2 samples, got {n}")
    if not (free_area > 0.0 and math.isfinite(free_area)):
        raise ContractError(f"free_area must be positive, got {free_area}")
    gamma = GAMMA_MARGIN * 2.0 * math.sqrt(1.5 * free_area / math.pi)
    return gamma * math.sqrt(math.log(n) / n)


@dataclass(frozen=True)
class Roadmap:
    """Immutable PRM* graph with per-direction edge weights.

    Node 0 is the start, node 1 the goal. Directed edges are sorted by
    ``(from, to)``; ``_offsets`` is the CSR row index over ``edge_from``.
    """

    nodes: np.ndarray  # (N, 2)
    edge_from: np.ndarray  # (E,) int64
    edge_to: np.ndarray  # (E,) int64
    edge_invasiveness: np.ndarray  # (E,)
    edge_length: np.ndarray  # (E,)
    edge_time: np.ndarray  # (E,)
    connection_radius: float
    seed: int

    def __post_init__(self):
        offsets = np.searchsorted(self.edge_from, np.arange(self.n_nodes + 1))
        object.__setattr__(self, "_offsets", offsets)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edge_from.shape[0]

    def out_slice(self, u: int) -> slice:
        return slice(int(self._offsets[u]), int(self._offsets[u + 1]))

    def edge_index(self, u: int, v: int) -> int:
        """Index of directed edge ``u -> v``."""
        s = self.out_slice(u)
        pos = s.start + int(np.searchsorted(self.edge_to[s], v))
        if pos >= s.stop or self.edge_to[pos] != v:
            raise ContractError(f"no edge {u} -> {v} in roadmap")
        return pos


@dataclass(frozen=True)
class ShortestPathTree:
    """Single-source shortest paths: cost-to-come and parent per node."""

    source: int
    cost_to_come: np.ndarray  # (N,), inf where unreachable
    parent: np.ndarray  # (N,) int64, -1 for source/unreachable

    @property
    def n_reachable(self) -> int:
        return int(np.sum(np.isfinite(self.cost_to_come)))


@dataclass(frozen=True)
class PlanResult:
    """Waypoint polyline with per-segment speeds and exact totals."""

    waypoints: np.ndarray  # (K, 2)
    speeds: np.ndarray  # (K-1,) mean speed per segment = length / time
    total_invasiveness: float
    total_time: float
    total_length: float

    def to_json_dict(self) -> dict:
        return {
            "waypoints": [[float(x), float(y)] for x, y in self.waypoints],
            "speeds": [float(s) for s in self.speeds],
            "total_invasiveness": float(self.total_invasiveness),
            "total_time": float(self.total_time),
            "total_length": float(self.total_length),
        }


def _as_point(p, name) -> np.ndarray:
    v = np.asarray(p, dtype=np.float64).reshape(2)
    if not np.all(np.isfinite(v)):
        raise ContractError(f"{name} must be finite, got {p!r}")
    return v


def _sample_free_points(env: Environment, count: int, seed: int, attempt_cap: int) -> np.ndarray:
    """First ``count`` obstacle-free draws of the seeded uniform stream.

    Attempt t consumes stream values (2t, 2t+1); acceptance is therefore
    independent of batch sizes.
    """
    if count == 0:
        return np.zeros((0, 2))
    x0, y0, x1, y1 = env.bounds.as_tuple()
    w = x1 - x0
    h = y1 - y0
    impl = kernels.get_kernels()
    chunks = []
    accepted = 0
    consumed = 0
    while accepted < count:
        if consumed >= attempt_cap:
            raise InfeasibleEnvironmentError(
                f"rejection sampling found only {accepted}/{count} free points "
                f"in {consumed} attempts"
            )
        batch = min(max(256, 2 * (count - accepted)), attempt_cap - consumed)
        u = uniform_stream(seed, 2 * consumed, 2 * batch)
        px = x0 + u[0::2] * w
        py = y0 + u[1::2] * h
        free = ~impl.points_blocked(px, py, env._circles, env._rects)
        idx = np.flatnonzero(free)[: count - accepted]
        if idx.size:
            chunks.append(np.column_stack([px[idx], py[idx]]))
            accepted += idx.size
        consumed += batch
    return np.vstack(chunks)


def _neighbor_pairs_brute(pts: np.ndarray, radius: float):
    n = pts.shape[0]
    xs, ys = pts[:, 0], pts[:, 1]
    r2 = radius * radius
    fi, fj = [], []
    block = 512
    for s in range(0, n, block):
        e = min(s + block, n)
        d2 = (xs[s:e, None] - xs[None, :]) ** 2 + (ys[s:e, None] - ys[None, :]) ** 2
        ii, jj = np.nonzero(d2 <= r2)
        ii = ii + s
        keep = ii < jj
        fi.append(ii[keep])
        fj.append(jj[keep])
    if not fi:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(fi), np.concatenate(fj)


def _neighbor_pairs_grid(pts: np.ndarray, radius: float):
    """Uniform-bucket neighbor scan; returns the same pair set as brute force."""
    n = pts.shape[0]
    xs, ys = pts[:, 0], pts[:, 1]
    cx = np.floor((xs - xs.min()) / radius).astype(np.int64)
    cy = np.floor((ys - ys.min()) / radius).astype(np.int64)
    ncy = int(cy.max()) + 1
    ncx = int(cx.max()) + 1
    key = cx * ncy + cy
    order = np.argsort(key, kind="stable").astype(np.int64)
    skey = key[order]
    r2 = radius * radius
    fi, fj = [], []
    for ox in (-1, 0, 1):
        for oy in (-1, 0, 1):
            qx = cx + ox
            qy = cy + oy
            valid = (qx >= 0) & (qx < ncx) & (qy >= 0) & (qy < ncy)
            nkey = qx * ncy + qy
            lo = np.searchsorted(skey, nkey, side="left")
            hi = np.searchsorted(skey, nkey, side="right")
            counts = np.where(valid, hi - lo, 0)
            total = int(counts.sum())
            if total == 0:
                continue
            rows = np.repeat(np.arange(n, dtype=np.int64), counts)
            first = np.concatenate(([0], np.cumsum(counts)[:-1]))
            within = np.arange(total, dtype=np.int64) - np.repeat(first, counts)
            cols = order[np.repeat(lo, counts) + within]
            keep = rows < cols
            rows, cols = rows[keep], cols[keep]
            close = (xs[rows] - xs[cols]) ** 2 + (ys[rows] - ys[cols]) ** 2 <= r2
            fi.append(rows[close])
            fj.append(cols[close])
    if not fi:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    i = np.concatenate(fi)
    j = np.concatenate(fj)
    srt = np.lexsort((j, i))
    return i[srt], j[srt]


def _neighbor_pairs(pts: np.ndarray, radius: float, method: str):
    if method == "auto":
        method = "brute" if pts.shape[0] <= BRUTE_FORCE_MAX_N else "grid"
    if method == "brute":
        return _neighbor_pairs_brute(pts, radius)
    if method == "grid":
        return _neighbor_pairs_grid(pts, radius)
    raise ContractError(f"unknown neighbor method {method!r}")


def build(env: Environment, flow: CrowdFlow, start, goal, n: int, seed: int,
          quadrature_step: float = DEFAULT_QUADRATURE_STEP,
          neighbor_method: str = "auto") -> Roadmap:
    """Build the PRM* roadmap over free space.

    ``n`` counts all nodes including start (node 0) and goal (node 1); the
    remaining ``n - 2`` are drawn uniformly over the bounds with rejection
    against obstacles. Every ordered pair within the connection radius whose
    segment is collision-free becomes a directed edge carrying invasiveness,
    length, and travel-time weights.
    """
    start = _as_point(start, "start")
    goal = _as_point(goal, "goal")
    if n < 2:
        raise ContractError(f"need n >= 2 (start and goal), got {n}")
    if not point_free(env, start):
        raise CollisionError(f"start {tuple(start)} is in collision or out of bounds")
    if not point_free(env, goal):
        raise CollisionError(f"goal {tuple(goal)} is in collision or out of bounds")

    radius = connection_radius(n, env.free_area)
    samples = _sample_free_points(env, n - 2, seed, REJECTION_ATTEMPT_FACTOR * n)
    nodes = np.vstack([start[None, :], goal[None, :], samples])

    i, j = _neighbor_pairs(nodes, radius, neighbor_method)
    ax, ay = nodes[i, 0], nodes[i, 1]
    bx, by = nodes[j, 0], nodes[j, 1]
    dist2 = (bx - ax) ** 2 + (by - ay) ** 2
    keep = dist2 > 0.0  # coincident nodes would form degenerate edges
    if not np.all(keep):
        i, j, ax, ay, bx, by = (arr[keep] for arr in (i, j, ax, ay, bx, by))

    impl = kernels.get_kernels()
    if len(env.obstacles) and len(i):
        blocked = impl.segments_blocked(ax, ay, bx, by, env._circles, env._rects)
        free = ~blocked
        i, j, ax, ay, bx, by = (arr[free] for arr in (i, j, ax, ay, bx, by))

    if len(i):
        inv_f, inv_r, time, length = impl.edge_costs(
            flow.kernel_spec(), ax, ay, bx, by, env.limits.v_min, env.limits.v_max, quadrature_step
        )
        edge_from = np.concatenate([i, j])
        edge_to = np.concatenate([j, i])
        edge_inv = np.concatenate([inv_f, inv_r])
        edge_len = np.concatenate([length, length])
        edge_time = np.concatenate([time, time])
        srt = np.lexsort((edge_to, edge_from))
        edge_from, edge_to = edge_from[srt], edge_to[srt]
        edge_inv, edge_len, edge_time = edge_inv[srt], edge_len[srt], edge_time[srt]
    else:
        edge_from = edge_to = np.zeros(0, np.int64)
        edge_inv = edge_len = edge_time = np.zeros(0)

    return Roadmap(
        nodes=nodes,
        edge_from=edge_from.astype(np.int64),
        edge_to=edge_to.astype(np.int64),
        edge_invasiveness=edge_inv,
        edge_length=edge_len,
        edge_time=edge_time,
        connection_radius=radius,
        seed=int(seed),
    )


def dijkstra_csr(n: int, offsets: np.ndarray, to: np.ndarray, w: np.ndarray, source: int):
    """Dijkstra over a CSR adjacency; returns (cost_to_come, parent).

    Lazy-deletion binary heap; on equal cost-to-come the smaller predecessor
    id wins, so parents are deterministic.
    """
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heappop(heap)
        if done[u]:
            continue
        done[u] = True
        lo, hi = int(offsets[u]), int(offsets[u + 1])
        if lo == hi:
            continue
        vs = to[lo:hi]
        alt = d + w[lo:hi]
        cur = dist[vs]
        better = alt < cur
        tie = (alt == cur) & ~done[vs] & (u < parent[vs])
        for k in np.flatnonzero(better):
            v = int(vs[k])
            a = float(alt[k])
            dist[v] = a
            parent[v] = u
            heappush(heap, (a, v))
        if np.any(tie):
            parent[vs[tie]] = u
    return dist, parent


def dijkstra(roadmap: Roadmap, source: int, weight: str = "invasiveness") -> ShortestPathTree:
    """Exact single-source shortest paths under the chosen edge weight."""
    if weight == "invasiveness":
        w = roadmap.edge_invasiveness
    elif weight == "length":
        w = roadmap.edge_length
    else:
        raise ContractError(f"weight must be 'invasiveness' or 'length', got {weight!r}")
    n = roadmap.n_nodes
    if not 0 <= source < n:
        raise ContractError(f"source {source} out of range for {n} nodes")
    dist, parent = dijkstra_csr(n, roadmap._offsets, roadmap.edge_to, w, source)
    return ShortestPathTree(source=source, cost_to_come=dist, parent=parent)


def _node_path(roadmap: Roadmap, tree: ShortestPathTree, goal: int) -> list:
    if not math.isfinite(tree.cost_to_come[goal]):
        raise NoPathError(
            f"goal node {goal} unreachable from node {tree.source}",
            n_nodes=roadmap.n_nodes,
            n_edges=roadmap.n_edges,
            n_reachable=tree.n_reachable,
            connection_radius=roadmap.connection_radius,
            seed=roadmap.seed,
        )
    path = [goal]
    while path[-1] != tree.source:
        path.append(int(tree.parent[path[-1]]))
        if len(path) > roadmap.n_nodes:
            raise RuntimeError("parent chain does not terminate at the source")
    path.reverse()
    return path


def _forward_sum(values) -> float:
    total = 0.0
    for v in values:
        total += float(v)
    return total


def _result_for_path(roadmap: Roadmap, node_path: list, total_invasiveness: float) -> PlanResult:
    eidx = [roadmap.edge_index(u, v) for u, v in zip(node_path[:-1], node_path[1:])]
    seg_len = roadmap.edge_length[eidx]
    seg_time = roadmap.edge_time[eidx]
    return PlanResult(
        waypoints=roadmap.nodes[node_path].copy(),
        speeds=seg_len / seg_time,
        total_invasiveness=float(total_invasiveness),
        total_time=_forward_sum(seg_time),
        total_length=_forward_sum(seg_len),
    )


def plan_on_roadmap(roadmap: Roadmap) -> PlanResult:
    """Minimally invasive start -> goal plan on an existing roadmap."""
    tree = dijkstra(roadmap, 0, "invasiveness")
    path = _node_path(roadmap, tree, 1)
    return _result_for_path(roadmap, path, tree.cost_to_come[1])


def plan_naive_on_roadmap(roadmap: Roadmap) -> PlanResult:
    """Shortest-distance plan on an existing roadmap, scored by invasiveness.

    Route geometry minimizes length; its invasiveness is then the sum of the
    same directed invasiveness weights the social planner uses.
    """
    tree = dijkstra(roadmap, 0, "length")
    path = _node_path(roadmap, tree, 1)
    eidx = [roadmap.edge_index(u, v) for u, v in zip(path[:-1], path[1:])]
    total_inv = _forward_sum(roadmap.edge_invasiveness[eidx])
    return _result_for_path(roadmap, path, total_inv)


def plan(env: Environment, flow: CrowdFlow, start, goal, n: int, seed: int,
         quadrature_step: float = DEFAULT_QUADRATURE_STEP) -> PlanResult:
    """Build a roadmap and return the minimally invasive plan."""
    return plan_on_roadmap(build(env, flow, start, goal, n, seed, quadrature_step))


def plan_naive(env: Environment, flow: CrowdFlow, start, goal, n: int, seed: int,
               quadrature_step: float = DEFAULT_QUADRATURE_STEP) -> PlanResult:
    """Build a roadmap and return the length-optimal baseline plan."""
    return plan_naive_on_roadmap(build(env, flow, start, goal, n, seed, quadrature_step))


def plan_pair(env: Environment, flow: CrowdFlow, start, goal, n: int, seed: int,
              quadrature_step: float = DEFAULT_QUADRATURE_STEP):
    """(social, naive) plans sharing a single roadmap."""
    rm = build(env, flow, start, goal, n, seed, quadrature_step)
    return plan_on_roadmap(rm), plan_naive_on_roadmap(rm)
