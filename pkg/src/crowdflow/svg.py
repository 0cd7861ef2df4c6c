"""Static SVG rendering of flow fields, shortest-path trees, and plans.

Hand-rolled SVG (no imaging dependency): heatmap cells, quiver arrows, tree
edges colored by invasiveness per meter, solid social / dotted baseline
paths, a circle at the start and a cross at the goal. Output is fully
deterministic for fixed inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .scenarios import Scenario

HEATMAP_CELLS = 80  # heatmap resolution along the longer workspace side
QUIVER_CELLS = 20  # arrow grid resolution along the longer side

_VIRIDIS = (
    (68, 1, 84), (72, 40, 120), (62, 74, 137), (49, 104, 142), (38, 130, 142),
    (31, 158, 137), (53, 183, 121), (109, 205, 89), (180, 222, 44), (253, 231, 37),
)
_GREYS = ((245, 245, 245), (8, 8, 8))


def color_scale(name: str):
    """Map [0, 1] to '#rrggbb' along the named scale."""
    try:
        anchors = {"viridis": _VIRIDIS, "grey": _GREYS, "gray": _GREYS}[name]
    except KeyError:
        raise ConfigurationError(f"unknown colormap {name!r}") from None

    def scale(t: float) -> str:
        t = min(max(float(t), 0.0), 1.0)
        pos = t * (len(anchors) - 1)
        lo = min(int(pos), len(anchors) - 2)
        frac = pos - lo
        r, g, b = (
            round(anchors[lo][k] * (1.0 - frac) + anchors[lo + 1][k] * frac) for k in range(3)
        )
        return f"#{r:02x}{g:02x}{b:02x}"

    return scale


@dataclass(frozen=True)
class RenderSpec:
    """Layer toggles and output geometry for ``render``."""

    density: bool = False
    variance: bool = False
    quiver: bool = False
    tree: bool = False
    social_path: bool = False
    naive_path: bool = False
    start_marker: bool = False
    goal_marker: bool = False
    width_px: int = 720
    colormap: str = "viridis"

    def layer_count(self) -> int:
        return sum(
            (self.density, self.variance, self.quiver, self.tree,
             self.social_path, self.naive_path, self.start_marker, self.goal_marker)
        )


def quiver_arrows(scenario: Scenario, cells: int = QUIVER_CELLS):
    """Mean-velocity arrows on a regular grid; returns (positions, vectors)."""
    x0, y0, x1, y1 = scenario.environment.bounds.as_tuple()
    step = max(x1 - x0, y1 - y0) / cells
    xs = np.arange(x0 + step / 2.0, x1, step)
    ys = np.arange(y0 + step / 2.0, y1, step)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    _, vx, vy, _ = scenario.flow.sample_many(pts)
    return pts, np.column_stack([vx, vy])


class _Canvas:
    """World-to-pixel mapping (y axis flipped) plus an element buffer."""

    def __init__(self, bounds, width_px: int, footer_px: int):
        self.x0, self.y0, self.x1, self.y1 = bounds
        self.pad = 10.0
        self.scale = (width_px - 2 * self.pad) / (self.x1 - self.x0)
        self.width = width_px
        self.height = int(round((self.y1 - self.y0) * self.scale + 2 * self.pad)) + footer_px
        self.footer_px = footer_px
        self.parts: list[str] = []

    def to_px(self, x: float, y: float):
        return (
            self.pad + (x - self.x0) * self.scale,
            self.pad + (self.y1 - y) * self.scale,
        )

    def add(self, element: str):
        self.parts.append(element)

    def line(self, a, b, stroke, width=1.5, dash=None, cls=None):
        ax, ay = self.to_px(*a)
        bx, by = self.to_px(*b)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        cls_attr = f' class="{cls}"' if cls else ""
        self.add(
            f'<line{cls_attr} x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" y2="{by:.2f}" '
            f'stroke="{stroke}" stroke-width="{width:.2f}"{dash_attr} />'
        )

    def document(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="white" />\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _heatmap(canvas: _Canvas, scenario: Scenario, which: str, scale):
    x0, y0, x1, y1 = scenario.environment.bounds.as_tuple()
    step = max(x1 - x0, y1 - y0) / HEATMAP_CELLS
    xs = np.arange(x0, x1, step)
    ys = np.arange(y0, y1, step)
    gx, gy = np.meshgrid(xs + step / 2.0, ys + step / 2.0)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    rho, _, _, var = scenario.flow.sample_many(pts)
    values = rho if which == "density" else var
    lo = float(values.min())
    hi = float(values.max())
    span = hi - lo if hi > lo else 1.0
    w_px = step * canvas.scale + 0.5  # slight overlap hides antialias seams
    k = 0
    for y in ys:
        for x in xs:
            px, py = canvas.to_px(x, y + step)
            canvas.add(
                f'<rect x="{px:.2f}" y="{py:.2f}" width="{w_px:.2f}" height="{w_px:.2f}" '
                f'fill="{scale((values[k] - lo) / span)}" />'
            )
            k += 1
    canvas.add(
        f'<text class="legend-{which}" x="{canvas.pad:.2f}" y="{canvas.height - 6:.2f}" '
        f'font-size="11" fill="#333">{which}: min={lo!r} max={hi!r}</text>'
    )


def _quiver(canvas: _Canvas, scenario: Scenario):
    pts, vecs = quiver_arrows(scenario)
    mags = np.hypot(vecs[:, 0], vecs[:, 1])
    vmax = float(mags.max())
    if vmax <= 0.0:
        return
    x0, y0, x1, y1 = scenario.environment.bounds.as_tuple()
    arrow = 0.8 * max(x1 - x0, y1 - y0) / QUIVER_CELLS
    for (x, y), (vx, vy), mag in zip(pts, vecs, mags):
        if mag < 1e-9 * vmax:
            continue
        ux, uy = vx / mag, vy / mag
        ln = arrow * mag / vmax
        tip = (x + ux * ln, y + uy * ln)
        canvas.line((x, y), tip, "#202020", 1.2, cls="quiver")
        # two short head strokes
        hx, hy = -ux * 0.3 * ln, -uy * 0.3 * ln
        left = (tip[0] + hx - uy * 0.15 * ln, tip[1] + hy + ux * 0.15 * ln)
        right = (tip[0] + hx + uy * 0.15 * ln, tip[1] + hy - ux * 0.15 * ln)
        canvas.line(tip, left, "#202020", 1.2)
        canvas.line(tip, right, "#202020", 1.2)


def _obstacles(canvas: _Canvas, scenario: Scenario):
    from .roadmap import Circle  # local import avoids cycle at module load

    for ob in scenario.environment.obstacles:
        if isinstance(ob, Circle):
            px, py = canvas.to_px(ob.x, ob.y)
            canvas.add(
                f'<circle cx="{px:.2f}" cy="{py:.2f}" r="{ob.radius * canvas.scale:.2f}" '
                f'fill="#555555" />'
            )
        else:
            px, py = canvas.to_px(ob.x0, ob.y1)
            canvas.add(
                f'<rect x="{px:.2f}" y="{py:.2f}" width="{ob.width * canvas.scale:.2f}" '
                f'height="{ob.height * canvas.scale:.2f}" fill="#555555" />'
            )


def _tree(canvas: _Canvas, edges, scale):
    from_xy, to_xy, cost_per_length = edges
    lo = float(np.min(cost_per_length)) if len(cost_per_length) else 0.0
    hi = float(np.max(cost_per_length)) if len(cost_per_length) else 0.0
    span = hi - lo if hi > lo else 1.0
    for (a, b, c) in zip(from_xy, to_xy, cost_per_length):
        canvas.line(a, b, scale((c - lo) / span), 1.1, cls="tree-edge")
    # legend: gradient bar plus exact bounds
    bar_w = 120.0
    bar_x = canvas.width - bar_w - canvas.pad
    bar_y = canvas.height - 18.0
    for k in range(24):
        canvas.add(
            f'<rect x="{bar_x + k * bar_w / 24:.2f}" y="{bar_y:.2f}" '
            f'width="{bar_w / 24 + 0.5:.2f}" height="8" fill="{scale(k / 23)}" />'
        )
    canvas.add(
        f'<text class="legend-tree-min" x="{canvas.pad:.2f}" y="{bar_y + 8:.2f}" '
        f'font-size="11" fill="#333">cost/length min={lo!r}</text>'
    )
    canvas.add(
        f'<text class="legend-tree-max" x="{canvas.pad:.2f}" y="{canvas.height - 2:.2f}" '
        f'font-size="11" fill="#333">cost/length max={hi!r}</text>'
    )


def _path(canvas: _Canvas, waypoints, stroke, dash, cls):
    pts = " ".join(
        "{:.2f},{:.2f}".format(*canvas.to_px(x, y)) for x, y in np.asarray(waypoints)
    )
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    canvas.add(
        f'<polyline class="{cls}" points="{pts}" fill="none" stroke="{stroke}" '
        f'stroke-width="2.4"{dash_attr} />'
    )


def render(scenario: Scenario, spec: RenderSpec, tree_edges=None,
           social=None, naive=None) -> str:
    """Compose the SVG document for the enabled layers.

    ``tree_edges`` is a (from_xy, to_xy, cost_per_length) triple; ``social``
    and ``naive`` are waypoint arrays. At least one layer must be enabled.
    """
    if spec.layer_count() == 0:
        raise ConfigurationError("at least one render layer must be enabled")
    footer = 30 if (spec.tree or spec.density or spec.variance) else 0
    canvas = _Canvas(scenario.environment.bounds.as_tuple(), spec.width_px, footer)
    scale = color_scale(spec.colormap)
    if spec.density:
        _heatmap(canvas, scenario, "density", scale)
    if spec.variance:
        _heatmap(canvas, scenario, "variance", scale)
    _obstacles(canvas, scenario)
    if spec.quiver:
        _quiver(canvas, scenario)
    if spec.tree:
        if tree_edges is None:
            raise ConfigurationError("tree layer enabled but no tree edges supplied")
        _tree(canvas, tree_edges, scale)
    if spec.naive_path:
        if naive is None:
            raise ConfigurationError("naive path layer enabled but no path supplied")
        _path(canvas, naive, "#1f77b4", "7 5", "naive-path")
    if spec.social_path:
        if social is None:
            raise ConfigurationError("social path layer enabled but no path supplied")
        _path(canvas, social, "#d62728", None, "social-path")
    if spec.start_marker:
        px, py = canvas.to_px(*scenario.start)
        canvas.add(
            f'<circle class="start-marker" cx="{px:.2f}" cy="{py:.2f}" r="6" '
            f'fill="none" stroke="#000" stroke-width="2" />'
        )
    if spec.goal_marker:
        x, y = scenario.goal
        r = 6.0 / canvas.scale
        canvas.line((x - r, y - r), (x + r, y + r), "#000", 2.0, cls="goal-marker")
        canvas.line((x - r, y + r), (x + r, y - r), "#000", 2.0, cls="goal-marker")
    return canvas.document()
