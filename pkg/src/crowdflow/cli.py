"""Command-line front end: plan, tree, compare, oracle, render.

Every command is deterministic given its flags (seeds are explicit and no
wall-clock data enters any output). Exit codes: 0 success, 1 usage or input
error, 2 no path between start and goal.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from statistics import median

import numpy as np

from . import oracle as oracle_mod
from . import roadmap as rm
from . import scenarios as sc
from . import svg as svg_mod
from .errors import ConfigurationError, CrowdFlowError, NoPathError
from .invasiveness import SpeedLimits

RENDER_FIELD_LAYERS = ("density", "variance", "quiver")


def _add_scenario_flags(p: argparse.ArgumentParser, multi: bool = False):
    if multi:
        p.add_argument("--scenario", action="append", required=True,
                       help="built-in name or scenario file path (repeatable)")
    else:
        p.add_argument("--scenario", required=True,
                       help="built-in name or scenario file path")
    p.add_argument("--quadrature-step", type=float, default=None,
                   help="edge-integral step in meters (default: scenario setting)")
    p.add_argument("--vmin", type=float, default=None, help="override minimum speed (m/s)")
    p.add_argument("--vmax", type=float, default=None, help="override maximum speed (m/s)")


def _add_sampling_flags(p: argparse.ArgumentParser):
    p.add_argument("--samples", type=int, default=None,
                   help="roadmap node count incl. start/goal (default: scenario setting)")
    p.add_argument("--seed", type=int, default=None,
                   help="sampling seed (default: scenario setting)")


def _prepare(scenario: sc.Scenario, args) -> sc.Scenario:
    limits = scenario.environment.limits
    if args.vmin is not None or args.vmax is not None:
        limits = SpeedLimits(
            args.vmin if args.vmin is not None else limits.v_min,
            args.vmax if args.vmax is not None else limits.v_max,
        )
        scenario = replace(scenario, environment=replace(scenario.environment, limits=limits))
    if args.quadrature_step is not None:
        if args.quadrature_step <= 0:
            raise ConfigurationError("--quadrature-step must be > 0")
        scenario = replace(
            scenario, defaults=replace(scenario.defaults, quadrature_step=args.quadrature_step)
        )
    return scenario


def _run_params(scenario: sc.Scenario, args):
    n = args.samples if args.samples is not None else scenario.defaults.n
    seed = args.seed if args.seed is not None else scenario.defaults.seed
    if n < 2:
        raise ConfigurationError(f"--samples must be >= 2, got {n}")
    if seed < 0:
        raise ConfigurationError(f"--seed must be >= 0, got {seed}")
    return n, seed


def _write(path, text: str):
    Path(path).write_text(text)


def _fmt(v) -> str:
    # repr of a Python float round-trips exactly and is platform-stable
    return repr(float(v))


def _emit_json(args, payload: dict):
    text = sc.canonical_json(payload)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)


def _tree_edge_arrays(roadmap: rm.Roadmap, tree: rm.ShortestPathTree):
    rows = []
    for child in range(roadmap.n_nodes):
        p = int(tree.parent[child])
        if child == tree.source or p < 0:
            continue
        eidx = roadmap.edge_index(p, child)
        inv = float(roadmap.edge_invasiveness[eidx])
        ln = float(roadmap.edge_length[eidx])
        rows.append((p, child, inv, ln, inv / ln))
    from_xy = np.array([roadmap.nodes[r[0]] for r in rows]).reshape(-1, 2)
    to_xy = np.array([roadmap.nodes[r[1]] for r in rows]).reshape(-1, 2)
    inv = np.array([r[2] for r in rows])
    ln = np.array([r[3] for r in rows])
    cpl = np.array([r[4] for r in rows])
    return from_xy, to_xy, inv, ln, cpl


def cmd_plan(args) -> int:
    scenario = _prepare(sc.resolve(args.scenario), args)
    n, seed = _run_params(scenario, args)
    step = scenario.defaults.quadrature_step
    roadmap = rm.build(scenario.environment, scenario.flow, scenario.start, scenario.goal,
                       n, seed, step)
    result = rm.plan_on_roadmap(roadmap)
    payload = {
        "version": sc.SCHEMA_VERSION,
        "scenario": scenario.name,
        "n": n,
        "seed": seed,
        "quadrature_step": step,
        **result.to_json_dict(),
    }
    _emit_json(args, payload)
    if args.svg:
        naive = rm.plan_naive_on_roadmap(roadmap)
        spec = svg_mod.RenderSpec(density=True, quiver=True, social_path=True,
                                  naive_path=True, start_marker=True, goal_marker=True)
        _write(args.svg, svg_mod.render(scenario, spec, social=result.waypoints,
                                        naive=naive.waypoints))
    return 0


def cmd_tree(args) -> int:
    scenario = _prepare(sc.resolve(args.scenario), args)
    n, seed = _run_params(scenario, args)
    step = scenario.defaults.quadrature_step
    roadmap = rm.build(scenario.environment, scenario.flow, scenario.start, scenario.goal,
                       n, seed, step)
    tree = rm.dijkstra(roadmap, args.source, "invasiveness")
    from_xy, to_xy, inv, ln, cpl = _tree_edge_arrays(roadmap, tree)
    lines = ["from_x,from_y,to_x,to_y,invasiveness,length,cost_per_length"]
    for k in range(len(inv)):
        lines.append(",".join(_fmt(v) for v in (
            from_xy[k, 0], from_xy[k, 1], to_xy[k, 0], to_xy[k, 1], inv[k], ln[k], cpl[k]
        )))
    _write(args.out, "\n".join(lines) + "\n")
    if args.svg:
        spec = svg_mod.RenderSpec(tree=True, start_marker=True)
        _write(args.svg, svg_mod.render(scenario, spec, tree_edges=(from_xy, to_xy, cpl)))
    return 0


def cmd_compare(args) -> int:
    seeds = [int(s) for s in args.seeds.split(",") if s.strip() != ""]
    if not seeds:
        raise ConfigurationError("--seeds must list at least one seed")
    if any(s < 0 for s in seeds):
        raise ConfigurationError("seeds must be >= 0")
    lines = ["scenario,seed,social,naive,ratio"]
    summaries = []
    for ref in args.scenario:
        scenario = _prepare(sc.resolve(ref), args)
        n = args.samples if args.samples is not None else scenario.defaults.n
        step = scenario.defaults.quadrature_step
        socials, naives, ratios = [], [], []
        for seed in seeds:
            social, naive = rm.plan_pair(
                scenario.environment, scenario.flow, scenario.start, scenario.goal, n, seed, step
            )
            s = social.total_invasiveness
            v = naive.total_invasiveness
            ratio = s / v if v > 0 else 1.0
            socials.append(s)
            naives.append(v)
            ratios.append(ratio)
            lines.append(f"{scenario.name},{seed},{_fmt(s)},{_fmt(v)},{_fmt(ratio)}")
        summaries.append(
            f"{scenario.name}: median social={median(socials):.4g} "
            f"naive={median(naives):.4g} ratio={median(ratios):.4g} "
            f"({len(seeds)} seeds, n={n})"
        )
    _write(args.out, "\n".join(lines) + "\n")
    print("\n".join(summaries))
    return 0


def cmd_oracle(args) -> int:
    scenario = _prepare(sc.resolve(args.scenario), args)
    result = oracle_mod.lattice_plan(scenario, args.grid, args.connectivity)
    payload = {
        "version": sc.SCHEMA_VERSION,
        "scenario": scenario.name,
        "resolution": result.resolution,
        "connectivity": result.connectivity,
        "cost": result.cost,
        "path": [[float(x), float(y)] for x, y in result.path],
    }
    _emit_json(args, payload)
    return 0


def cmd_render(args) -> int:
    scenario = _prepare(sc.resolve(args.scenario), args)
    requested = [s for s in args.layers.split(",") if s.strip() != ""]
    for name in requested:
        if name not in RENDER_FIELD_LAYERS:
            raise ConfigurationError(
                f"unknown layer {name!r}; field layers are {', '.join(RENDER_FIELD_LAYERS)}"
            )
    spec = svg_mod.RenderSpec(
        density="density" in requested,
        variance="variance" in requested,
        quiver="quiver" in requested,
        width_px=args.size,
        colormap=args.colormap,
    )
    _write(args.out, svg_mod.render(scenario, spec))
    if args.arrows_csv:
        pts, vecs = svg_mod.quiver_arrows(scenario)
        lines = ["x,y,vx,vy"]
        for (x, y), (vx, vy) in zip(pts, vecs):
            lines.append(",".join(_fmt(v) for v in (x, y, vx, vy)))
        _write(args.arrows_csv, "\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crowdflow",
        description="Minimally invasive path planning through crowd flow fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan start->goal and write the result JSON")
    _add_scenario_flags(p)
    _add_sampling_flags(p)
    p.add_argument("--out", default=None, help="output JSON path (default: stdout)")
    p.add_argument("--svg", default=None, help="optional figure with both planners' paths")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("tree", help="export the minimally invasive tree as CSV/SVG")
    _add_scenario_flags(p)
    _add_sampling_flags(p)
    p.add_argument("--source", type=int, default=0, help="tree source node id (0 = start)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--svg", default=None, help="optional figure with colored tree edges")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("compare", help="social vs naive invasiveness over seeds")
    _add_scenario_flags(p, multi=True)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seeds", default="0,1,2,3,4,5,6,7,8,9",
                   help="comma-separated seed list")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle", help="dense-lattice reference plan")
    _add_scenario_flags(p)
    p.add_argument("--grid", type=int, default=200, help="lattice cells per side")
    p.add_argument("--connectivity", type=int, choices=(8, 16), default=16)
    p.add_argument("--out", default=None, help="output JSON path (default: stdout)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("render", help="field-only SVG figure")
    _add_scenario_flags(p)
    p.add_argument("--layers", default="density,quiver",
                   help=f"comma list from: {', '.join(RENDER_FIELD_LAYERS)}")
    p.add_argument("--size", type=int, default=720, help="image width in px")
    p.add_argument("--colormap", default="viridis")
    p.add_argument("--out", required=True, help="output SVG path")
    p.add_argument("--arrows-csv", default=None, help="also write quiver vectors as CSV")
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses code 2 for usage errors; we reserve 2 for no-path
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except NoPathError as exc:
        out = getattr(args, "out", None)
        if out:
            _write(out, sc.canonical_json({"version": sc.SCHEMA_VERSION, **exc.diagnostics()}))
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CrowdFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_main():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
