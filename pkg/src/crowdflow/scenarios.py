"""Built-in planning scenarios and the scenario interchange format.

Four scenarios ship with the library. Three vary one macroscopic crowd
property while holding the others uniform — density (a stationary crowd
around a point of interest), velocity (a crowd orbiting a point), and
variance (opposing vertical streams whose mixing fraction ramps across the
room) — and the fourth is a concert hall being vacated through two inner
doors and one main exit.

All geometry (workspace sizes, bump widths, start/goal placements, wall and
door dimensions) is fixed by the named constants below so results are
reproducible. Scenarios round-trip through a canonical JSON form; see
``schemas/scenario.schema.json``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ._schema import validate_instance
from .errors import ConfigurationError, ScenarioFormatError
from .flowfield import AnalyticFlow, ComponentFlow, CrowdFlow, GridField, bump, lane, orbit, ramp
from .invasiveness import SpeedLimits
from .roadmap import Circle, Environment, Rect, point_free

SCHEMA_VERSION = 1

SCENARIO_DIR_ENV = "CROWDFLOW_SCENARIO_DIR"


@dataclass(frozen=True)
class PlannerDefaults:
    n: int = 2000
    seed: int = 0
    quadrature_step: float = 0.05


@dataclass(frozen=True)
class Scenario:
    """A ready-to-plan problem: environment, crowd flow, start and goal."""

    name: str
    environment: Environment
    flow: CrowdFlow
    start: tuple
    goal: tuple
    defaults: PlannerDefaults = field(default_factory=PlannerDefaults)

    def __post_init__(self):
        object.__setattr__(self, "start", (float(self.start[0]), float(self.start[1])))
        object.__setattr__(self, "goal", (float(self.goal[0]), float(self.goal[1])))
        for label, p in (("start", self.start), ("goal", self.goal)):
            if not point_free(self.environment, p):
                raise ConfigurationError(f"{label} {p} is in collision or out of bounds")


# --- density scenario: stationary crowd gathered around a point of interest ---

DENSITY_BOUNDS = (0.0, 0.0, 20.0, 20.0)
DENSITY_FLOOR = 0.5  # pedestrians / m^2 away from the gathering
DENSITY_PEAK = 1.5  # at the gathering point
DENSITY_BUMP_CENTER = (10.0, 10.0)
DENSITY_BUMP_STD = 3.0  # m
DENSITY_VARIANCE = 1.0  # m^2/s^2 everywhere (milling crowd, no mean drift)
DENSITY_START = (2.0, 10.0)
DENSITY_GOAL = (18.0, 10.0)


def density_scenario() -> Scenario:
    """Gaussian density bump between start and goal; still, fidgety crowd."""
    flow = AnalyticFlow(
        [bump(DENSITY_FLOOR, DENSITY_PEAK, DENSITY_BUMP_CENTER, DENSITY_BUMP_STD,
              velocity=(0.0, 0.0), variance=DENSITY_VARIANCE)],
        DENSITY_BOUNDS,
    )
    env = Environment(bounds=Rect(*DENSITY_BOUNDS), obstacles=(), limits=SpeedLimits())
    return Scenario("density", env, flow, DENSITY_START, DENSITY_GOAL)


# --- velocity scenario: crowd orbiting a point at unit speed ---

VELOCITY_BOUNDS = (0.0, 0.0, 20.0, 20.0)
VELOCITY_DENSITY = 1.0
VELOCITY_CENTER = (10.0, 10.0)
VELOCITY_SPEED = 1.0  # m/s tangential, counterclockwise
VELOCITY_VARIANCE = 0.25
VELOCITY_START = (4.0, 10.0)
VELOCITY_GOAL = (13.5, 13.5)  # not directly downstream: the robot must cross the flow


def velocity_scenario() -> Scenario:
    """Unit-speed circular crowd flow; goal off the streamline through start."""
    flow = AnalyticFlow(
        [orbit(VELOCITY_DENSITY, VELOCITY_SPEED, VELOCITY_CENTER, variance=VELOCITY_VARIANCE)],
        VELOCITY_BOUNDS,
    )
    env = Environment(bounds=Rect(*VELOCITY_BOUNDS), obstacles=(), limits=SpeedLimits())
    return Scenario("velocity", env, flow, VELOCITY_START, VELOCITY_GOAL)


# --- variance scenario: opposing vertical streams, mixing fraction ramps east ---
#
# Up- and down-streams carry equal density f(x) each at speed s, plus a still
# filler stream of density 1 - 2 f(x), so the total density is 1 and the mean
# velocity 0 everywhere while the variance is 2 f(x) s^2. With s = sqrt(1.25)
# and f ramping 0.1 -> 0.5 the variance spans 0.25 -> 1.25 and the filler
# density stays nonnegative (speed 1 would need f > 0.5 to reach 1.25).

VARIANCE_BOUNDS = (0.0, 0.0, 20.0, 20.0)
VARIANCE_STREAM_SPEED = math.sqrt(1.25)  # m/s, up- and down-streams
VARIANCE_FRACTION_LO = 0.1  # stream density fraction west of the ramp
VARIANCE_FRACTION_HI = 0.5  # and east of it (filler exactly vanishes)
VARIANCE_RAMP_X0 = 5.0  # ramp runs between these x's; flat outside
VARIANCE_RAMP_X1 = 15.0
VARIANCE_START = (9.0, 2.0)
VARIANCE_GOAL = (9.0, 18.0)


def variance_scenario() -> Scenario:
    """Three mixed streams: even density, zero mean flow, eastward-growing variance."""
    s = VARIANCE_STREAM_SPEED
    p0 = (VARIANCE_RAMP_X0, 0.0)
    p1 = (VARIANCE_RAMP_X1, 0.0)
    f_lo, f_hi = VARIANCE_FRACTION_LO, VARIANCE_FRACTION_HI
    flow = AnalyticFlow(
        [
            ramp(f_lo, f_hi, p0, p1, velocity=(0.0, s)),
            ramp(f_lo, f_hi, p0, p1, velocity=(0.0, -s)),
            ramp(1.0 - 2.0 * f_lo, 1.0 - 2.0 * f_hi, p0, p1, velocity=(0.0, 0.0)),
        ],
        VARIANCE_BOUNDS,
    )
    env = Environment(bounds=Rect(*VARIANCE_BOUNDS), obstacles=(), limits=SpeedLimits())
    return Scenario("variance", env, flow, VARIANCE_START, VARIANCE_GOAL)


# --- concert hall: audience vacating an inner room through two doors, then one exit ---

HALL_BOUNDS = (0.0, 0.0, 24.0, 16.0)
HALL_WALL = 0.4  # wall thickness
HALL_EXIT_X = (11.0, 13.0)  # main exit gap in the south outer wall
HALL_ROOM = (7.0, 5.0, 17.0, 11.0)  # inner room outline
HALL_DOOR_Y = (7.2, 8.8)  # door gaps in the inner east and west walls


def _hall_obstacles() -> tuple:
    x0, y0, x1, y1 = HALL_BOUNDS
    t = HALL_WALL
    rx0, ry0, rx1, ry1 = HALL_ROOM
    dy0, dy1 = HALL_DOOR_Y
    ex0, ex1 = HALL_EXIT_X
    return (
        # outer walls, south one split by the main exit
        Rect(x0, y0, ex0, y0 + t),
        Rect(ex1, y0, x1, y0 + t),
        Rect(x0, y1 - t, x1, y1),
        Rect(x0, y0 + t, x0 + t, y1 - t),
        Rect(x1 - t, y0 + t, x1, y1 - t),
        # inner room, east and west walls split by the doors
        Rect(rx0, ry0, rx1, ry0 + t),
        Rect(rx0, ry1 - t, rx1, ry1),
        Rect(rx0, ry0 + t, rx0 + t, dy0),
        Rect(rx0, dy1, rx0 + t, ry1 - t),
        Rect(rx1 - t, ry0 + t, rx1, dy0),
        Rect(rx1 - t, dy1, rx1, ry1 - t),
    )


def _hall_flow() -> AnalyticFlow:
    dy0, dy1 = HALL_DOOR_Y
    return AnalyticFlow(
        [
            # inner crowd splitting toward the two doors (heavier to the right)
            lane(0.9, (0.8, 0.0), (12.0, dy0, 19.0, dy1)),
            lane(0.5, (-0.8, 0.0), (5.0, dy0, 12.0, dy1)),
            # corridors turning south toward the exit level
            lane(0.7, (0.0, -0.8), (17.4, 0.8, 23.2, dy1)),
            lane(0.35, (0.0, -0.8), (0.8, 0.8, 6.6, dy1)),
            # exit-level corridors converging on the main exit
            lane(0.6, (-0.8, 0.0), (13.5, 0.8, 23.2, 3.5)),
            lane(0.45, (0.8, 0.0), (0.8, 0.8, 10.5, 3.5)),
            # congestion at the right door and the main exit
            bump(0.0, 0.8, (18.3, 8.0), 1.3, velocity=(0.0, 0.0), variance=0.05),
            bump(0.0, 1.2, (12.0, 2.0), 1.6, velocity=(0.0, -0.6), variance=0.05),
        ],
        HALL_BOUNDS,
    )


HALL_START = (21.0, 2.2)
HALL_GOAL = (3.0, 2.5)
HALL_DEFAULTS = PlannerDefaults(n=3000, seed=0, quadrature_step=0.05)


def concert_hall() -> Scenario:
    """Hall being vacated; denser crowd at the right inner door and main exit."""
    env = Environment(bounds=Rect(*HALL_BOUNDS), obstacles=_hall_obstacles(), limits=SpeedLimits())
    return Scenario("hall", env, _hall_flow(), HALL_START, HALL_GOAL, HALL_DEFAULTS)


BUILTIN_SCENARIOS = {
    "density": density_scenario,
    "velocity": velocity_scenario,
    "variance": variance_scenario,
    "hall": concert_hall,
}


# --- serialization ---

_DENSITY_KIND_NAMES = {0: "const", 1: "gaussian", 2: "ramp"}
_VELOCITY_KIND_NAMES = {0: "const", 1: "vortex", 2: "orbit"}
_DENSITY_KINDS = {v: k for k, v in _DENSITY_KIND_NAMES.items()}
_VELOCITY_KINDS = {v: k for k, v in _VELOCITY_KIND_NAMES.items()}


def _component_to_json(c: ComponentFlow) -> dict:
    dk = _DENSITY_KIND_NAMES[c.density_kind]
    q = c.density_params
    if dk == "const":
        density = {"kind": "const", "value": q[0]}
    elif dk == "gaussian":
        density = {"kind": "gaussian", "floor": q[0], "amplitude": q[1],
                   "center": [q[2], q[3]], "std": q[4]}
    else:
        density = {"kind": "ramp", "v0": q[0], "v1": q[1], "p0": [q[2], q[3]], "p1": [q[4], q[5]]}
    vk = _VELOCITY_KIND_NAMES[c.velocity_kind]
    q = c.velocity_params
    if vk == "const":
        velocity = {"kind": "const", "value": [q[0], q[1]]}
    elif vk == "vortex":
        velocity = {"kind": "vortex", "omega": q[0], "center": [q[1], q[2]]}
    else:
        velocity = {"kind": "orbit", "speed": q[0], "center": [q[1], q[2]]}
    return {
        "density": density,
        "velocity": velocity,
        "variance": c.variance,
        "support": list(c.support) if c.support is not None else None,
    }


def _component_from_json(obj: dict, pointer: str) -> ComponentFlow:
    d = obj["density"]
    if d["kind"] == "const":
        dk, dp = _DENSITY_KINDS["const"], (float(d["value"]),)
    elif d["kind"] == "gaussian":
        dk = _DENSITY_KINDS["gaussian"]
        dp = (float(d["floor"]), float(d["amplitude"]),
              float(d["center"][0]), float(d["center"][1]), float(d["std"]))
    else:
        dk = _DENSITY_KINDS["ramp"]
        dp = (float(d["v0"]), float(d["v1"]),
              float(d["p0"][0]), float(d["p0"][1]), float(d["p1"][0]), float(d["p1"][1]))
        if dp[2:4] == dp[4:6]:
            raise ScenarioFormatError(f"{pointer}/density/p1", "ramp endpoints must differ")
    v = obj["velocity"]
    if v["kind"] == "const":
        vk, vp = _VELOCITY_KINDS["const"], (float(v["value"][0]), float(v["value"][1]))
    elif v["kind"] == "vortex":
        vk = _VELOCITY_KINDS["vortex"]
        vp = (float(v["omega"]), float(v["center"][0]), float(v["center"][1]))
    else:
        vk = _VELOCITY_KINDS["orbit"]
        vp = (float(v["speed"]), float(v["center"][0]), float(v["center"][1]))
    support = obj["support"]
    if support is not None:
        support = tuple(float(x) for x in support)
        if not (support[0] < support[2] and support[1] < support[3]):
            raise ScenarioFormatError(f"{pointer}/support", "degenerate support rectangle")
    return ComponentFlow(dk, dp, vk, vp, float(obj["variance"]), support)


def scenario_to_dict(scenario: Scenario) -> dict:
    env = scenario.environment
    obstacles = []
    for ob in env.obstacles:
        if isinstance(ob, Circle):
            obstacles.append({"kind": "circle", "center": [ob.x, ob.y], "radius": ob.radius})
        else:
            obstacles.append({"kind": "rect", "rect": [ob.x0, ob.y0, ob.x1, ob.y1]})
    flow = scenario.flow
    if isinstance(flow, AnalyticFlow):
        flow_obj = {"components": [_component_to_json(c) for c in flow.components]}
    elif isinstance(flow, GridField):
        flow_obj = {
            "grid": {
                "origin": list(flow.origin),
                "cell_size": flow.cell_size,
                "nx": flow.nx,
                "ny": flow.ny,
                "density": flow.density.ravel().tolist(),
                "velocity_x": flow.velocity_x.ravel().tolist(),
                "velocity_y": flow.velocity_y.ravel().tolist(),
                "variance": flow.variance.ravel().tolist(),
            }
        }
    else:
        raise ConfigurationError(f"cannot serialize flow of type {type(flow).__name__}")
    return {
        "version": SCHEMA_VERSION,
        "name": scenario.name,
        "bounds": list(env.bounds.as_tuple()),
        "obstacles": obstacles,
        "limits": {"v_min": env.limits.v_min, "v_max": env.limits.v_max},
        "flow": flow_obj,
        "start": list(scenario.start),
        "goal": list(scenario.goal),
        "defaults": {
            "n": scenario.defaults.n,
            "seed": scenario.defaults.seed,
            "quadrature_step": scenario.defaults.quadrature_step,
        },
    }


def canonical_json(obj) -> str:
    """Stable byte representation: sorted keys, fixed separators, newline end."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _scenario_schema() -> dict:
    text = resources.files("crowdflow").joinpath("schemas/scenario.schema.json").read_text()
    return json.loads(text)


def scenario_from_dict(obj: dict) -> Scenario:
    validate_instance(obj, _scenario_schema())
    bounds = [float(v) for v in obj["bounds"]]
    if not (bounds[0] < bounds[2] and bounds[1] < bounds[3]):
        raise ScenarioFormatError("/bounds", "bounds rectangle is degenerate")
    obstacles = []
    for idx, ob in enumerate(obj["obstacles"]):
        try:
            if ob["kind"] == "circle":
                obstacles.append(Circle(float(ob["center"][0]), float(ob["center"][1]),
                                        float(ob["radius"])))
            else:
                obstacles.append(Rect(*(float(v) for v in ob["rect"])))
        except ConfigurationError as exc:
            raise ScenarioFormatError(f"/obstacles/{idx}", str(exc)) from exc
    lim = obj["limits"]
    if lim["v_min"] > lim["v_max"]:
        raise ScenarioFormatError("/limits/v_min", "v_min exceeds v_max")
    limits = SpeedLimits(float(lim["v_min"]), float(lim["v_max"]))
    try:
        env = Environment(bounds=Rect(*bounds), obstacles=tuple(obstacles), limits=limits)
    except ConfigurationError as exc:
        raise ScenarioFormatError("", str(exc)) from exc

    if "components" in obj["flow"]:
        components = [
            _component_from_json(c, f"/flow/components/{i}")
            for i, c in enumerate(obj["flow"]["components"])
        ]
        flow: CrowdFlow = AnalyticFlow(components, tuple(bounds))
    else:
        g = obj["flow"]["grid"]
        nx, ny = int(g["nx"]), int(g["ny"])
        for name in ("density", "velocity_x", "velocity_y", "variance"):
            if len(g[name]) != nx * ny:
                raise ScenarioFormatError(
                    f"/flow/grid/{name}", f"expected {nx * ny} row-major values, got {len(g[name])}"
                )
        try:
            flow = GridField(
                (float(g["origin"][0]), float(g["origin"][1])), float(g["cell_size"]),
                np.array(g["density"], dtype=np.float64).reshape(ny, nx),
                np.array(g["velocity_x"], dtype=np.float64).reshape(ny, nx),
                np.array(g["velocity_y"], dtype=np.float64).reshape(ny, nx),
                np.array(g["variance"], dtype=np.float64).reshape(ny, nx),
            )
        except ConfigurationError as exc:
            raise ScenarioFormatError("/flow/grid", str(exc)) from exc

    start = (float(obj["start"][0]), float(obj["start"][1]))
    goal = (float(obj["goal"][0]), float(obj["goal"][1]))
    for label, p in (("start", start), ("goal", goal)):
        if not point_free(env, p):
            raise ScenarioFormatError(f"/{label}", f"{label} {p} is in collision or out of bounds")
    d = obj["defaults"]
    return Scenario(
        str(obj["name"]), env, flow, start, goal,
        PlannerDefaults(int(d["n"]), int(d["seed"]), float(d["quadrature_step"])),
    )


def save(scenario: Scenario, path) -> None:
    """Write the canonical JSON form of ``scenario``."""
    Path(path).write_text(canonical_json(scenario_to_dict(scenario)))


def load(path) -> Scenario:
    """Load and validate a scenario file; errors carry JSON pointers."""
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError("", f"not valid JSON: {exc}") from exc
    return scenario_from_dict(obj)


def resolve(ref: str) -> Scenario:
    """Turn a scenario reference into a Scenario.

    Accepts a built-in name, a file path, or a file name looked up under
    ``$CROWDFLOW_SCENARIO_DIR``.
    """
    if ref in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[ref]()
    p = Path(ref)
    if p.exists():
        return load(p)
    search_dir = os.environ.get(SCENARIO_DIR_ENV, "")
    if search_dir:
        for candidate in (Path(search_dir) / ref, Path(search_dir) / f"{ref}.json"):
            if candidate.exists():
                return load(candidate)
    raise ConfigurationError(
        f"unknown scenario {ref!r}: not a built-in ({', '.join(sorted(BUILTIN_SCENARIOS))}), "
        f"not a file, and not found under ${SCENARIO_DIR_ENV}"
    )
