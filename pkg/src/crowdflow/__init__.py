"""Minimally invasive robot path planning through crowds modeled as flow fields.

The crowd is a macroscopic field triple (density, mean velocity, velocity
variance). A robot's instantaneous invasiveness is the density times the sum
of its squared relative velocity and the crowd's variance; the library plans
paths minimizing the integral of that quantity with an optimal-speed law, a
PRM* roadmap, and Dijkstra shortest-path trees, plus a dense-lattice oracle
for validation and a CLI for figures and experiment tables.
"""

from .errors import (
    CollisionError,
    ConfigurationError,
    ContractError,
    CrowdFlowError,
    DegenerateEdgeError,
    InfeasibleEnvironmentError,
    NoPathError,
    ResourceLimitError,
    ScenarioFormatError,
)
from .flowfield import (
    AnalyticFlow,
    ComponentFlow,
    CrowdFlow,
    FlowSample,
    GridField,
    bake,
    bump,
    grid_sample,
    lane,
    mixture,
    orbit,
    ramp,
    sample,
    uniform,
    vortex,
)
from .invasiveness import (
    DEFAULT_QUADRATURE_STEP,
    EdgeCost,
    SpeedLimits,
    cost_density,
    edge_cost,
    instantaneous_invasiveness,
    optimal_speed,
    path_invasiveness,
)
from .kernels import active_backend
from .oracle import LatticePlan, lattice_plan
from .roadmap import (
    Circle,
    Environment,
    PlanResult,
    Rect,
    Roadmap,
    ShortestPathTree,
    build,
    collision_free,
    connection_radius,
    dijkstra,
    plan,
    plan_naive,
    plan_on_roadmap,
    plan_naive_on_roadmap,
    plan_pair,
    point_free,
)
from .scenarios import (
    BUILTIN_SCENARIOS,
    PlannerDefaults,
    Scenario,
    concert_hall,
    density_scenario,
    load,
    resolve,
    save,
    variance_scenario,
    velocity_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticFlow", "BUILTIN_SCENARIOS", "Circle", "CollisionError", "ComponentFlow",
    "ConfigurationError", "ContractError", "CrowdFlow", "CrowdFlowError",
    "DEFAULT_QUADRATURE_STEP", "DegenerateEdgeError", "EdgeCost", "Environment",
    "FlowSample", "GridField", "InfeasibleEnvironmentError", "LatticePlan",
    "NoPathError", "PlanResult", "PlannerDefaults", "Rect", "ResourceLimitError",
    "Roadmap", "Scenario", "ScenarioFormatError", "ShortestPathTree", "SpeedLimits",
    "active_backend", "bake", "build", "bump", "collision_free", "concert_hall",
    "connection_radius", "cost_density", "density_scenario", "dijkstra", "edge_cost",
    "grid_sample", "instantaneous_invasiveness", "lane", "lattice_plan", "load",
    "mixture", "optimal_speed", "orbit", "path_invasiveness", "plan", "plan_naive",
    "plan_naive_on_roadmap", "plan_on_roadmap", "plan_pair", "point_free", "ramp",
    "resolve", "sample", "save", "uniform", "variance_scenario", "velocity_scenario",
    "vortex",
]
