"""Exception types raised by the crowdflow library."""


class CrowdFlowError(Exception):
    """Base class for all library errors."""


class ContractError(CrowdFlowError, ValueError):
    """An argument violates a documented precondition."""


class ConfigurationError(CrowdFlowError, ValueError):
    """An object was configured inconsistently (bad limits, empty mixture, ...)."""


class ResourceLimitError(CrowdFlowError):
    """An operation would exceed a configured resource cap (e.g. grid node count)."""


class DegenerateEdgeError(ContractError):
    """An edge was requested between two identical points."""


class CollisionError(CrowdFlowError, ValueError):
    """A required configuration (start/goal) lies inside an obstacle or out of bounds."""


class InfeasibleEnvironmentError(CrowdFlowError):
    """Rejection sampling could not find enough free configurations."""


class NoPathError(CrowdFlowError):
    """The goal is unreachable in the roadmap.

    Carries roadmap diagnostics so callers (and the CLI) can report why.
    """

    def __init__(self, message, *, n_nodes=0, n_edges=0, n_reachable=0, connection_radius=0.0, seed=0):
        super().__init__(message)
        self.n_nodes = n_nodes
        self.n_edges = n_edges
        self.n_reachable = n_reachable
        self.connection_radius = connection_radius
        self.seed = seed

    def diagnostics(self) -> dict:
        return {
            "error": "no-path",
            "message": str(self),
            "n_nodes": self.n_nodes,
            "n_edges": self.n_edges,
            "n_reachable": self.n_reachable,
            "connection_radius": self.connection_radius,
            "seed": self.seed,
        }


class ScenarioFormatError(CrowdFlowError, ValueError):
    """A scenario file failed schema or semantic validation.

    ``pointer`` is a JSON pointer to the offending element.
    """

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
