"""Backend dispatch for the hot numeric kernels.

Three inner loops dominate planner runtime: flow-field evaluation, the
midpoint quadrature that turns cost density into edge weights, and exact
segment/obstacle collision tests. Each has two interchangeable
implementations:

* ``crowdflow._kernels_numba`` — ``@njit``-compiled loops (default when
  numba is importable),
* ``crowdflow._kernels_numpy`` — pure vectorized numpy.

Set ``CROWDFLOW_BACKEND=numpy`` or ``=numba`` before first use to force one;
anything else (or unset) auto-selects. Both backends implement the same
function set and agree to tight numerical tolerance (see tests), but are not
required to match bit for bit; each is individually deterministic.

Shared data layout
------------------
Analytic flows are packed into a ``(C, 16)`` float64 array, one row per
component stream:

    col 0      density kind: 0 const, 1 gaussian bump, 2 linear ramp
    cols 1-6   density params
                 const:    value
                 gaussian: floor, amplitude, cx, cy, std
                 ramp:     v0, v1, p0x, p0y, p1x, p1y
    col 7      velocity kind: 0 const, 1 solid-rotation vortex, 2 orbit
    cols 8-10  velocity params
                 const:  vx, vy
                 vortex: omega, cx, cy
                 orbit:  speed, cx, cy
    col 11     per-component velocity variance (constant)
    cols 12-15 support rectangle x0, y0, x1, y1 (+-inf when unbounded)

A field spec is either ``("components", comps, workspace)`` with workspace
``(x0, y0, x1, y1)`` — queries outside it return the zero sample — or
``("grid", origin, cell_size, rho, vx, vy, var)`` with node arrays of shape
``(ny, nx)``; outside the grid extent the sample is zero as well.
"""

from __future__ import annotations

import os

from .errors import ConfigurationError

DENSITY_CONST = 0
DENSITY_GAUSSIAN = 1
DENSITY_RAMP = 2

VEL_CONST = 0
VEL_VORTEX = 1
VEL_ORBIT = 2

COMPONENT_COLS = 16

_BACKENDS = ("numba", "numpy")
_active: str | None = None


def _load(name: str):
    if name == "numpy":
        from . import _kernels_numpy

        return _kernels_numpy
    from . import _kernels_numba

    return _kernels_numba


def active_backend() -> str:
    """Resolve (once) and return the name of the default backend."""
    global _active
    if _active is None:
        choice = os.environ.get("CROWDFLOW_BACKEND", "auto").strip().lower() or "auto"
        if choice == "auto":
            try:
                _load("numba")
                _active = "numba"
            except ImportError:
                _active = "numpy"
        elif choice in _BACKENDS:
            _load(choice)  # fail loudly now, not at first query
            _active = choice
        else:
            raise ConfigurationError(
                f"CROWDFLOW_BACKEND must be one of {_BACKENDS} or 'auto', got {choice!r}"
            )
    return _active


def get_kernels(backend: str | None = None):
    """Return the kernel module for ``backend`` (default: the active one)."""
    if backend is None:
        backend = active_backend()
    if backend not in _BACKENDS:
        raise ConfigurationError(f"unknown backend {backend!r}")
    return _load(backend)
