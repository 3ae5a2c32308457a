"""Certified growth-rate bounds for linear switching systems.

The native core exchanges structured data as JSON text in the same formats
the ``lyapcert`` command-line tool reads and writes.  The helpers here accept
and return plain dicts and lists instead:

* a *system* is ``{"modes": [<row-major d*d list>, ...], "lower": [...],
  "upper": [... numbers or "inf"]}`` with 1-based mode numbering implied by
  position,
* a *schedule* (switching law) is ``[[mode (1-based), duration], ...]``,
* a *config* is ``{"N": int, "delta": float, "K_max": int,
  "hull": "symmetrized"|"positive", "start_space": int|"auto",
  "parallel": bool}`` where absent keys keep their defaults.
"""

import json as _json

from ._core import (  # noqa: F401  (re-exported exceptions)
    InfiniteBoundError,
    SolverFailure,
)
from . import _core

__all__ = [
    "InfiniteBoundError",
    "SolverFailure",
    "audit",
    "compute_interval",
    "enumerate_periodic",
    "find_t_cut",
    "law_lower_bound",
    "run_search",
    "simplify_bounds",
    "simulate",
]

_INF = float("inf")


def _dump(document):
    return _json.dumps(document)


def compute_interval(system, config=None, width=1e-2, prior_lower=-_INF,
                     max_probes=60):
    """Certified two-sided interval for the top growth rate, as a dict."""
    text = _core.compute(_dump(system), _dump(config or {}), width,
                         prior_lower, max_probes)
    return _json.loads(text)


def run_search(system, config=None):
    """One invariant-polytope search; the full report as a dict."""
    return _json.loads(_core.run_search(_dump(system), _dump(config or {})))


def law_lower_bound(system, law):
    """Certified growth-rate lower bound from a periodizable schedule."""
    return _core.law_lower_bound(_dump(system), _dump(law))


def find_t_cut(matrix, tol=1e-6, horizon_mult=3.0, grid=2000, seed=None):
    """Certified trajectory-hull absorption threshold of one stable mode."""
    rows = [list(map(float, row)) for row in matrix]
    if seed is None:
        text = _core.find_t_cut(rows, tol, horizon_mult, grid)
    else:
        text = _core.find_t_cut(rows, tol, horizon_mult, grid, seed)
    return _json.loads(text)


def simplify_bounds(system, mode="reduce", tol=1e-6):
    """Rewrite dwell windows wider than the per-mode thresholds."""
    return _json.loads(_core.simplify(_dump(system), mode, tol))


def enumerate_periodic(system, max_legs=4, grid_points=3, budget=2000000):
    """Best certified lower bound over enumerated periodic schedules."""
    return _json.loads(
        _core.enumerate_periodic(_dump(system), max_legs, grid_points, budget))


def audit(system, report, grid_points=41):
    """Independently audit a search report's polytopes against a system."""
    return _json.loads(_core.audit(_dump(system), _dump(report), grid_points))


def simulate(system, law, x0, step=0.01):
    """Sample a trajectory; returns a list of (time, state) pairs."""
    return _core.simulate(_dump(system), _dump(law), [float(v) for v in x0],
                          step)
