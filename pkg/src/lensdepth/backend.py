"""Kernel backend selection.

The hot numeric loops (shortest paths, min-plus query attachment,
membership counting) exist twice: a numba-jitted version and a pure
numpy fallback. Selection happens once at import time from the
LENSDEPTH_BACKEND environment variable:

    auto   (default) use numba if it imports, else numpy
    numba  require numba, fail loudly if unavailable
    numpy  force the pure-numpy path

All public wrappers normalize dtypes and enforce the exact-symmetry /
zero-diagonal postconditions shared by both implementations.
"""

import os

import numpy as np

from . import _kernels_numpy

_VALID = ("auto", "numba", "numpy")
_requested = os.environ.get("LENSDEPTH_BACKEND", "auto").strip().lower()
if _requested not in _VALID:
    raise ImportError(
        f"LENSDEPTH_BACKEND={_requested!r} not understood; expected one of {_VALID}"
    )

if _requested == "numpy":
    _impl = _kernels_numpy
    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl
        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        _impl = _kernels_numpy
        BACKEND = "numpy"


def backend_name():
    """Name of the active kernel backend ("numba" or "numpy")."""
    return BACKEND


def _as_f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def apsp_table(weights):
    """All-pairs shortest path sums over dense edge weights.

    ``inf`` entries mark absent edges. Output is exactly symmetric with
    a zero diagonal, and is refined to a min-plus fixpoint so the table
    satisfies the triangle inequality exactly in floating point.
    """
    w = _as_f64(weights)
    out = _impl.apsp_dense(w)
    out = np.minimum(out, out.T)
    np.fill_diagonal(out, 0.0)
    return _impl.apsp_refine(out)


def shortest_from(weights, source):
    """Single-source shortest path sums over dense edge weights."""
    return _impl.single_source(_as_f64(weights), int(source))


def minplus(wq, apsp):
    """Min-plus attach: out[t, i] = min_j wq[t, j] + apsp[j, i]."""
    return _impl.minplus_lengths(_as_f64(wq), _as_f64(apsp))


def lens_counts(qvals, pairmat, closed):
    """Membership and exact-tie counts per query row; see kernels."""
    return _impl.lens_count_batch(_as_f64(qvals), _as_f64(pairmat), bool(closed))


def warmup():
    """Trigger jit compilation on tiny inputs (no-op for numpy)."""
    w = np.array([[0.0, 1.0], [1.0, 0.0]])
    apsp_table(w)
    shortest_from(w, 0)
    minplus(np.ones((1, 2)), w)
    lens_counts(np.ones((1, 2)), w, True)
    lens_counts(np.ones((1, 2)), w, False)
