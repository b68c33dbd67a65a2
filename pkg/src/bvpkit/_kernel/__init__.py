"""RK4 stepping backend selection.

The compiled extension is preferred when it imported cleanly; setting the
environment variable ``BVP_PURE_PYTHON`` to anything truthy forces the numpy
fallback.  ``BACKEND`` records which implementation is live.
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import IntegrationBlowupError, ShapeMismatchError


def _want_pure_python() -> bool:
    return os.environ.get("BVP_PURE_PYTHON", "").strip().lower() not in ("", "0", "false", "no")


if _want_pure_python():
    from ._rk4_py import rk4_sweep as _sweep

    BACKEND = "python"
else:
    try:
        from ._rk4 import rk4_sweep as _sweep

        BACKEND = "compiled"
    except ImportError:
        from ._rk4_py import rk4_sweep as _sweep

        BACKEND = "python"


def rk4_sweep(
    k_nodes: np.ndarray,
    g_nodes: np.ndarray,
    k_half: np.ndarray,
    g_half: np.ndarray,
    x0: np.ndarray,
    h: float,
) -> np.ndarray:
    """Integrate ``x' = -K(t) x + g(t)`` over the grid with classical RK4.

    ``k_nodes``/``g_nodes`` hold node samples (``nsteps + 1`` of them),
    ``k_half``/``g_half`` the midpoint samples (``nsteps``); ``x0`` carries one
    initial column per right-hand side to integrate simultaneously.  ``g``
    may have a single column shared across all states.  Returns the
    node-major trajectory ``(nsteps + 1, dim, ncols)``; raises
    :class:`IntegrationBlowupError` at the first non-finite state.
    """
    k_nodes = np.ascontiguousarray(k_nodes, dtype=np.complex128)
    g_nodes = np.ascontiguousarray(g_nodes, dtype=np.complex128)
    k_half = np.ascontiguousarray(k_half, dtype=np.complex128)
    g_half = np.ascontiguousarray(g_half, dtype=np.complex128)
    x0 = np.ascontiguousarray(x0, dtype=np.complex128)

    nsteps = k_half.shape[0]
    dim = k_nodes.shape[1]
    if k_nodes.shape != (nsteps + 1, dim, dim) or k_half.shape != (nsteps, dim, dim):
        raise ShapeMismatchError(
            f"coefficient sample shapes {k_nodes.shape} / {k_half.shape} are inconsistent"
        )
    if x0.ndim != 2 or x0.shape[0] != dim:
        raise ShapeMismatchError(f"initial state must be ({dim}, ncols), got {x0.shape}")
    ncols = x0.shape[1]
    if g_nodes.shape[0] != nsteps + 1 or g_half.shape[0] != nsteps:
        raise ShapeMismatchError("right-hand-side sample counts do not match the grid")
    if g_nodes.shape[1] != dim or g_nodes.shape[2] not in (1, ncols):
        raise ShapeMismatchError(
            f"right-hand side must be ({dim}, 1) or ({dim}, {ncols}) per node, got {g_nodes.shape[1:]}"
        )
    if g_half.shape[1:] != g_nodes.shape[1:]:
        raise ShapeMismatchError("node and midpoint right-hand sides disagree in shape")

    traj, bad = _sweep(k_nodes, g_nodes, k_half, g_half, x0, float(h))
    if bad >= 0:
        raise IntegrationBlowupError(bad)
    return traj
