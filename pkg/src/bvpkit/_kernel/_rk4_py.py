"""Pure-numpy fallback for the RK4 stepping kernel.

Same contract as the compiled extension: integrate ``x' = -K(t) x + g(t)``
across the whole grid with classical 4th-order Runge-Kutta, carrying several
initial-value columns at once.  Half-step coefficient samples are supplied by
the caller.  Returns the node-major trajectory plus the index of the first
node with a non-finite state (-1 when the sweep stayed finite).
"""

from __future__ import annotations

import numpy as np


def rk4_sweep(
    k_nodes: np.ndarray,
    g_nodes: np.ndarray,
    k_half: np.ndarray,
    g_half: np.ndarray,
    x0: np.ndarray,
    h: float,
) -> tuple[np.ndarray, int]:
    nsteps = k_half.shape[0]
    dim = k_nodes.shape[1]
    ncols = x0.shape[1]
    traj = np.empty((nsteps + 1, dim, ncols), dtype=np.complex128)
    x = x0.astype(np.complex128, copy=True)
    traj[0] = x
    sixth = h / 6.0
    # overflow is reported through the bad-node index, matching the compiled
    # kernel, which never warns
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(nsteps):
            k1 = g_nodes[i] - k_nodes[i] @ x
            k2 = g_half[i] - k_half[i] @ (x + (0.5 * h) * k1)
            k3 = g_half[i] - k_half[i] @ (x + (0.5 * h) * k2)
            k4 = g_nodes[i + 1] - k_nodes[i + 1] @ (x + h * k3)
            x = x + sixth * (k1 + 2.0 * (k2 + k3) + k4)
            traj[i + 1] = x
            if not np.all(np.isfinite(x)):
                return traj[: i + 2], i + 1
    return traj, -1
