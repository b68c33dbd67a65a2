"""Fundamental matrices and particular solutions of the reduced system.

One RK4 sweep of ``x' + K(t) x = 0`` with the identity as initial data at a
base point t0 yields the full reduced fundamental matrix X (rm x rm,
``X(t0) = I``); block (j, k) of X is the j-th derivative of the k-th
fundamental matrix Y_k, the homogeneous solution with Cauchy data
``Y_k^(j)(t0) = delta_{kj} I``.  A second sweep with zero initial data and
the actual right-hand side produces the particular solution.

Sweeps may run on a refined grid (``substeps`` cubic-interpolated
subdivisions per interval) to push the integration error below rank- and
determinant-test thresholds; results are reported on the original grid
either way.  Base points are snapped to the nearest grid node.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._kernel import rk4_sweep
from .companion import OdeSystem, companion_matrix, companion_rhs
from .errors import IntegrationBlowupError, NearSingularWarning
from .gridfn import GridFunction, midpoint_samples, refine_samples

__all__ = ["FundamentalSystem", "ParticularData", "fundamental_system",
           "particular_solution", "reduced_sweep"]


def _snap_base_point(system: OdeSystem, t0) -> int:
    g = system.grid
    if t0 is None:
        return 0
    if t0 < g.a - 1e-9 * (g.b - g.a) or t0 > g.b + 1e-9 * (g.b - g.a):
        raise ValueError(f"base point {t0} outside [{g.a}, {g.b}]")
    return int(min(max(round((t0 - g.a) / g.h), 0), g.n))


def reduced_sweep(system: OdeSystem, x0: np.ndarray, i0: int = 0,
                  substeps: int = 1, homogeneous: bool = False) -> np.ndarray:
    """RK4-integrate the reduced system from node ``i0`` across the whole grid.

    ``x0`` has shape (rm, ncols).  Returns the coarse-grid trajectory
    ``(N + 1, rm, ncols)``.  Blow-up errors are reported with the original
    grid's node index.
    """
    grid = system.grid
    k_coarse = companion_matrix(system).samples
    if homogeneous:
        g_coarse = np.zeros((grid.n + 1, system.reduced_dim, 1), dtype=np.complex128)
    else:
        g_coarse = companion_rhs(system).samples

    k_ref = refine_samples(k_coarse, substeps)
    g_ref = refine_samples(g_coarse, substeps)
    k_mid = midpoint_samples(k_ref)
    g_mid = midpoint_samples(g_ref)
    h_ref = grid.h / substeps
    n_ref = grid.n * substeps
    j0 = i0 * substeps

    dim, ncols = x0.shape
    traj_ref = np.empty((n_ref + 1, dim, ncols), dtype=np.complex128)
    if j0 > 0:
        try:
            bwd = rk4_sweep(
                k_ref[j0::-1], g_ref[j0::-1],
                k_mid[j0 - 1 :: -1], g_mid[j0 - 1 :: -1],
                x0, -h_ref,
            )
        except IntegrationBlowupError as exc:
            raise IntegrationBlowupError(round((j0 - exc.node) / substeps)) from None
        traj_ref[: j0 + 1] = bwd[::-1]
    if j0 < n_ref:
        try:
            fwd = rk4_sweep(
                k_ref[j0:], g_ref[j0:], k_mid[j0:], g_mid[j0:], x0, h_ref
            )
        except IntegrationBlowupError as exc:
            raise IntegrationBlowupError(round((j0 + exc.node) / substeps)) from None
        traj_ref[j0:] = fwd

    return traj_ref[::substeps] if substeps > 1 else traj_ref


@dataclass(frozen=True)
class FundamentalSystem:
    """The reduced fundamental matrix and its order-r block structure."""

    system: OdeSystem
    t0_index: int
    trajectory: GridFunction  # rm x rm, identity at the base node

    @property
    def t0(self) -> float:
        g = self.system.grid
        return g.a + self.t0_index * g.h

    def block(self, j: int, k: int) -> GridFunction:
        """j-th derivative of the k-th fundamental matrix (both in 0..r-1)."""
        m = self.system.size
        return self.trajectory.block(j * m, (j + 1) * m, k * m, (k + 1) * m)

    def fundamental(self, k: int) -> GridFunction:
        return self.block(0, k)

    def determinants(self) -> np.ndarray:
        """det X(t_i) at every node (1 at the base node)."""
        return np.linalg.det(self.trajectory.samples)


@dataclass(frozen=True)
class ParticularData:
    """One solution of the inhomogeneous system with zero Cauchy data."""

    system: OdeSystem
    t0_index: int
    trajectory: GridFunction  # rm x 1

    def derivative_block(self, j: int) -> GridFunction:
        m = self.system.size
        return self.trajectory.block(j * m, (j + 1) * m, 0, 1)

    @property
    def solution(self) -> GridFunction:
        return self.derivative_block(0)


def fundamental_system(system: OdeSystem, t0: float | None = None,
                       substeps: int = 1) -> FundamentalSystem:
    """Integrate the reduced homogeneous system with identity Cauchy data.

    Warns (:class:`NearSingularWarning`) when ``|det X|`` decays so far below
    its base-node value 1 that downstream rank decisions become unreliable.
    """
    i0 = _snap_base_point(system, t0)
    dim = system.reduced_dim
    traj = reduced_sweep(system, np.eye(dim, dtype=np.complex128), i0,
                         substeps, homogeneous=True)
    fund = FundamentalSystem(system, i0, GridFunction(system.grid, traj))
    dets = np.abs(fund.determinants())
    if dets.min() < 1e-12 * max(dets.max(), 1.0):
        warnings.warn(
            f"near-singular-X: min |det X| = {dets.min():.3e} across the grid",
            NearSingularWarning,
            stacklevel=2,
        )
    return fund


def particular_solution(system: OdeSystem, t0: float | None = None,
                        substeps: int = 1) -> ParticularData:
    """Integrate the reduced inhomogeneous system with zero Cauchy data."""
    i0 = _snap_base_point(system, t0)
    x0 = np.zeros((system.reduced_dim, 1), dtype=np.complex128)
    traj = reduced_sweep(system, x0, i0, substeps, homogeneous=False)
    return ParticularData(system, i0, GridFunction(system.grid, traj))
