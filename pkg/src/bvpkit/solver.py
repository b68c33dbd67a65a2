"""Boundary-value problem assembly: characteristic matrix and solve.

The general solution of the system is ``y = sum_l Y_l xi_l + y_p`` with the
fundamental matrices Y_l and one particular solution y_p from the Cauchy
sweeps.  Imposing the boundary operator yields the linear algebraic system

    M xi = c - B y_p,        M[:, l*m:(l+1)*m] = B Y_l  (columnwise),

whose rm x rm characteristic matrix M decides everything: the problem is
uniquely solvable iff M is invertible, and kernel and cokernel of the problem
both have dimension ``rm - rank M`` (the index is zero).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryOperator, apply_boundary
from .cauchy import (
    FundamentalSystem,
    ParticularData,
    fundamental_system,
    particular_solution,
)
from .companion import OdeSystem, apply_operator, extend_stack_with_ode
from .errors import IllConditionedWarning, ShapeMismatchError, UnsolvableProblemError
from .gridfn import GridFunction

__all__ = [
    "BvpProblem",
    "SolvabilityReport",
    "BvpSolution",
    "characteristic_matrix",
    "analyze_characteristic",
    "solvability_report",
    "solve",
    "stack_from_trajectory",
]

RANK_TOL_FACTOR = 1e-10
RESIDUAL_TOL_FACTOR = 1e-8
COND_WARN = 1e8
DEFAULT_SUBSTEPS = 2


@dataclass(frozen=True)
class BvpProblem:
    """An order-r system, a boundary operator, and target boundary values."""

    system: OdeSystem
    boundary: BoundaryOperator
    values: np.ndarray

    def __post_init__(self):
        sys, op = self.system, self.boundary
        if op.grid != sys.grid:
            raise ShapeMismatchError("boundary operator lives on a different grid")
        if op.size != sys.size or op.order != sys.order:
            raise ShapeMismatchError(
                f"boundary operator is for (m={op.size}, r={op.order}), "
                f"system has (m={sys.size}, r={sys.order})"
            )
        vals = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if vals.size != op.condition_count:
            raise ShapeMismatchError(
                f"expected {op.condition_count} boundary values, got {vals.size}"
            )
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class SolvabilityReport:
    """Rank/kernel structure of the characteristic matrix."""

    matrix: np.ndarray
    singular_values: np.ndarray
    det: complex
    rank: int
    kernel_dim: int
    cokernel_dim: int
    rank_tolerance: float

    @property
    def unique(self) -> bool:
        return self.kernel_dim == 0

    @property
    def condition(self) -> float:
        s = self.singular_values
        return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def stack_from_trajectory(system: OdeSystem, trajectory: GridFunction,
                          up_to: int, homogeneous: bool = False) -> list:
    """Derivative stack of a reduced-system trajectory, ODE-extended to ``up_to``.

    The trajectory stores ``col(y, y', ..., y^(r-1))`` (possibly several
    columns at once); orders r..up_to follow from the equation itself.
    """
    m = system.size
    base = [trajectory.block(j * m, (j + 1) * m, 0, trajectory.cols)
            for j in range(system.order)]
    return extend_stack_with_ode(system, base, up_to, homogeneous=homogeneous)


def characteristic_matrix(op: BoundaryOperator, fund: FundamentalSystem) -> np.ndarray:
    """Apply the boundary operator columnwise to every fundamental matrix."""
    sys = fund.system
    rm = op.condition_count
    top = max((t.d for t in op.terms), default=0)
    out = np.empty((rm, rm), dtype=np.complex128)
    m = sys.size
    for l in range(sys.order):
        traj_l = fund.trajectory.block(0, sys.reduced_dim, l * m, (l + 1) * m)
        stack_l = stack_from_trajectory(sys, traj_l, max(top, sys.order - 1),
                                        homogeneous=True)
        out[:, l * m : (l + 1) * m] = apply_boundary(op, stack_l)
    return out


def analyze_characteristic(matrix: np.ndarray) -> SolvabilityReport:
    """Rank decision by singular values; kernel and cokernel share dimension."""
    s = np.linalg.svd(matrix, compute_uv=False)
    tol = RANK_TOL_FACTOR * (s[0] if s.size else 0.0)
    rank = int(np.count_nonzero(s > tol))
    dim = matrix.shape[0]
    return SolvabilityReport(
        matrix=matrix,
        singular_values=s,
        det=complex(np.linalg.det(matrix)),
        rank=rank,
        kernel_dim=dim - rank,
        cokernel_dim=dim - rank,
        rank_tolerance=tol,
    )


def solvability_report(problem: BvpProblem,
                       substeps: int = DEFAULT_SUBSTEPS) -> tuple[SolvabilityReport, FundamentalSystem]:
    """Characteristic-matrix analysis without solving."""
    fund = fundamental_system(problem.system, substeps=substeps)
    report = analyze_characteristic(characteristic_matrix(problem.boundary, fund))
    return report, fund


@dataclass(frozen=True)
class BvpSolution:
    """A solved problem: solution stack, coefficients, and diagnostics."""

    problem: BvpProblem
    report: SolvabilityReport
    coefficients: np.ndarray  # xi, length rm
    stack: tuple  # GridFunctions y, y', ..., y^(n+r)
    boundary_residual: float
    unique: bool

    @property
    def solution(self) -> GridFunction:
        return self.stack[0]

    def ode_residual(self) -> GridFunction:
        """``L y - f`` on the grid (zero up to integration error)."""
        return apply_operator(self.problem.system, self.stack) - self.problem.system.rhs

    def boundary_values(self) -> np.ndarray:
        """``B y`` recomputed from the solution stack."""
        return apply_boundary(self.problem.boundary, self.stack)[:, 0]


def solve(problem: BvpProblem, substeps: int = DEFAULT_SUBSTEPS,
          least_squares: bool = False) -> BvpSolution:
    """Solve the boundary-value problem on its grid.

    With an invertible characteristic matrix this returns the unique solution.
    A rank-deficient matrix with compatible data yields the minimum-norm
    choice of coefficients; incompatible data raises
    :class:`UnsolvableProblemError` unless ``least_squares`` is set, in which
    case the least-squares/minimum-norm representative is returned (useful
    when a degenerate limit problem still needs *some* comparison function).
    """
    sys, op = problem.system, problem.boundary
    top = op.top_order

    fund = fundamental_system(sys, substeps=substeps)
    part = particular_solution(sys, substeps=substeps)

    matrix = characteristic_matrix(op, fund)
    report = analyze_characteristic(matrix)

    part_stack = stack_from_trajectory(sys, part.trajectory, top)
    c_tilde = problem.values[:, None] - apply_boundary(op, part_stack)

    if report.unique:
        if report.condition > COND_WARN:
            warnings.warn(
                f"characteristic matrix condition number {report.condition:.3e}",
                IllConditionedWarning,
                stacklevel=2,
            )
        xi = np.linalg.solve(matrix, c_tilde)
        residual = float(np.linalg.norm(matrix @ xi - c_tilde))
    else:
        xi = np.linalg.pinv(matrix, rcond=RANK_TOL_FACTOR) @ c_tilde
        residual = float(np.linalg.norm(matrix @ xi - c_tilde))
        tol = RESIDUAL_TOL_FACTOR * (1.0 + float(np.linalg.norm(c_tilde)))
        if residual > tol and not least_squares:
            raise UnsolvableProblemError(report.kernel_dim, residual)

    traj = GridFunction(
        sys.grid, fund.trajectory.samples @ xi + part.trajectory.samples
    )
    stack = tuple(stack_from_trajectory(sys, traj, top))
    bres = float(np.linalg.norm(apply_boundary(op, stack)[:, 0] - problem.values))
    return BvpSolution(
        problem=problem,
        report=report,
        coefficients=xi[:, 0],
        stack=stack,
        boundary_residual=bres,
        unique=report.unique,
    )
