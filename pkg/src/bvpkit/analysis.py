"""Parameter studies: limit conditions, discrepancy, two-sided error bounds.

A :class:`ProblemFamily` describes a boundary-value problem depending on a
small parameter eps >= 0 on a fixed grid.  This module checks, empirically
along a descending eps ladder, the three conditions that govern continuity of
solutions at eps = 0:

* condition (0): the limit problem (eps = 0) has trivial kernel;
* limit condition (I): the matrix coefficients converge to their limits in
  the W_p^n norm;
* limit condition (II): the boundary operators converge strongly, probed on
  a fixed family of polynomial, trigonometric, and exponential functions.

It also evaluates the discrepancy functional

    d(eps) = || L(eps) y0 - f(eps) ||_{n,p} + | B(eps) y0 - c(eps) |

of the *limit* solution y0 inserted into the eps-problem, and tabulates the
ratio of the true solution error || y(eps) - y0 ||_{n+r,p} to d(eps).  For
well-behaved families that ratio stays within fixed positive bounds on both
sides, so the (computable) discrepancy is a two-sided proxy for the
(uncomputable without y(eps)) error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .boundary import BoundaryOperator, apply_boundary
from .companion import OdeSystem
from .errors import SingularLimitError
from .gridfn import (
    Grid,
    GridFunction,
    derivative_stack,
    sobolev_norm_of_stack,
)
from .solver import (
    BvpProblem,
    BvpSolution,
    DEFAULT_SUBSTEPS,
    solvability_report,
    solve,
)

__all__ = [
    "ProblemFamily",
    "ConvergenceTrace",
    "ContinuityReport",
    "TwoSidedRow",
    "TwoSidedReport",
    "continuity_report",
    "discrepancy",
    "solution_error",
    "two_sided_report",
    "probe_stacks",
]

CONV_RATIO = 1e-3
CONV_SLACK = 1.0 + 1e-6
CONV_ABS = 1e-12
TAIL_SLACK = 1.1


@dataclass(frozen=True)
class ProblemFamily:
    """A parameter-dependent problem: builders evaluated at each eps."""

    grid: Grid
    size: int
    order: int
    smoothness: int
    p: float
    system_at: Callable[[float], OdeSystem]
    boundary_at: Callable[[float], BoundaryOperator]
    values_at: Callable[[float], np.ndarray]
    label: str = ""

    def problem_at(self, eps: float) -> BvpProblem:
        return BvpProblem(self.system_at(eps), self.boundary_at(eps),
                          self.values_at(eps))


def _validated_ladder(eps_list: Sequence[float]) -> tuple:
    eps = sorted({float(e) for e in eps_list}, reverse=True)
    if len(eps) < 3:
        raise ValueError("parameter ladder needs at least 3 distinct values")
    if eps[-1] <= 0:
        raise ValueError("parameter ladder must be strictly positive")
    return tuple(eps)


@dataclass(frozen=True)
class ConvergenceTrace:
    """Deltas along a descending eps ladder plus the convergence decision.

    A trace converges when the final delta has dropped by the factor
    ``CONV_RATIO`` relative to the largest one (with a little slack) and sits
    at (or near) the running minimum, or when the deltas vanish outright.
    """

    eps: tuple
    deltas: tuple
    converged: bool

    @staticmethod
    def decide(eps: tuple, deltas: Sequence[float]) -> "ConvergenceTrace":
        d = tuple(float(x) for x in deltas)
        peak = max(d)
        if peak <= CONV_ABS:
            return ConvergenceTrace(eps, d, True)
        ok = d[-1] <= CONV_RATIO * CONV_SLACK * peak and d[-1] <= TAIL_SLACK * min(d)
        return ConvergenceTrace(eps, d, ok)


@dataclass(frozen=True)
class ContinuityReport:
    """Outcome of the three limit conditions along a ladder."""

    eps: tuple
    limit_kernel_dim: int
    condition_zero: bool
    coefficients: ConvergenceTrace
    boundary: ConvergenceTrace
    rhs: ConvergenceTrace
    values: ConvergenceTrace

    @property
    def verdict(self) -> bool:
        """True when (0), (I) and (II) all hold empirically."""
        return (self.condition_zero and self.coefficients.converged
                and self.boundary.converged)


def probe_stacks(grid: Grid, size: int, top: int) -> list:
    """Fixed probe family with exact derivative stacks up to order ``top``.

    Normalized monomials ``((t-a)/(b-a))^q`` for q = 0..top, one full period
    of a sine, and a decaying exponential, each embedded in every coordinate
    direction.  Polynomials alone can miss oscillatory kernel differences, so
    the two transcendental probes are kept deliberately.
    """
    a, span = grid.a, grid.b - grid.a
    u = (grid.nodes - a) / span
    scalar_stacks: list[list[np.ndarray]] = []

    for q in range(top + 1):
        stack = []
        for k in range(top + 1):
            if k <= q:
                coef = math.factorial(q) / (math.factorial(q - k) * span**k)
                stack.append(coef * u ** (q - k))
            else:
                stack.append(np.zeros_like(u))
        scalar_stacks.append(stack)

    w = 2.0 * math.pi / span
    scalar_stacks.append([w**k * np.sin(w * (grid.nodes - a) + 0.5 * math.pi * k)
                          for k in range(top + 1)])
    scalar_stacks.append([(-1.0 / span) ** k * np.exp(-u) for k in range(top + 1)])

    probes = []
    for stack in scalar_stacks:
        for i in range(size):
            embedded = []
            for vals in stack:
                samples = np.zeros((grid.n + 1, size, 1), dtype=np.complex128)
                samples[:, i, 0] = vals
                embedded.append(GridFunction(grid, samples))
            probes.append(embedded)
    return probes


def continuity_report(family: ProblemFamily, eps_list: Sequence[float]) -> ContinuityReport:
    """Check conditions (0), (I), (II) empirically along the ladder."""
    eps = _validated_ladder(eps_list)
    n, p = family.smoothness, family.p
    top = family.smoothness + family.order

    limit_system = family.system_at(0.0)
    limit_boundary = family.boundary_at(0.0)
    limit_values = np.asarray(family.values_at(0.0), dtype=np.complex128).reshape(-1)

    report0, _ = solvability_report(family.problem_at(0.0))
    probes = probe_stacks(family.grid, family.size, top)
    limit_probe_images = [apply_boundary(limit_boundary, s) for s in probes]

    coeff_deltas, rhs_deltas, value_deltas, boundary_deltas = [], [], [], []
    for e in eps:
        sys_e = family.system_at(e)
        delta = 0.0
        for a_e, a_0 in zip(sys_e.coeffs, limit_system.coeffs):
            delta += sobolev_norm_of_stack(derivative_stack(a_e - a_0, n), p)
        coeff_deltas.append(delta)
        rhs_deltas.append(
            sobolev_norm_of_stack(derivative_stack(sys_e.rhs - limit_system.rhs, n), p)
        )
        value_deltas.append(float(np.linalg.norm(
            np.asarray(family.values_at(e), dtype=np.complex128).reshape(-1) - limit_values
        )))
        op_e = family.boundary_at(e)
        boundary_deltas.append(max(
            float(np.linalg.norm(apply_boundary(op_e, s) - img))
            for s, img in zip(probes, limit_probe_images)
        ))

    return ContinuityReport(
        eps=eps,
        limit_kernel_dim=report0.kernel_dim,
        condition_zero=report0.kernel_dim == 0,
        coefficients=ConvergenceTrace.decide(eps, coeff_deltas),
        boundary=ConvergenceTrace.decide(eps, boundary_deltas),
        rhs=ConvergenceTrace.decide(eps, rhs_deltas),
        values=ConvergenceTrace.decide(eps, value_deltas),
    )


def _residual_stack(family: ProblemFamily, eps: float,
                    sol_stack: Sequence[GridFunction]) -> list:
    """Derivative stack (orders 0..n) of ``L(eps) y0 - f(eps)`` by Leibniz."""
    sys_e = family.system_at(eps)
    n, r = family.smoothness, sys_e.order
    a_stacks = [derivative_stack(a, n) for a in sys_e.coeffs]
    f_stack = derivative_stack(sys_e.rhs, n)
    out = []
    for k in range(n + 1):
        total = sol_stack[r + k] - f_stack[k]
        for s, ast in enumerate(a_stacks):
            for i in range(k + 1):
                total = total + math.comb(k, i) * (ast[i] @ sol_stack[s + k - i])
        out.append(total)
    return out


def _limit_solution(family: ProblemFamily, substeps: int,
                    least_squares: bool = False) -> BvpSolution:
    report0, _ = solvability_report(family.problem_at(0.0), substeps=substeps)
    if report0.kernel_dim > 0 and not least_squares:
        raise SingularLimitError(
            f"condition-0-fails: limit problem has kernel dimension {report0.kernel_dim}"
        )
    return solve(family.problem_at(0.0), substeps=substeps,
                 least_squares=least_squares)


def discrepancy(family: ProblemFamily, eps: float,
                limit_solution: BvpSolution | None = None,
                substeps: int = DEFAULT_SUBSTEPS) -> float:
    """Discrepancy of the limit solution in the eps-problem.

    ``|| L(eps) y0 - f(eps) ||_{n,p} + | B(eps) y0 - c(eps) |`` with y0 the
    solution of the limit problem.  Raises :class:`SingularLimitError` when
    the limit problem is singular (no well-defined y0).
    """
    if limit_solution is None:
        limit_solution = _limit_solution(family, substeps)
    res_stack = _residual_stack(family, eps, limit_solution.stack)
    interior = sobolev_norm_of_stack(res_stack, family.p)
    op_e = family.boundary_at(eps)
    c_e = np.asarray(family.values_at(eps), dtype=np.complex128).reshape(-1)
    bvals = apply_boundary(op_e, limit_solution.stack)[:, 0]
    return interior + float(np.linalg.norm(bvals - c_e))


def solution_error(family: ProblemFamily, eps: float,
                   limit_solution: BvpSolution | None = None,
                   substeps: int = DEFAULT_SUBSTEPS) -> float:
    """`` || y(eps) - y(0) ||_{n+r, p}`` with both solutions on the grid."""
    if limit_solution is None:
        limit_solution = _limit_solution(family, substeps)
    sol_e = solve(family.problem_at(eps), substeps=substeps)
    diff = [a - b for a, b in zip(sol_e.stack, limit_solution.stack)]
    return sobolev_norm_of_stack(diff, family.p)


@dataclass(frozen=True)
class TwoSidedRow:
    eps: float
    error: float
    discrepancy: float | None
    ratio: float | None


@dataclass(frozen=True)
class TwoSidedReport:
    """Error/discrepancy table with the observed two-sided bounds."""

    rows: tuple
    condition_zero: bool
    gamma_lower: float | None
    gamma_upper: float | None

    @property
    def bounded(self) -> bool:
        """True when every ratio exists and they pin a positive interval."""
        return (self.condition_zero
                and all(r.ratio is not None for r in self.rows)
                and self.gamma_lower is not None and self.gamma_lower > 0)


def two_sided_report(family: ProblemFamily, eps_list: Sequence[float],
                     substeps: int = DEFAULT_SUBSTEPS) -> TwoSidedReport:
    """Tabulate error, discrepancy, and their ratio along the ladder.

    For a singular limit problem the errors are measured against the
    least-squares representative (they will not vanish) and the discrepancy
    column is left empty: the functional is undefined without a genuine limit
    solution.
    """
    eps = _validated_ladder(eps_list)
    report0, _ = solvability_report(family.problem_at(0.0), substeps=substeps)
    cond0 = report0.kernel_dim == 0
    limit_sol = solve(family.problem_at(0.0), substeps=substeps,
                      least_squares=not cond0)

    rows = []
    for e in eps:
        err = solution_error(family, e, limit_sol, substeps=substeps)
        if cond0:
            disc = discrepancy(family, e, limit_sol, substeps=substeps)
            ratio = err / disc if disc > 0 else None
        else:
            disc = None
            ratio = None
        rows.append(TwoSidedRow(e, err, disc, ratio))

    ratios = [r.ratio for r in rows if r.ratio is not None]
    return TwoSidedReport(
        rows=tuple(rows),
        condition_zero=cond0,
        gamma_lower=min(ratios) if ratios else None,
        gamma_upper=max(ratios) if ratios else None,
    )
