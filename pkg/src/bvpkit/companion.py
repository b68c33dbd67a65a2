"""Order-r linear ODE systems and their first-order (companion) reduction.

A system is ``y^(r) + A_{r-1}(t) y^(r-1) + ... + A_0(t) y = f(t)`` with m x m
matrix coefficients.  Writing ``x = col(y, y', ..., y^(r-1))`` turns it into
``x' + K(t) x = g(t)`` on dimension ``r*m``: the companion matrix K carries
``-I`` blocks on the superdiagonal and the coefficient blocks in its last
block row, and ``g = col(0, ..., 0, f)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ShapeMismatchError
from .gridfn import Grid, GridFunction, derivative_stack

__all__ = ["OdeSystem", "companion_matrix", "companion_rhs", "apply_operator",
           "extend_stack_with_ode"]


@dataclass(frozen=True)
class OdeSystem:
    """Coefficients and right-hand side of one order-r system on a grid.

    ``coeffs[s]`` is the m x m matrix multiplying ``y^(s)`` for s = 0..r-1
    (the leading derivative has unit coefficient); ``rhs`` is m x 1.
    """

    grid: Grid
    coeffs: tuple
    rhs: GridFunction

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ShapeMismatchError("system needs at least one coefficient (order >= 1)")
        m = self.rhs.rows
        if self.rhs.cols != 1:
            raise ShapeMismatchError(f"right-hand side must be a column, got {self.rhs.shape}")
        if self.rhs.grid != self.grid:
            raise ShapeMismatchError("right-hand side lives on a different grid")
        for s, a in enumerate(self.coeffs):
            if a.grid != self.grid:
                raise ShapeMismatchError(f"coefficient {s} lives on a different grid")
            if a.shape != (m, m):
                raise ShapeMismatchError(
                    f"coefficient {s} must be {m}x{m}, got {a.shape}"
                )
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def size(self) -> int:
        return self.rhs.rows

    @property
    def reduced_dim(self) -> int:
        return self.order * self.size

    def with_rhs(self, rhs: GridFunction) -> "OdeSystem":
        return OdeSystem(self.grid, self.coeffs, rhs)


def companion_matrix(system: OdeSystem) -> GridFunction:
    """The rm x rm matrix K of the reduced problem ``x' + K x = g``."""
    r, m = system.order, system.size
    out = GridFunction.zeros(system.grid, (r * m, r * m)).samples.copy()
    for i in range(r - 1):
        for j in range(m):
            out[:, i * m + j, (i + 1) * m + j] = -1.0
    base = (r - 1) * m
    for s, a in enumerate(system.coeffs):
        out[:, base : base + m, s * m : (s + 1) * m] = a.samples
    return GridFunction(system.grid, out)


def companion_rhs(system: OdeSystem) -> GridFunction:
    """The rm x 1 right-hand side ``g = col(0, ..., 0, f)``."""
    r, m = system.order, system.size
    out = GridFunction.zeros(system.grid, (r * m, 1)).samples.copy()
    out[:, (r - 1) * m :, :] = system.rhs.samples
    return GridFunction(system.grid, out)


def apply_operator(system: OdeSystem, stack: Sequence[GridFunction]) -> GridFunction:
    """Apply the differential operator to a function given its derivative stack.

    ``stack`` must hold ``[y, y', ..., y^(r)]`` (more entries are ignored).
    """
    r = system.order
    if len(stack) < r + 1:
        raise ShapeMismatchError(
            f"need derivatives up to order {r}, stack has {len(stack) - 1}"
        )
    total = stack[r]
    for s, a in enumerate(system.coeffs):
        total = total + a @ stack[s]
    return total


def extend_stack_with_ode(system: OdeSystem, stack: list, up_to: int,
                          homogeneous: bool = False) -> list:
    """Extend a derivative stack of a solution of the system up to order ``up_to``.

    Entries up to order r-1 must be present (e.g. from the reduced-system
    trajectory).  Each higher order comes from differentiating the equation
    itself (Leibniz products of coefficient derivatives with lower orders),
    which avoids stacking finite-difference passes on the solution.  Pass
    ``homogeneous=True`` for solutions of ``L y = 0`` (fundamental matrices);
    the stack entries may then have any column count.
    """
    r = system.order
    if len(stack) < r:
        raise ShapeMismatchError(f"stack must contain orders 0..{r - 1} at least")
    if up_to < len(stack):
        return stack[: up_to + 1]
    q_max = up_to - r
    a_stacks = [derivative_stack(a, q_max) for a in system.coeffs]
    f_stack = None if homogeneous else derivative_stack(system.rhs, q_max)
    out = list(stack)
    for order in range(len(out), up_to + 1):
        q = order - r
        if f_stack is None:
            total = GridFunction.zeros(system.grid, out[0].shape)
        else:
            total = f_stack[q]
        for s, a_stack in enumerate(a_stacks):
            for i in range(q + 1):
                total = total - math.comb(q, i) * (a_stack[i] @ out[s + q - i])
        out.append(total)
    return out
