"""Shared builders for the test suite."""

import numpy as np

import bvpkit as bk


def unit_col(rows: int, i: int) -> np.ndarray:
    w = np.zeros((rows, 1))
    w[i, 0] = 1.0
    return w


def dirichlet_op(grid: bk.Grid, smoothness: int = 0) -> bk.BoundaryOperator:
    """Scalar second-order operator pinning y at both endpoints."""
    return bk.BoundaryOperator(grid, 1, 2, smoothness, [
        bk.PointTerm(grid.a, 0, unit_col(2, 0)),
        bk.PointTerm(grid.b, 0, unit_col(2, 1)),
    ])


def scalar_system(grid: bk.Grid, coeff_fns, rhs_fn) -> bk.OdeSystem:
    """Scalar order-r system from vectorized callables of t."""
    coeffs = tuple(
        bk.GridFunction.from_callable(grid, lambda t, f=f: f(t) + 0.0 * t)
        for f in coeff_fns
    )
    rhs = bk.GridFunction.from_callable(grid, lambda t: rhs_fn(t) + 0.0 * t)
    return bk.OdeSystem(grid, coeffs, rhs)


def poly_stack(grid: bk.Grid, coeffs, up_to: int) -> list:
    """Exact derivative stack of a scalar polynomial given its coefficients.

    ``coeffs`` are in increasing-degree order (numpy polynomial convention).
    """
    poly = np.polynomial.Polynomial(coeffs)
    stack = []
    for _ in range(up_to + 1):
        stack.append(bk.GridFunction(grid, poly(grid.nodes)))
        poly = poly.deriv()
    return stack


def embed_scalar_stack(grid: bk.Grid, scalar_stack, size: int, direction: int) -> list:
    """Lift a scalar derivative stack into component ``direction`` of an m-vector."""
    out = []
    for g in scalar_stack:
        samples = np.zeros((grid.n + 1, size, 1), dtype=np.complex128)
        samples[:, direction, 0] = g.samples[:, 0, 0]
        out.append(bk.GridFunction(grid, samples))
    return out
