"""Continuous linear boundary operators and their canonical form.

An operator B maps an m-vector function with n+r derivatives to a vector of
``r*m`` boundary values.  It is assembled from terms of two kinds:

* ``PointTerm(tau, d, W)`` contributes ``W @ y^(d)(tau)``       (d <= n+r-1)
* ``IntegralTerm(kernel, d)`` contributes ``int kernel(t) @ y^(d)(t) dt``
  over the whole interval                                        (d <= n+r)

with weight matrices of shape (r*m, m).  Every such operator can be rewritten
in the canonical form

    B y = sum_{s=0}^{n+r-1} alpha_s @ y^(s)(a)  +  int Phi(t) @ y^(n+r)(t) dt

by Taylor expansion at the left endpoint.  Point terms generate truncated-
power kernel pieces ``W (tau - t)_+^q / q!`` whose kink at ``tau`` defeats a
plain node-sample quadrature, so the canonical kernel is kept split: a smooth
sampled part (integrated by composite Simpson) plus explicit spike terms
integrated with moment weights that are exact against the piecewise-cubic
interpolant of ``y^(n+r)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .errors import BoundaryOrderError, BoundaryPointError, ShapeMismatchError
from .gridfn import (
    Grid,
    GridFunction,
    antiderivative,
    integrate_samples,
    value_at,
)

__all__ = [
    "PointTerm",
    "IntegralTerm",
    "BoundaryOperator",
    "CanonicalForm",
    "apply_boundary",
    "canonicalize",
    "apply_canonical",
    "truncated_power_weights",
]


def _frozen_weight(w, rows: int, cols: int, what: str) -> np.ndarray:
    arr = np.asarray(w, dtype=np.complex128)
    if arr.shape != (rows, cols):
        raise ShapeMismatchError(f"{what} must have shape ({rows}, {cols}), got {arr.shape}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PointTerm:
    """``W @ y^(d)(tau)`` for a single evaluation point tau."""

    tau: float
    d: int
    weight: np.ndarray


@dataclass(frozen=True)
class IntegralTerm:
    """``int kernel(t) @ y^(d)(t) dt`` with a matrix-valued sampled kernel."""

    kernel: GridFunction
    d: int


class BoundaryOperator:
    """A boundary operator for an order-r system of m equations.

    ``smoothness`` is the extra derivative count n: the operator acts on
    functions with n+r derivatives and produces r*m boundary values.
    """

    __slots__ = ("grid", "size", "order", "smoothness", "terms")

    def __init__(self, grid: Grid, size: int, order: int, smoothness: int,
                 terms: Sequence[Union[PointTerm, IntegralTerm]]):
        if size < 1 or order < 1 or smoothness < 0:
            raise ValueError("need size >= 1, order >= 1, smoothness >= 0")
        rm = order * size
        top = smoothness + order
        span = grid.b - grid.a
        checked = []
        for term in terms:
            if isinstance(term, PointTerm):
                if not (grid.a - 1e-9 * span <= term.tau <= grid.b + 1e-9 * span):
                    raise BoundaryPointError(
                        f"evaluation point {term.tau} outside [{grid.a}, {grid.b}]"
                    )
                if not (0 <= term.d <= top - 1):
                    raise BoundaryOrderError(
                        f"point term of derivative order {term.d} exceeds n+r-1 = {top - 1}"
                    )
                checked.append(PointTerm(float(term.tau), int(term.d),
                                         _frozen_weight(term.weight, rm, size, "point weight")))
            elif isinstance(term, IntegralTerm):
                if not (0 <= term.d <= top):
                    raise BoundaryOrderError(
                        f"integral term of derivative order {term.d} exceeds n+r = {top}"
                    )
                if term.kernel.grid != grid:
                    raise ShapeMismatchError("integral kernel lives on a different grid")
                if term.kernel.shape != (rm, size):
                    raise ShapeMismatchError(
                        f"integral kernel must be {rm}x{size}, got {term.kernel.shape}"
                    )
                checked.append(IntegralTerm(term.kernel, int(term.d)))
            else:
                raise TypeError(f"unknown boundary term {term!r}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "smoothness", smoothness)
        object.__setattr__(self, "terms", tuple(checked))

    def __setattr__(self, name, value):
        raise AttributeError("BoundaryOperator is immutable")

    @property
    def condition_count(self) -> int:
        return self.order * self.size

    @property
    def top_order(self) -> int:
        """Highest derivative order the operator may touch (n + r)."""
        return self.smoothness + self.order

    def __repr__(self):
        return (f"BoundaryOperator(m={self.size}, r={self.order}, n={self.smoothness}, "
                f"{len(self.terms)} terms)")


def _check_stack(op_grid: Grid, size: int, stack: Sequence[GridFunction], need: int) -> int:
    if len(stack) <= need:
        raise ShapeMismatchError(
            f"derivative stack holds orders 0..{len(stack) - 1}, need 0..{need}"
        )
    cols = stack[0].cols
    for g in stack:
        if g.grid != op_grid:
            raise ShapeMismatchError("stack entry lives on a different grid")
        if g.rows != size or g.cols != cols:
            raise ShapeMismatchError(
                f"stack entries must be {size}x{cols}, got {g.shape}"
            )
    return cols


def apply_boundary(op: BoundaryOperator, stack: Sequence[GridFunction]) -> np.ndarray:
    """Apply the operator to a function given as a derivative stack.

    ``stack[k]`` holds ``y^(k)`` (m x c; several columns are processed at
    once).  Only the orders actually referenced by the terms are required.
    Returns an (r*m, c) complex array.
    """
    need = max((t.d for t in op.terms), default=0)
    cols = _check_stack(op.grid, op.size, stack, need)
    total = np.zeros((op.condition_count, cols), dtype=np.complex128)
    for term in op.terms:
        if isinstance(term, PointTerm):
            total += term.weight @ value_at(stack[term.d], term.tau)
        else:
            prod = term.kernel.samples @ stack[term.d].samples
            total += integrate_samples(op.grid, prod)
    return total


# -- truncated-power moment quadrature -------------------------------------------


@lru_cache(maxsize=None)
def _gauss_legendre(npts: int) -> tuple:
    x, w = np.polynomial.legendre.leggauss(npts)
    return tuple(0.5 * (x + 1.0)), tuple(0.5 * w)


@lru_cache(maxsize=None)
def _lagrange_rows(offsets: tuple, points: tuple) -> np.ndarray:
    from .gridfn import _fd_weights

    rows = np.array([_fd_weights(x, offsets, 0) for x in points])
    rows.setflags(write=False)
    return rows


def truncated_power_weights(grid: Grid, tau: float, q: int) -> np.ndarray:
    """Node weights approximating ``int_a^tau (tau - t)^q / q! v(t) dt``.

    Exact whenever v coincides with its piecewise-cubic node interpolant (the
    integrand's kink at tau is handled by splitting the final interval), so
    kernel spikes from point-term canonicalization integrate without the
    order loss a plain Simpson rule would suffer.
    """
    n, h, a = grid.n, grid.h, grid.a
    w = np.zeros(n + 1)
    if tau <= a:
        return w
    tau = min(tau, grid.b)
    pos = (tau - a) / h
    full = min(int(math.floor(pos + 1e-12)), n)
    npts = (q + 4) // 2 + 1  # exact for degree q + 3
    gx, gw = _gauss_legendre(npts)
    fact = math.factorial(q)

    starts = np.clip(np.arange(max(full, 1)) - 1, 0, n - 3)
    for x, weight in zip(gx, gw):
        if full > 0:
            # all complete intervals at once: values at t_i + x h
            t_g = a + (np.arange(full) + x) * h
            factor = weight * h * (tau - t_g) ** q / fact
            rows = _lagrange_rows((0.0, 1.0, 2.0, 3.0), (x,))[0]
            mid = _lagrange_rows((-1.0, 0.0, 1.0, 2.0), (x,))[0]
            last = _lagrange_rows((-2.0, -1.0, 0.0, 1.0), (x,))[0]
            for i in range(full):
                if i == 0:
                    local = rows
                elif i == n - 1:
                    local = last
                else:
                    local = mid
                w[starts[i] : starts[i] + 4] += factor[i] * local
    frac = pos - full
    if frac > 1e-12 and full < n:
        # partial interval [t_full, tau]
        width = frac * h
        start = min(max(full - 1, 0), n - 3)
        offsets = tuple(float(k) for k in range(4))
        for x, weight in zip(gx, gw):
            t_g = a + (full + frac * x) * h
            local_x = full - start + frac * x
            row = _lagrange_rows(offsets, (local_x,))[0]
            w[start : start + 4] += weight * width * (tau - t_g) ** q / fact * row
    return w


# -- canonical form ----------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalForm:
    """``B y = sum_s alpha_s y^(s)(a) + int Phi(t) y^(n+r)(t) dt``.

    ``alphas`` has shape (n+r, r*m, m).  The kernel Phi is stored split:
    ``smooth_kernel`` holds the node-sampled part, ``spikes`` the truncated-
    power pieces ``W (tau - t)_+^q / q!`` whose kinks need dedicated
    quadrature.
    """

    grid: Grid
    size: int
    order: int
    smoothness: int
    alphas: np.ndarray
    smooth_kernel: GridFunction
    spikes: tuple  # of (tau, q, W)

    @property
    def top_order(self) -> int:
        return self.smoothness + self.order

    def kernel_samples(self) -> np.ndarray:
        """Node samples of the full kernel (spikes included), for inspection.

        The sampled kink representation is only O(h)-faithful next to each
        spike point; quantitative work goes through :func:`apply_canonical`,
        which integrates the spikes exactly.
        """
        total = self.smooth_kernel.samples.copy()
        t = self.grid.nodes
        for tau, q, w in self.spikes:
            ramp = np.where(t <= tau, (tau - t) ** q / math.factorial(q), 0.0)
            total += ramp[:, None, None] * w
        return total


def canonicalize(op: BoundaryOperator) -> CanonicalForm:
    """Rewrite the operator over endpoint data and the top derivative.

    Uses the Taylor identity with integral remainder at the left endpoint:
    point terms turn into endpoint coefficients plus a truncated-power spike,
    integral terms of order d < n+r into endpoint coefficients plus a smooth
    kernel obtained from moment antiderivatives of their own kernel.
    """
    rm, m = op.condition_count, op.size
    top = op.top_order
    grid = op.grid
    alphas = np.zeros((top, rm, m), dtype=np.complex128)
    smooth = np.zeros((grid.n + 1, rm, m), dtype=np.complex128)
    spikes: list[tuple[float, int, np.ndarray]] = []
    nodes = grid.nodes

    for term in op.terms:
        if isinstance(term, PointTerm):
            shift = term.tau - grid.a
            for s in range(term.d, top):
                alphas[s] += term.weight * (shift ** (s - term.d) / math.factorial(s - term.d))
            if term.tau > grid.a:
                spikes.append((term.tau, top - 1 - term.d, term.weight))
        else:
            if term.d == top:
                smooth += term.kernel.samples
                continue
            phi = term.kernel.samples
            for s in range(term.d, top):
                poly = (nodes - grid.a) ** (s - term.d) / math.factorial(s - term.d)
                alphas[s] += integrate_samples(grid, poly[:, None, None] * phi)
            q = top - 1 - term.d
            # G(u) = int_u^b phi(t) (t - u)^q dt / q!  via binomial moments
            moments = [antiderivative(GridFunction(grid, (nodes ** j)[:, None, None] * phi))
                       for j in range(q + 1)]
            acc = np.zeros_like(smooth)
            for j in range(q + 1):
                tail = moments[j].samples[-1] - moments[j].samples
                acc += math.comb(q, j) * ((-nodes) ** (q - j))[:, None, None] * tail
            smooth += acc / math.factorial(q)

    kernel = GridFunction(grid, smooth)
    merged: dict[tuple[float, int], np.ndarray] = {}
    for tau, q, w in spikes:
        key = (tau, q)
        merged[key] = merged.get(key, 0) + w
    spike_tuple = tuple(
        (tau, q, _frozen_weight(w, rm, m, "spike weight"))
        for (tau, q), w in sorted(merged.items())
    )
    return CanonicalForm(grid, m, op.order, op.smoothness, alphas, kernel, spike_tuple)


def apply_canonical(cf: CanonicalForm, stack: Sequence[GridFunction]) -> np.ndarray:
    """Apply a canonical form to a derivative stack reaching order n+r."""
    cols = _check_stack(cf.grid, cf.size, stack, cf.top_order)
    total = np.zeros((cf.alphas.shape[1], cols), dtype=np.complex128)
    for s in range(cf.top_order):
        total += cf.alphas[s] @ stack[s].samples[0]
    v = stack[cf.top_order]
    total += integrate_samples(cf.grid, cf.smooth_kernel.samples @ v.samples)
    for tau, q, w in cf.spikes:
        weights = truncated_power_weights(cf.grid, tau, q)
        moment = np.tensordot(weights, v.samples, axes=(0, 0))
        total += w @ moment
    return total
