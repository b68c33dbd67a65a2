"""Grid-sampled functions on a uniform interval mesh.

Everything downstream (integration, boundary operators, the solver, the
parameter study) works with :class:`GridFunction`: a complex vector- or
matrix-valued function represented by its samples at the ``N + 1`` nodes of a
uniform grid on ``[a, b]``.  This module supplies the function type itself
plus the numerical substrate: finite-difference differentiation (4th-order
stencils, generated by the Fornberg recurrence), composite-Simpson
quadrature, cumulative integrals, cubic off-node evaluation, and the
Lebesgue/Sobolev norms used throughout.

Norm conventions: the scalar ``W_p^n`` norm combines the ``L_p`` norms of the
derivative orders ``0..n`` in the l_p sense for finite ``p`` and as a maximum
for ``p = inf``; vector- and matrix-valued functions take the *sum* of the
scalar norms of their components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import GridTooCoarseError, ShapeMismatchError

__all__ = [
    "Grid",
    "GridFunction",
    "SobolevIndex",
    "derivative",
    "derivative_stack",
    "antiderivative",
    "lp_norm",
    "sobolev_norm",
    "sobolev_norm_of_stack",
    "value_at",
    "integrate_samples",
    "simpson_weights",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``n`` subintervals (``n + 1`` nodes) on ``[a, b]``."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not (self.a < self.b):
            raise ValueError(f"interval requires a < b, got [{self.a}, {self.b}]")
        if self.n < 8:
            raise ValueError(f"grid requires at least 8 subintervals, got {self.n}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n + 1)


@dataclass(frozen=True)
class SobolevIndex:
    """Derivative count ``n`` and integrability exponent ``p`` (1 <= p <= inf)."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("derivative count must be nonnegative")
        if not (self.p >= 1.0):
            raise ValueError(f"integrability exponent must satisfy p >= 1, got {self.p}")

    @property
    def conjugate(self) -> float:
        """The exponent p' with 1/p + 1/p' = 1."""
        if self.p == 1.0:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)


class GridFunction:
    """Immutable complex function samples of shape ``(N + 1, rows, cols)``.

    Scalars are 1x1, column vectors m x 1, matrices m x m (or rm x rm for
    reduced first-order systems).  All samples must be finite.
    """

    __slots__ = ("grid", "samples")

    def __init__(self, grid: Grid, samples):
        arr = np.asarray(samples, dtype=np.complex128)
        if arr.ndim == 1:
            arr = arr[:, None, None]
        elif arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ShapeMismatchError(f"samples must have 1..3 dims, got {arr.ndim}")
        if arr.shape[0] != grid.n + 1:
            raise ShapeMismatchError(
                f"expected {grid.n + 1} node samples, got {arr.shape[0]}"
            )
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("grid function samples must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "samples", arr)

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """Sample a vectorized callable of t; result may be scalar or matrix valued."""
        vals = np.asarray(fn(grid.nodes), dtype=np.complex128)
        if vals.ndim == 0:
            vals = np.full(grid.n + 1, complex(vals))
        return cls(grid, vals)

    @classmethod
    def constant(cls, grid: Grid, value, shape: tuple[int, int] = (1, 1)) -> "GridFunction":
        block = np.broadcast_to(np.asarray(value, dtype=np.complex128), shape)
        return cls(grid, np.broadcast_to(block, (grid.n + 1, *shape)))

    @classmethod
    def zeros(cls, grid: Grid, shape: tuple[int, int] = (1, 1)) -> "GridFunction":
        return cls(grid, np.zeros((grid.n + 1, *shape), dtype=np.complex128))

    @classmethod
    def identity(cls, grid: Grid, dim: int) -> "GridFunction":
        return cls.constant(grid, np.eye(dim), (dim, dim))

    # -- basic queries ---------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.samples.shape[1]

    @property
    def cols(self) -> int:
        return self.samples.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_scalar(self) -> bool:
        return self.shape == (1, 1)

    def __repr__(self):
        g = self.grid
        return f"GridFunction({self.rows}x{self.cols} on [{g.a}, {g.b}], N={g.n})"

    # -- arithmetic (node-wise) --------------------------------------------------

    def _check_compatible(self, other: "GridFunction"):
        if self.grid != other.grid:
            raise ShapeMismatchError("grid functions live on different grids")
        if self.shape != other.shape:
            raise ShapeMismatchError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_compatible(other)
        return GridFunction(self.grid, self.samples + other.samples)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_compatible(other)
        return GridFunction(self.grid, self.samples - other.samples)

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.grid, -self.samples)

    def __mul__(self, scalar) -> "GridFunction":
        return GridFunction(self.grid, self.samples * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other) -> "GridFunction":
        """Node-wise matrix product with another grid function or a constant matrix."""
        if isinstance(other, GridFunction):
            if self.grid != other.grid:
                raise ShapeMismatchError("grid functions live on different grids")
            rhs = other.samples
        else:
            rhs = np.asarray(other, dtype=np.complex128)
        if self.cols != rhs.shape[-2]:
            raise ShapeMismatchError(
                f"inner dimensions do not match: {self.shape} @ {rhs.shape[-2:]}"
            )
        return GridFunction(self.grid, self.samples @ rhs)

    def block(self, row0: int, row1: int, col0: int, col1: int) -> "GridFunction":
        return GridFunction(self.grid, self.samples[:, row0:row1, col0:col1])

    def entry(self, i: int, j: int) -> "GridFunction":
        return self.block(i, i + 1, j, j + 1)

    def column(self, j: int) -> "GridFunction":
        return self.block(0, self.rows, j, j + 1)


# -- finite-difference weights (Fornberg recurrence) ----------------------------


@lru_cache(maxsize=None)
def _fd_weights(x0: float, offsets: tuple, order: int) -> np.ndarray:
    """Weights of the ``order``-th derivative at ``x0`` on integer node offsets.

    Order 0 gives Lagrange interpolation weights.  Offsets are in units of the
    grid spacing; callers rescale by ``h ** -order``.
    """
    nodes = np.asarray(offsets, dtype=float)
    n = nodes.size
    d = np.zeros((order + 1, n, n))
    d[0, 0, 0] = 1.0
    c1 = 1.0
    for j in range(1, n):
        c2 = 1.0
        mmax = min(j, order)
        for k in range(j):
            c3 = nodes[j] - nodes[k]
            c2 *= c3
            for m in range(mmax + 1):
                prev = d[m - 1, j - 1, k] if m > 0 else 0.0
                d[m, j, k] = ((nodes[j] - x0) * d[m, j - 1, k] - m * prev) / c3
        for m in range(mmax + 1):
            prev = d[m - 1, j - 1, j - 1] if m > 0 else 0.0
            d[m, j, j] = (c1 / c2) * (m * prev - (nodes[j - 1] - x0) * d[m, j - 1, j - 1])
        c1 = c2
    w = d[order, n - 1].copy()
    w.setflags(write=False)
    return w


def derivative(f: GridFunction, order: int = 1) -> GridFunction:
    """Differentiate with 4th-order stencils (central inside, one-sided at ends).

    A single call handles orders 1..4; higher orders are obtained by composing
    calls (with the usual accuracy loss of repeated differencing).  Raises
    :class:`GridTooCoarseError` when ``N < 4 * order``.
    """
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    if order == 0:
        return f
    if order > 4:
        raise ValueError("at most 4 derivative orders per call; compose calls instead")
    n = f.grid.n
    if n < 4 * order:
        raise GridTooCoarseError(
            f"grid-too-coarse: order-{order} stencil needs N >= {4 * order}, got N={n}"
        )
    h = f.grid.h
    width_c = 2 * ((order + 1) // 2) + 3
    half = (width_c - 1) // 2
    width_b = order + 4

    flat = f.samples.reshape(n + 1, -1)
    out = np.empty_like(flat)
    scale = h ** (-order)

    wc = _fd_weights(0.0, tuple(range(-half, half + 1)), order)
    windows = np.lib.stride_tricks.sliding_window_view(flat, width_c, axis=0)
    out[half : n + 1 - half] = (windows @ wc) * scale

    for i in range(half):
        wl = _fd_weights(float(i), tuple(range(width_b)), order)
        out[i] = (wl @ flat[:width_b]) * scale
        wr = _fd_weights(float(width_b - 1 - i), tuple(range(width_b)), order)
        out[n - i] = (wr @ flat[n + 1 - width_b :]) * scale

    return GridFunction(f.grid, out.reshape(f.samples.shape))


def derivative_stack(f: GridFunction, up_to: int) -> list[GridFunction]:
    """Return ``[f, f', ..., f^(up_to)]`` using direct stencils per order.

    Orders above 4 fall back to composing a direct order-4 pass with further
    differentiation of its output.
    """
    stack = [f]
    for k in range(1, up_to + 1):
        if k <= 4:
            stack.append(derivative(f, k))
        else:
            stack.append(derivative(stack[k - 4], 4) if k % 4 == 0 else derivative(stack[k - 1], 1))
    return stack


# -- interpolation and refinement -----------------------------------------------


def _interval_windows(n: int) -> tuple[np.ndarray, np.ndarray]:
    """4-node interpolation window start per interval, and local offsets."""
    starts = np.clip(np.arange(n) - 1, 0, n - 3)
    return starts, np.arange(4)


def _interval_values(samples: np.ndarray, x: float) -> np.ndarray:
    """Cubic-interpolated values at ``t_i + x*h`` for every interval ``i``.

    ``samples`` has node-major layout ``(N + 1, ...)``; the result is ``(N, ...)``.
    """
    n = samples.shape[0] - 1
    flat = samples.reshape(n + 1, -1)
    out = np.empty((n, flat.shape[1]), dtype=flat.dtype)

    w_first = _fd_weights(x, (0.0, 1.0, 2.0, 3.0), 0)
    w_mid = _fd_weights(x, (-1.0, 0.0, 1.0, 2.0), 0)
    w_last = _fd_weights(x, (-2.0, -1.0, 0.0, 1.0), 0)

    out[0] = w_first @ flat[0:4]
    out[n - 1] = w_last @ flat[n - 3 : n + 1]
    if n > 2:
        mid = (
            w_mid[0] * flat[0 : n - 2]
            + w_mid[1] * flat[1 : n - 1]
            + w_mid[2] * flat[2:n]
            + w_mid[3] * flat[3 : n + 1]
        )
        out[1 : n - 1] = mid
    return out.reshape((n,) + samples.shape[1:])


def midpoint_samples(samples: np.ndarray) -> np.ndarray:
    """Values at all interval midpoints, cubically interpolated."""
    return _interval_values(samples, 0.5)


def refine_samples(samples: np.ndarray, factor: int) -> np.ndarray:
    """Resample onto a grid with ``factor`` times as many subintervals."""
    if factor < 1:
        raise ValueError("refinement factor must be >= 1")
    if factor == 1:
        return samples
    n = samples.shape[0] - 1
    out = np.empty((n * factor + 1,) + samples.shape[1:], dtype=samples.dtype)
    out[::factor] = samples
    for q in range(1, factor):
        out[q::factor] = _interval_values(samples, q / factor)
    return out


def value_at(f: GridFunction, t: float) -> np.ndarray:
    """Evaluate at an arbitrary point by cubic interpolation (exact on nodes)."""
    g = f.grid
    span = g.b - g.a
    if t < g.a - 1e-9 * span or t > g.b + 1e-9 * span:
        raise ValueError(f"evaluation point {t} outside [{g.a}, {g.b}]")
    pos = (t - g.a) / g.h
    nearest = int(round(pos))
    if 0 <= nearest <= g.n and abs(pos - nearest) < 1e-9:
        return np.array(f.samples[nearest])
    i = min(max(int(math.floor(pos)), 0), g.n - 1)
    start = min(max(i - 1, 0), g.n - 3)
    w = _fd_weights(pos - start, (0.0, 1.0, 2.0, 3.0), 0)
    flat = f.samples[start : start + 4].reshape(4, -1)
    return (w @ flat).reshape(f.samples.shape[1:])


# -- quadrature -------------------------------------------------------------------


@lru_cache(maxsize=None)
def _simpson_unit_weights(n: int) -> np.ndarray:
    """Composite-Simpson weights for unit spacing; odd ``n`` ends with a 3/8 rule."""
    w = np.zeros(n + 1)
    if n % 2 == 0:
        w[0:n + 1:2] = 2.0 / 3.0
        w[1:n:2] = 4.0 / 3.0
        w[0] = w[n] = 1.0 / 3.0
    else:
        m = n - 3
        w[0:m + 1:2] = 2.0 / 3.0
        w[1:m:2] = 4.0 / 3.0
        w[0] = 1.0 / 3.0
        w[m] = 1.0 / 3.0
        w[m:] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 / 8.0)
    w.setflags(write=False)
    return w


def simpson_weights(grid: Grid) -> np.ndarray:
    """Node weights such that ``weights @ values`` approximates the integral."""
    return _simpson_unit_weights(grid.n) * grid.h


def integrate_samples(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Composite-Simpson integral over [a, b] of node-major ``values``."""
    w = simpson_weights(grid)
    return np.tensordot(w, values, axes=(0, 0))


@lru_cache(maxsize=None)
def _cubic_panel_weights(kind: str) -> np.ndarray:
    """Weights giving the integral of the interpolation cubic over one interval."""
    offsets = {
        "first": (0.0, 1.0, 2.0, 3.0),
        "mid": (-1.0, 0.0, 1.0, 2.0),
        "last": (-2.0, -1.0, 0.0, 1.0),
    }[kind]
    # 2-point Gauss-Legendre on [0, 1] integrates the cubic exactly
    gx = (0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0))
    w = 0.5 * (_fd_weights(gx[0], offsets, 0) + _fd_weights(gx[1], offsets, 0))
    w = w.copy()
    w.setflags(write=False)
    return w


def antiderivative(f: GridFunction) -> GridFunction:
    """Cumulative integral with value 0 at ``a`` (exact for cubics)."""
    n = f.grid.n
    flat = f.samples.reshape(n + 1, -1)
    inc = np.empty((n, flat.shape[1]), dtype=flat.dtype)

    wf = _cubic_panel_weights("first")
    wm = _cubic_panel_weights("mid")
    wl = _cubic_panel_weights("last")
    inc[0] = wf @ flat[0:4]
    inc[n - 1] = wl @ flat[n - 3 : n + 1]
    if n > 2:
        inc[1 : n - 1] = (
            wm[0] * flat[0 : n - 2]
            + wm[1] * flat[1 : n - 1]
            + wm[2] * flat[2:n]
            + wm[3] * flat[3 : n + 1]
        )
    out = np.zeros_like(flat)
    np.cumsum(inc * f.grid.h, axis=0, out=out[1:])
    return GridFunction(f.grid, out.reshape(f.samples.shape))


# -- norms -------------------------------------------------------------------------


def _as_index(idx) -> SobolevIndex:
    if isinstance(idx, SobolevIndex):
        return idx
    n, p = idx
    return SobolevIndex(int(n), float(p))


def lp_norm(f: GridFunction, p: float) -> float:
    """Entrywise L_p norm, summed over components.

    Finite ``p`` uses composite Simpson on ``|f|**p``; ``p = inf`` is the max
    over nodes.
    """
    if not (p >= 1.0):
        raise ValueError(f"p must satisfy p >= 1, got {p}")
    mags = np.abs(f.samples)
    if math.isinf(p):
        return float(np.sum(mags.max(axis=0)))
    integrals = integrate_samples(f.grid, mags**p)
    return float(np.sum(integrals ** (1.0 / p)))


def sobolev_norm_of_stack(stack: Sequence[GridFunction], p: float) -> float:
    """Sobolev norm from a precomputed derivative stack ``[f, f', ..., f^(n)]``.

    Per scalar component: the l_p combination of the derivative L_p norms for
    finite ``p``, the maximum over derivative orders for ``p = inf``; components
    are then summed.
    """
    if not stack:
        raise ValueError("derivative stack must be nonempty")
    mags = np.stack([np.abs(g.samples) for g in stack])
    if math.isinf(p):
        return float(np.sum(mags.max(axis=(0, 1))))
    integrals = integrate_samples(stack[0].grid, np.moveaxis(mags**p, 0, 1))
    per_entry = np.sum(integrals, axis=0) ** (1.0 / p)
    return float(np.sum(per_entry))


def sobolev_norm(f: GridFunction, idx) -> float:
    """W_p^n norm with derivatives taken by finite differences on the grid."""
    sidx = _as_index(idx)
    return sobolev_norm_of_stack(derivative_stack(f, sidx.n), sidx.p)
