"""Scenario files: a JSON schema describing a parameter-dependent problem.

A scenario bundles everything one study needs: the interval and grid, the
system sizes (m equations of order r, smoothness index n, norm exponent p),
matrix coefficients and right-hand side as expressions in ``t`` and ``eps``,
boundary terms (point and integral), target boundary values as expressions in
``eps``, the parameter ladder, and optionally a closed-form solution used for
validation output.

Schema (all floats accept integers; expressions are strings or bare numbers)::

    {
      "name":          "dirichlet_sin",
      "interval":      [0.0, 1.0],
      "grid_n":        200,
      "size":          1,            # m
      "order":         2,            # r
      "smoothness":    0,            # n
      "p":             2,            # or "inf"
      "coefficients":  [A_0, ..., A_{r-1}],   # each an m x m expression matrix
      "rhs":           [f_1, ..., f_m],
      "boundary": [
        {"kind": "point",    "tau": 0.0, "derivative": 0, "weight": W},
        {"kind": "integral", "derivative": 0, "kernel": K}
      ],                              # W: (r*m) x m, eps-expressions; K: t too
      "values":        [c_1, ..., c_{r*m}],   # eps-expressions
      "eps_ladder":    [0.1, 0.01, 0.001, 0.0001],
      "analytic_solution": ["sin(pi*t)"]      # optional, m entries
    }

Structural violations raise :class:`ScenarioError` naming the offending
field; expressions that evaluate to non-finite samples on the grid raise
:class:`NonFiniteSampleError` at family-evaluation time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .analysis import ProblemFamily
from .boundary import BoundaryOperator, IntegralTerm, PointTerm
from .companion import OdeSystem
from .errors import BvpError, NonFiniteSampleError, ScenarioError
from .expressions import Expression, parse_expression
from .gridfn import Grid, GridFunction

__all__ = ["Scenario", "load_scenario", "scenario_from_dict"]


def _require(doc: dict, field: str, kinds, path: str):
    if field not in doc:
        raise ScenarioError(path or field, "missing required field")
    value = doc[field]
    if kinds is not None and not isinstance(value, kinds):
        raise ScenarioError(f"{path}" if path else field,
                            f"expected {kinds}, got {type(value).__name__}")
    return value


def _as_expression(value, field: str) -> Expression:
    if not isinstance(value, (str, int, float)) or isinstance(value, bool):
        raise ScenarioError(field, f"expected an expression string or number, got {value!r}")
    try:
        return parse_expression(value)
    except BvpError as exc:
        raise ScenarioError(field, f"bad expression: {exc}") from None


def _expression_matrix(value, rows: int, cols: int, field: str,
                       allow_t: bool = True) -> list:
    if not isinstance(value, list) or len(value) != rows:
        raise ScenarioError(field, f"expected {rows} rows")
    out = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != cols:
            raise ScenarioError(f"{field}[{i}]", f"expected {cols} entries")
        exprs = []
        for j, cell in enumerate(row):
            expr = _as_expression(cell, f"{field}[{i}][{j}]")
            if not allow_t and expr.depends_on_t():
                raise ScenarioError(f"{field}[{i}][{j}]",
                                    "must not depend on t (eps and constants only)")
            exprs.append(expr)
        out.append(exprs)
    return out


def _sample_matrix(grid: Grid, exprs: list, eps: float) -> GridFunction:
    nodes = grid.nodes
    rows, cols = len(exprs), len(exprs[0])
    samples = np.empty((grid.n + 1, rows, cols), dtype=np.complex128)
    for i, row in enumerate(exprs):
        for j, expr in enumerate(row):
            vals = expr(nodes, eps)
            bad = np.flatnonzero(~np.isfinite(vals))
            if bad.size:
                raise NonFiniteSampleError(int(bad[0]), float(nodes[bad[0]]))
            samples[:, i, j] = vals
    return GridFunction(grid, samples)


def _eval_scalar(expr: Expression, eps: float) -> float:
    return float(expr(np.asarray(0.0), eps))


@dataclass(frozen=True)
class _PointSpec:
    tau: float
    derivative: int
    weight: list  # expression matrix


@dataclass(frozen=True)
class _IntegralSpec:
    derivative: int
    kernel: list  # expression matrix


@dataclass(frozen=True)
class Scenario:
    """A loaded scenario: metadata plus the problem family it generates."""

    name: str
    grid: Grid
    size: int
    order: int
    smoothness: int
    p: float
    eps_ladder: tuple
    family: ProblemFamily
    analytic: tuple  # Expressions, possibly empty
    raw: dict

    def analytic_samples(self, eps: float = 0.0) -> np.ndarray | None:
        """Grid samples of the closed-form solution, if one was declared."""
        if not self.analytic:
            return None
        return np.stack([expr(self.grid.nodes, eps) for expr in self.analytic], axis=1)[..., None]


def scenario_from_dict(doc: dict, grid_n: int | None = None) -> Scenario:
    """Validate a scenario document and build its problem family."""
    if not isinstance(doc, dict):
        raise ScenarioError("document", "scenario must be a JSON object")

    name = _require(doc, "name", str, "name")
    interval = _require(doc, "interval", list, "interval")
    if len(interval) != 2 or not all(isinstance(x, (int, float)) for x in interval):
        raise ScenarioError("interval", "expected [a, b] with numbers a < b")
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ScenarioError("interval", f"expected a < b, got [{a}, {b}]")

    n_sub = grid_n if grid_n is not None else _require(doc, "grid_n", int, "grid_n")
    if not isinstance(n_sub, int) or n_sub < 8:
        raise ScenarioError("grid_n", f"need an integer >= 8, got {n_sub}")

    size = _require(doc, "size", int, "size")
    order = _require(doc, "order", int, "order")
    smooth = _require(doc, "smoothness", int, "smoothness")
    if size < 1 or order < 1 or smooth < 0:
        raise ScenarioError("size/order/smoothness",
                            "need size >= 1, order >= 1, smoothness >= 0")

    p_raw = _require(doc, "p", (int, float, str), "p")
    if isinstance(p_raw, str):
        if p_raw.strip().lower() not in ("inf", "infinity"):
            raise ScenarioError("p", f"expected a number or 'inf', got {p_raw!r}")
        p = math.inf
    else:
        p = float(p_raw)
    if p < 1:
        raise ScenarioError("p", f"need p >= 1, got {p}")

    grid = Grid(a, b, n_sub)
    rm = order * size

    coeff_docs = _require(doc, "coefficients", list, "coefficients")
    if len(coeff_docs) != order:
        raise ScenarioError("coefficients", f"expected {order} matrices, got {len(coeff_docs)}")
    coeff_exprs = [
        _expression_matrix(c, size, size, f"coefficients[{s}]")
        for s, c in enumerate(coeff_docs)
    ]

    rhs_doc = _require(doc, "rhs", list, "rhs")
    if len(rhs_doc) != size:
        raise ScenarioError("rhs", f"expected {size} entries, got {len(rhs_doc)}")
    rhs_exprs = [[_as_expression(v, f"rhs[{i}]")] for i, v in enumerate(rhs_doc)]

    terms_doc = _require(doc, "boundary", list, "boundary")
    if not terms_doc:
        raise ScenarioError("boundary", "at least one boundary term is required")
    specs: list[Union[_PointSpec, _IntegralSpec]] = []
    for i, term in enumerate(terms_doc):
        path = f"boundary[{i}]"
        if not isinstance(term, dict):
            raise ScenarioError(path, "expected an object")
        kind = _require(term, "kind", str, f"{path}.kind")
        d = _require(term, "derivative", int, f"{path}.derivative")
        if kind == "point":
            tau = _require(term, "tau", (int, float), f"{path}.tau")
            weight = _expression_matrix(term.get("weight"), rm, size,
                                        f"{path}.weight", allow_t=False)
            specs.append(_PointSpec(float(tau), d, weight))
        elif kind == "integral":
            kernel = _expression_matrix(term.get("kernel"), rm, size, f"{path}.kernel")
            specs.append(_IntegralSpec(d, kernel))
        else:
            raise ScenarioError(f"{path}.kind", f"expected 'point' or 'integral', got {kind!r}")

    values_doc = _require(doc, "values", list, "values")
    if len(values_doc) != rm:
        raise ScenarioError("values", f"expected {rm} entries, got {len(values_doc)}")
    value_exprs = []
    for i, v in enumerate(values_doc):
        expr = _as_expression(v, f"values[{i}]")
        if expr.depends_on_t():
            raise ScenarioError(f"values[{i}]", "must not depend on t")
        value_exprs.append(expr)

    ladder_doc = doc.get("eps_ladder", [])
    if not isinstance(ladder_doc, list) or not all(
        isinstance(x, (int, float)) for x in ladder_doc
    ):
        raise ScenarioError("eps_ladder", "expected a list of numbers")
    ladder = tuple(sorted((float(x) for x in ladder_doc), reverse=True))
    if any(x <= 0 for x in ladder):
        raise ScenarioError("eps_ladder", "ladder values must be positive")

    analytic_doc = doc.get("analytic_solution")
    analytic: tuple = ()
    if analytic_doc is not None:
        if not isinstance(analytic_doc, list) or len(analytic_doc) != size:
            raise ScenarioError("analytic_solution", f"expected {size} entries")
        analytic = tuple(_as_expression(v, f"analytic_solution[{i}]")
                         for i, v in enumerate(analytic_doc))

    def system_at(eps: float) -> OdeSystem:
        coeffs = tuple(_sample_matrix(grid, c, eps) for c in coeff_exprs)
        rhs = _sample_matrix(grid, rhs_exprs, eps)
        return OdeSystem(grid, coeffs, rhs)

    def boundary_at(eps: float) -> BoundaryOperator:
        terms = []
        for spec in specs:
            if isinstance(spec, _PointSpec):
                w = np.array([[_eval_scalar(e, eps) for e in row] for row in spec.weight],
                             dtype=np.complex128)
                terms.append(PointTerm(spec.tau, spec.derivative, w))
            else:
                terms.append(IntegralTerm(_sample_matrix(grid, spec.kernel, eps),
                                          spec.derivative))
        return BoundaryOperator(grid, size, order, smooth, terms)

    def values_at(eps: float) -> np.ndarray:
        return np.array([_eval_scalar(e, eps) for e in value_exprs], dtype=np.complex128)

    family = ProblemFamily(
        grid=grid, size=size, order=order, smoothness=smooth, p=p,
        system_at=system_at, boundary_at=boundary_at, values_at=values_at,
        label=name,
    )
    return Scenario(
        name=name, grid=grid, size=size, order=order, smoothness=smooth,
        p=p, eps_ladder=ladder, family=family, analytic=analytic, raw=doc,
    )


def load_scenario(path, grid_n: int | None = None) -> Scenario:
    """Read and validate a scenario JSON file."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(str(p), f"cannot read scenario file: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(str(p), f"invalid JSON: {exc}") from None
    return scenario_from_dict(doc, grid_n=grid_n)
