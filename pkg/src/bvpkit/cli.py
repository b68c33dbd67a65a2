"""Command-line interface: solve, check, analyze, norms.

All commands read a scenario JSON file and write their results under an
output directory.  Output bytes are deterministic for a given scenario and
environment: JSON objects come out with sorted keys and repr-exact floats,
CSV files use 17-significant-digit floats and LF line endings, and files are
written atomically (temp file + rename) so readers never observe partial
output.

Exit codes: 0 success, 2 bad scenario or usage, 3 singular or incompatible
problem.  Set ``BVP_LOG_LEVEL`` (DEBUG/INFO/WARNING/ERROR) for stderr
diagnostics; timings and backend choice are logged, never written to output
files.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._kernel import BACKEND
from .analysis import continuity_report, two_sided_report
from .errors import (
    BvpError,
    ScenarioError,
    SingularLimitError,
    UnsolvableProblemError,
)
from .gridfn import sobolev_norm_of_stack, derivative_stack
from .scenario import Scenario, load_scenario
from .solver import solvability_report, solve

log = logging.getLogger("bvpkit")

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_SINGULAR = 3


# -- deterministic writers ---------------------------------------------------------


def _write_text(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv_text(header: list, rows: list) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _jz(z: complex) -> list:
    """Complex number as a [re, im] pair for JSON."""
    z = complex(z)
    return [z.real, z.imag]


def _jf(x: float):
    """Float for JSON; infinities become strings to stay valid JSON."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# -- commands ----------------------------------------------------------------------


def _cmd_solve(scn: Scenario, out_dir: Path, args) -> int:
    eps = args.eps
    t0 = time.perf_counter()
    sol = solve(scn.family.problem_at(eps))
    log.info("solve %s at eps=%g took %.3fs", scn.name, eps, time.perf_counter() - t0)

    report = sol.report
    doc = {
        "name": scn.name,
        "eps": _jf(eps),
        "grid_n": scn.grid.n,
        "unique": sol.unique,
        "kernel_dim": report.kernel_dim,
        "cokernel_dim": report.cokernel_dim,
        "det": _jz(report.det),
        "boundary_residual": _jf(sol.boundary_residual),
        "coefficients": [_jz(z) for z in sol.coefficients],
        "max_analytic_error": None,
    }
    analytic = scn.analytic_samples(eps)
    if analytic is not None:
        doc["max_analytic_error"] = _jf(
            float(np.max(np.abs(sol.solution.samples - analytic)))
        )

    header = ["t"]
    for i in range(scn.size):
        header += [f"y{i + 1}_re", f"y{i + 1}_im"]
    rows = []
    nodes = scn.grid.nodes
    y = sol.solution.samples
    for k in range(scn.grid.n + 1):
        row = [float(nodes[k])]
        for i in range(scn.size):
            row += [float(y[k, i, 0].real), float(y[k, i, 0].imag)]
        rows.append(row)

    _write_text(out_dir / "solve.json", _json_text(doc))
    _write_text(out_dir / "solution.csv", _csv_text(header, rows))
    return EXIT_OK


def _cmd_check(scn: Scenario, out_dir: Path, args) -> int:
    t0 = time.perf_counter()
    report, _ = solvability_report(scn.family.problem_at(args.eps))
    log.info("check %s took %.3fs", scn.name, time.perf_counter() - t0)
    doc = {
        "name": scn.name,
        "eps": _jf(args.eps),
        "grid_n": scn.grid.n,
        "matrix": [[_jz(z) for z in row] for row in report.matrix],
        "singular_values": [_jf(s) for s in report.singular_values],
        "det": _jz(report.det),
        "rank": report.rank,
        "kernel_dim": report.kernel_dim,
        "cokernel_dim": report.cokernel_dim,
        "rank_tolerance": _jf(report.rank_tolerance),
        "unique": report.unique,
    }
    _write_text(out_dir / "check.json", _json_text(doc))
    return EXIT_OK


def _cmd_analyze(scn: Scenario, out_dir: Path, args) -> int:
    if not scn.eps_ladder:
        raise ScenarioError("eps_ladder", "analyze requires a parameter ladder")
    t0 = time.perf_counter()
    cont = continuity_report(scn.family, scn.eps_ladder)
    two = two_sided_report(scn.family, scn.eps_ladder)
    log.info("analyze %s took %.3fs", scn.name, time.perf_counter() - t0)

    doc = {
        "name": scn.name,
        "eps_ladder": [_jf(e) for e in cont.eps],
        "continuity": {
            "condition_zero": cont.condition_zero,
            "limit_kernel_dim": cont.limit_kernel_dim,
            "coefficient_deltas": [_jf(d) for d in cont.coefficients.deltas],
            "coefficients_converged": cont.coefficients.converged,
            "boundary_deltas": [_jf(d) for d in cont.boundary.deltas],
            "boundary_converged": cont.boundary.converged,
            "rhs_deltas": [_jf(d) for d in cont.rhs.deltas],
            "rhs_converged": cont.rhs.converged,
            "value_deltas": [_jf(d) for d in cont.values.deltas],
            "values_converged": cont.values.converged,
            "verdict": cont.verdict,
        },
        "two_sided": {
            "rows": [
                {
                    "eps": _jf(r.eps),
                    "error": _jf(r.error),
                    "discrepancy": None if r.discrepancy is None else _jf(r.discrepancy),
                    "ratio": None if r.ratio is None else _jf(r.ratio),
                }
                for r in two.rows
            ],
            "gamma_lower": None if two.gamma_lower is None else _jf(two.gamma_lower),
            "gamma_upper": None if two.gamma_upper is None else _jf(two.gamma_upper),
            "bounded": two.bounded,
        },
    }
    rows = [[r.eps, r.error, r.discrepancy, r.ratio] for r in two.rows]
    _write_text(out_dir / "analyze.json", _json_text(doc))
    _write_text(out_dir / "table.csv",
                _csv_text(["eps", "error", "discrepancy", "ratio"], rows))
    return EXIT_OK


def _cmd_norms(scn: Scenario, out_dir: Path, args) -> int:
    eps = args.eps
    t0 = time.perf_counter()
    sol = solve(scn.family.problem_at(eps))
    system = scn.family.system_at(eps)
    top = scn.smoothness + scn.order
    p = scn.p

    solution_norms = [
        _jf(sobolev_norm_of_stack(sol.stack[: k + 1], p)) for k in range(top + 1)
    ]
    rhs_stack = derivative_stack(system.rhs, scn.smoothness)
    rhs_norms = [
        _jf(sobolev_norm_of_stack(rhs_stack[: k + 1], p))
        for k in range(scn.smoothness + 1)
    ]
    coeff_norms = [
        _jf(sobolev_norm_of_stack(derivative_stack(a, scn.smoothness), p))
        for a in system.coeffs
    ]
    values = scn.family.values_at(eps)
    log.info("norms %s took %.3fs", scn.name, time.perf_counter() - t0)

    doc = {
        "name": scn.name,
        "eps": _jf(eps),
        "grid_n": scn.grid.n,
        "p": "inf" if math.isinf(p) else _jf(p),
        "solution_norms": solution_norms,
        "rhs_norms": rhs_norms,
        "coefficient_norms": coeff_norms,
        "values_norm": _jf(float(np.linalg.norm(values))),
    }
    _write_text(out_dir / "norms.json", _json_text(doc))
    return EXIT_OK


# -- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bvp",
        description="Linear boundary-value problems: solve, check solvability, "
                    "run parameter studies, compute norms.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="scenario JSON file")
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--grid-N", type=int, dest="grid_n", default=None,
                        help="override the scenario's grid_n")

    for name, helptext, with_eps in (
        ("solve", "solve the problem and write solution.csv + solve.json", True),
        ("check", "characteristic-matrix solvability report (check.json)", True),
        ("analyze", "limit conditions and error/discrepancy table "
                    "(analyze.json + table.csv)", False),
        ("norms", "Sobolev norms of solution and data (norms.json)", True),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        if with_eps:
            p.add_argument("--eps", type=float, default=0.0,
                           help="parameter value (default 0)")

    return parser


_COMMANDS = {
    "solve": _cmd_solve,
    "check": _cmd_check,
    "analyze": _cmd_analyze,
    "norms": _cmd_norms,
}


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("BVP_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    log.debug("stepping backend: %s", BACKEND)

    try:
        scn = load_scenario(args.scenario, grid_n=args.grid_n)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](scn, out_dir, args)
    except (SingularLimitError, UnsolvableProblemError) as exc:
        log.error("%s", exc)
        print(f"bvp: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except BvpError as exc:
        log.error("%s", exc)
        print(f"bvp: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except OSError as exc:
        print(f"bvp: {exc}", file=sys.stderr)
        return EXIT_SCENARIO


if __name__ == "__main__":
    sys.exit(main())
