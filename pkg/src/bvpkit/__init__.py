"""Generic linear boundary-value problems for systems of ODEs.

The package solves ``y^(r) + A_{r-1}(t) y^(r-1) + ... + A_0(t) y = f(t)`` on
an interval for m-vector functions y, subject to ``r*m`` boundary conditions
given by an arbitrary continuous linear operator (combinations of point
evaluations and integral terms).  On top of the solver it provides Sobolev
norms on grids, canonicalization of boundary operators, and empirical
parameter studies: limit-condition checks for families depending on a small
parameter, and two-sided error/discrepancy tables.
"""

from ._kernel import BACKEND
from .analysis import (
    ContinuityReport,
    ConvergenceTrace,
    ProblemFamily,
    TwoSidedReport,
    TwoSidedRow,
    continuity_report,
    discrepancy,
    probe_stacks,
    solution_error,
    two_sided_report,
)
from .boundary import (
    BoundaryOperator,
    CanonicalForm,
    IntegralTerm,
    PointTerm,
    apply_boundary,
    apply_canonical,
    canonicalize,
    truncated_power_weights,
)
from .cauchy import (
    FundamentalSystem,
    ParticularData,
    fundamental_system,
    particular_solution,
)
from .companion import (
    OdeSystem,
    apply_operator,
    companion_matrix,
    companion_rhs,
    extend_stack_with_ode,
)
from .errors import (
    BoundaryOrderError,
    BoundaryPointError,
    BvpError,
    EvalError,
    GridTooCoarseError,
    IllConditionedWarning,
    IntegrationBlowupError,
    NearSingularWarning,
    NonFiniteSampleError,
    ParseError,
    ScenarioError,
    ShapeMismatchError,
    SingularLimitError,
    UnsolvableProblemError,
)
from .expressions import Expression, parse_expression
from .gridfn import (
    Grid,
    GridFunction,
    SobolevIndex,
    antiderivative,
    derivative,
    derivative_stack,
    integrate_samples,
    lp_norm,
    simpson_weights,
    sobolev_norm,
    sobolev_norm_of_stack,
    value_at,
)
from .scenario import Scenario, load_scenario, scenario_from_dict
from .solver import (
    BvpProblem,
    BvpSolution,
    SolvabilityReport,
    analyze_characteristic,
    characteristic_matrix,
    solvability_report,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # grid functions and norms
    "Grid", "GridFunction", "SobolevIndex", "derivative", "derivative_stack",
    "antiderivative", "integrate_samples", "simpson_weights", "lp_norm",
    "sobolev_norm", "sobolev_norm_of_stack", "value_at",
    # expressions
    "Expression", "parse_expression",
    # systems
    "OdeSystem", "companion_matrix", "companion_rhs", "apply_operator",
    "extend_stack_with_ode",
    # Cauchy sweeps
    "FundamentalSystem", "ParticularData", "fundamental_system",
    "particular_solution",
    # boundary operators
    "BoundaryOperator", "PointTerm", "IntegralTerm", "CanonicalForm",
    "apply_boundary", "canonicalize", "apply_canonical",
    "truncated_power_weights",
    # solver
    "BvpProblem", "BvpSolution", "SolvabilityReport", "characteristic_matrix",
    "analyze_characteristic", "solvability_report", "solve",
    # parameter analysis
    "ProblemFamily", "ContinuityReport", "ConvergenceTrace", "TwoSidedReport",
    "TwoSidedRow", "continuity_report", "discrepancy", "solution_error",
    "two_sided_report", "probe_stacks",
    # scenarios
    "Scenario", "load_scenario", "scenario_from_dict",
    # errors
    "BvpError", "ShapeMismatchError", "GridTooCoarseError",
    "IntegrationBlowupError", "ParseError", "EvalError",
    "NonFiniteSampleError", "BoundaryOrderError", "BoundaryPointError",
    "SingularLimitError", "UnsolvableProblemError", "ScenarioError",
    "NearSingularWarning", "IllConditionedWarning",
]
