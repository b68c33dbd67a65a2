"""End-to-end solves: characteristic matrix, rank decisions, accuracy.

Closed-form references (sin(pi t) for the Dirichlet load, the explicit
characteristic matrices of y'' = 0 and y'' + y = 0) are hand-derived;
the 2x2 system is checked against an independent collocation solver.
"""

import math
import warnings

import numpy as np
import pytest

import bvpkit as bk
from oracles import oracle_solve
from support import dirichlet_op, scalar_system, unit_col


@pytest.fixture(scope="module")
def grid():
    return bk.Grid(0.0, 1.0, 200)


def zero_fn(t):
    return 0.0 * t


def free_problem(grid, values, rhs=zero_fn):
    """y'' = rhs with Dirichlet data."""
    system = scalar_system(grid, [zero_fn, zero_fn], rhs)
    return bk.BvpProblem(system, dirichlet_op(grid), values)


class TestProblemValidation:
    def test_wrong_value_count(self, grid):
        system = scalar_system(grid, [zero_fn, zero_fn], zero_fn)
        with pytest.raises(bk.ShapeMismatchError):
            bk.BvpProblem(system, dirichlet_op(grid), [0.0, 0.0, 0.0])

    def test_boundary_grid_mismatch(self, grid):
        other = bk.Grid(0.0, 1.0, 100)
        system = scalar_system(grid, [zero_fn, zero_fn], zero_fn)
        with pytest.raises(bk.ShapeMismatchError):
            bk.BvpProblem(system, dirichlet_op(other), [0.0, 0.0])

    def test_boundary_shape_mismatch(self, grid):
        first_order = scalar_system(grid, [zero_fn], zero_fn)
        with pytest.raises(bk.ShapeMismatchError):
            bk.BvpProblem(first_order, dirichlet_op(grid), [0.0, 0.0])


class TestCharacteristicMatrix:
    def test_free_particle_dirichlet(self, grid):
        # fundamental solutions 1 and t; B = (y(0), y(1))
        report, _ = bk.solvability_report(free_problem(grid, [0.0, 0.0]))
        assert np.max(np.abs(report.matrix - np.array([[1.0, 0.0], [1.0, 1.0]]))) < 1e-9
        assert report.unique
        assert report.rank == 2

    def test_oscillator_determinant(self, grid):
        # fundamental solutions cos t and sin t; det M = sin(1)
        system = scalar_system(grid, [lambda t: 1.0 + 0 * t, zero_fn], zero_fn)
        problem = bk.BvpProblem(system, dirichlet_op(grid), [0.0, 0.0])
        report, _ = bk.solvability_report(problem)
        assert report.det == pytest.approx(math.sin(1.0), abs=1e-9)

    def test_analyze_singular_matrix(self):
        report = bk.analyze_characteristic(np.array([[1.0, 2.0], [2.0, 4.0]]))
        assert report.rank == 1
        assert report.kernel_dim == 1
        assert report.cokernel_dim == 1
        assert not report.unique
        assert report.condition > 1e15
        assert report.det == pytest.approx(0.0, abs=1e-12)

    def test_rank_tolerance_scales_with_largest_singular_value(self):
        report = bk.analyze_characteristic(np.diag([1e6, 1.0]))
        assert report.rank_tolerance == pytest.approx(1e-10 * 1e6)
        assert report.rank == 2


class TestSolveAccuracy:
    def test_dirichlet_sine_load(self, grid):
        problem = free_problem(grid, [0.0, 0.0],
                               rhs=lambda t: -math.pi**2 * np.sin(math.pi * t))
        sol = bk.solve(problem)
        exact = np.sin(math.pi * grid.nodes)
        assert np.max(np.abs(sol.solution.samples[:, 0, 0] - exact)) < 1e-7
        assert sol.unique
        assert sol.boundary_residual < 1e-10
        assert sol.coefficients.shape == (2,)
        # xi picks y(0) = 0, y'(0) = pi
        assert sol.coefficients[1] == pytest.approx(math.pi, abs=1e-8)

    def test_solution_stack_reaches_top_order(self, grid):
        sol = bk.solve(free_problem(grid, [1.0, 3.0]))
        assert len(sol.stack) == 3  # y, y', y'' for n=0, r=2
        # y = 1 + 2t
        assert np.max(np.abs(sol.stack[1].samples - 2.0)) < 1e-10
        assert np.max(np.abs(sol.stack[2].samples)) < 1e-10

    def test_ode_residual_and_boundary_values(self, grid):
        problem = free_problem(grid, [0.5, -1.0], rhs=lambda t: np.exp(t))
        sol = bk.solve(problem)
        assert np.max(np.abs(sol.ode_residual().samples)) < 1e-9
        assert np.allclose(sol.boundary_values(), [0.5, -1.0], atol=1e-10)

    def test_variable_coefficient_first_order(self, grid):
        # y' + t y = t, y(1) = 1 - e^{-1/2}: solution 1 - e^{-t^2/2}
        system = scalar_system(grid, [lambda t: t], lambda t: t)
        op = bk.BoundaryOperator(grid, 1, 1, 0, [bk.PointTerm(1.0, 0, unit_col(1, 0))])
        sol = bk.solve(bk.BvpProblem(system, op, [1.0 - math.exp(-0.5)]))
        exact = 1.0 - np.exp(-0.5 * grid.nodes**2)
        assert np.max(np.abs(sol.solution.samples[:, 0, 0] - exact)) < 1e-9


class TestScenarioProblems:
    def test_integral_boundary_scenario(self, scenarios_dir):
        sc = bk.load_scenario(scenarios_dir / "integral_boundary.json")
        sol = bk.solve(sc.family.problem_at(0.0))
        assert np.max(np.abs(sol.solution.samples - sc.analytic_samples(0.0))) < 1e-6

    def test_third_order_scenario(self, scenarios_dir):
        sc = bk.load_scenario(scenarios_dir / "third_order.json")
        sol = bk.solve(sc.family.problem_at(0.0))
        assert np.max(np.abs(sol.solution.samples - sc.analytic_samples(0.0))) < 1e-6

    def test_coupled_system_matches_collocation_oracle(self, scenarios_dir):
        sc = bk.load_scenario(scenarios_dir / "system_2x2.json")
        sol = bk.solve(sc.family.problem_at(0.0))
        a0 = np.array([[0.0, 1.0], [-1.0, 0.0]])
        ref = oracle_solve(
            0.0, 1.0, 2, 2,
            [lambda t: a0, lambda t: np.zeros((2, 2))],
            lambda t: np.array([1.0, t]),
            [("a", 0, np.vstack([np.eye(2), np.zeros((2, 2))])),
             ("b", 0, np.vstack([np.zeros((2, 2)), np.eye(2)]))],
            [],
            np.zeros(4),
            sc.grid.nodes,
        )
        got = sol.solution.samples[:, :, 0].T.real
        assert np.max(np.abs(got - ref)) < 1e-5


class TestSingularProblems:
    def periodic_problem(self, grid, value, rhs=zero_fn):
        # y' = rhs with y(1) - y(0) = value: kernel is the constants
        system = scalar_system(grid, [zero_fn], rhs)
        op = bk.BoundaryOperator(grid, 1, 1, 0, [
            bk.PointTerm(1.0, 0, unit_col(1, 0)),
            bk.PointTerm(0.0, 0, -unit_col(1, 0)),
        ])
        return bk.BvpProblem(system, op, [value])

    def test_compatible_data_gives_minimum_norm_choice(self, grid):
        sol = bk.solve(self.periodic_problem(grid, 0.0))
        assert not sol.unique
        assert sol.report.kernel_dim == 1
        # pseudoinverse picks the zero coefficient, hence the zero solution
        assert np.max(np.abs(sol.solution.samples)) < 1e-12

    def test_incompatible_data_raises(self, grid):
        with pytest.raises(bk.UnsolvableProblemError) as info:
            bk.solve(self.periodic_problem(grid, 1.0))
        assert info.value.kernel_dim == 1
        assert info.value.residual == pytest.approx(1.0, abs=1e-9)

    def test_incompatible_data_least_squares_representative(self, grid):
        sol = bk.solve(self.periodic_problem(grid, 1.0), least_squares=True)
        assert not sol.unique
        assert sol.boundary_residual == pytest.approx(1.0, abs=1e-9)

    def test_nontrivial_compatible_solution(self, grid):
        # y' = cos(2 pi t) is periodic; min-norm solution is sin(2 pi t)/(2 pi)
        sol = bk.solve(self.periodic_problem(
            grid, 0.0, rhs=lambda t: np.cos(2 * math.pi * t)))
        exact = np.sin(2 * math.pi * grid.nodes) / (2 * math.pi)
        got = sol.solution.samples[:, 0, 0]
        # representative may differ from `exact` by a constant; compare shifted
        shift = np.mean(got - exact)
        assert np.max(np.abs(got - exact - shift)) < 1e-8


class TestConditioning:
    def test_tiny_second_condition_warns(self, grid):
        system = scalar_system(grid, [zero_fn, zero_fn], zero_fn)
        scale = 1e-9
        op = bk.BoundaryOperator(grid, 1, 2, 0, [
            bk.PointTerm(0.0, 0, unit_col(2, 0)),
            bk.PointTerm(1.0, 0, scale * unit_col(2, 1)),
            bk.PointTerm(0.0, 0, -scale * unit_col(2, 1)),
        ])
        problem = bk.BvpProblem(system, op, [1.0, scale * 2.0])
        with pytest.warns(bk.IllConditionedWarning):
            sol = bk.solve(problem)
        assert sol.unique
        exact = 1.0 + 2.0 * grid.nodes
        assert np.max(np.abs(sol.solution.samples[:, 0, 0] - exact)) < 1e-6

    def test_well_conditioned_does_not_warn(self, grid):
        with warnings.catch_warnings():
            warnings.simplefilter("error", bk.IllConditionedWarning)
            bk.solve(free_problem(grid, [0.0, 1.0]))
