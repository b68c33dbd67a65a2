"""Expression language: grammar, precedence, errors, evaluation."""

import math

import numpy as np
import pytest

import bvpkit as bk
from bvpkit.expressions import Expression, parse_expression


def ev(src, t=0.0, eps=0.0):
    return float(Expression(src)(np.asarray(t, dtype=float), eps))


class TestGrammar:
    def test_arithmetic_precedence(self):
        assert ev("2 + 3 * 4") == 14.0
        assert ev("(2 + 3) * 4") == 20.0
        assert ev("7 - 4 - 2") == 1.0  # left-assoc subtraction
        assert ev("8 / 4 / 2") == 1.0

    def test_power_is_right_associative(self):
        assert ev("2 ^ 3 ^ 2") == 512.0

    def test_power_binds_tighter_than_unary_minus(self):
        assert ev("-t^2", t=2.0) == -4.0

    def test_unary_minus_chains(self):
        assert ev("--3") == 3.0
        assert ev("2 - -3") == 5.0

    def test_pi_constant(self):
        assert ev("pi") == pytest.approx(math.pi, abs=0)
        assert ev("cos(pi)") == pytest.approx(-1.0, abs=1e-15)

    def test_scientific_notation(self):
        assert ev("1.5e-3") == 1.5e-3
        assert ev("2E2 + .5") == 200.5

    def test_functions(self):
        assert ev("sin(pi/2)") == pytest.approx(1.0)
        assert ev("exp(0)") == 1.0
        assert ev("log(exp(2))") == pytest.approx(2.0)
        assert ev("sqrt(16)") == 4.0

    def test_variables(self):
        assert ev("t^2 + eps", t=3.0, eps=0.25) == 9.25

    def test_whitespace_insensitive(self):
        assert ev("  1+ 2   *3 ") == 7.0


class TestParseErrors:
    def test_unknown_name_offset(self):
        with pytest.raises(bk.ParseError) as exc:
            Expression("2 + foo")
        assert exc.value.offset == 4

    def test_unexpected_character(self):
        with pytest.raises(bk.ParseError) as exc:
            Expression("1 + @")
        assert exc.value.offset == 4

    def test_trailing_input(self):
        with pytest.raises(bk.ParseError) as exc:
            Expression("1 + 2 3")
        assert exc.value.offset == 6

    def test_unclosed_paren(self):
        with pytest.raises(bk.ParseError):
            Expression("sin(t")

    def test_empty_input(self):
        with pytest.raises(bk.ParseError):
            Expression("")

    def test_missing_operand(self):
        with pytest.raises(bk.ParseError) as exc:
            Expression("1 + * 2")
        assert exc.value.offset == 4


class TestEvalErrors:
    def test_division_by_zero(self):
        expr = Expression("1 / t")
        with pytest.raises(bk.EvalError, match="division by zero"):
            expr(np.array([0.5, 0.0]))

    def test_log_domain(self):
        expr = Expression("log(t - 1)")
        with pytest.raises(bk.EvalError, match="log"):
            expr(np.array([0.0]))

    def test_sqrt_domain(self):
        expr = Expression("sqrt(-1 - t)")
        with pytest.raises(bk.EvalError, match="sqrt"):
            expr(np.array([0.0]))

    def test_power_domain(self):
        expr = Expression("(-1) ^ 0.5")
        with pytest.raises(bk.EvalError, match="power"):
            expr(np.array([0.0]))


class TestEvaluation:
    def test_vectorized_shape(self):
        expr = Expression("sin(pi * t)")
        t = np.linspace(0, 1, 11)
        out = expr(t)
        assert out.shape == t.shape
        assert np.allclose(out, np.sin(np.pi * t))

    def test_constant_broadcasts(self):
        expr = Expression("3")
        out = expr(np.zeros(5))
        assert out.shape == (5,)
        assert np.all(out == 3.0)

    def test_eps_held_fixed(self):
        expr = Expression("eps * t")
        out = expr(np.array([1.0, 2.0]), eps=0.5)
        assert np.allclose(out, [0.5, 1.0])

    def test_dependency_queries(self):
        assert Expression("eps * 2").depends_on_eps()
        assert not Expression("t * 2").depends_on_eps()
        assert Expression("sin(t)").depends_on_t()
        assert not Expression("exp(eps)").depends_on_t()

    def test_parse_expression_accepts_numbers(self):
        expr = parse_expression(2.5)
        assert float(expr(np.asarray(0.0))) == 2.5
        assert not expr.depends_on_t()

    def test_repr_round_trip(self):
        expr = Expression("t + eps")
        assert "t + eps" in repr(expr)
