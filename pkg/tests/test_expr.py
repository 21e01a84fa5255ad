import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import central_difference, python_function, random_polynomial
from snostat.errors import (
    DomainError,
    ExprSyntaxError,
    UnknownIdentifierError,
    VariableIndexError,
)
from snostat.expr import Const, Pow, compile_array, evaluate, gradient, hessian, parse

SADDLE = "(x1-1)^2 + (x2-1)^2"
SINGULAR = "-x1 + 0.5*x1^2 - x2^2 + 0.5*x2^4"


def ev(text, x, n=2):
    return evaluate(parse(text, n), x)


class TestParseAndEvaluate:
    def test_quadratic_at_origin(self):
        assert ev(SADDLE, (0, 0)) == 2.0

    def test_quartic_at_origin(self):
        assert ev(SINGULAR, (0, 0)) == 0.0

    def test_values_at_axis_points(self):
        assert ev(SADDLE, (1, 0)) == 1.0
        assert ev(SINGULAR, (0, 1)) == -0.5

    def test_double_star_rejected_with_position(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse("x1 ** 2", 2)
        assert err.value.position == 3

    @pytest.mark.parametrize("text", ["x1 +", "(x1", "x1 x2", "2^x1", "x1^1.5", "sin x1", ")"])
    def test_malformed_input(self, text):
        with pytest.raises(ExprSyntaxError):
            parse(text, 2)

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError):
            parse("y1 + 1", 2)

    def test_variable_index_out_of_range(self):
        with pytest.raises(VariableIndexError):
            parse("x3", 2)
        with pytest.raises(VariableIndexError):
            parse("x0", 2)

    def test_log_domain(self):
        with pytest.raises(DomainError):
            ev("log(x1)", (-1, 0))

    @pytest.mark.parametrize("text", ["sqrt(x1)", "1/x2", "x2^-1"])
    def test_other_domain_violations(self, text):
        with pytest.raises(DomainError):
            ev(text, (-1, 0))

    def test_unary_minus_binds_looser_than_power(self):
        assert ev("-x1^2", (3, 0)) == -9.0
        assert ev("(-x1)^2", (3, 0)) == 9.0
        assert ev("2*-x1", (3, 0)) == -6.0

    def test_left_associativity(self):
        assert ev("8 - 2 - 1", (0, 0)) == 5.0
        assert ev("8 / 2 / 2", (0, 0)) == 2.0

    def test_functions(self):
        x = (0.3, 0.7)
        got = ev("sin(x1) + cos(x2) + exp(x1*x2) + log(x2) + sqrt(x1)", x)
        want = math.sin(0.3) + math.cos(0.7) + math.exp(0.21) + math.log(0.7) + math.sqrt(0.3)
        assert got == pytest.approx(want, rel=1e-15)

    def test_scientific_literals(self):
        assert ev("1.5e-3*x1 + .5", (2, 0)) == pytest.approx(0.503)

    def test_integer_exponent_stored_exactly(self):
        e = parse("x1^3", 1)
        assert isinstance(e, Pow) and e.exponent == 3 and isinstance(e.exponent, int)

    def test_grid_evaluation(self):
        X, Y = np.meshgrid(np.linspace(-1, 1, 5), np.linspace(0, 2, 5))
        got = evaluate(parse(SADDLE, 2), (X, Y))
        assert np.allclose(got, (X - 1) ** 2 + (Y - 1) ** 2)

    def test_round_trip_through_text(self):
        rng = random.Random(3)
        for _ in range(200):
            caret, _ = random_polynomial(rng, 3)
            e = parse(caret, 3)
            again = parse(str(e), 3)
            x = [rng.uniform(-1, 1) for _ in range(3)]
            assert evaluate(again, x) == pytest.approx(evaluate(e, x), rel=1e-12, abs=1e-12)

    def test_constant_folding(self):
        assert parse("2*3 + 1", 1) == Const(7.0)


class TestDerivatives:
    def test_gradient_of_saddle_objective(self):
        g = gradient(parse(SADDLE, 2), 2)
        assert [evaluate(c, (0, 0)) for c in g] == [-2.0, -2.0]

    def test_gradient_of_constant(self):
        g = gradient(parse("3.5", 3), 3)
        assert all(c == Const(0.0) for c in g)

    def test_gradient_of_singular_objective(self):
        g = gradient(parse(SINGULAR, 2), 2)
        assert [evaluate(c, (0, 0)) for c in g] == [-1.0, 0.0]

    def test_hessian_of_quadratic(self):
        H = hessian(parse(SADDLE, 2), 2)
        for x in [(0, 0), (3, -1)]:
            assert [[evaluate(h, x) for h in row] for row in H] == [[2, 0], [0, 2]]

    def test_hessian_of_singular_objective_at_axis_point(self):
        text = SINGULAR
        H = [[evaluate(h, (0, 1)) for h in row] for row in hessian(parse(text, 2), 2)]
        f = python_function(text.replace("^", "**").replace("x1", "x[0]").replace("x2", "x[1]"))
        for i in range(2):
            for j in range(2):
                order = tuple((k == i) + (k == j) for k in range(2))
                oracle = mpmath.diff(lambda a, b: f([a, b]), (0, 1), order)
                assert H[i][j] == pytest.approx(float(oracle), abs=1e-6)
        assert H == [[1.0, 0.0], [0.0, 4.0]]

    def test_hessian_of_bilinear(self):
        H = hessian(parse("x1*x2", 2), 2)
        assert [[evaluate(h, (5, -7)) for h in row] for row in H] == [[0, 1], [1, 0]]

    def test_function_derivatives(self):
        e = parse("sin(x1)*exp(x2) + log(x1) + sqrt(x2) + x1/x2", 2)
        x = (0.7, 1.3)
        fn = lambda y: (mpmath.sin(y[0]) * mpmath.exp(y[1]) + mpmath.log(y[0])  # noqa: E731
                        + mpmath.sqrt(y[1]) + y[0] / y[1])
        for j, gj in enumerate(gradient(e, 2)):
            assert evaluate(gj, x) == pytest.approx(central_difference(fn, x, j), abs=1e-8)

    def test_random_polynomials_against_finite_differences(self):
        rng = random.Random(11)
        for _ in range(300):
            caret, py = random_polynomial(rng, 2)
            e = parse(caret, 2)
            fn = python_function(py)
            x = [rng.uniform(-1.2, 1.2) for _ in range(2)]
            value = evaluate(e, x)
            for j, gj in enumerate(gradient(e, 2)):
                assert abs(evaluate(gj, x) - central_difference(fn, x, j)) <= 1e-5 * (1 + abs(value))

    def test_mixed_partials_in_either_order(self):
        rng = random.Random(12)
        for _ in range(300):
            caret, _ = random_polynomial(rng, 3)
            e = parse(caret, 3)
            x = [rng.uniform(-1.5, 1.5) for _ in range(3)]
            for i in range(1, 4):
                for j in range(i + 1, 4):
                    a = evaluate(e.diff(i).diff(j), x)
                    b = evaluate(e.diff(j).diff(i), x)
                    assert abs(a - b) <= 1e-12 * max(1.0, abs(a)) * 10

    def test_hessian_symmetry(self):
        rng = random.Random(13)
        for _ in range(200):
            caret, _ = random_polynomial(rng, 3)
            H = hessian(parse(caret, 3), 3)
            x = [rng.uniform(-1, 1) for _ in range(3)]
            M = np.array([[evaluate(h, x) for h in row] for row in H])
            assert np.all(np.abs(M - M.T) <= 1e-12 * (1 + np.abs(M)))


class TestCompiled:
    def test_matches_reference_evaluator(self):
        rng = random.Random(21)
        for _ in range(300):
            caret, _ = random_polynomial(rng, 3)
            e = parse(caret, 3)
            fn = compile_array([e])
            x = [rng.uniform(-2, 2) for _ in range(3)]
            assert fn(x)[0] == pytest.approx(evaluate(e, x), rel=1e-13, abs=1e-13)

    def test_domain_errors(self):
        fn = compile_array([parse("log(x1) + 1/x2", 2)])
        with pytest.raises(DomainError):
            fn([-1.0, 1.0])
        with pytest.raises(DomainError):
            fn([1.0, 0.0])
        with pytest.raises(DomainError):
            compile_array([parse("exp(x1)", 1)])([1e6])

    def test_shape(self):
        fn = compile_array([parse(t, 2) for t in ("x1", "x2", "x1*x2", "1")], (2, 2))
        assert fn([2.0, 3.0]).tolist() == [[2, 3], [6, 1]]


@settings(max_examples=200, deadline=None)
@given(
    a=st.floats(-10, 10, allow_nan=False),
    b=st.floats(-10, 10, allow_nan=False),
    k=st.integers(0, 5),
)
def test_polynomial_power_rule(a, b, k):
    e = parse(f"(x1 - x2)^{k}", 2)
    d = evaluate(e.diff(1), (a, b))
    assert d == pytest.approx(k * (a - b) ** (k - 1) if k else 0.0, rel=1e-12, abs=1e-12)
