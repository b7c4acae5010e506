import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import qmc

from holoparabolic import funcs
from holoparabolic.errors import DomainError, ExpressionError, NonFiniteError
from holoparabolic.funcs import Interval, Jet2, ScalarFunction, eval_jet2, hubble, log_second_derivative

P = ScalarFunction.parse

# (expression, interior test interval)
CASES = [
    ("exp(x)", (-3, 3)),
    ("log(x)", (0.1, 10)),
    ("sinh(x)", (-3, 3)),
    ("cosh(x)", (-3, 3)),
    ("tanh(x)", (-3, 3)),
    ("sin(x)", (-6, 6)),
    ("cos(x)", (-6, 6)),
    ("sqrt(x)", (0.05, 9)),
    ("x^2.5", (0.05, 4)),
    ("x^(2/3)", (0.05, 4)),
    ("2^x", (-3, 3)),
    ("x^x", (0.1, 3)),
    ("x/(1 + x^2)", (-4, 4)),
    ("-x^3 + 2*x - 7", (-3, 3)),
    ("pi*x^2 - e", (-3, 3)),
    ("sinh(2*x)/2", (-2, 2)),
    ("x*(1 + x)^0.1", (0.01, 50)),
    ("log(cosh(x))", (-3, 3)),
    ("exp(-x^2)*cos(3*x)", (-2, 2)),
]


def _points(lo, hi, count=100, seed=0):
    return qmc.scale(qmc.Halton(d=1, seed=seed).random(count), lo, hi).ravel()


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@pytest.mark.parametrize("text,box", CASES, ids=[c[0] for c in CASES])
def test_derivatives_match_central_differences(text, box):
    f = P(text)
    for x in _points(*box):
        h = 1e-5 * max(1.0, abs(x))
        v, d1, d2 = f.jet(x)
        fd1 = (f(x + h) - f(x - h)) / (2 * h)
        # differencing the exact first derivative keeps round-off out of the second
        fd2 = (f.derivative(x + h) - f.derivative(x - h)) / (2 * h)
        assert abs(d1 - fd1) <= 1e-6 * max(abs(d1), 1e-3 * max(1.0, abs(v))), (x, d1, fd1)
        assert abs(d2 - fd2) <= 1e-6 * max(abs(d2), 1e-3 * max(1.0, abs(d1))), (x, d2, fd2)


def test_table_derivatives_match_central_differences():
    xs = np.linspace(0, 4, 9)
    f = ScalarFunction.table(np.column_stack([xs, np.sin(xs) + xs]))
    for x in _points(0.01, 3.99):
        h = 1e-5 * max(1.0, abs(x))
        assert _rel(f.derivative(x), (f(x + h) - f(x - h)) / (2 * h)) < 1e-6


def test_table_is_continuous_at_knots():
    xs = np.array([0.0, 0.3, 1.0, 1.7, 2.0, 3.5])
    f = ScalarFunction.table(np.column_stack([xs, np.exp(-xs) * np.cos(2 * xs)]))
    for k in xs[1:-1]:
        left, right = f.jet(np.nextafter(k, -np.inf)), f.jet(k)
        assert abs(left.value - right.value) < 1e-12
        assert abs(left.d1 - right.d1) < 1e-12
        assert abs(left.d2 - right.d2) < 1e-9  # natural cubic: C2 as well


def test_table_metadata():
    f = ScalarFunction.table([[0, 1], [1, 2], [2, 5]])
    assert f.interpolated
    assert not P("exp(t)").interpolated
    assert f.domain == Interval(0.0, 2.0, True, True)
    assert f(1.0) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        f(2.5)


@pytest.mark.parametrize("text,x,expected", [
    ("exp(x)", 0.0, (1, 1, 1)),
    ("sinh(x)", 0.0, (0, 1, 0)),
    ("r^3", 2.0, (8, 12, 12)),
])
def test_eval_jet2_examples(text, x, expected):
    assert tuple(eval_jet2(P(text), x)) == pytest.approx(expected, abs=1e-15)


def test_log_second_derivative_examples():
    assert log_second_derivative(P("exp(t)"), 5.0) == pytest.approx(0.0, abs=1e-12)
    t = P("t", domain="(0, inf)")
    assert log_second_derivative(t, 2.0) == pytest.approx(-0.25, rel=1e-15)
    # f''/f - (f'/f)^2 at 0 for cosh is 1 - 0
    assert log_second_derivative(P("cosh(t)"), 0.0) == 1.0


def test_hubble_examples():
    assert hubble(P("exp(t)"), 3.0) == pytest.approx(1.0, rel=1e-15)
    assert hubble(P("t^(2/3)", domain="(0, inf)"), 1.0) == pytest.approx(2 / 3, rel=1e-15)
    assert hubble(ScalarFunction.constant(5.0), 0.0) == 0.0


def test_nonpositive_function_rejected_by_log_derivatives():
    with pytest.raises(DomainError):
        hubble(P("t - 1"), 0.5)
    with pytest.raises(DomainError):
        log_second_derivative(P("sin(t)"), 4.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        P("log(x)")(-1.0)
    with pytest.raises(DomainError):
        P("sqrt(x)")(-0.5)
    with pytest.raises(DomainError):
        P("x^0.5", domain="(0, inf)")(0.0)
    with pytest.raises(DomainError):
        P("1/x")(0.0)


def test_overflow_is_signalled():
    with pytest.raises(NonFiniteError):
        P("exp(x)")(1000.0)
    with pytest.raises(NonFiniteError):
        P("exp(x)").jet(np.array([1.0, 800.0]))


@pytest.mark.parametrize("text", ["exp(", "x +", "foo(x)", "x*y", "exp(x, 2)", "x[0]", "lambda: 1", ""])
def test_malformed_expressions(text):
    with pytest.raises(ExpressionError):
        P(text)


def test_caret_binds_tighter_than_product():
    assert P("2*x^2")(3.0) == 18.0
    assert P("x*(1+x)^0.1")(2.0) == pytest.approx(2 * 3**0.1)


def test_vectorised_evaluation_matches_scalar():
    f = P("sinh(r)^2 / (1 + r)")
    xs = np.linspace(0.1, 3, 17)
    jet = f.jet(xs)
    for i, x in enumerate(xs):
        s = f.jet(x)
        assert (jet.value[i], jet.d1[i], jet.d2[i]) == pytest.approx(tuple(s), rel=1e-15)


def test_config_round_trip():
    for spec in ["exp(t)", {"expr": "t^(2/3)", "domain": "(0.0, inf)"}, {"table": [[0.0, 1.0], [1.0, 3.0], [2.0, 2.0]]}]:
        f = ScalarFunction.from_config(spec)
        g = ScalarFunction.from_config(f.to_config())
        for x in (0.5, 1.25, 1.9):
            assert tuple(g.jet(x)) == pytest.approx(tuple(f.jet(x)), rel=1e-15)
        assert g.domain == f.domain


def test_algebra_intersects_domains():
    f = P("sqrt(x)", domain="(0, inf)") + P("x", domain="[-1, 4]")
    assert f.domain == Interval(0.0, 4.0, False, True)
    g = 2 * P("x") ** 2 - 1
    assert tuple(g.jet(3.0)) == (17.0, 12.0, 4.0)


def test_interval_parsing():
    assert Interval.parse("(0, inf)") == Interval(0.0, math.inf)
    assert Interval.parse("[1, 2)") == Interval(1.0, 2.0, True, False)
    assert Interval.parse([None, 3]) == Interval(-math.inf, 3.0, False, True)
    with pytest.raises(ValueError):
        Interval.parse("[3, 1]")


def test_emitted_source_matches_jet():
    for text in ["sinh(2*x)/2", "x*(1 + x)^0.1", "log(1 + x^2) - cos(x)"]:
        f = P(text)
        src, glb = f.emit_source("g")
        ns = dict(glb, math=math)
        exec(src, ns)
        for x in (0.3, 1.7, 4.2):
            v, d = ns["g"](x)
            assert v == pytest.approx(f(x), rel=1e-14)
            assert d == pytest.approx(f.derivative(x), rel=1e-14)


coef = st.floats(-5, 5, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(coef, coef, coef, st.floats(-3, 3))
def test_quadratics_exact(a, b, c, x):
    v, d1, d2 = P(f"{a!r}*x^2 + {b!r}*x + {c!r}").jet(x)
    assert v == pytest.approx(a * x * x + b * x + c, abs=1e-12)
    assert d1 == pytest.approx(2 * a * x + b, abs=1e-12)
    assert d2 == pytest.approx(2 * a, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([c[0] for c in CASES]), st.sampled_from([c[0] for c in CASES]), st.floats(0.2, 2.0))
def test_product_rule(p, q, x):
    f, g = P(p), P(q)
    fg = f * g
    jf, jg = f.jet(x), g.jet(x)
    expected = jf * jg
    got = fg.jet(x)
    for a, b in zip(got, expected):
        assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(CASES))
def test_string_form_reparses(case):
    text, box = case
    f = P(text)
    g = P(str(f))
    for x in _points(*box, count=5, seed=3):
        assert g(x) == pytest.approx(f(x), rel=1e-13)


def test_jet_arithmetic():
    a, b = Jet2(2.0, 3.0, 4.0), Jet2(1.0, -1.0, 0.5)
    # (fg)'' = f''g + 2f'g' + fg''
    assert tuple(a * b) == (2.0, 1.0, -1.0)
    assert tuple(a - b) == (1.0, 4.0, 3.5)
    assert tuple(-a) == (-2.0, -3.0, -4.0)


def test_public_names():
    assert set(funcs.__all__) >= {"ScalarFunction", "Jet2", "eval_jet2", "log_second_derivative", "hubble"}
