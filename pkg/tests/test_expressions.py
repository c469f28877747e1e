import math
import random

import numpy as np
import pytest

from contactlab import expressions as ex
from contactlab.errors import ParseError


def test_parse_basic_arithmetic():
    e = ex.parse_expression("1 + 2*3")
    assert e.evaluate({}) == 7.0


def test_parse_zero():
    e = ex.parse_expression("0")
    assert isinstance(e, ex.Num)
    assert e.value == 0


def test_parse_variables_and_power():
    e = ex.parse_expression("x^2 + y^2")
    assert e.evaluate({"x": 3.0, "y": 4.0}) == 25.0


def test_parse_unary_minus():
    e = ex.parse_expression("-x + 1")
    assert e.evaluate({"x": 2.0}) == -1.0


def test_parse_pi():
    e = ex.parse_expression("cos(pi)")
    assert e.evaluate({}) == pytest.approx(-1.0)


def test_parse_decimal_is_exact():
    e = ex.parse_expression("0.5 * 4")
    assert e.evaluate({}) == 2.0


def test_syntax_error_reports_offset():
    with pytest.raises(ParseError) as ei:
        ex.parse_expression("x + $")
    assert ei.value.location == 4


def test_unknown_identifier():
    with pytest.raises(ParseError) as ei:
        ex.parse_expression("x + w")
    assert "unknown identifier" in str(ei.value)


def test_arity_mismatch():
    with pytest.raises(ParseError) as ei:
        ex.parse_expression("sin(x, y)")
    assert ei.value.rule == "arity"


def test_atan2_two_args():
    e = ex.parse_expression("atan2(y, x)")
    assert e.evaluate({"x": 1.0, "y": 1.0}) == pytest.approx(math.pi / 4)


def test_sinc_at_zero_is_one():
    e = ex.parse_expression("sinc(sqrt(x^2+y^2))")
    assert e.evaluate({"x": 0.0, "y": 0.0}) == pytest.approx(1.0)


def test_sinc_matches_series_away_from_zero():
    e = ex.parse_expression("sinc(t)")
    for t in (0.3, 1.0, 2.5, -1.7):
        series = sum((-1) ** m * t ** (2 * m) / math.factorial(2 * m + 1) for m in range(18))
        assert e.evaluate({"t": t}) == pytest.approx(series, rel=1e-12)


def test_roundtrip_print_parse():
    texts = [
        "x + y*z",
        "sin(x)*cos(y) - exp(z)",
        "sqrt(x^2 + 1)/2",
        "atan2(y, x) + sinc(t)",
        "1/3 + x^-2",
    ]
    for text in texts:
        e = ex.parse_expression(text)
        again = ex.parse_expression(str(e))
        assert again == e, text


def test_roundtrip_of_derivative_trees():
    e = ex.parse_expression("sinc(sqrt(x^2+y^2))").partial("x")
    again = ex.parse_expression(str(e))
    env = {"x": 0.7, "y": -0.4}
    assert again.evaluate(env) == pytest.approx(e.evaluate(env), rel=1e-12)


def _random_expr(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return ex.Sym(rng.choice(["x", "y", "z"]))
        return ex.Num(rng.randint(-3, 3))
    kind = rng.choice(["+", "-", "*", "/", "^", "sin", "cos", "exp", "sqrt", "sinc", "atan2"])
    a = _random_expr(rng, depth - 1)
    if kind == "+":
        return ex.add(a, _random_expr(rng, depth - 1))
    if kind == "-":
        return ex.sub(a, _random_expr(rng, depth - 1))
    if kind == "*":
        return ex.mul(a, _random_expr(rng, depth - 1))
    if kind == "/":
        return ex.div(a, _random_expr(rng, depth - 1))
    if kind == "^":
        return ex.power(a, rng.randint(1, 3))
    if kind == "sqrt":
        # keep the argument positive so points stay smooth
        return ex.Call("sqrt", (ex.add(ex.mul(a, a), ex.Num(1)),))
    if kind == "atan2":
        return ex.Call("atan2", (a, ex.add(ex.mul(a, a), ex.Num(1))))
    return ex.Call(kind, (a,))


def _smooth_points(e, rng, n):
    pts = []
    tries = 0
    while len(pts) < n and tries < n * 60:
        tries += 1
        env = {name: rng.uniform(-1.4, 1.4) for name in ("x", "y", "z")}
        try:
            val = e.evaluate(env)
        except (ValueError, ZeroDivisionError, OverflowError):
            continue
        if not np.isfinite(val) or abs(val) > 1e6:
            continue
        pts.append(env)
    return pts


def test_symbolic_derivative_matches_finite_differences():
    rng = random.Random(2024)
    checked = 0
    for _ in range(60):
        e = _random_expr(rng, 3)
        for var in ("x", "y"):
            de = e.partial(var)
            for env in _smooth_points(e, rng, 4):
                try:
                    sym = de.evaluate(env)
                    fd = ex.finite_difference(e, var, env)
                    fd_fine = ex.finite_difference(e, var, env, h=1e-6)
                except (ValueError, ZeroDivisionError, OverflowError):
                    continue
                if not (np.isfinite(sym) and np.isfinite(fd)) or abs(sym) > 1e5:
                    continue
                # a point only counts as smooth if the finite difference
                # itself has converged at this step size
                if abs(fd - fd_fine) > 1e-7 * (1 + abs(fd)):
                    continue
                assert sym == pytest.approx(fd, rel=1e-6, abs=2e-6)
                checked += 1
    assert checked >= 100


def test_compiled_matches_tree_eval():
    rng = random.Random(5)
    for _ in range(25):
        e = _random_expr(rng, 3)
        fn = e.compile(("x", "y", "z"))
        pts = _smooth_points(e, rng, 5)
        if not pts:
            continue
        xs = np.array([p["x"] for p in pts])
        ys = np.array([p["y"] for p in pts])
        zs = np.array([p["z"] for p in pts])
        got = np.asarray(fn(xs, ys, zs), dtype=float)
        want = np.array([e.evaluate(p) for p in pts])
        ok = np.isfinite(want)
        assert np.allclose(got[ok], want[ok], rtol=1e-10, atol=1e-10)


def test_subst_composes():
    e = ex.parse_expression("x^2 + z")
    composed = e.subst({"x": ex.parse_expression("u + v"), "z": ex.parse_expression("u*v")})
    assert composed.evaluate({"u": 2.0, "v": 3.0}) == pytest.approx(25 + 6)


def test_sinc_derivative_values():
    # sinc'(t) = (t cos t - sin t)/t^2, sinc'(0) = 0
    assert ex.sinc_derivative(1, 0.0) == pytest.approx(0.0, abs=1e-15)
    for t in (1e-4, 0.2, 0.9, 3.0):
        direct = (t * math.cos(t) - math.sin(t)) / t**2
        assert ex.sinc_derivative(1, t) == pytest.approx(direct, rel=1e-9, abs=1e-12)
    # second derivative at 0 is -1/3
    assert ex.sinc_derivative(2, 0.0) == pytest.approx(-1.0 / 3.0)
