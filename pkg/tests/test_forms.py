import random

import numpy as np
import pytest

from contactlab import expressions as ex
from contactlab import forms
from contactlab.errors import DegreeError, ParseError


def _alpha_standard():
    # dz + x dy
    return forms.one_form(0, ex.X, 1)


def test_parse_one_form_standard():
    f = forms.parse_one_form("dz + x*dy")
    assert f.coefficient((0,)) == ex.ZERO
    assert f.coefficient((1,)) == ex.X
    assert f.coefficient((2,)) == ex.ONE


def test_parse_one_form_subset_terms():
    f = forms.parse_one_form("y*dx")
    assert f.coefficient((0,)) == ex.Y
    assert f.coefficient((1,)) == ex.ZERO


def test_parse_one_form_rejects_nonlinear():
    with pytest.raises(ParseError):
        forms.parse_one_form("dz + dx*dy")
    with pytest.raises(ParseError):
        forms.parse_one_form("sin(dx)")
    with pytest.raises(ParseError):
        forms.parse_one_form("dz + 5")


def test_exterior_derivative_of_standard_form():
    # d(dz + x dy) = dx ^ dy
    d = forms.exterior_derivative(_alpha_standard())
    assert d.degree == 2
    assert forms.forms_equal(d, forms.DifferentialForm(2, {(0, 1): 1}))


def test_exterior_derivative_constant_form_is_zero():
    f = forms.one_form(3, -2, 7)
    d = forms.exterior_derivative(f)
    assert d.is_zero_syntactically()


def test_exterior_derivative_rotational():
    # d(x dy - y dx) = 2 dx ^ dy
    f = forms.one_form(ex.neg(ex.Y), ex.X, 0)
    d = forms.exterior_derivative(f)
    assert forms.forms_equal(d, forms.DifferentialForm(2, {(0, 1): 2}))


def test_exterior_derivative_of_volume_form_errors():
    with pytest.raises(DegreeError):
        forms.exterior_derivative(forms.volume_form(ex.X))


def test_wedge_standard_contact_volume():
    # (dz + x dy) ^ (dx ^ dy) = dz ^ dx ^ dy = +1 dx ^ dy ^ dz
    a = _alpha_standard()
    da = forms.exterior_derivative(a)
    vol = forms.wedge(a, da)
    assert vol.degree == 3
    assert forms.forms_equal(vol, forms.volume_form(1))


def test_wedge_one_form_with_itself_vanishes():
    a = forms.one_form(ex.Y, ex.mul(ex.X, ex.Z), ex.Call("sin", (ex.X,)))
    w = forms.wedge(a, a)
    assert forms.forms_equal(w, forms.zero_form(2))


def test_wedge_rotational_contact_coefficient_two():
    # alpha2 = dz + x dy - y dx has alpha ^ d(alpha) = 2 dx^dy^dz
    a = forms.one_form(ex.neg(ex.Y), ex.X, 1)
    vol = forms.wedge(a, forms.exterior_derivative(a))
    assert forms.forms_equal(vol, forms.volume_form(2))


def _random_form(rng, degree):
    def coeff():
        kind = rng.random()
        if kind < 0.3:
            return ex.Num(rng.randint(-2, 2))
        if kind < 0.6:
            return ex.mul(ex.Sym(rng.choice(["x", "y", "z"])), ex.Sym(rng.choice(["x", "y", "z"])))
        return ex.Call(rng.choice(["sin", "cos"]), (ex.Sym(rng.choice(["x", "y", "z"])),))

    idx_sets = {0: [()], 1: [(0,), (1,), (2,)], 2: [(0, 1), (0, 2), (1, 2)], 3: [(0, 1, 2)]}
    return forms.DifferentialForm(degree, {i: coeff() for i in idx_sets[degree]})


def test_d_of_d_is_zero_randomized():
    rng = random.Random(99)
    for i in range(1000):
        f = _random_form(rng, rng.choice([0, 1]))
        dd = forms.exterior_derivative(forms.exterior_derivative(f))
        env = {
            "x": rng.uniform(-1, 1),
            "y": rng.uniform(-1, 1),
            "z": rng.uniform(-1, 1),
        }
        vals = dd.evaluate(env)
        assert all(abs(c) < 1e-9 for c in vals.values()), (i, str(f))


def test_wedge_graded_commutativity_randomized():
    rng = random.Random(42)
    for _ in range(300):
        da = rng.choice([0, 1, 2])
        db = rng.choice([0, 1])
        if da + db > 3:
            continue
        a = _random_form(rng, da)
        b = _random_form(rng, db)
        ab = forms.wedge(a, b)
        ba = forms.wedge(b, a).scale((-1) ** (da * db))
        env = {n: rng.uniform(-1, 1) for n in ("x", "y", "z")}
        va = ab.evaluate(env)
        vb = ba.evaluate(env)
        for idx in va:
            assert va[idx] == pytest.approx(vb[idx], abs=1e-9)


def test_contract_basics():
    # iota_{e_x} (dx ^ dy) = dy
    two = forms.DifferentialForm(2, {(0, 1): 1})
    c = forms.contract((1, 0, 0), two)
    assert forms.forms_equal(c, forms.one_form(0, 1, 0))
    # iota_{e_y} (dx ^ dy) = -dx
    c2 = forms.contract((0, 1, 0), two)
    assert forms.forms_equal(c2, forms.one_form(-1, 0, 0))


def test_form_apply_to_vectors():
    a = _alpha_standard()
    # alpha(e_z) = 1, alpha(e_y) = x
    assert a.apply({"x": 2.0, "y": 0.0, "z": 0.0}, (0, 0, 1)) == pytest.approx(1.0)
    assert a.apply({"x": 2.0, "y": 0.0, "z": 0.0}, (0, 1, 0)) == pytest.approx(2.0)
    vol = forms.volume_form(1)
    det = vol.apply({"x": 0, "y": 0, "z": 0}, (1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert det == pytest.approx(1.0)


def test_one_form_text_roundtrip():
    f = forms.parse_one_form("dz + x*dy - y*dx")
    text = forms.one_form_to_text(f)
    again = forms.parse_one_form(text)
    assert forms.forms_equal(f, again)
