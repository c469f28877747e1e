import math

import numpy as np
import pytest

from contactlab import approx, fronts, seifert, spacecurve
from contactlab.errors import FrontError, NumericalError

from oracles import bracket_value


def _circle(n=400, radius=1.0):
    ts = np.linspace(0, 2 * math.pi, n, endpoint=False)
    return np.column_stack(
        [np.zeros_like(ts), radius * np.cos(ts), radius * np.sin(ts)]
    )


def test_round_unknot_within_epsilon():
    res = approx.legendrian_approximate(_circle(), epsilon=0.1)
    assert res.hausdorff < 0.1
    assert res.curve.legendrian_residual() < 1e-9
    inv = fronts.invariants(res.front)
    assert inv.tb <= -1
    assert res.front.crossing_count() == 0  # planar circle: cusps only


def test_round_trip_of_legendrian_curves_preserves_invariants():
    for text in ("L1 R1", fronts.TREFOIL, fronts.STABILIZED_UNKNOT):
        word = fronts.parse_front(text)
        curve = spacecurve.to_space_curve(word, samples_per_segment=20)
        res = approx.legendrian_approximate(curve.to_json(), epsilon=0.1)
        base = fronts.invariants(word)
        out = fronts.invariants(res.front)
        assert (out.tb, out.r) == (base.tb, base.r), text
        assert res.hausdorff < 0.1


def test_round_trip_recovers_the_exact_word():
    word = fronts.parse_front(fronts.TREFOIL)
    curve = spacecurve.to_space_curve(word, samples_per_segment=20)
    res = approx.legendrian_approximate(curve.to_json(), epsilon=0.1)
    assert res.front.events == word.events


def test_nonplanar_unknot():
    ts = np.linspace(0, 2 * math.pi, 300, endpoint=False)
    wavy = np.column_stack([0.3 * np.sin(2 * ts), np.cos(ts), np.sin(ts)])
    res = approx.legendrian_approximate(wavy, epsilon=0.15)
    assert res.hausdorff < 0.15
    assert res.curve.legendrian_residual() < 1e-9
    sd = seifert.seifert_surface(fronts.underlying_diagram(res.front))
    assert sd.genus == 0  # stays an unknot


def test_approximation_preserves_knot_type_of_trefoil():
    word = fronts.parse_front(fronts.TREFOIL)
    curve = spacecurve.to_space_curve(word, samples_per_segment=24)
    res = approx.legendrian_approximate(curve.to_json(), epsilon=0.08)
    d_in = fronts.underlying_diagram(word)
    d_out = fronts.underlying_diagram(res.front)
    assert abs(bracket_value(d_in) - bracket_value(d_out)) < 1e-8


def test_zero_epsilon_rejected():
    with pytest.raises(FrontError):
        approx.legendrian_approximate(_circle(), epsilon=0.0)
    with pytest.raises(FrontError):
        approx.legendrian_approximate(_circle(), epsilon=-1.0)


def test_event_budget_error_mentions_achievable():
    with pytest.raises(NumericalError) as ei:
        approx.legendrian_approximate(_circle(), epsilon=0.004, max_events=200)
    assert "budget" in (ei.value.rule or "")
    assert "achiev" in str(ei.value)


def test_degenerate_input_rejected():
    with pytest.raises(FrontError):
        approx.legendrian_approximate([[0, 0, 0], [0, 0, 0]], epsilon=0.1)


def test_smaller_epsilon_smaller_distance():
    d_coarse = approx.legendrian_approximate(_circle(), epsilon=0.2).hausdorff
    d_fine = approx.legendrian_approximate(_circle(), epsilon=0.05).hausdorff
    assert d_fine < d_coarse < 0.2
    assert d_fine < 0.05


def test_hausdorff_helper_symmetry():
    a = _circle(60)
    b = _circle(60, radius=1.3)
    d = approx.hausdorff_distance(a, b)
    assert d == pytest.approx(0.3, abs=0.01)
