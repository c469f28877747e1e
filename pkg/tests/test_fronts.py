import pytest

from contactlab import fronts
from contactlab.errors import FrontError


def test_parse_minimal_unknot():
    w = fronts.parse_front("L1 R1")
    assert w.events == (("L", 1), ("R", 1))
    assert w.profile == (0, 2, 0)


def test_parse_trefoil_profile():
    w = fronts.parse_front(fronts.TREFOIL)
    assert w.profile == (0, 2, 4, 4, 4, 4, 2, 0)


def test_parse_right_cusp_out_of_range():
    with pytest.raises(FrontError) as ei:
        fronts.parse_front("L1 R2")
    assert ei.value.location == 2
    assert "out of range" in str(ei.value)


def test_parse_rejects_bad_token():
    with pytest.raises(FrontError) as ei:
        fronts.parse_front("L1 Q3 R1")
    assert ei.value.location == 2


def test_parse_rejects_open_word():
    with pytest.raises(FrontError) as ei:
        fronts.parse_front("L1 L1")
    assert ei.value.rule == "closure"


def test_parse_rejects_split_link():
    # nested saucers: two components
    with pytest.raises(FrontError) as ei:
        fronts.parse_front("L1 L2 R2 R1")
    assert ei.value.rule == "components"


def test_text_roundtrip():
    for text in ("L1 R1", fronts.TREFOIL, fronts.STABILIZED_UNKNOT):
        w = fronts.parse_front(text)
        assert fronts.parse_front(w.to_text()).events == w.events


def test_unknot_invariants():
    inv = fronts.invariants(fronts.parse_front("L1 R1"))
    assert (inv.w, inv.c, inv.tb, inv.r) == (0, 2, -1, 0)
    assert inv.c_u == 1 and inv.c_d == 1
    assert inv.l_plus == -1 and inv.l_minus == -1


def test_trefoil_invariants():
    inv = fronts.invariants(fronts.parse_front(fronts.TREFOIL))
    assert inv.w == 3
    assert inv.c == 4
    assert (inv.tb, inv.r) == (1, 0)


def test_stabilized_unknot_invariants():
    inv = fronts.invariants(fronts.parse_front(fronts.STABILIZED_UNKNOT))
    assert (inv.c, inv.w, inv.tb, abs(inv.r)) == (4, 0, -2, 1)


def test_orientation_reversal_negates_r():
    for text in ("L1 R1", fronts.TREFOIL, fronts.STABILIZED_UNKNOT):
        word = fronts.parse_front(text)
        fwd = fronts.invariants(fronts.OrientedFront.orient(word))
        rev = fronts.invariants(fronts.OrientedFront.orient(word, reverse=True))
        assert fwd.w == rev.w
        assert fwd.tb == rev.tb
        assert fwd.r == -rev.r
        assert (fwd.l_plus, fwd.l_minus) == (rev.l_minus, rev.l_plus)


def test_pushoff_identities():
    for text in ("L1 R1", fronts.TREFOIL, fronts.STABILIZED_UNKNOT):
        inv = fronts.invariants(fronts.parse_front(text))
        assert inv.l_plus + inv.l_minus == 2 * inv.tb
        assert inv.l_plus - inv.l_minus == -2 * inv.r


def test_unknot_diagram_has_no_crossings():
    d = fronts.underlying_diagram(fronts.parse_front("L1 R1"))
    assert d.crossings == ()
    assert d.arc_count == 1


def test_stabilized_unknot_diagram_no_crossings():
    d = fronts.underlying_diagram(fronts.parse_front(fronts.STABILIZED_UNKNOT))
    assert d.crossings == ()


def test_trefoil_diagram_three_positive_crossings():
    d = fronts.underlying_diagram(fronts.parse_front(fronts.TREFOIL))
    assert len(d.crossings) == 3
    assert all(c.sign == 1 for c in d.crossings)
    assert d.arc_count == 6
    # every arc appears exactly once as input and once as output
    ins = sorted([c.over_in for c in d.crossings] + [c.under_in for c in d.crossings])
    outs = sorted([c.over_out for c in d.crossings] + [c.under_out for c in d.crossings])
    assert ins == list(range(6)) and outs == list(range(6))


def test_invariant_json_fields():
    inv = fronts.invariants(fronts.parse_front("L1 R1"))
    assert inv.to_json() == {
        "w": 0,
        "c": 2,
        "c_u": 1,
        "c_d": 1,
        "tb": -1,
        "r": 0,
        "l_plus": -1,
        "l_minus": -1,
    }
