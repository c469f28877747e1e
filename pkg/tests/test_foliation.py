import math

import numpy as np
import pytest

from contactlab import contact, foliation, surfaces
from contactlab import expressions as ex
from contactlab.errors import NumericalError, SurfaceError


@pytest.fixture(scope="module")
def alpha1():
    return contact.standard_contact_form()


@pytest.fixture(scope="module")
def alpha2():
    return contact.rotational_contact_form()


@pytest.fixture(scope="module")
def alpha3():
    return contact.twisted_contact_form()


# -- pullback ----------------------------------------------------------------


def test_pullback_yz_plane_nonvanishing(alpha1):
    surf = surfaces.plane_chart("yz")
    pb = foliation.pullback(alpha1, surf)
    # beta = 2 dv on this chart: no u-component, constant v-component
    us = np.linspace(0.05, 0.95, 7)
    for u in us:
        b1, b2 = pb.beta_at(float(u), 0.37)
        assert float(b1) == pytest.approx(0.0, abs=1e-12)
        assert float(b2) == pytest.approx(2.0, abs=1e-12)


def test_pullback_annihilates_directing_field(alpha2):
    surf = surfaces.unit_sphere()
    pb = foliation.pullback(alpha2, surf)
    for u in (0.2, 0.5, 0.77):
        for v in (0.1, 0.6):
            b1, b2 = pb.beta_at(u, v)
            w1, w2 = pb.field_at(u, v)
            assert float(b1) * float(w1) + float(b2) * float(w2) == pytest.approx(0.0, abs=1e-12)


def test_pullback_sphere_vanishes_only_at_poles(alpha2):
    surf = surfaces.unit_sphere()
    pb = foliation.pullback(alpha2, surf)
    us = np.linspace(0.04, 0.96, 25)
    vs = np.linspace(0.0, 1.0, 16, endpoint=False)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    b1, b2 = pb.beta_at(uu, vv)
    assert float(np.min(np.hypot(b1, b2))) > 1e-3
    near_pole1, near_pole2 = pb.beta_at(1e-7, 0.3)
    assert math.hypot(float(near_pole1), float(near_pole2)) < 1e-5


def test_pullback_rejects_undeclared_degeneracy(alpha1):
    # a chart that folds: sigma_u x sigma_v = 0 along a line
    surf = surfaces.Surface(
        (ex.parse_expression("(u - 1/2)^2"), ex.parse_expression("v"), ex.parse_expression("0")),
        (False, False),
        "disk",
    )
    with pytest.raises(SurfaceError):
        foliation.pullback(alpha1, surf)


# -- singularities -----------------------------------------------------------


def test_sphere_in_rotational_form_two_elliptic_poles(alpha2):
    surf = surfaces.unit_sphere()
    pb = foliation.pullback(alpha2, surf)
    sings, loci = foliation.find_singularities(pb)
    assert loci == []
    assert len(sings) == 2
    by_sign = {s.sign: s for s in sings}
    assert set(by_sign) == {1, -1}
    north, south = by_sign[1], by_sign[-1]
    assert np.allclose(north.xyz, (0, 0, 1), atol=1e-6)
    assert np.allclose(south.xyz, (0, 0, -1), atol=1e-6)
    assert north.kind == "elliptic" and south.kind == "elliptic"
    assert north.is_source is True
    assert south.is_source is False


def test_xy_plane_in_standard_form_degenerate_line(alpha1):
    surf = surfaces.plane_chart("xy")
    pb = foliation.pullback(alpha1, surf)
    sings, loci = foliation.find_singularities(pb)
    assert sings == []
    assert len(loci) == 1
    us = [p[0] for p in loci[0].points]
    vs = [p[1] for p in loci[0].points]
    assert max(abs(u - 0.5) for u in us) < 0.05  # the line x = 0
    assert max(vs) - min(vs) > 0.8  # spans the chart


def test_yz_plane_no_singularities(alpha1):
    surf = surfaces.plane_chart("yz")
    pb = foliation.pullback(alpha1, surf)
    sings, loci = foliation.find_singularities(pb)
    assert sings == [] and loci == []


def test_paraboloid_single_positive_elliptic_source(alpha1):
    surf = surfaces.paraboloid_cap(0.05)
    pb = foliation.pullback(alpha1, surf)
    sings, loci = foliation.find_singularities(pb)
    assert loci == []
    assert len(sings) == 1
    s = sings[0]
    assert s.kind == "elliptic"
    assert s.sign == 1
    assert s.is_source is True
    assert np.allclose(s.uv, (0.5, 0.5), atol=1e-8)
    assert s.residual < 1e-9


def test_torus_graph_nonsingular(alpha1):
    surf = surfaces.graph_torus()
    pb = foliation.pullback(alpha1, surf)
    sings, loci = foliation.find_singularities(pb)
    assert sings == [] and loci == []


# -- leaves ------------------------------------------------------------------


def test_yz_plane_leaves_are_horizontal_lines(alpha1):
    surf = surfaces.plane_chart("yz")
    pb = foliation.pullback(alpha1, surf)
    leaf = foliation.integrate_leaf(pb, (0.2, 0.4))
    pts = np.array(leaf.points)
    assert np.max(np.abs(pts[:, 1] - 0.4)) < 1e-9  # v stays constant
    assert pts[-1, 0] > pts[0, 0]  # flows toward +u = +y
    assert leaf.stop_reason == "boundary"


def test_sphere_leaves_flow_source_to_sink(alpha2):
    surf = surfaces.unit_sphere()
    pb = foliation.pullback(alpha2, surf)
    leaf = foliation.integrate_leaf(pb, (0.5, 0.25), max_length=12.0)
    pts = np.array(leaf.points)
    # forward limit is the negative pole (u = 1, the sink)
    assert pts[-1, 0] > 0.97
    assert leaf.stop_reason == "singularity"


def test_leaf_seed_at_singularity_rejected(alpha2):
    surf = surfaces.unit_sphere()
    pb = foliation.pullback(alpha2, surf)
    with pytest.raises(NumericalError):
        foliation.integrate_leaf(pb, (1e-9, 0.0))


def test_orientation_reversal_flips_leaves_and_signs(alpha2):
    surf = surfaces.unit_sphere()
    pb_pos = foliation.pullback(alpha2, surf)
    pb_neg = foliation.pullback(alpha2.scale(-1), surf)
    for uv in ((0.3, 0.1), (0.6, 0.8)):
        w_pos = np.array([float(c) for c in pb_pos.field_at(*uv)])
        w_neg = np.array([float(c) for c in pb_neg.field_at(*uv)])
        assert np.allclose(w_pos, -w_neg, atol=1e-12)
    s_pos, _ = foliation.find_singularities(pb_pos)
    s_neg, _ = foliation.find_singularities(pb_neg)
    pos_by_z = {round(s.xyz[2]): s for s in s_pos}
    neg_by_z = {round(s.xyz[2]): s for s in s_neg}
    for zkey in (1, -1):
        assert pos_by_z[zkey].kind == neg_by_z[zkey].kind == "elliptic"
        assert pos_by_z[zkey].sign == -neg_by_z[zkey].sign


# -- closed leaves -----------------------------------------------------------


def test_torus_graph_two_closed_leaves(alpha1):
    surf = surfaces.graph_torus()  # x = sin(2 pi z)
    pb = foliation.pullback(alpha1, surf)
    closed = foliation.detect_closed_leaves(pb)
    assert len(closed) == 2
    zs = sorted(np.median([p[1] for p in leaf.points]) for leaf in closed)
    assert zs[0] == pytest.approx(0.0, abs=1e-4)
    assert zs[1] == pytest.approx(0.5, abs=1e-4)
    for leaf in closed:
        assert leaf.period == pytest.approx(1.0, abs=0.02)


def test_yz_plane_no_closed_leaves(alpha1):
    surf = surfaces.plane_chart("yz")
    pb = foliation.pullback(alpha1, surf)
    assert foliation.detect_closed_leaves(pb) == []


def test_pushed_up_disk_boundary_limit_cycle(alpha3):
    surf = surfaces.pushed_up_disk(radius=math.pi, bump=0.1)
    pb = foliation.pullback(alpha3, surf)
    closed = foliation.detect_closed_leaves(pb)
    assert closed
    leaf = closed[0]
    # the cycle is the boundary circle u = 1
    assert all(abs(p[0] - 1.0) < 1e-3 for p in leaf.points)
    assert leaf.period == pytest.approx(1.0, abs=0.05)


# -- census and genus bound --------------------------------------------------


def test_sphere_census_and_genus_bound(alpha2):
    surf = surfaces.unit_sphere()
    pb = foliation.pullback(alpha2, surf)
    sings, loci = foliation.find_singularities(pb)
    report = foliation.census_and_counts(sings, surf, degenerate_loci=loci)
    assert report.census == {"e_plus": 1, "e_minus": 1, "h_plus": 0, "h_minus": 0}
    assert report.chi_computed == 2
    assert report.euler_class_computed == 0
    assert report.consistency == "CONSISTENT"
    bound = foliation.check_genus_bound(report, surf)
    assert bound == {
        "lhs": 0,
        "rhs": 0,
        "satisfied": True,
        "overtwisted_witness_candidate": False,
    }


def test_torus_census_consistent(alpha1):
    surf = surfaces.graph_torus()
    pb = foliation.pullback(alpha1, surf)
    sings, loci = foliation.find_singularities(pb)
    report = foliation.census_and_counts(sings, surf, degenerate_loci=loci)
    assert report.chi_computed == 0
    assert report.euler_class_computed == 0
    assert report.consistency == "CONSISTENT"
    bound = foliation.check_genus_bound(report, surf)
    assert bound["satisfied"]


def test_genus_bound_rejects_open_surface(alpha1):
    surf = surfaces.plane_chart("yz")
    pb = foliation.pullback(alpha1, surf)
    report = foliation.census_and_counts([], surf)
    assert report.consistency == "NOT_APPLICABLE"
    with pytest.raises(SurfaceError):
        foliation.check_genus_bound(report, surf)


def test_hypothetical_violating_census_flags_witness():
    # census (2, 0, 0, 0) on a sphere: chi = 2 is fine but e = 2 > 0
    surf = surfaces.unit_sphere()
    fake = [
        foliation.Singularity(
            uv=(0.1 * k, 0.1),
            xyz=(0, 0, 1),
            kind="elliptic",
            sign=1,
            is_source=True,
            eigenvalues=(1 + 0j, 1 + 0j),
            det=1.0,
            trace=2.0,
            residual=0.0,
        )
        for k in range(2)
    ]
    report = foliation.census_and_counts(fake, surf)
    assert report.euler_class_computed == 2
    bound = foliation.check_genus_bound(report, surf)
    assert not bound["satisfied"]
    assert bound["overtwisted_witness_candidate"]


def test_degenerate_census_skips_counts(alpha1):
    surf = surfaces.plane_chart("xy")
    pb = foliation.pullback(alpha1, surf)
    sings, loci = foliation.find_singularities(pb)
    report = foliation.census_and_counts(sings, surf, degenerate_loci=loci)
    assert report.consistency == "DEGENERATE"
    assert report.chi_computed is None


# -- overtwisted witnesses ---------------------------------------------------


def test_flat_disk_in_twisted_form_all_singular_boundary(alpha3):
    surf = surfaces.polar_disk(radius=math.pi)
    out = foliation.overtwisted_witness(surf, alpha3)
    assert out["found"]
    assert out["evidence"]["kind"] == "singular-boundary"


def test_pushed_up_disk_reports_closed_boundary_leaf(alpha3):
    surf = surfaces.pushed_up_disk(radius=math.pi, bump=0.1)
    out = foliation.overtwisted_witness(surf, alpha3)
    assert out["found"]
    assert out["evidence"]["kind"] == "closed-boundary-leaf"
    assert out["evidence"]["closed_leaves"]  # period was detected
    assert out["evidence"]["closed_leaves"][0]["period"] == pytest.approx(1.0, abs=0.05)


def test_tight_disk_has_no_witness(alpha1):
    surf = surfaces.paraboloid_cap(0.05)
    out = foliation.overtwisted_witness(surf, alpha1)
    assert not out["found"]


# -- euler class stability over grids ---------------------------------------


def test_euler_class_invariant_across_grids(alpha2):
    surf = surfaces.unit_sphere()
    pb = foliation.pullback(alpha2, surf)
    values = []
    for grid in (32, 64, 128):
        sings, loci = foliation.find_singularities(pb, grid=grid)
        report = foliation.census_and_counts(sings, surf, degenerate_loci=loci)
        values.append(report.euler_class_computed)
    assert values == [0, 0, 0]


# -- poincare-hopf on perturbed surfaces (small version; full in acceptance) --


def test_poincare_hopf_perturbed_surfaces(alpha1, alpha2):
    rng = np.random.default_rng(12)
    for case in range(6):
        coeffs = [(rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02))]
        sphere = surfaces.perturbed_sphere(coeffs)
        pb = foliation.pullback(alpha2, sphere)
        sings, loci = foliation.find_singularities(pb)
        report = foliation.census_and_counts(sings, sphere, degenerate_loci=loci)
        assert report.consistency == "CONSISTENT", (case, report.census)
        for s in report.singularities:
            if s.kind == "elliptic":
                assert (s.sign > 0) == s.is_source
    for case in range(3):
        amp = rng.uniform(0.01, 0.2)
        torus = surfaces.graph_torus(f"sin(2*pi*v) + {amp!r}*cos(2*pi*u)*sin(2*pi*v)")
        pb = foliation.pullback(alpha1, torus)
        sings, loci = foliation.find_singularities(pb)
        report = foliation.census_and_counts(sings, torus, degenerate_loci=loci)
        assert report.consistency == "CONSISTENT"
