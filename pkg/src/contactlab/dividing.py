"""Candidate dividing sets and convex-torus standard form.

The candidate multi-curve is the zero contour of h = div W (with respect
to the chart area form du^dv), extracted by marching squares and refined
by bisection.  The candidate is then checked against the defining
conditions of a dividing set: the complement splits into sign-definite
regions, the foliation crosses the curve transversally (pointing out of
the positive region), and div W is bounded away from zero on the region
samples.  Certification is sound even though the candidate construction
is heuristic; any failed condition is reported with its margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expressions as ex
from .foliation import PulledBackForm, find_singularities
from .errors import DomainError
from .surfaces import Surface

DIVIDING_DEFAULTS = {
    "grid": 96,
    "contour_refine": 1e-8,
    "transversality_angle": 1e-3,  # radians
    "region_divergence": 1e-6,
    "singularity_clearance": 1e-6,
}


@dataclass(frozen=True)
class DividingCurve:
    points: tuple  # chart polyline (may wrap through periodic edges)
    closed: bool
    homology: tuple  # winding numbers (u-wraps, v-wraps) for periodic charts

    def to_json(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "closed": self.closed,
            "homology": list(self.homology),
        }


@dataclass(frozen=True)
class DividingSetReport:
    curves: tuple
    status: str  # certified | failed
    reason: str
    positive_region_cells: int
    negative_region_cells: int
    certificate: dict
    overtwisted_witness: bool
    tolerances: dict

    def to_json(self) -> dict:
        return {
            "curves": [c.to_json() for c in self.curves],
            "status": self.status,
            "reason": self.reason,
            "positive_region_cells": self.positive_region_cells,
            "negative_region_cells": self.negative_region_cells,
            "certificate": self.certificate,
            "overtwisted_witness": self.overtwisted_witness,
            "tolerances": self.tolerances,
        }


def divergence_expression(pb: PulledBackForm) -> ex.Expr:
    """div W with respect to du^dv: d(W1)/du + d(W2)/dv."""
    return ex.add(pb.w1.partial("u"), pb.w2.partial("v"))


# ---------------------------------------------------------------------------
# marching squares with periodic wrap and bisection refinement


def _marching_segments(h_vals, us, vs, periodic, h_fn, refine_tol):
    """Zero-contour segments per grid cell; vertices refined by bisection."""
    nu, nv = len(us), len(vs)
    iu_max = nu if periodic[0] else nu - 1
    iv_max = nv if periodic[1] else nv - 1
    du = us[1] - us[0]
    dv = vs[1] - vs[0]

    def value(i, j):
        return h_vals[i % nu, j % nv]

    def bisect(p0, v0, p1, v1):
        # refine the zero on the segment p0-p1 (straddling values v0, v1)
        a, b = np.array(p0, dtype=float), np.array(p1, dtype=float)
        fa, fb = v0, v1
        if fa == 0.0:
            return tuple(a)
        if fb == 0.0:
            return tuple(b)
        for _ in range(80):
            if np.linalg.norm(b - a) < refine_tol:
                break
            m = 0.5 * (a + b)
            fm = float(h_fn(m[0], m[1]))
            if fm == 0.0:
                return tuple(m)
            if (fa < 0) != (fm < 0):
                b, fb = m, fm
            else:
                a, fa = m, fm
        return tuple(0.5 * (a + b))

    segments = []
    for i in range(iu_max):
        for j in range(iv_max):
            u0, v0c = us[i], vs[j]
            u1, v1c = u0 + du, v0c + dv
            corners = [
                ((u0, v0c), value(i, j)),
                ((u1, v0c), value(i + 1, j)),
                ((u1, v1c), value(i + 1, j + 1)),
                ((u0, v1c), value(i, j + 1)),
            ]
            idx = 0
            for k, (_, val) in enumerate(corners):
                if val > 0:
                    idx |= 1 << k
            if idx in (0, 15):
                continue
            edges = []
            for k in range(4):
                (pa, va), (pb_, vb) = corners[k], corners[(k + 1) % 4]
                if (va > 0) != (vb > 0):
                    edges.append((k, bisect(pa, va, pb_, vb)))
            if len(edges) == 2:
                segments.append((edges[0][1], edges[1][1]))
            elif len(edges) == 4:
                # ambiguous saddle cell: resolve with the center sample
                center = float(h_fn(u0 + du / 2, v0c + dv / 2))
                e = dict(edges)
                if (center > 0) == (corners[0][1] > 0):
                    segments.append((e[0], e[3]))
                    segments.append((e[1], e[2]))
                else:
                    segments.append((e[0], e[1]))
                    segments.append((e[2], e[3]))
    return segments


def _chain_segments(segments, periodic, snap=1e-6):
    """Join marching-squares segments into polylines (closed or open)."""

    def wrap_key(p):
        u, v = p
        if periodic[0]:
            u %= 1.0
        if periodic[1]:
            v %= 1.0
        return (round(u / snap), round(v / snap))

    adj: dict = {}
    for seg in segments:
        for end, other in ((seg[0], seg[1]), (seg[1], seg[0])):
            adj.setdefault(wrap_key(end), []).append((end, other))

    unused = {id(s): s for s in segments}
    seg_of_ends = {}
    for s in segments:
        seg_of_ends.setdefault(wrap_key(s[0]), []).append(s)
        seg_of_ends.setdefault(wrap_key(s[1]), []).append(s)

    curves = []
    while unused:
        _, seg = unused.popitem()
        chain = [seg[0], seg[1]]
        # extend forward then backward
        for direction in (1, 0):
            while True:
                tip = chain[-1] if direction else chain[0]
                candidates = [
                    s for s in seg_of_ends.get(wrap_key(tip), []) if id(s) in unused
                ]
                if not candidates:
                    break
                nxt = candidates[0]
                del unused[id(nxt)]
                a, b = nxt
                far = b if wrap_key(a) == wrap_key(tip) else a
                # keep the polyline continuous in unwrapped coordinates
                ref = np.array(tip, dtype=float)
                cand = np.array(far, dtype=float)
                for axis in (0, 1):
                    if periodic[axis]:
                        while cand[axis] - ref[axis] > 0.5:
                            cand[axis] -= 1.0
                        while cand[axis] - ref[axis] < -0.5:
                            cand[axis] += 1.0
                if direction:
                    chain.append(tuple(cand))
                else:
                    chain.insert(0, tuple(cand))
        start, end = np.array(chain[0]), np.array(chain[-1])
        gap = end - start
        hom = [0, 0]
        closed = False
        wrapped_gap = gap.copy()
        for axis in (0, 1):
            if periodic[axis]:
                hom[axis] = int(round(gap[axis]))
                wrapped_gap[axis] = gap[axis] - hom[axis]
        if np.linalg.norm(wrapped_gap) < 50 * snap:
            closed = True
        else:
            hom = [0, 0]
        curves.append(DividingCurve(points=tuple(chain), closed=closed, homology=tuple(hom)))
    return curves


# ---------------------------------------------------------------------------
# the certificate


def dividing_set(
    pb: PulledBackForm,
    options: dict | None = None,
) -> DividingSetReport:
    """Candidate dividing set of the characteristic foliation, certified
    against the three defining conditions with quantitative margins."""
    opts = dict(DIVIDING_DEFAULTS)
    opts.update(options or {})
    surface = pb.surface
    grid = int(opts["grid"])
    if grid < 32:
        raise DomainError("dividing-set grid must be at least 32")

    h_expr = divergence_expression(pb)
    h_fn = h_expr.compile(("u", "v"))

    us = (
        np.linspace(0.0, 1.0, grid, endpoint=False)
        if surface.periodic[0]
        else np.linspace(0.0, 1.0, grid)
    )
    vs = (
        np.linspace(0.0, 1.0, grid, endpoint=False)
        if surface.periodic[1]
        else np.linspace(0.0, 1.0, grid)
    )
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    with np.errstate(all="ignore"):
        h_vals = np.asarray(h_fn(uu, vv), dtype=float)
    if not np.all(np.isfinite(h_vals)):
        # interior-only retry for charts that blow up on a degenerate edge
        us2 = np.linspace(1.0 / grid, 1 - 1.0 / grid, grid) if not surface.periodic[0] else us
        vs2 = np.linspace(1.0 / grid, 1 - 1.0 / grid, grid) if not surface.periodic[1] else vs
        uu, vv = np.meshgrid(us2, vs2, indexing="ij")
        h_vals = np.asarray(h_fn(uu, vv), dtype=float)
        us, vs = us2, vs2

    h_scale = float(np.max(np.abs(h_vals[np.isfinite(h_vals)]))) if np.any(
        np.isfinite(h_vals)
    ) else 0.0

    tolerances = {
        "grid": grid,
        "contour_refine": opts["contour_refine"],
        "transversality_angle": opts["transversality_angle"],
        "region_divergence": opts["region_divergence"],
        "singularity_clearance": opts["singularity_clearance"],
    }

    def failed(reason, curves=(), cert=None, witness=False, pos=0, neg=0):
        return DividingSetReport(
            curves=tuple(curves),
            status="failed",
            reason=reason,
            positive_region_cells=pos,
            negative_region_cells=neg,
            certificate=cert or {},
            overtwisted_witness=witness,
            tolerances=tolerances,
        )

    if h_scale <= opts["region_divergence"]:
        return failed("div W vanishes identically: condition (3) cannot hold")

    segments = _marching_segments(
        h_vals, us, vs, surface.periodic, h_fn, opts["contour_refine"]
    )
    curves = _chain_segments(segments, surface.periodic)
    if not curves:
        return failed("no zero contour of div W found: complement is one-signed")

    # condition (1): complement splits into sign-definite regions
    margin = opts["region_divergence"]
    signs = np.where(h_vals > margin, 1, np.where(h_vals < -margin, -1, 0))
    pos_cells = int(np.sum(signs > 0))
    neg_cells = int(np.sum(signs < 0))
    if pos_cells == 0 or neg_cells == 0:
        return failed(
            "complement of the candidate curve is not split into positive "
            "and negative regions",
            curves,
            pos=pos_cells,
            neg=neg_cells,
        )
    # near-zero samples must hug the contour: otherwise h has a fat zero set
    cell = max(us[1] - us[0], vs[1] - vs[0])
    contour_pts = np.array([p for c in curves for p in c.points])
    zero_nodes = np.argwhere(signs == 0)
    for i, j in zero_nodes:
        p = np.array([us[i], vs[j]])
        d = contour_pts - p
        for axis in (0, 1):
            if surface.periodic[axis]:
                d[:, axis] = (d[:, axis] + 0.5) % 1.0 - 0.5
        if float(np.min(np.hypot(d[:, 0], d[:, 1]))) > 2.5 * cell:
            return failed(
                "div W has a near-zero plateau away from the candidate curve",
                curves,
                pos=pos_cells,
                neg=neg_cells,
            )

    # condition (2): foliation transverse to the curve, and W points out of
    # the positive region (h decreasing along W on the curve)
    min_angle = math.inf
    min_outflow = math.inf
    hu_fn = h_expr.partial("u").compile(("u", "v"))
    hv_fn = h_expr.partial("v").compile(("u", "v"))
    for curve in curves:
        pts = curve.points
        for k in range(len(pts) - 1):
            mid = (0.5 * (pts[k][0] + pts[k + 1][0]), 0.5 * (pts[k][1] + pts[k + 1][1]))
            tangent = np.array(
                [pts[k + 1][0] - pts[k][0], pts[k + 1][1] - pts[k][1]], dtype=float
            )
            tnorm = np.linalg.norm(tangent)
            if tnorm < 1e-14:
                continue
            tangent /= tnorm
            w1, w2 = pb.field_at(mid[0] % 1.0 if surface.periodic[0] else mid[0],
                                 mid[1] % 1.0 if surface.periodic[1] else mid[1])
            w = np.array([float(w1), float(w2)])
            wnorm = np.linalg.norm(w)
            if wnorm < 1e-12:
                return failed(
                    "a singularity of the foliation lies on the candidate curve",
                    curves,
                    pos=pos_cells,
                    neg=neg_cells,
                )
            w /= wnorm
            sin_angle = abs(w[0] * tangent[1] - w[1] * tangent[0])
            min_angle = min(min_angle, math.asin(min(1.0, sin_angle)))
            gu = float(hu_fn(mid[0], mid[1]))
            gv = float(hv_fn(mid[0], mid[1]))
            gn = math.hypot(gu, gv)
            if gn > 1e-12:
                min_outflow = min(min_outflow, -(w[0] * gu + w[1] * gv) / gn)
    if min_angle < opts["transversality_angle"]:
        return failed(
            "characteristic foliation is not transverse to the candidate curve",
            curves,
            cert={"transversality_margin": min_angle},
            pos=pos_cells,
            neg=neg_cells,
        )
    if min_outflow < 0:
        return failed(
            "directing field does not exit the positive region along the curve",
            curves,
            cert={"transversality_margin": min_angle, "outflow_margin": min_outflow},
            pos=pos_cells,
            neg=neg_cells,
        )

    # condition (3): divergence margins on region samples
    pos_vals = h_vals[signs > 0]
    neg_vals = h_vals[signs < 0]
    expansion_margin = float(np.min(pos_vals))
    contraction_margin = float(-np.max(neg_vals))

    # no singularity may sit on the curve
    sings, loci = find_singularities(pb)
    clearance = math.inf
    for s in sings:
        p = np.array(s.uv)
        d = contour_pts - p
        for axis in (0, 1):
            if surface.periodic[axis]:
                d[:, axis] = (d[:, axis] + 0.5) % 1.0 - 0.5
        clearance = min(clearance, float(np.min(np.hypot(d[:, 0], d[:, 1]))))
    if clearance < opts["singularity_clearance"]:
        return failed(
            "a singularity lies on the dividing curve",
            curves,
            pos=pos_cells,
            neg=neg_cells,
        )

    certificate = {
        "transversality_margin": min_angle,
        "outflow_margin": min_outflow,
        "expansion_margin": expansion_margin,
        "contraction_margin": contraction_margin,
        "singularity_clearance": None if clearance is math.inf else clearance,
    }

    # exercise: a contractible closed dividing curve on a closed surface
    # other than the sphere witnesses overtwistedness
    witness = False
    if surface.is_closed() and surface.topology != "sphere":
        for c in curves:
            if c.closed and c.homology == (0, 0):
                witness = True

    return DividingSetReport(
        curves=tuple(curves),
        status="certified",
        reason="",
        positive_region_cells=pos_cells,
        negative_region_cells=neg_cells,
        certificate=certificate,
        overtwisted_witness=witness,
        tolerances=tolerances,
    )


# ---------------------------------------------------------------------------
# convex torus standard form


def standard_form_check(surface: Surface, pb: PulledBackForm, grid: int = 64) -> dict:
    """Detect Legendrian divides and a common ruling slope on a torus.

    Divides are circles of singularities (one-dimensional zero loci of
    beta); the foliation is in standard form when divides exist and all
    nonsingular leaf directions are parallel with a common rational slope
    different from the divides' slope.
    """
    if surface.topology != "torus":
        raise DomainError("standard form check expects a torus", rule="torus-only")
    sings, loci = find_singularities(pb, grid=grid)

    def circular_extent(vals):
        s = np.sort(np.asarray(vals) % 1.0)
        if len(s) < 2:
            return 0.0
        gaps = np.diff(np.concatenate([s, [s[0] + 1.0]]))
        return float(1.0 - np.max(gaps))

    divides = []
    for locus in loci:
        pts = np.array(locus.points)
        extent_u = circular_extent(pts[:, 0])
        extent_v = circular_extent(pts[:, 1])
        if max(extent_u, extent_v) > 0.8:  # spans the torus: a circle
            direction = (1, 0) if extent_u > extent_v else (0, 1)
            divides.append(
                {
                    "points": [list(p) for p in locus.points],
                    "slope": list(direction),
                }
            )
    # sample leaf directions away from singular loci
    directions = []
    rng = np.random.default_rng(23)
    for _ in range(400):
        u, v = rng.uniform(0, 1, 2)
        w1, w2 = pb.field_at(float(u), float(v))
        w = np.array([float(w1), float(w2)])
        n = np.linalg.norm(w)
        if n < 1e-6 * max(1.0, pb.field_scale()):
            continue
        w /= n
        if w[0] < 0 or (w[0] == 0 and w[1] < 0):
            w = -w  # unoriented direction
        directions.append(w)
    parallel = False
    ruling_slope = None
    if directions:
        dirs = np.array(directions)
        mean = dirs.mean(axis=0)
        mean /= np.linalg.norm(mean)
        spread = float(np.max(1.0 - np.abs(dirs @ mean)))
        parallel = spread < 1e-8
        if parallel:
            ruling_slope = _rational_slope(mean)
    is_standard = bool(divides) and parallel
    if is_standard and ruling_slope is not None:
        for d in divides:
            if tuple(d["slope"]) == tuple(ruling_slope):
                is_standard = False  # ruling parallel to the divides
    return {
        "legendrian_divides": divides,
        "ruling_slope": list(ruling_slope) if ruling_slope else None,
        "is_standard_form": is_standard,
        "leaves_parallel": parallel,
    }


def _rational_slope(direction, max_den=32):
    """Best small-denominator integer vector along a chart direction."""
    du, dv = float(direction[0]), float(direction[1])
    best = None
    for q in range(0, max_den + 1):
        for p in range(0 if q else 1, max_den + 1):
            if p == 0 and q == 0:
                continue
            if math.gcd(p, q) != 1:
                continue
            n = math.hypot(p, q)
            err = abs(du * q - dv * p) / n
            score = (err, n)
            if best is None or score < best[0]:
                best = (score, (p, q))
    return best[1]
