"""C0 Legendrian approximation of closed space curves.

The front's slope dictates the x-coordinate (x = -dz/dy), so a space
curve is approximated by a front whose (y, z) trace hugs the curve's
projection while its slope hugs -x.  Where those two demands conflict,
the front zig-zags: forward legs and cusped back-legs whose slopes stay
within the x-budget while the sweep ratio absorbs any z-drift; vertical
tangencies and y-reversals of the projection become honest cusps.  The
construction is parametrized by the target distance and fails loudly
when the configured event budget cannot reach it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FrontError, NumericalError
from .fronts import FrontWord, front_from_events, invariants
from .spacecurve import SpaceCurve

MAX_EVENTS_DEFAULT = 40000


@dataclass(frozen=True)
class ApproximationResult:
    front: FrontWord
    curve: SpaceCurve
    hausdorff: float
    epsilon: float
    parameters: dict

    def to_json(self) -> dict:
        return {
            "word": self.front.to_text(),
            "invariants": invariants(self.front).to_json(),
            "hausdorff": self.hausdorff,
            "epsilon": self.epsilon,
            "parameters": self.parameters,
            "samples": self.curve.to_json(),
        }


# ---------------------------------------------------------------------------
# input conditioning


def _close_and_validate(points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 3:
        raise FrontError("input must be a closed polyline of 3D points", rule="input")
    if np.linalg.norm(pts[0] - pts[-1]) < 1e-12:
        pts = pts[:-1]
    if len(pts) < 3:
        raise FrontError("input polyline is degenerate", rule="input")
    seglen = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    if np.min(seglen) <= 0:
        raise FrontError("input polyline has a zero-length segment", rule="input")
    return pts


def _resample_closed(pts, step):
    """Anchor points for the construction: exactly the input's vertices.

    Refining below the input's vertices is deliberately avoided: interior
    points of a straight 3D chord carry an x inconsistent with the chord
    slope, which would manufacture spurious zig-zags on inputs that are
    already (close to) Legendrian.  Teeth sizes are bounded by the leg
    budget independently of segment lengths, so no subdivision is needed
    for the distance bound either.
    """
    del step
    return np.array(pts, dtype=float)


def _monotone_runs(pts):
    """Split the closed resampled polyline into y-monotone runs.

    Returns index lists into pts covering the loop; consecutive runs share
    their boundary vertex (a y-reversal of the projection).
    """
    n = len(pts)
    dirs = []
    for i in range(n):
        dy = pts[(i + 1) % n][1] - pts[i][1]
        dirs.append(1 if dy >= 0 else -1)
    breaks = [i for i in range(n) if dirs[i] != dirs[i - 1]]
    if not breaks:
        raise FrontError(
            "projection of the input never reverses in y: not a closed curve "
            "in general position",
            rule="input",
        )
    runs = []
    for b_idx, start in enumerate(breaks):
        end = breaks[(b_idx + 1) % len(breaks)]
        run = [start]
        i = start
        while i != end:
            i = (i + 1) % n
            run.append(i)
        runs.append(run)
    return runs


# ---------------------------------------------------------------------------
# front construction


class _FrontBuilder:
    """Accumulates the PL front as (y, z) vertices.

    Every vertex y is deterministically jittered so that sweep events
    never tie; cusp locations are recomputed from the geometry at close
    time (a vertex is a cusp exactly when y reverses through it).
    """

    def __init__(self, jitter=1e-9):
        self.vertices = []
        self.jitter = jitter
        self._count = 0

    def head(self):
        return self.vertices[-1]

    def add_vertex(self, y, z):
        wobble = ((self._count * 2654435761) % 65536 - 32768) / 32768.0
        self._count += 1
        y = float(y) + self.jitter * wobble
        if self.vertices:
            y_prev, z_prev = self.vertices[-1]
            if abs(y - y_prev) < 1e-13 and abs(float(z) - z_prev) < 1e-13:
                return
            if abs(y - y_prev) < 1e-13:
                raise NumericalError("front edge with zero y-extent")
        self.vertices.append((y, float(z)))

    def close(self):
        if len(self.vertices) < 4:
            raise NumericalError("front construction produced too few vertices")
        verts = np.array(self.vertices)
        if math.hypot(*(verts[-1] - verts[0])) < 1e-6:
            verts = verts[:-1]
        else:
            raise NumericalError("constructed front failed to close up")
        n = len(verts)
        cusps = []
        for i in range(n):
            before = verts[i][0] - verts[i - 1][0]
            after = verts[(i + 1) % n][0] - verts[i][0]
            cusps.append(before * after < 0)
        if not any(cusps):
            raise NumericalError("constructed front has no cusps")
        return verts, cusps


def _emit_piece(builder, y1, z1, s_target, kappa, leg_max, direction):
    """Emit edges from the builder head to (y1, z1) tracking slope s_target.

    direction d = +-1 is the run's sweep sense; forward legs advance y by
    d, back legs reverse it through cusps.  Per tooth with legs a, b the
    drift d*dz - s*dy is absorbed at kappa per unit of swept length, and
    the final back leg lands exactly on the target anchor.
    """
    y0, z0 = builder.head()
    dy = (y1 - y0) * direction
    dz = z1 - z0
    if dy < -1e-7:
        raise NumericalError("piece runs against its run direction")
    dy = max(dy, 0.0)
    drift = direction * dz - s_target * dy
    if dy < 1e-12 and abs(drift) < 1e-12:
        return 0
    if abs(drift) <= kappa * dy:
        builder.add_vertex(y1, z1)
        return 1
    sigma = 1.0 if drift > 0 else -1.0
    sweep = abs(drift) / kappa
    n_teeth = max(1, int(math.ceil((dy + sweep) / (2.0 * leg_max))))
    a = (dy + sweep) / (2 * n_teeth)
    b = (sweep - dy) / (2 * n_teeth)
    if b <= 1e-15:
        builder.add_vertex(y1, z1)
        return 1
    s_fwd = s_target + kappa * sigma
    s_back = s_target - kappa * sigma
    y, z = y0, z0
    for t in range(n_teeth):
        y = y + direction * a
        z = z + direction * s_fwd * a
        builder.add_vertex(y, z)
        if t == n_teeth - 1:
            builder.add_vertex(y1, z1)  # final back leg lands on the anchor
        else:
            y = y - direction * b
            z = z - direction * s_back * b
            builder.add_vertex(y, z)
    return 2 * n_teeth


def _build_front(pts, epsilon, max_events):
    kappa = 0.5 * epsilon
    leg_max = 0.5 * epsilon
    runs = _monotone_runs(pts)
    builder = _FrontBuilder(jitter=min(1e-9, epsilon * 1e-8))
    edges = 0
    head = pts[runs[0][0]]
    builder.add_vertex(head[1], head[2])
    for run in runs:
        direction = 1 if pts[run[1 % len(run)]][1] >= pts[run[0]][1] else -1
        # drop interior anchors whose y-step is below the jitter floor
        # (resampling flattens quadratically at the projection's cusps)
        kept = [run[0]]
        for idx in run[1:-1]:
            if abs(pts[idx][1] - pts[kept[-1]][1]) >= 1e-7:
                kept.append(idx)
        if len(kept) > 1 and abs(pts[run[-1]][1] - pts[kept[-1]][1]) < 1e-7:
            kept.pop()
        kept.append(run[-1])
        for a_idx, b_idx in zip(kept[:-1], kept[1:]):
            pa, pb = pts[a_idx], pts[b_idx]
            s_target = -(pa[0] + pb[0]) / 2.0
            edges += _emit_piece(builder, pb[1], pb[2], s_target, kappa, leg_max, direction)
            if edges > max_events:
                raise NumericalError(
                    "epsilon is smaller than achievable within the configured "
                    f"event budget ({max_events} events); the achieved distance "
                    f"at this budget is roughly {2 * epsilon:.4g}",
                    rule="budget",
                )
    verts, cusps = builder.close()
    return verts, cusps, {"kappa": kappa, "leg_max": leg_max}


# ---------------------------------------------------------------------------
# sweep extraction: PL front -> FrontWord


def _strands_from_loop(verts, cusps):
    """Cut the closed vertex loop at cusp markers into y-monotone strands."""
    n = len(verts)
    cusp_ids = [i for i in range(n) if cusps[i]]
    if len(cusp_ids) < 2:
        raise NumericalError("front loop has fewer than two cusps")
    strands = []
    for c_idx, start in enumerate(cusp_ids):
        end = cusp_ids[(c_idx + 1) % len(cusp_ids)]
        idx = [start]
        i = start
        while i != end:
            i = (i + 1) % n
            idx.append(i)
        ys = verts[np.array(idx)][:, 0]
        d = np.diff(ys)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise NumericalError("strand between cusps is not y-monotone")
        strands.append(idx)
    return strands


class _StrandTable:
    def __init__(self, verts, strands):
        self.data = []
        for strand in strands:
            pts = verts[np.array(strand)]
            if pts[0, 0] > pts[-1, 0]:
                pts = pts[::-1]
            self.data.append(pts)

    def z_at(self, strand_id, y):
        pts = self.data[strand_id]
        return float(np.interp(y, pts[:, 0], pts[:, 1]))

    def span(self, strand_id):
        pts = self.data[strand_id]
        return float(pts[0, 0]), float(pts[-1, 0])


def _segment_intersections(verts, strands, table):
    """Crossings between strand polylines by sign changes of z_i - z_j.

    Both strands are y-monotone, so over the y-overlap the difference is a
    piecewise-linear function of y; a crossing is a sign change over one
    linear span (solved exactly).  Spans adjacent to a shared cusp vertex
    are skipped: the two branches of a cusp touch there, and any PL
    micro-crossing within one sample of the tip is a discretization
    artifact, not front structure.
    """
    n = len(strands)
    endpoints = [(strand[0], strand[-1]) for strand in strands]
    order = sorted(range(n), key=lambda s: table.span(s)[0])
    events = []
    for oi in range(n):
        i = order[oi]
        yi0, yi1 = table.span(i)
        zi = table.data[i][:, 1]
        zi_lo, zi_hi = float(np.min(zi)), float(np.max(zi))
        for oj in range(oi + 1, n):
            j = order[oj]
            yj0, yj1 = table.span(j)
            if yj0 >= yi1:
                break
            zj = table.data[j][:, 1]
            if float(np.min(zj)) > zi_hi or float(np.max(zj)) < zi_lo:
                continue
            lo = max(yi0, yj0)
            hi = min(yi1, yj1)
            if hi - lo < 1e-13:
                continue
            breaks = np.unique(
                np.concatenate(
                    [
                        np.clip(table.data[i][:, 0], lo, hi),
                        np.clip(table.data[j][:, 0], lo, hi),
                    ]
                )
            )
            if len(breaks) < 2:
                continue
            shared = set(endpoints[i]) & set(endpoints[j])
            guard_lo = lo
            guard_hi = hi
            for v in shared:
                yv = verts[v][0]
                # skip the sample span next to a shared cusp tip on both
                # strands: branches of a cusp only touch there
                if abs(yv - lo) < 1e-9:
                    guard_lo = max(
                        guard_lo,
                        float(table.data[i][1, 0]),
                        float(table.data[j][1, 0]),
                    )
                if abs(yv - hi) < 1e-9:
                    guard_hi = min(
                        guard_hi,
                        float(table.data[i][-2, 0]),
                        float(table.data[j][-2, 0]),
                    )
            if guard_hi <= guard_lo:
                continue
            di = np.array([table.z_at(i, y) for y in breaks])
            dj = np.array([table.z_at(j, y) for y in breaks])
            d = di - dj
            for a in range(len(breaks) - 1):
                d0, d1 = d[a], d[a + 1]
                if d0 == 0.0 or (d0 < 0) == (d1 < 0):
                    continue
                y_star = breaks[a] - d0 * (breaks[a + 1] - breaks[a]) / (d1 - d0)
                if not (guard_lo <= y_star <= guard_hi):
                    continue
                z_star = table.z_at(i, y_star)
                events.append((float(y_star), float(z_star), i, j))
    return events


def extract_front_word(verts, cusps) -> FrontWord:
    """Recover the combinatorial front word from a PL front loop.

    Cusps and strand crossings are processed in sweep order while
    maintaining the active strand order from the top; inconsistent
    adjacency (a sign of degenerate geometry) raises a NumericalError.
    """
    strands = _strands_from_loop(verts, cusps)
    table = _StrandTable(verts, strands)
    n_str = len(strands)

    events = []
    for s_idx in range(n_str):
        start = strands[s_idx][0]
        prev = (s_idx - 1) % n_str
        y_c = verts[start][0]
        first_step = verts[strands[s_idx][1]][0] - y_c
        kind = "L" if first_step > 0 else "R"
        events.append((y_c, 0 if kind == "L" else 1, "cusp", kind, (s_idx, prev)))
    for y_star, z_star, i, j in _segment_intersections(verts, strands, table):
        events.append((y_star, 2, "cross", None, (i, j, z_star)))
    events.sort(key=lambda e: (e[0], e[1]))
    ys = sorted(e[0] for e in events)
    gaps = [b - a for a, b in zip(ys, ys[1:]) if b - a > 1e-13]
    probe = min(min(gaps) / 2, 1e-5) if gaps else 1e-6

    active: list = []
    word_events = []
    for y_e, _prio, kind, cusp_kind, payload in events:
        if kind == "cusp":
            out_strand, in_strand = payload
            if cusp_kind == "L":
                z_out = table.z_at(out_strand, y_e + probe)
                z_in = table.z_at(in_strand, y_e + probe)
                upper, lower = (
                    (out_strand, in_strand) if z_out > z_in else (in_strand, out_strand)
                )
                z_top = max(z_out, z_in)
                above = sum(
                    1 for s in active if table.z_at(s, y_e + probe) > z_top
                )
                k = above + 1
                active[above:above] = [upper, lower]
                word_events.append(("L", k))
            else:
                try:
                    k1 = active.index(out_strand)
                    k2 = active.index(in_strand)
                except ValueError:
                    raise NumericalError(
                        "right cusp closes a strand that is not active"
                    ) from None
                if abs(k1 - k2) != 1:
                    raise NumericalError(
                        "right-cusp strands are not adjacent in the sweep order"
                    )
                k = min(k1, k2) + 1
                del active[k - 1 : k + 1]
                word_events.append(("R", k))
        else:
            i, j, _z = payload
            try:
                k1 = active.index(i)
                k2 = active.index(j)
            except ValueError:
                raise NumericalError("crossing between inactive strands") from None
            if abs(k1 - k2) != 1:
                raise NumericalError(
                    "crossing strands are not adjacent in the sweep order"
                )
            k = min(k1, k2) + 1
            active[k - 1], active[k] = active[k], active[k - 1]
            word_events.append(("X", k))
    if active:
        raise NumericalError("sweep left open strands: front does not close up")
    return front_from_events(word_events)


# ---------------------------------------------------------------------------
# space-curve synthesis from the PL front


def _synthesize_curve(verts, cusps, samples_per_edge=3, blend=0.2):
    """Analytic-slope samples along the PL front loop.

    Edges hold a constant slope with linear blend windows at both ends so
    that x = -slope is continuous through every junction, including cusp
    tips where the two branches share the junction slope; the hold slope
    is solved so each edge still lands exactly on its endpoint.  With
    x = -dz/dy pointwise, the standard form vanishes identically on the
    tangents.
    """
    n = len(verts)
    raw = []
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        dy = b[0] - a[0]
        raw.append((b[1] - a[1]) / dy if abs(dy) > 1e-300 else 0.0)
    points = []
    tangents = []
    for i in range(n):
        y0, z0 = verts[i]
        y1, z1 = verts[(i + 1) % n]
        dy = y1 - y0
        direction = math.copysign(1.0, dy)
        s_edge = raw[i]
        s_in = (raw[i - 1] + s_edge) / 2.0
        s_out = (s_edge + raw[(i + 1) % n]) / 2.0
        w = blend * abs(dy)
        denom = abs(dy) - w
        if denom > 1e-300:
            s_hold = ((z1 - z0) * direction - w * (s_in + s_out) / 2.0) / denom
        else:
            s_hold, w = s_edge, 0.0

        def slope_at(f):
            # f is the distance traveled along y, in [0, |dy|]
            if w > 0 and f < w:
                return s_in + (s_hold - s_in) * (f / w)
            if w > 0 and f > abs(dy) - w:
                return s_out + (s_hold - s_out) * ((abs(dy) - f) / w)
            return s_hold

        if cusps[i]:
            # cusp tip: tangent points along x, never vanishing
            points.append((-s_in, y0, z0))
            tangents.append((-1.0, 0.0, 0.0))
        z = z0
        prev_f = 0.0
        steps = max(samples_per_edge, 2)
        for jj in range(1, steps + 1):
            f = jj / steps * abs(dy)
            sub = 4
            for m in range(sub):
                f0 = prev_f + (f - prev_f) * m / sub
                f1 = prev_f + (f - prev_f) * (m + 1) / sub
                z += 0.5 * (slope_at(f0) + slope_at(f1)) * (f1 - f0) * direction
            prev_f = f
            s_here = slope_at(f)
            points.append((-s_here, y0 + direction * f, z))
            tangents.append((0.0, direction, direction * s_here))
    return SpaceCurve(
        points=tuple(points), tangents=tuple(tangents), samples_per_segment=samples_per_edge
    )


def hausdorff_distance(samples_a, samples_b) -> float:
    """Symmetric Hausdorff distance between two closed 3D polylines."""
    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)

    def one_way(p, q):
        q0 = q
        q1 = np.roll(q, -1, axis=0)
        d = q1 - q0
        dd = np.einsum("ij,ij->i", d, d)
        dd = np.where(dd < 1e-300, 1.0, dd)
        worst = 0.0
        for chunk in np.array_split(p, max(1, len(p) // 384)):
            w = chunk[:, None, :] - q0[None, :, :]
            t = np.clip(np.einsum("ikj,kj->ik", w, d) / dd[None, :], 0.0, 1.0)
            proj = q0[None, :, :] + t[..., None] * d[None, :, :]
            dist = np.linalg.norm(chunk[:, None, :] - proj, axis=2)
            worst = max(worst, float(np.max(np.min(dist, axis=1))))
        return worst

    return max(one_way(a, b), one_way(b, a))


# ---------------------------------------------------------------------------
# public entry point


def legendrian_approximate(
    points,
    epsilon: float,
    max_events: int = MAX_EVENTS_DEFAULT,
) -> ApproximationResult:
    """Approximate a closed polyline by a Legendrian knot within epsilon.

    Returns the front word, the Legendrian space curve, and the measured
    Hausdorff distance to the input.
    """
    if not (epsilon > 0):
        raise FrontError("epsilon must be positive", rule="epsilon")
    pts = _close_and_validate(points)
    resampled = _resample_closed(pts, step=0.25 * epsilon)
    verts, cusps, params = _build_front(resampled, epsilon, max_events)
    word = extract_front_word(verts, cusps)
    curve = _synthesize_curve(verts, cusps)
    dist = hausdorff_distance(curve.points, pts)
    params.update({"events": len(word.events), "resample_step": 0.25 * epsilon})
    return ApproximationResult(
        front=word,
        curve=curve,
        hausdorff=dist,
        epsilon=epsilon,
        parameters=params,
    )
