"""Geometric realization of front words.

The front is laid out in the (y, z) plane with event columns at integer
y and strand heights at negative integer z; segments between events are
cubic Hermite arcs whose endpoint slopes encode the event geometry
(crossings meet at mid-height with slopes -+1, cusps carry the
semicubical model (y, z) = (y0 + t^2, z0 + c t^3) so the slope extends
continuously through the tip).  The space curve is recovered from the
front by x = -dz/dy, which makes the result Legendrian by construction:
the standard form evaluates to zero on every analytic tangent sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FrontError
from .fronts import FrontWord, OrientedFront, _walk_left, _walk_right

CUSP_HALF_WIDTH = 0.3
CUSP_CUBIC = 0.55
CROSS_SLOPE = 1.0


@dataclass(frozen=True)
class SpaceCurve:
    """Closed Legendrian curve samples with analytic tangents."""

    points: tuple  # (x, y, z) samples along the traversal
    tangents: tuple  # (dx, dy, dz) per sample (analytic, unnormalized)
    samples_per_segment: int

    def legendrian_residual(self) -> float:
        """max |dz + x dy| over the samples (alpha_1 on the tangents)."""
        worst = 0.0
        for (x, _y, _z), (_dx, dy, dz) in zip(self.points, self.tangents):
            scale = max(1.0, math.hypot(dy, dz))
            worst = max(worst, abs(dz + x * dy) / scale)
        return worst

    def min_self_distance(self, window: int = 6) -> float:
        """Minimum distance between non-adjacent samples (embeddedness)."""
        pts = np.array(self.points)
        n = len(pts)
        best = math.inf
        for i in range(n):
            lo = i + window
            hi = n - window if i < window else n
            if lo >= hi:
                continue
            d = np.linalg.norm(pts[lo:hi] - pts[i], axis=1)
            if d.size:
                best = min(best, float(np.min(d)))
        return best

    def to_json(self) -> list:
        return [[p[0], p[1], p[2]] for p in self.points]


@dataclass(frozen=True)
class FrontGeometry:
    """Per-segment 2D sample paths of the front, for rendering."""

    word: FrontWord
    strands: tuple  # per segment: ((interval, position), samples ((y, z, slope)...))
    crossings: tuple  # (event_index, y, z) locations
    cusps: tuple  # (event_index, y, z, 'L'|'R')
    width: float
    height: float


def _hermite(y0, z0, s0, y1, z1, s1):
    """Cubic z(y) with given endpoint values and slopes; returns coeffs."""
    h = y1 - y0
    return (z0, s0, z1, s1, y0, h)


def _hermite_eval(coeffs, y):
    z0, s0, z1, s1, y0, h = coeffs
    t = (y - y0) / h
    h00 = 2 * t**3 - 3 * t**2 + 1
    h10 = t**3 - 2 * t**2 + t
    h01 = -2 * t**3 + 3 * t**2
    h11 = t**3 - t**2
    z = h00 * z0 + h10 * h * s0 + h01 * z1 + h11 * h * s1
    dh00 = 6 * t**2 - 6 * t
    dh10 = 3 * t**2 - 4 * t + 1
    dh01 = -6 * t**2 + 6 * t
    dh11 = 3 * t**2 - 2 * t
    dz = (dh00 * z0 + dh01 * z1) / h + dh10 * s0 + dh11 * s1
    d2h00 = 12 * t - 6
    d2h10 = 6 * t - 4
    d2h01 = -12 * t + 6
    d2h11 = 6 * t - 2
    ddz = (d2h00 * z0 + d2h01 * z1) / h**2 + (d2h10 * s0 + d2h11 * s1) / h
    return z, dz, ddz


def _segment_endpoint(events, profile, i, p, side):
    """(y, z, slope, cusp_flag) of segment (interval i, position p) at the
    given side ('left' event i-1, 'right' event i).

    Plain pass-through anchors sit at the height of the strand's position
    in the interval to the RIGHT of the column, so a strand renumbered by
    a cusp event keeps a continuous path.
    """
    if side == "left":
        y = float(i)
        kind, k = events[i - 1]
        if kind == "L" and p in (k, k + 1):
            return y, -(k + 0.5), None, "cusp"
        if kind == "X" and p in (k, k + 1):
            slope = -CROSS_SLOPE if p == k + 1 else CROSS_SLOPE
            return y, -(k + 0.5), slope, "cross"
        # p is already the post-event position on this side
        return y, float(-p), 0.0, "plain"
    y = float(i + 1)
    kind, k = events[i]
    if kind == "R" and p in (k, k + 1):
        return y, -(k + 0.5), None, "cusp"
    if kind == "X" and p in (k, k + 1):
        slope = -CROSS_SLOPE if p == k else CROSS_SLOPE
        return y, -(k + 0.5), slope, "cross"
    if kind == "L" and p >= k:
        p_after = p + 2
    elif kind == "R" and p >= k + 2:
        p_after = p - 2
    elif kind == "X" and p == k:
        p_after = k + 1
    elif kind == "X" and p == k + 1:
        p_after = k
    else:
        p_after = p
    return y, float(-p_after), 0.0, "plain"


def _cusp_arc(y_tip, z_tip, opens_right, branch_upper, n):
    """Semicubical branch samples from the tip outward.

    Each sample is (y, z, slope, tangent3d) with the tangent taken in the
    t-parametrization (y, z) = (y_tip +- t^2, z_tip +- c t^3), where it
    stays nonvanishing through the tip: (dx, dy, dz) = (-1.5c', 2t', 3ct'^2).
    """
    t_hat = math.sqrt(CUSP_HALF_WIDTH)
    e_y = 1.0 if opens_right else -1.0
    out = []
    sign_t = 1.0 if branch_upper else -1.0
    for j in range(n + 1):
        t = sign_t * t_hat * j / n
        y = y_tip + e_y * t * t
        z = z_tip + CUSP_CUBIC * t**3  # t > 0 is always the upper branch
        # dz/dy = (3c t^2) / (e 2t): the upper branch of a right-opening
        # cusp rises away from the tip, of a left-opening cusp falls into it
        slope = e_y * 1.5 * CUSP_CUBIC * t
        tangent = (-e_y * 1.5 * CUSP_CUBIC, e_y * 2 * t, 3 * CUSP_CUBIC * t**2)
        out.append((y, z, slope, tangent))
    return out


def _segment_path(events, profile, i, p, samples):
    """2D path of segment (i, p), left to right.

    Each sample is (y, z, slope, tangent3d); Hermite spans carry the
    tangent (-z'', 1, z') in the y-parametrization.
    """
    yl, zl, sl, kind_l = _segment_endpoint(events, profile, i, p, "left")
    yr, zr, sr, kind_r = _segment_endpoint(events, profile, i, p, "right")
    path = []
    if kind_l == "cusp":
        k = events[i - 1][1]
        arc = _cusp_arc(yl, zl, opens_right=True, branch_upper=(p == k), n=max(2, samples // 2))
        path.extend(arc)
        yl, zl, sl, _ = arc[-1]
    if kind_r == "cusp":
        k = events[i][1]
        arc = _cusp_arc(yr, zr, opens_right=False, branch_upper=(p == k), n=max(2, samples // 2))
        arc = arc[::-1]
        yr, zr, sr, _ = arc[0]
        tail = arc
    else:
        tail = []
    coeffs = _hermite(yl, zl, sl, yr, zr, sr)
    n_mid = max(2, samples)
    start = 1 if path else 0
    for j in range(start, n_mid + 1):
        y = yl + (yr - yl) * j / n_mid
        z, dz, ddz = _hermite_eval(coeffs, y)
        path.append((y, z, dz, (-ddz, 1.0, dz)))
    if tail:
        path.extend(tail[1:])
    return path


def front_geometry(word: FrontWord, samples_per_segment: int = 12) -> FrontGeometry:
    """Lay out every strand segment of the front in the (y, z) plane."""
    if samples_per_segment < 1:
        raise FrontError("samples_per_segment must be positive", rule="samples")
    events = word.events
    profile = word.profile
    strands = []
    for i, n in enumerate(profile):
        for p in range(1, n + 1):
            strands.append(((i, p), tuple(_segment_path(events, profile, i, p, samples_per_segment))))
    crossings = []
    cusps = []
    for j, (kind, k) in enumerate(events):
        y = float(j + 1)
        if kind == "X":
            crossings.append((j, y, -(k + 0.5)))
        else:
            cusps.append((j, y, -(k + 0.5), kind))
    max_strands = max(profile)
    return FrontGeometry(
        word=word,
        strands=tuple(strands),
        crossings=tuple(crossings),
        cusps=tuple(cusps),
        width=float(len(events) + 1),
        height=float(max_strands + 1),
    )


def to_space_curve(
    front: FrontWord | OrientedFront, samples_per_segment: int = 12
) -> SpaceCurve:
    """Lift the front to its Legendrian space curve via x = -dz/dy."""
    if isinstance(front, FrontWord):
        front = OrientedFront.orient(front)
    word = front.word
    if samples_per_segment < 1:
        raise FrontError("samples_per_segment must be positive", rule="samples")
    paths = {}
    for (seg, path) in front_geometry(word, samples_per_segment).strands:
        paths[seg] = path

    events = word.events
    first_left = next(i for i, (kind, _) in enumerate(events) if kind == "L")
    k0 = events[first_left][1]
    start = ((first_left + 1, k0), "R" if not front.reverse else "L")

    points = []
    tangents = []
    seg, direction = start
    while True:
        path = paths[seg]
        ordered = path if direction == "R" else path[::-1]
        orient = 1.0 if direction == "R" else -1.0
        for y, z, slope, tan in ordered[:-1]:
            x = -slope
            points.append((x, y, z))
            tangents.append((orient * tan[0], orient * tan[1], orient * tan[2]))
        i, p = seg
        step = _walk_right(events, i, p) if direction == "R" else _walk_left(events, i, p)
        if step[0] == "seg":
            seg = (step[1], step[2])
            direction = step[3]
        else:
            seg = (step[1], step[2])
            direction = "L" if direction == "R" else "R"
        if (seg, direction) == start:
            break
    return SpaceCurve(
        points=tuple(points),
        tangents=tuple(tangents),
        samples_per_segment=samples_per_segment,
    )
