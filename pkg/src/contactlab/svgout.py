"""SVG emission for fronts, foliation leaves and dividing curves."""

from __future__ import annotations

from .fronts import FrontWord
from .spacecurve import front_geometry


def _poly_path(points, sx, sy, ox, oy):
    coords = [f"{ox + sx * p[0]:.2f},{oy + sy * p[1]:.2f}" for p in points]
    return "M " + " L ".join(coords)


def front_svg(word: FrontWord, samples_per_segment: int = 16, scale: float = 60.0) -> str:
    """Front diagram: strand paths with the in-front strand drawn last,
    broken by a white casing at every crossing."""
    geo = front_geometry(word, samples_per_segment)
    width = geo.width * scale + 40
    height = geo.height * scale + 40
    ox, oy = 20.0, 20.0 + geo.height * scale

    def to_xy(y, z):
        return ox + y * scale, oy + z * scale

    paths = []
    for (seg, samples) in geo.strands:
        pts = [to_xy(s[0], s[1]) for s in samples]
        d = "M " + " L ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        paths.append(d)
    body = []
    # white casing first for under-strand gaps, then all strands
    for d in paths:
        body.append(
            f'<path d="{d}" fill="none" stroke="#ffffff" stroke-width="7"/>'
        )
        body.append(f'<path d="{d}" fill="none" stroke="#1f3a5f" stroke-width="2.5"/>')
    # redraw the over-strand (the descending one) across every crossing
    for event_index, y_c, z_c in geo.crossings:
        k = word.events[event_index][1]
        over = None
        for (seg, samples) in geo.strands:
            interval, pos = seg
            if interval == event_index and pos == k:
                over = samples
        if over is None:
            continue
        tail = [s for s in over if s[0] > y_c - 0.45]
        if len(tail) >= 2:
            pts = [to_xy(s[0], s[1]) for s in tail]
            d = "M " + " L ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
            body.append(f'<path d="{d}" fill="none" stroke="#1f3a5f" stroke-width="2.5"/>')
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">'
        f'<rect width="100%" height="100%" fill="#ffffff"/>'
        + "".join(body)
        + "</svg>"
    )
    return svg


def front_path_data(word: FrontWord, samples_per_segment: int = 16) -> list:
    """Raw strand path data for clients that render themselves: one entry
    per strand segment with its chart polyline in front coordinates."""
    geo = front_geometry(word, samples_per_segment)
    out = []
    for (seg, samples) in geo.strands:
        out.append(
            {
                "interval": seg[0],
                "position": seg[1],
                "points": [[round(s[0], 6), round(s[1], 6)] for s in samples],
            }
        )
    return out


def chart_curves_svg(curve_sets, width: float = 480, height: float = 480) -> str:
    """Chart-coordinate polylines (leaves, dividing curves) on [0,1]^2."""
    body = []
    palette = ("#1f3a5f", "#b03030", "#2e7d32", "#8e24aa")
    for c_idx, curves in enumerate(curve_sets):
        color = palette[c_idx % len(palette)]
        for polyline in curves:
            if len(polyline) < 2:
                continue
            pts = [
                f"{20 + (width - 40) * (p[0] % 1.0):.2f},"
                f"{height - 20 - (height - 40) * (p[1] % 1.0):.2f}"
                for p in polyline
            ]
            body.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                f'points="{" ".join(pts)}"/>'
            )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">'
        f'<rect width="100%" height="100%" fill="#ffffff"/>'
        f'<rect x="20" y="20" width="{width - 40:.0f}" height="{height - 40:.0f}" '
        f'fill="none" stroke="#cccccc"/>' + "".join(body) + "</svg>"
    )
