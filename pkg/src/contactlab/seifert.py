"""Seifert's algorithm on the underlying diagram of a front.

Orientation-respecting smoothing reconnects every crossing in-arc to the
other strand's out-arc; the cycles of the resulting permutation are the
Seifert circles.  With s circles and c crossings the surface built from
disks and twisted bands has Euler characteristic s - c and genus
(1 - chi)/2 for a knot, and any Seifert surface bounds the Bennequin
inequalities, so the check below is sound for every front.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FrontError
from .fronts import Diagram, InvariantReport


@dataclass(frozen=True)
class SeifertData:
    circles: int
    crossings: int
    chi: int
    genus: int

    def to_json(self) -> dict:
        return {
            "circles": self.circles,
            "crossings": self.crossings,
            "chi": self.chi,
            "genus": self.genus,
        }


def seifert_surface(diagram: Diagram) -> SeifertData:
    """Seifert circles, surface Euler characteristic and genus."""
    if not diagram.crossings:
        return SeifertData(circles=1, crossings=0, chi=1, genus=0)
    successor = {}
    for cr in diagram.crossings:
        for arc_in, arc_out in ((cr.over_in, cr.under_out), (cr.under_in, cr.over_out)):
            if arc_in in successor:
                raise FrontError("arc appears twice as a crossing input", rule="diagram")
            successor[arc_in] = arc_out
    if len(successor) != diagram.arc_count:
        raise FrontError("diagram arcs do not close up", rule="diagram")
    seen = set()
    circles = 0
    for start in successor:
        if start in seen:
            continue
        circles += 1
        a = start
        while a not in seen:
            seen.add(a)
            a = successor[a]
    c = len(diagram.crossings)
    chi = circles - c
    if (1 - chi) % 2 != 0:
        raise FrontError("odd genus numerator: not a knot diagram", rule="diagram")
    genus = (1 - chi) // 2
    if genus < 0:
        raise FrontError("negative genus from cycle count", rule="diagram")
    return SeifertData(circles=circles, crossings=c, chi=chi, genus=genus)


def bennequin_check(inv: InvariantReport, sd: SeifertData) -> dict:
    """tb + |r| <= -chi and l(+-) <= -chi against this Seifert surface.

    A violation in a structure assumed tight is an inconsistency witness:
    the inequalities hold for every Seifert surface of every front in the
    standard structure.
    """
    bound = -sd.chi
    legendrian_slack = bound - (inv.tb + abs(inv.r))
    transverse_slack = bound - max(inv.l_plus, inv.l_minus)
    return {
        "legendrian_ok": legendrian_slack >= 0,
        "transverse_ok": transverse_slack >= 0,
        "legendrian_slack": legendrian_slack,
        "transverse_slack": transverse_slack,
        "bound": bound,
        "inconsistency_witness": legendrian_slack < 0 or transverse_slack < 0,
    }
