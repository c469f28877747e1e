"""Legendrian front words and their classical invariants.

A front diagram for the standard contact structure is encoded as a word
of Morse events read left to right: Lk opens a left cusp creating two
strands at positions (k, k+1) counted from the top, Rk closes a right
cusp merging the strands at (k, k+1), and Xk crosses strands k and k+1.
Crossing over/under is never stored: the strand of smaller slope is in
front, which in this combinatorial model is the descending strand.

Tracing the word recovers the knot: the traversal starts on the upper
branch of the first left cusp moving rightward and induces a direction on
every strand segment.  Cusps are typed up/down by whether the traversal
passes lower-to-upper or upper-to-lower through them, and crossings are
signed from the two traversal directions (equal horizontal directions
give a positive crossing, which pins the standard right-handed trefoil
word at writhe +3).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import FrontError

Event = tuple  # (kind, k) with kind in "L", "R", "X"

_TOKEN = re.compile(r"^([LRX])(\d+)$")


def parse_word_text(text: str):
    events = []
    for i, token in enumerate(text.split()):
        m = _TOKEN.match(token)
        if not m:
            raise FrontError(
                f"bad token {token!r} at event {i + 1}: expected Lk, Rk or Xk",
                location=i + 1,
                rule="token",
            )
        k = int(m.group(2))
        if k < 1:
            raise FrontError(
                f"strand index must be positive at event {i + 1}",
                location=i + 1,
                rule="index-range",
            )
        events.append((m.group(1), k))
    return tuple(events)


def compute_profile(events):
    """Strand counts n_0 = 0, n_1, ..., n_m = 0; validates index ranges."""
    profile = [0]
    n = 0
    for i, (kind, k) in enumerate(events):
        if kind == "L":
            if not (1 <= k <= n + 1):
                raise FrontError(
                    f"LeftCusp index out of range at event {i + 1}: "
                    f"L{k} with {n} strands",
                    location=i + 1,
                    rule="index-range",
                )
            n += 2
        elif kind == "R":
            if not (1 <= k <= n - 1):
                raise FrontError(
                    f"RightCusp index out of range at event {i + 1}: "
                    f"R{k} with {n} strands",
                    location=i + 1,
                    rule="index-range",
                )
            n -= 2
        elif kind == "X":
            if not (1 <= k <= n - 1):
                raise FrontError(
                    f"Crossing index out of range at event {i + 1}: "
                    f"X{k} with {n} strands",
                    location=i + 1,
                    rule="index-range",
                )
        else:  # pragma: no cover - parse guards this
            raise FrontError(f"unknown event kind {kind!r}", location=i + 1)
        profile.append(n)
    if n != 0:
        raise FrontError(
            f"word leaves {n} strands open: nonzero final strand count",
            location=len(events),
            rule="closure",
        )
    return tuple(profile)


@dataclass(frozen=True)
class FrontWord:
    """A validated single-component front word."""

    events: tuple
    profile: tuple = field(compare=False)

    def __len__(self):
        return len(self.events)

    def to_text(self) -> str:
        return " ".join(f"{kind}{k}" for kind, k in self.events)

    def __str__(self):
        return self.to_text()

    def cusp_count(self) -> int:
        return sum(1 for kind, _ in self.events if kind in "LR")

    def crossing_count(self) -> int:
        return sum(1 for kind, _ in self.events if kind == "X")


def _walk_right(events, i, p):
    """From segment (interval i, position p) moving right across event i.

    Returns ('seg', interval, position, 'R') or ('turn', interval, position)
    where a turn switches to moving left on the partner cusp branch.
    """
    kind, k = events[i]
    if kind == "L":
        return ("seg", i + 1, p if p < k else p + 2, "R")
    if kind == "X":
        if p == k:
            return ("seg", i + 1, k + 1, "R")
        if p == k + 1:
            return ("seg", i + 1, k, "R")
        return ("seg", i + 1, p, "R")
    # right cusp
    if p == k:
        return ("turn", i, k + 1)
    if p == k + 1:
        return ("turn", i, k)
    return ("seg", i + 1, p if p < k else p - 2, "R")


def _walk_left(events, i, p):
    """From segment (interval i, position p) moving left across event i-1."""
    kind, k = events[i - 1]
    if kind == "L":
        if p == k:
            return ("turn", i, k + 1)
        if p == k + 1:
            return ("turn", i, k)
        return ("seg", i - 1, p if p < k else p - 2, "L")
    if kind == "X":
        if p == k:
            return ("seg", i - 1, k + 1, "L")
        if p == k + 1:
            return ("seg", i - 1, k, "L")
        return ("seg", i - 1, p, "L")
    # right cusp seen from the right: positions >= k shift up
    return ("seg", i - 1, p if p < k else p + 2, "L")


def _trace_cycle(events, profile, start_seg, start_dir):
    """Walk one traversal cycle; returns (visited segments -> direction,
    cusp arrivals, crossing pass directions)."""
    directions = {}
    cusp_arrivals = []  # (event_index, arrived_position, moving)
    seg, direction = start_seg, start_dir
    while True:
        if seg in directions:
            raise FrontError("front traversal revisited a segment", rule="trace")
        directions[seg] = direction
        i, p = seg
        if direction == "R":
            step = _walk_right(events, i, p)
        else:
            step = _walk_left(events, i, p)
        if step[0] == "seg":
            seg = (step[1], step[2])
            direction = step[3]
        else:
            interval, partner = step[1], step[2]
            if direction == "R":
                # arrived at a right cusp (event index = interval)
                cusp_arrivals.append((interval, p, "R"))
            else:
                # arrived at a left cusp (event index = interval - 1)
                cusp_arrivals.append((interval - 1, p, "L"))
            seg = (interval, partner)
            direction = "L" if direction == "R" else "R"
        if seg == start_seg and direction == start_dir:
            return directions, cusp_arrivals


def _all_segments(profile):
    segs = set()
    for i, n in enumerate(profile):
        for p in range(1, n + 1):
            segs.add((i, p))
    return segs


def trace_components(events, profile):
    """All traversal cycles; each is (directions, cusp_arrivals)."""
    remaining = _all_segments(profile)
    cycles = []
    while remaining:
        seed = min(remaining)
        directions, cusps = _trace_cycle(events, profile, seed, "R")
        cycles.append((directions, cusps))
        remaining -= set(directions)
    return cycles


def parse_front(text: str) -> FrontWord:
    """Parse and validate front text; rejects links (multiple components)."""
    events = parse_word_text(text)
    if not events:
        raise FrontError("empty front word", rule="closure")
    profile = compute_profile(events)
    word = FrontWord(events=events, profile=profile)
    cycles = trace_components(events, profile)
    if len(cycles) != 1:
        raise FrontError(
            f"front has {len(cycles)} components: knots only",
            rule="components",
        )
    return word


def front_from_events(events) -> FrontWord:
    profile = compute_profile(tuple(events))
    word = FrontWord(events=tuple(events), profile=profile)
    cycles = trace_components(word.events, profile)
    if len(cycles) != 1:
        raise FrontError(
            f"front has {len(cycles)} components: knots only", rule="components"
        )
    return word


@dataclass(frozen=True)
class OrientedFront:
    """A front word with the canonical traversal orientation.

    The base point is the upper branch of the first left cusp, moving
    rightward; `reverse=True` flips the traversal.
    """

    word: FrontWord
    reverse: bool = False
    directions: dict = field(default_factory=dict, compare=False, repr=False)
    cusp_types: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def orient(cls, word: FrontWord, reverse: bool = False) -> "OrientedFront":
        first_left = next(i for i, (kind, _) in enumerate(word.events) if kind == "L")
        k = word.events[first_left][1]
        start = (first_left + 1, k)
        directions, cusp_arrivals = _trace_cycle(word.events, word.profile, start, "R")
        if reverse:
            directions = {seg: ("L" if d == "R" else "R") for seg, d in directions.items()}
            cusp_arrivals = _reverse_cusp_arrivals(word.events, cusp_arrivals)
        cusp_types = {}
        for event_index, arrived_pos, _moving in cusp_arrivals:
            kind, k0 = word.events[event_index]
            # arriving on the upper branch (position k) means the traversal
            # passes upper-to-lower through the cusp: a down cusp
            cusp_types[event_index] = "down" if arrived_pos == k0 else "up"
        return cls(word=word, reverse=reverse, directions=directions, cusp_types=cusp_types)

    def segment_direction(self, interval: int, position: int) -> str:
        return self.directions[(interval, position)]


def _reverse_cusp_arrivals(events, cusp_arrivals):
    """Under orientation reversal the traversal leaves where it arrived, so
    the arrival branch at each cusp swaps to the partner branch."""
    out = []
    for event_index, arrived_pos, moving in cusp_arrivals:
        _, k = events[event_index]
        partner = k + 1 if arrived_pos == k else k
        out.append((event_index, partner, moving))
    return out


@dataclass(frozen=True)
class InvariantReport:
    w: int
    c: int
    c_u: int
    c_d: int
    tb: int
    r: int
    l_plus: int
    l_minus: int

    def to_json(self) -> dict:
        return {
            "w": self.w,
            "c": self.c,
            "c_u": self.c_u,
            "c_d": self.c_d,
            "tb": self.tb,
            "r": self.r,
            "l_plus": self.l_plus,
            "l_minus": self.l_minus,
        }


def crossing_sign(front: OrientedFront, event_index: int) -> int:
    """Sign of the oriented crossing at the given X event.

    The in-front (over) strand descends left to right; with both strand
    directions known the crossing is positive exactly when the horizontal
    directions agree.
    """
    kind, k = front.word.events[event_index]
    if kind != "X":
        raise FrontError(f"event {event_index + 1} is not a crossing")
    d_over = front.segment_direction(event_index, k)
    d_under = front.segment_direction(event_index, k + 1)
    return 1 if d_over == d_under else -1


def invariants(front: OrientedFront | FrontWord) -> InvariantReport:
    """Classical invariants of an oriented front: writhe, cusp counts,
    tb = w - c/2, r = (c_d - c_u)/2, and the two transverse pushoffs
    l(+-) = tb -+ r."""
    if isinstance(front, FrontWord):
        front = OrientedFront.orient(front)
    word = front.word
    w = 0
    for i, (kind, _) in enumerate(word.events):
        if kind == "X":
            w += crossing_sign(front, i)
    c_u = sum(1 for t in front.cusp_types.values() if t == "up")
    c_d = sum(1 for t in front.cusp_types.values() if t == "down")
    c = c_u + c_d
    if c % 2 != 0:  # pragma: no cover - structurally impossible
        raise FrontError("odd cusp count")
    tb2 = 2 * w - c
    r2 = c_d - c_u
    if tb2 % 2 != 0 or r2 % 2 != 0:
        raise FrontError("non-integral tb or r: not a knot front", rule="components")
    tb = tb2 // 2
    r = r2 // 2
    return InvariantReport(
        w=w,
        c=c,
        c_u=c_u,
        c_d=c_d,
        tb=tb,
        r=r,
        l_plus=tb - r,
        l_minus=tb + r,
    )


# ---------------------------------------------------------------------------
# the underlying topological diagram


@dataclass(frozen=True)
class Crossing:
    over_in: int
    over_out: int
    under_in: int
    under_out: int
    sign: int

    def to_json(self) -> list:
        # [strand-in, strand-in, strand-out, strand-out, sign]
        return [self.over_in, self.under_in, self.over_out, self.under_out, self.sign]


@dataclass(frozen=True)
class Diagram:
    """Oriented knot diagram as arcs joined at signed crossings.

    Arcs are numbered along the traversal and break at every crossing
    pass; a zero-crossing diagram has one closed arc and no crossings.
    """

    crossings: tuple
    arc_count: int

    def to_json(self) -> dict:
        return {
            "crossings": [c.to_json() for c in self.crossings],
            "arc_count": self.arc_count,
        }


def underlying_diagram(front: OrientedFront | FrontWord) -> Diagram:
    """Smooth the cusps away and keep the crossings.

    Walks the traversal once, cutting the curve into arcs at each crossing
    pass; the front convention decides over/under (the descending strand
    is in front), and signs come from the traversal directions.
    """
    if isinstance(front, FrontWord):
        front = OrientedFront.orient(front)
    word = front.word
    events = word.events
    x_events = [i for i, (kind, _) in enumerate(events) if kind == "X"]
    if not x_events:
        return Diagram(crossings=(), arc_count=1)

    first_left = next(i for i, (kind, _) in enumerate(events) if kind == "L")
    k0 = events[first_left][1]
    start = ((first_left + 1, k0), "R" if not front.reverse else "L")

    # walk the cycle recording crossing passes in traversal order
    passes = []  # (event_index, role) with role 'over'/'under'
    seg, direction = start
    while True:
        i, p = seg
        if direction == "R":
            step = _walk_right(events, i, p)
            if step[0] == "seg" and events[i][0] == "X":
                k = events[i][1]
                if p in (k, k + 1):
                    passes.append((i, "over" if p == k else "under"))
        else:
            step = _walk_left(events, i, p)
            if step[0] == "seg" and events[i - 1][0] == "X":
                k = events[i - 1][1]
                if p in (k, k + 1):
                    # arriving leftward at right position p: over strand
                    # exits right at k+1, under at k
                    passes.append((i - 1, "over" if p == k + 1 else "under"))
        if step[0] == "seg":
            seg = (step[1], step[2])
            direction = step[3]
        else:
            seg = (step[1], step[2])
            direction = "L" if direction == "R" else "R"
        if (seg, direction) == start:
            break

    n = len(passes)
    if n != 2 * len(x_events):  # pragma: no cover - single component guards
        raise FrontError("crossing passes do not cover the diagram")
    # arc e_j runs from pass j to pass j+1 (mod n); pass j consumes e_{j-1}
    by_event: dict = {}
    for j, (event_index, role) in enumerate(passes):
        arc_in = (j - 1) % n
        arc_out = j
        by_event.setdefault(event_index, {})[role] = (arc_in, arc_out)
    crossings = []
    for event_index in x_events:
        roles = by_event[event_index]
        over_in, over_out = roles["over"]
        under_in, under_out = roles["under"]
        crossings.append(
            Crossing(
                over_in=over_in,
                over_out=over_out,
                under_in=under_in,
                under_out=under_out,
                sign=crossing_sign(front, event_index),
            )
        )
    return Diagram(crossings=tuple(crossings), arc_count=n)


# worked example words
UNKNOT = "L1 R1"
TREFOIL = "L1 L3 X2 X2 X2 R3 R1"
STABILIZED_UNKNOT = "L1 L2 R3 R1"
FIGURE_EIGHT = "L1 L1 L1 X2 X2 X4 R3 X2 R1 R1"
