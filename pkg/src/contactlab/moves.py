"""Legendrian Reidemeister moves and stabilizations on front words.

Each move is a named local rewrite with an explicit precondition pattern;
all rewrites preserve validity and the classical invariants (moves) or
shift them by the stabilization laws.  The catalogue covers the three
front moves together with their 180-degree rotated variants, plus the
planar-isotopy slide that exchanges two events with disjoint strand
support.

Word-level patterns (p is the position of the strand being slid):
  I_above      insert [Lp, Xp+1, Rp]      tongue and crossing above strand p
  I_below      insert [Lp+1, Xp, Rp+1]    tongue and crossing below strand p
  II_*         [Lk+1] <-> [Lk, Xk+1, Xk] and the three rotated variants
  III          braid relation [Xk Xk+1 Xk] <-> [Xk+1 Xk Xk+1]
  slide        exchange adjacent events with disjoint support
"""

from __future__ import annotations

from .errors import MoveError
from .fronts import FrontWord, front_from_events, invariants

MOVES = (
    "I_above",
    "I_below",
    "I_above_inv",
    "I_below_inv",
    "II_left_above",
    "II_left_above_inv",
    "II_left_below",
    "II_left_below_inv",
    "II_right_above",
    "II_right_above_inv",
    "II_right_below",
    "II_right_below_inv",
    "III",
    "slide",
)


def _strands_at_gap(word: FrontWord, index: int) -> int:
    if not (0 <= index <= len(word.events)):
        raise MoveError(
            f"event index {index} outside word of length {len(word.events)}",
            location=index,
            rule="position",
        )
    return word.profile[index]


def _event(word: FrontWord, index: int):
    if not (0 <= index < len(word.events)):
        raise MoveError(
            f"no event at index {index}", location=index, rule="position"
        )
    return word.events[index]


def _rebuild(word: FrontWord, events, move: str) -> FrontWord:
    try:
        return front_from_events(events)
    except MoveError:
        raise
    except Exception as exc:
        raise MoveError(
            f"{move} produced an invalid word: {exc}", rule="pattern"
        ) from exc


# -- move I -------------------------------------------------------------


def _insert_i(word, index, strand, above: bool):
    n = _strands_at_gap(word, index)
    if not (1 <= strand <= n):
        raise MoveError(
            f"no strand {strand} at event gap {index} (profile {n})",
            location=index,
            rule="pattern",
        )
    p = strand
    if above:
        pattern = [("L", p), ("X", p + 1), ("R", p)]
    else:
        pattern = [("L", p + 1), ("X", p), ("R", p + 1)]
    events = list(word.events)
    events[index:index] = pattern
    return events


def _delete_i(word, index, above: bool):
    events = list(word.events)
    if index + 3 > len(events):
        raise MoveError("pattern runs past the end of the word", location=index, rule="pattern")
    e0, e1, e2 = events[index : index + 3]
    if above:
        ok = (
            e0[0] == "L"
            and e1 == ("X", e0[1] + 1)
            and e2 == ("R", e0[1])
        )
    else:
        ok = (
            e0[0] == "L"
            and e0[1] >= 2
            and e1 == ("X", e0[1] - 1)
            and e2 == ("R", e0[1])
        )
    if not ok:
        raise MoveError(
            f"events {index}..{index + 2} do not match the move I pattern",
            location=index,
            rule="pattern",
        )
    del events[index : index + 3]
    return events


# -- move II ------------------------------------------------------------

# (cusp kind, above?) -> (single-event k from pattern k, expansion pattern)
# II_left_above:  [L(k+1)] <-> [L(k), X(k+1), X(k)]   strand k stays above? no:
#   strand at position k ends above the new pair in both forms.


def _expand_ii(word, index, variant):
    kind, k = _event(word, index)
    events = list(word.events)
    if variant == "II_left_above":
        if kind != "L" or k < 2:
            raise MoveError(
                f"event {index} is not L(k) with k >= 2", location=index, rule="pattern"
            )
        pattern = [("L", k - 1), ("X", k), ("X", k - 1)]
    elif variant == "II_left_below":
        n = word.profile[index]
        if kind != "L" or k > n:
            raise MoveError(
                f"event {index} is not L(k) with a strand below", location=index, rule="pattern"
            )
        pattern = [("L", k + 1), ("X", k), ("X", k + 1)]
    elif variant == "II_right_above":
        if kind != "R" or k < 2:
            raise MoveError(
                f"event {index} is not R(k) with k >= 2", location=index, rule="pattern"
            )
        pattern = [("X", k - 1), ("X", k), ("R", k - 1)]
    elif variant == "II_right_below":
        n = word.profile[index]
        if kind != "R" or k + 2 > n - 1:
            raise MoveError(
                f"event {index} is not R(k) with a strand below the cusp",
                location=index,
                rule="pattern",
            )
        pattern = [("X", k + 1), ("X", k), ("R", k + 1)]
    else:  # pragma: no cover
        raise MoveError(f"unknown variant {variant}")
    events[index : index + 1] = pattern
    return events


def _contract_ii(word, index, variant):
    events = list(word.events)
    if index + 3 > len(events):
        raise MoveError("pattern runs past the end of the word", location=index, rule="pattern")
    e0, e1, e2 = events[index : index + 3]
    if variant == "II_left_above":
        ok = e0[0] == "L" and e1 == ("X", e0[1] + 1) and e2 == ("X", e0[1])
        replacement = [("L", e0[1] + 1)]
    elif variant == "II_left_below":
        ok = (
            e0[0] == "L"
            and e0[1] >= 2
            and e1 == ("X", e0[1] - 1)
            and e2 == ("X", e0[1])
        )
        replacement = [("L", e0[1] - 1)]
    elif variant == "II_right_above":
        ok = (
            e2[0] == "R"
            and e0 == ("X", e2[1])
            and e1 == ("X", e2[1] + 1)
        )
        replacement = [("R", e2[1] + 1)]
    elif variant == "II_right_below":
        ok = (
            e2[0] == "R"
            and e2[1] >= 2
            and e0 == ("X", e2[1])
            and e1 == ("X", e2[1] - 1)
        )
        replacement = [("R", e2[1] - 1)]
    else:  # pragma: no cover
        raise MoveError(f"unknown variant {variant}")
    if not ok:
        raise MoveError(
            f"events {index}..{index + 2} do not match the {variant} pattern",
            location=index,
            rule="pattern",
        )
    events[index : index + 3] = replacement
    return events


# -- move III and slides --------------------------------------------------


def _triangle(word, index):
    events = list(word.events)
    if index + 3 > len(events):
        raise MoveError("pattern runs past the end of the word", location=index, rule="pattern")
    e0, e1, e2 = events[index : index + 3]
    if not (e0[0] == e1[0] == e2[0] == "X" and e0 == e2 and abs(e0[1] - e1[1]) == 1):
        raise MoveError(
            f"events {index}..{index + 2} are not a braid-relation triple",
            location=index,
            rule="pattern",
        )
    events[index : index + 3] = [e1, e0, e1]
    return events


def _slide(word, index):
    """Exchange events index and index+1 when their strand supports are
    disjoint (a planar isotopy, not one of the three moves)."""
    events = list(word.events)
    if index + 2 > len(events):
        raise MoveError("no event pair at this index", location=index, rule="pattern")
    a, b = events[index], events[index + 1]
    ka, kb = a[1], b[1]
    delta_a = {"L": 2, "R": -2, "X": 0}[a[0]]
    delta_b = {"L": 2, "R": -2, "X": 0}[b[0]]
    # b's index lives in the coordinates after a acted; express it before a
    if kb > ka + 1:
        kb_before = kb - delta_a
    elif kb + 1 < ka:
        kb_before = kb
    else:
        raise MoveError(
            f"events {index} and {index + 1} share strand support: cannot slide",
            location=index,
            rule="pattern",
        )
    if not (kb_before > ka + 1 or kb_before + 1 < ka):
        raise MoveError(
            f"events {index} and {index + 1} share strand support: cannot slide",
            location=index,
            rule="pattern",
        )
    ka_after = ka + delta_b if ka > kb_before else ka
    events[index], events[index + 1] = (b[0], kb_before), (a[0], ka_after)
    return events


# -- public API -----------------------------------------------------------


def apply_move(
    word: FrontWord,
    move: str,
    index: int,
    strand: int | None = None,
    dry_run: bool = False,
):
    """Apply a named move at the given event index.

    Insertion moves (I_above, I_below) also need the strand position; all
    other moves read their pattern from the word.  Returns the rewritten
    word; with dry_run=True just validates the precondition and returns
    the input word.  Moves I-III preserve tb and r, which is asserted.
    """
    if move not in MOVES:
        raise MoveError(f"unknown move {move!r}", rule="move-name")
    if move in ("I_above", "I_below"):
        if strand is None:
            raise MoveError(f"{move} needs a strand position", rule="position")
        events = _insert_i(word, index, strand, above=(move == "I_above"))
    elif move in ("I_above_inv", "I_below_inv"):
        events = _delete_i(word, index, above=(move == "I_above_inv"))
    elif move.startswith("II_") and move.endswith("_inv"):
        events = _contract_ii(word, index, move[: -len("_inv")])
    elif move.startswith("II_"):
        events = _expand_ii(word, index, move)
    elif move == "III":
        events = _triangle(word, index)
    else:
        events = _slide(word, index)
    new_word = _rebuild(word, events, move)
    before = invariants(word)
    after = invariants(new_word)
    if (before.tb, before.r) != (after.tb, after.r):
        raise MoveError(
            f"{move} changed (tb, r) from ({before.tb}, {before.r}) to "
            f"({after.tb}, {after.r}): rewrite is not a Legendrian move",
            rule="invariants",
        )
    if dry_run:
        return word
    return new_word


def move_applicable(word: FrontWord, move: str, index: int, strand: int | None = None) -> bool:
    try:
        apply_move(word, move, index, strand, dry_run=True)
        return True
    except MoveError:
        return False


def stabilize(word: FrontWord, sign: str, index: int, strand: int) -> FrontWord:
    """Insert a zig-zag on the given strand: tb drops by 1 and r moves by
    +1 (positive stabilization) or -1 (negative).

    Both cusp-pair insertions [Lp, Rp+1] and [Lp+1, Rp] are zig-zags; which
    one realizes which sign depends on the strand's traversal direction,
    so the variant is chosen by computing the result.
    """
    if sign not in ("+", "-"):
        raise MoveError(f"stabilization sign must be '+' or '-', got {sign!r}", rule="sign")
    n = _strands_at_gap(word, index)
    if not (1 <= strand <= n):
        raise MoveError(
            f"no strand {strand} at event gap {index} (profile {n})",
            location=index,
            rule="position",
        )
    before = invariants(word)
    want_r = before.r + (1 if sign == "+" else -1)
    for pattern in ([("L", strand), ("R", strand + 1)], [("L", strand + 1), ("R", strand)]):
        events = list(word.events)
        events[index:index] = pattern
        candidate = front_from_events(events)
        after = invariants(candidate)
        if after.tb != before.tb - 1:
            raise MoveError(
                "zig-zag insertion failed the stabilization law", rule="invariants"
            )
        if after.r == want_r:
            return candidate
    raise MoveError(
        "no zig-zag variant realizes the requested sign here", rule="pattern"
    )  # pragma: no cover - one of the two variants always matches


def reduce_word(word: FrontWord, max_passes: int = 200) -> FrontWord:
    """Greedy simplification: contract every I/II pattern until stable.

    Used as a knot-type proxy (reduced crossing count); not guaranteed to
    reach a global minimum.
    """
    current = word
    for _ in range(max_passes):
        changed = False
        for move in (
            "I_above_inv",
            "I_below_inv",
            "II_left_above_inv",
            "II_left_below_inv",
            "II_right_above_inv",
            "II_right_below_inv",
        ):
            for index in range(len(current.events)):
                try:
                    current = apply_move(current, move, index)
                    changed = True
                    break
                except MoveError:
                    continue
            if changed:
                break
        if not changed:
            return current
    return current
