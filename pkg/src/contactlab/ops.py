"""Operation handlers shared by the CLI and the HTTP service.

Each handler takes a plain dict payload and returns a plain dict result;
the two frontends serialize through the same canonical encoder, so
equivalent requests produce byte-identical JSON bodies.  All handlers are
pure and stateless.
"""

from __future__ import annotations

from . import approx, contact, dividing, foliation, forms, fronts, moves, seifert, spacecurve, svgout
from .errors import ContactLabError, DomainError
from .surfaces import Surface


def _domain_from_payload(payload: dict) -> contact.Domain:
    if "domain" in payload and payload["domain"]:
        return contact.Domain.from_json(payload["domain"])
    box = payload.get("box")
    if box:
        if len(box) == 2:
            return contact.Domain.box(float(box[0]), float(box[1]))
        if len(box) == 6:
            return contact.Domain(
                (float(box[0]), float(box[1])),
                (float(box[2]), float(box[3])),
                (float(box[4]), float(box[5])),
            )
        raise DomainError("box must be [lo, hi] or six bounds")
    return contact.Domain.box(-1.0, 1.0)


def check_contact_op(payload: dict) -> dict:
    form = contact.resolve_form(payload["form"])
    domain = _domain_from_payload(payload)
    result = contact.check_contact(
        form,
        domain,
        grid_resolution=int(payload.get("grid", 32)),
        tolerance=float(payload.get("tol", 1e-9)),
    )
    return result.to_json()


def foliation_op(payload: dict) -> dict:
    alpha = contact.resolve_form(payload["form"])
    surface = Surface.from_json(payload["surface"])
    report = foliation.foliate(
        alpha,
        surface,
        grid=int(payload.get("grid", 64)),
        search_closed=bool(payload.get("closed_leaves", True)),
    )
    out = report.to_json()
    if surface.is_closed() and report.euler_class_computed is not None:
        out["genus_bound"] = foliation.check_genus_bound(report, surface)
    if surface.topology == "disk" and payload.get("overtwisted_witness", True):
        out["overtwisted_witness"] = foliation.overtwisted_witness(surface, alpha)
    return out


def dividing_set_op(payload: dict) -> dict:
    alpha = contact.resolve_form(payload["form"])
    surface = Surface.from_json(payload["surface"])
    pb = foliation.pullback(alpha, surface)
    options = {}
    if "grid" in payload:
        options["grid"] = int(payload["grid"])
    report = dividing.dividing_set(pb, options)
    out = report.to_json()
    if surface.topology == "torus" and payload.get("standard_form", False):
        out["standard_form"] = dividing.standard_form_check(surface, pb)
    return out


def front_parse_op(payload: dict) -> dict:
    word = fronts.parse_front(payload["word"])
    return {
        "word": word.to_text(),
        "events": len(word.events),
        "crossings": word.crossing_count(),
        "cusps": word.cusp_count(),
        "profile": list(word.profile),
    }


def front_invariants_op(payload: dict) -> dict:
    word = fronts.parse_front(payload["word"])
    oriented = fronts.OrientedFront.orient(word, reverse=bool(payload.get("reverse", False)))
    return fronts.invariants(oriented).to_json()


def front_move_op(payload: dict) -> dict:
    word = fronts.parse_front(payload["word"])
    strand = payload.get("strand")
    new_word = moves.apply_move(
        word,
        payload["move"],
        int(payload["index"]),
        int(strand) if strand is not None else None,
        dry_run=bool(payload.get("dry_run", False)),
    )
    return {
        "word": new_word.to_text(),
        "invariants": fronts.invariants(new_word).to_json(),
        "applicable": True,
    }


def front_moves_list_op(payload: dict) -> dict:
    """Enumerate every applicable (move, index, strand) for a word."""
    word = fronts.parse_front(payload["word"])
    available = []
    for move in moves.MOVES:
        if move in ("I_above", "I_below"):
            for index in range(len(word.events) + 1):
                for strand in range(1, word.profile[index] + 1):
                    if moves.move_applicable(word, move, index, strand):
                        available.append({"move": move, "index": index, "strand": strand})
        else:
            for index in range(len(word.events)):
                if moves.move_applicable(word, move, index):
                    available.append({"move": move, "index": index, "strand": None})
    return {"word": word.to_text(), "moves": available}


def front_stabilize_op(payload: dict) -> dict:
    word = fronts.parse_front(payload["word"])
    new_word = moves.stabilize(
        word,
        payload["sign"],
        int(payload["index"]),
        int(payload["strand"]),
    )
    return {
        "word": new_word.to_text(),
        "invariants": fronts.invariants(new_word).to_json(),
    }


def front_geometry_op(payload: dict) -> dict:
    word = fronts.parse_front(payload["word"])
    samples = int(payload.get("samples_per_segment", 16))
    curve = spacecurve.to_space_curve(word, samples)
    return {
        "word": word.to_text(),
        "strands": svgout.front_path_data(word, samples),
        "svg": svgout.front_svg(word, samples),
        "space_curve": curve.to_json(),
        "legendrian_residual": curve.legendrian_residual(),
        "invariants": fronts.invariants(word).to_json(),
    }


def bennequin_op(payload: dict) -> dict:
    word = fronts.parse_front(payload["word"])
    inv = fronts.invariants(word)
    sd = seifert.seifert_surface(fronts.underlying_diagram(word))
    check = seifert.bennequin_check(inv, sd)
    return {
        "word": word.to_text(),
        "invariants": inv.to_json(),
        "seifert": sd.to_json(),
        "bennequin": check,
    }


def approximate_op(payload: dict) -> dict:
    result = approx.legendrian_approximate(
        payload["points"],
        float(payload["epsilon"]),
        max_events=int(payload.get("max_events", approx.MAX_EVENTS_DEFAULT)),
    )
    return result.to_json()


def render_op(payload: dict) -> dict:
    if "word" in payload:
        word = fronts.parse_front(payload["word"])
        return {"svg": svgout.front_svg(word, int(payload.get("samples_per_segment", 16)))}
    if "surface" in payload and "form" in payload:
        alpha = contact.resolve_form(payload["form"])
        surface = Surface.from_json(payload["surface"])
        pb = foliation.pullback(alpha, surface)
        leaves = []
        for seed in foliation.default_seed_lattice(surface, 6):
            w1, w2 = pb.field_at(*seed)
            if abs(complex(float(w1), float(w2))) < 1e-6:
                continue
            leaves.append(foliation.integrate_leaf(pb, seed, max_length=3.0).points)
        curves = [leaves]
        report = dividing.dividing_set(pb)
        if report.status == "certified":
            curves.append([c.points for c in report.curves])
        return {"svg": svgout.chart_curves_svg(curves)}
    raise ContactLabError("render needs a front word or a form and surface", rule="payload")


OPERATIONS = {
    "contact/check": check_contact_op,
    "foliation/run": foliation_op,
    "foliation/dividing-set": dividing_set_op,
    "front/parse": front_parse_op,
    "front/invariants": front_invariants_op,
    "front/move": front_move_op,
    "front/moves": front_moves_list_op,
    "front/stabilize": front_stabilize_op,
    "front/geometry": front_geometry_op,
    "front/bennequin": bennequin_op,
    "front/approximate": approximate_op,
    "render": render_op,
}
