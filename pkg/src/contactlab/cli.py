"""Command-line frontend.

Every subcommand routes into the shared operation handlers and writes the
canonical JSON (or SVG) artifact to --out or stdout.  Exit codes: 0 on
success, 2 on validation errors (with error JSON on stderr), 3 on
internal numerical failures, 64 for unknown subcommands.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import ops
from .errors import ContactLabError, NumericalError
from .jsonio import canonical_json

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 64


def _write_artifact(data, out_path: str | None, fmt: str):
    if fmt == "svg":
        if isinstance(data, dict) and "svg" in data:
            payload = data["svg"].encode()
        else:
            raise ContactLabError("no SVG artifact produced by this command", rule="format")
    else:
        payload = canonical_json(data) + b"\n"
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()


def _load_surface_arg(path_or_inline: str) -> dict:
    text = path_or_inline.strip()
    if text.startswith("{"):
        return json.loads(text)
    with open(path_or_inline) as fh:
        return json.load(fh)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contactlab",
        description="contact geometry workbench: contact forms, characteristic "
        "foliations, dividing sets, and Legendrian fronts",
    )
    sub = parser.add_subparsers(dest="command")

    def add_common(p):
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "svg"), default="json")

    p = sub.add_parser("check-contact", help="verify alpha ^ d(alpha) != 0 on a grid")
    p.add_argument("--form", required=True, help="1-form text or a named model form")
    p.add_argument("--box", help="box as 'lo,hi' or six comma-separated bounds")
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-9)
    add_common(p)

    p = sub.add_parser("foliate", help="characteristic foliation report for a surface")
    p.add_argument("--form", required=True)
    p.add_argument("--surface", required=True, help="surface JSON file or inline JSON")
    p.add_argument("--grid", type=int, default=64)
    add_common(p)

    p = sub.add_parser("dividing-set", help="candidate dividing set with certificate")
    p.add_argument("--form", required=True)
    p.add_argument("--surface", required=True)
    p.add_argument("--grid", type=int, default=96)
    p.add_argument("--standard-form", action="store_true")
    add_common(p)

    p = sub.add_parser("front-invariants", help="classical invariants of a front word")
    p.add_argument("word")
    add_common(p)

    p = sub.add_parser("front-move", help="apply a Legendrian Reidemeister move")
    p.add_argument("word")
    p.add_argument("--move", required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--strand", type=int)
    add_common(p)

    p = sub.add_parser("stabilize", help="insert a zig-zag stabilization")
    p.add_argument("word")
    p.add_argument("--sign", choices=("+", "-"), required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--strand", type=int, required=True)
    add_common(p)

    p = sub.add_parser("bennequin", help="Seifert data and Bennequin bound check")
    p.add_argument("word")
    add_common(p)

    p = sub.add_parser("approximate", help="C0 Legendrian approximation of a polyline")
    p.add_argument("--points", required=True, help="JSON file with [[x,y,z],...] samples")
    p.add_argument("--epsilon", type=float, required=True)
    add_common(p)

    p = sub.add_parser("render", help="SVG of a front or a foliation")
    p.add_argument("--word")
    p.add_argument("--form")
    p.add_argument("--surface")
    p.add_argument("--samples", type=int, default=16)
    add_common(p)

    p = sub.add_parser("serve", help="run the JSON-over-HTTP service")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _payload_from_args(args) -> tuple:
    cmd = args.command
    if cmd == "check-contact":
        payload = {"form": args.form, "grid": args.grid, "tol": args.tol}
        if args.box:
            payload["box"] = [float(v) for v in args.box.split(",")]
        return "contact/check", payload
    if cmd == "foliate":
        return "foliation/run", {
            "form": args.form,
            "surface": _load_surface_arg(args.surface),
            "grid": args.grid,
        }
    if cmd == "dividing-set":
        return "foliation/dividing-set", {
            "form": args.form,
            "surface": _load_surface_arg(args.surface),
            "grid": args.grid,
            "standard_form": args.standard_form,
        }
    if cmd == "front-invariants":
        return "front/invariants", {"word": args.word}
    if cmd == "front-move":
        payload = {"word": args.word, "move": args.move, "index": args.index}
        if args.strand is not None:
            payload["strand"] = args.strand
        return "front/move", payload
    if cmd == "stabilize":
        return "front/stabilize", {
            "word": args.word,
            "sign": args.sign,
            "index": args.index,
            "strand": args.strand,
        }
    if cmd == "bennequin":
        return "front/bennequin", {"word": args.word}
    if cmd == "approximate":
        with open(args.points) as fh:
            points = json.load(fh)
        return "front/approximate", {"points": points, "epsilon": args.epsilon}
    if cmd == "render":
        payload = {}
        if args.word:
            payload["word"] = args.word
            payload["samples_per_segment"] = args.samples
        if args.form and args.surface:
            payload["form"] = args.form
            payload["surface"] = _load_surface_arg(args.surface)
        return "render", payload
    raise ContactLabError(f"unknown subcommand {cmd!r}")


def _merge_dash_values(argv):
    """Let value options accept leading-dash values given with a space,
    e.g. `--box -1,1` (argparse would otherwise read -1,1 as a flag)."""
    out = []
    i = 0
    value_opts = {"--box", "--points", "--epsilon", "--tol"}
    while i < len(argv):
        arg = argv[i]
        if arg in value_opts and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            nxt = argv[i + 1]
            if len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{arg}={nxt}")
                i += 2
                continue
        out.append(arg)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _merge_dash_values(list(sys.argv[1:] if argv is None else argv))
    if argv and argv[0] not in (
        "check-contact",
        "foliate",
        "dividing-set",
        "front-invariants",
        "front-move",
        "stabilize",
        "bennequin",
        "approximate",
        "render",
        "serve",
        "-h",
        "--help",
    ):
        sys.stderr.write(
            canonical_json({"error": f"unknown subcommand {argv[0]!r}"}).decode() + "\n"
        )
        return EXIT_USAGE
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    if args.command == "serve":
        from .service import run_server

        run_server(host=args.host, port=args.port)
        return EXIT_OK
    try:
        op_name, payload = _payload_from_args(args)
        result = ops.OPERATIONS[op_name](payload)
        _write_artifact(result, args.out, args.format)
        return EXIT_OK
    except NumericalError as exc:
        sys.stderr.write(canonical_json(exc.to_json()).decode() + "\n")
        return EXIT_NUMERIC
    except ContactLabError as exc:
        sys.stderr.write(canonical_json(exc.to_json()).decode() + "\n")
        return EXIT_INVALID
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        sys.stderr.write(
            canonical_json({"error": f"{type(exc).__name__}: {exc}"}).decode() + "\n"
        )
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
