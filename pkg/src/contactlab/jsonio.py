"""Canonical JSON encoding shared by the CLI and the HTTP service.

Both frontends must produce byte-identical bodies for equivalent
requests, so everything funnels through one encoder: sorted keys, fixed
separators, no trailing whitespace, and floats through repr (shortest
round-trip representation).
"""

from __future__ import annotations

import json
import math


def _clean(value):
    if isinstance(value, float):
        if not math.isfinite(value):
            return repr(value)
        if value == int(value) and abs(value) < 1e15:
            return value
        return value
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def canonical_json(data) -> bytes:
    """Deterministic JSON bytes: sorted keys, compact separators."""
    return json.dumps(
        _clean(data), sort_keys=True, separators=(",", ":"), ensure_ascii=True
    ).encode("ascii")


def canonical_text(data) -> str:
    return canonical_json(data).decode("ascii")
