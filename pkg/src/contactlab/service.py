"""Local JSON-over-HTTP service.

Stateless: every handler calls the same pure operation functions as the
CLI and returns the same canonical bytes, so the two frontends are
byte-identical for equivalent requests.  Validation errors map to 422
with the shared error JSON schema.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import Response

from . import ops
from .errors import ContactLabError, NumericalError
from .jsonio import canonical_json

ENDPOINTS = {
    "/api/contact/check": "contact/check",
    "/api/foliation/run": "foliation/run",
    "/api/foliation/dividing-set": "foliation/dividing-set",
    "/api/front/parse": "front/parse",
    "/api/front/invariants": "front/invariants",
    "/api/front/move": "front/move",
    "/api/front/moves": "front/moves",
    "/api/front/stabilize": "front/stabilize",
    "/api/front/geometry": "front/geometry",
    "/api/front/bennequin": "front/bennequin",
    "/api/front/approximate": "front/approximate",
}


def create_app() -> FastAPI:
    app = FastAPI(title="contactlab", docs_url=None, redoc_url=None)

    @app.get("/api/health")
    def health():
        return Response(content=b"ok", media_type="text/plain")

    def make_handler(op_name):
        op = ops.OPERATIONS[op_name]

        async def handler(request: Request):
            try:
                payload = json.loads(await request.body() or b"{}")
            except json.JSONDecodeError as exc:
                return Response(
                    content=canonical_json({"error": f"malformed JSON: {exc}"}),
                    status_code=422,
                    media_type="application/json",
                )
            try:
                result = op(payload)
            except NumericalError as exc:
                return Response(
                    content=canonical_json(exc.to_json()),
                    status_code=500,
                    media_type="application/json",
                )
            except ContactLabError as exc:
                return Response(
                    content=canonical_json(exc.to_json()),
                    status_code=422,
                    media_type="application/json",
                )
            except (KeyError, ValueError, TypeError) as exc:
                return Response(
                    content=canonical_json({"error": f"{type(exc).__name__}: {exc}"}),
                    status_code=422,
                    media_type="application/json",
                )
            return Response(
                content=canonical_json(result) + b"\n",
                media_type="application/json",
            )

        return handler

    for path, op_name in ENDPOINTS.items():
        app.post(path)(make_handler(op_name))

    return app


def run_server(host: str = "127.0.0.1", port: int = 8787):
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")
