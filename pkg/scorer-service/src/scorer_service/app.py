"""FastAPI application exposing the pair-scoring wire protocol.

POST /score  body: JSON array of {"text_a", "text_b", "kinds"?}
             response: JSON array of {kind: score} in request order,
             X-Model-Version header echoing the pinned model versions.
GET /health  model inventory and versions.

Errors: empty batch 400, oversize batch 413, unserved kind 503.
"""

from __future__ import annotations

import argparse
import os

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .models import load_config, load_models, version_string

CONFIG_ENV = "SCORER_SERVICE_CONFIG"


class PairRequest(BaseModel):
    text_a: str
    text_b: str
    kinds: list[str] | None = None


def create_app(config_path: str | None = None) -> FastAPI:
    config = load_config(config_path or os.environ.get(CONFIG_ENV))
    models = load_models(config)
    versions = version_string(models)
    max_batch = int(config["max_batch"])
    app = FastAPI(title="scorer-service")

    @app.post("/score")
    def score(batch: list[PairRequest]):
        if not batch:
            raise HTTPException(status_code=400, detail="empty batch")
        if len(batch) > max_batch:
            raise HTTPException(
                status_code=413, detail=f"batch of {len(batch)} exceeds cap {max_batch}"
            )
        results = []
        for item in batch:
            kinds = item.kinds if item.kinds is not None else sorted(models)
            entry = {}
            for kind in kinds:
                model = models.get(kind)
                if model is None:
                    raise HTTPException(
                        status_code=503, detail=f"model not loaded: {kind}"
                    )
                value = float(model.score(item.text_a, item.text_b))
                if not 0.0 <= value <= 1.0:  # enforce the contract server-side
                    raise HTTPException(
                        status_code=500,
                        detail=f"backend for {kind} produced out-of-range score {value}",
                    )
                entry[kind] = round(value, 6)
            results.append(entry)
        return JSONResponse(content=results, headers={"X-Model-Version": versions})

    @app.get("/health")
    def health():
        payload = {
            "status": "ok",
            "models": {
                kind: {"name": model.name, "version": model.version}
                for kind, model in sorted(models.items())
            },
        }
        return JSONResponse(content=payload, headers={"X-Model-Version": versions})

    return app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="scorer-service", description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8400)
    parser.add_argument("--config", default=None, help="model-pinning JSON config")
    args = parser.parse_args(argv)
    import uvicorn

    uvicorn.run(create_app(args.config), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
