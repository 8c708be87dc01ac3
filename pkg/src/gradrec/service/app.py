"""FastAPI application exposing retrieval, direction building and traversal.

The service is stateless with respect to sessions: clients carry their own
seen sets, so replaying single steps reproduces a server-side traversal
exactly. Every response body equals the corresponding library call's
serialization. Errors return ``{"error_code", "message"}`` with a status
from the mapping below.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .. import __version__
from ..direction import DirectionVector, build_direction
from ..errors import GradRecError, InvalidParameter, UnknownSeed
from ..defaults import load_defaults, traversal_config
from ..evaluation import project_2d
from ..index import neighbors_payload, retrieve_payload
from ..traversal import step_once, traverse
from .schemas import (
    DirectionRef,
    DirectionRequest,
    ProjectRequest,
    RetrieveRequest,
    StepRequest,
    TraverseRequest,
)
from .state import ServiceState


class CatalogNotLoaded(GradRecError):
    code = "CatalogNotLoaded"


_STATUS_BY_CODE = {
    "UnknownPrompt": 404,
    "UnknownSeed": 404,
    "ZeroSignal": 422,
    "DegenerateMean": 422,
    "DegenerateStep": 422,
    "CatalogNotLoaded": 503,
}


def create_app(state: ServiceState | None = None) -> FastAPI:
    app = FastAPI(title="gradrec", version=__version__)
    app.state.gradrec = state
    app.state.defaults = load_defaults()
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(GradRecError)
    async def on_domain_error(_: Request, exc: GradRecError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(
            status_code=status, content={"error_code": exc.code, "message": str(exc)}
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(_: Request, exc: RequestValidationError):
        message = "; ".join(
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        )
        return JSONResponse(
            status_code=400,
            content={"error_code": "InvalidParameter", "message": message},
        )

    def require_state() -> ServiceState:
        if app.state.gradrec is None:
            raise CatalogNotLoaded("no catalog loaded")
        return app.state.gradrec

    def resolve_direction(
        st: ServiceState, inline: dict | None, ref: DirectionRef | None
    ) -> DirectionVector:
        if (inline is None) == (ref is None):
            raise InvalidParameter("provide exactly one of direction, direction_ref")
        if inline is not None:
            try:
                return DirectionVector.from_json(inline)
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidParameter(f"malformed inline direction: {exc}") from exc
        d = app.state.defaults
        m = ref.m if ref.m is not None else d["class_m"]
        n = ref.n if ref.n is not None else d["class_n"]
        epsilon = ref.epsilon if ref.epsilon is not None else d["epsilon"]
        key = (ref.neutral_prompt, ref.exemplar_prompt, m, n, epsilon)
        direction, _ = st.directions.get_or_build(
            key,
            lambda: build_direction(
                st.index,
                st.bank,
                neutral_prompt=ref.neutral_prompt,
                exemplar_prompt=ref.exemplar_prompt,
                m=m,
                n=n,
                epsilon=epsilon,
            ),
        )
        return direction.invert() if ref.invert else direction

    @app.get("/v1/catalog/stats")
    def catalog_stats():
        st = require_state()
        return {
            "dim": st.catalog.dim,
            "product_count": len(st.catalog),
            "prompt_count": len(st.bank),
        }

    @app.post("/v1/retrieve")
    def retrieve(req: RetrieveRequest):
        st = require_state()
        neighbors = st.index.retrieve_by_prompt(st.bank, req.prompt, req.n)
        return {"items": retrieve_payload(st.catalog, neighbors)}

    @app.post("/v1/direction")
    def direction(req: DirectionRequest):
        st = require_state()
        d = app.state.defaults
        m = req.m if req.m is not None else d["class_m"]
        n = req.n if req.n is not None else d["class_n"]
        epsilon = req.epsilon if req.epsilon is not None else d["epsilon"]
        key = (req.neutral_prompt, req.exemplar_prompt, m, n, epsilon)
        built, hit = st.directions.get_or_build(
            key,
            lambda: build_direction(
                st.index,
                st.bank,
                neutral_prompt=req.neutral_prompt,
                exemplar_prompt=req.exemplar_prompt,
                m=m,
                n=n,
                epsilon=epsilon,
            ),
        )
        return {"direction": built.to_json(), "cache_hit": hit}

    @app.post("/v1/traverse")
    def traverse_endpoint(req: TraverseRequest):
        st = require_state()
        direction = resolve_direction(st, req.direction, req.direction_ref)
        cfg = traversal_config(
            app.state.defaults,
            step_scale=req.lambda_,
            reg_weight=req.rho,
            max_steps=req.steps,
            k_rec=req.k_rec,
            k_reg=req.k_reg,
        )
        path = traverse(req.seed_id, direction, st.index, cfg)
        return path.to_json(include_positions=req.include_positions)

    @app.post("/v1/step")
    def step_endpoint(req: StepRequest):
        st = require_state()
        if (req.position is None) == (req.seed_id is None):
            raise InvalidParameter("provide exactly one of position, seed_id")
        if req.seed_id is not None:
            if req.seed_id not in st.catalog:
                raise UnknownSeed(f"seed product {req.seed_id!r} not in catalog")
            position = st.catalog.vector_of(req.seed_id)
        else:
            position = np.asarray(req.position, dtype=np.float32)
        direction = resolve_direction(st, req.direction, req.direction_ref)
        cfg = traversal_config(
            app.state.defaults,
            step_scale=req.lambda_,
            reg_weight=req.rho,
            k_rec=req.k_rec,
            k_reg=req.k_reg,
        )
        outcome = step_once(position, direction, st.index, cfg, set(req.exclude))
        return {
            "position": [float(x) for x in outcome.position],
            "recommendations": neighbors_payload(list(outcome.recommendations)),
            "drift": outcome.drift,
            "exhausted": outcome.exhausted,
        }

    @app.post("/v1/project")
    def project(req: ProjectRequest):
        st = require_state()
        positions = None
        if req.positions:
            try:
                positions = np.asarray(req.positions, dtype=np.float64)
            except ValueError as exc:
                raise InvalidParameter(f"positions must be a rectangular matrix: {exc}") from exc
        if req.ids:
            missing = [pid for pid in req.ids if pid not in st.catalog]
            if missing:
                raise UnknownSeed(f"products not in catalog: {missing[:3]}")
            vectors = np.stack([st.catalog.vector_of(pid) for pid in req.ids])
            points, path_pts = project_2d(vectors, positions)
        elif positions is not None:
            # No anchor products: fit the plane on the positions themselves.
            path_pts, _ = project_2d(positions)
            points = np.zeros((0, 2))
        else:
            raise InvalidParameter("provide ids and/or positions")
        return {
            "products": [
                {"id": pid, "x": float(x), "y": float(y)}
                for pid, (x, y) in zip(req.ids, points)
            ],
            "path": [{"x": float(x), "y": float(y)} for x, y in (path_pts if path_pts is not None else [])],
        }

    return app
