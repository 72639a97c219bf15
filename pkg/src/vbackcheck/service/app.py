"""HTTP service: check API, annotation workflow, eval reports."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse

from ..backends.base import GroundingBackend
from ..checker.engine import CheckRequest, check
from ..core.types import HallucinationCategory
from ..errors import ContractError, ValidationError
from ..evalkit.bench import slice_report
from ..evalkit.metrics import DetectionEvalItem, detection_metrics
from ..evalkit.voting import AnnotationRecord
from .store import AnnotationStore, DuplicateSubmission, UnknownSample


def _bad_request(field: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=400, content={"error": message, "field": field}
    )


def _require(body: dict, field: str, kind: type):
    value = body.get(field)
    if not isinstance(value, kind):
        raise _FieldError(field, f"expected {kind.__name__}")
    return value


class _FieldError(Exception):
    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field
        self.message = message


def create_app(store: AnnotationStore,
               grounder: Optional[GroundingBackend] = None,
               static_dir: Optional[str | Path] = None) -> FastAPI:
    app = FastAPI(title="vbackcheck")

    @app.exception_handler(_FieldError)
    async def field_error_handler(request: Request, exc: _FieldError):
        return _bad_request(exc.field, exc.message)

    @app.post("/v1/check")
    async def check_endpoint(request: Request):
        if grounder is None:
            return JSONResponse(
                status_code=503, content={"error": "no grounding backend configured"}
            )
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return _bad_request("", "body is not valid JSON")
        image_ref = _require(body, "image_ref", str)
        response_text = _require(body, "response_text", str)
        template_id = body.get("template_id", "default")
        try:
            req = CheckRequest(
                image_ref=image_ref,
                response_text=response_text,
                template_id=template_id,
            )
        except (ContractError, ValidationError) as exc:
            return _bad_request("response_text", str(exc))
        return check(req, grounder).to_json()

    @app.get("/v1/annotation/next")
    async def next_task(annotator: str = Query(...)):
        task = store.next_task(annotator)
        if task is None:
            return Response(status_code=204)
        return {
            "sample_id": task.id,
            "image": task.image,
            "description": task.description,
        }

    @app.post("/v1/annotation/submit")
    async def submit(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return _bad_request("", "body is not valid JSON")
        sample_id = _require(body, "sample_id", str)
        annotator_id = _require(body, "annotator_id", str)
        hallucinated = _require(body, "hallucinated", bool)
        category = body.get("category")
        if hallucinated:
            if category not in {c.value for c in HallucinationCategory}:
                raise _FieldError(
                    "category",
                    "hallucinated submission requires a category of "
                    "object/attribute/relation",
                )
        elif category is not None:
            raise _FieldError("category", "clean submission must not carry a category")
        record = AnnotationRecord(
            annotator_id=annotator_id,
            hallucinated=hallucinated,
            category=HallucinationCategory(category) if category else None,
        )
        try:
            final = store.submit(sample_id, record)
        except DuplicateSubmission as exc:
            return JSONResponse(status_code=409, content={"error": str(exc)})
        except UnknownSample as exc:
            return JSONResponse(status_code=404, content={"error": str(exc)})
        return {"accepted": True, "final": final.to_json() if final else None}

    @app.get("/v1/annotation/progress")
    async def progress():
        return store.progress().to_json()

    @app.get("/v1/eval/report")
    async def eval_report(pred: str = Query(...)):
        pred_path = Path(pred)
        if not pred_path.exists():
            return JSONResponse(
                status_code=404, content={"error": f"prediction file not found: {pred}"}
            )
        try:
            predictions = _load_predictions(pred_path)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            return _bad_request("pred", f"invalid prediction file: {exc}")
        samples = [s for s in store.finalized_samples() if s.final is not None]
        items = [
            DetectionEvalItem(
                gt_hallucinated=s.final.hallucinated,
                pred_hallucinated=predictions[s.id],
                gt_category=s.final.category,
            )
            for s in samples
            if s.id in predictions
        ]
        return {
            "overall": detection_metrics(items).to_json(),
            "by_source_model": {
                k: v.to_json()
                for k, v in slice_report(samples, predictions, "source_model").items()
            },
            "by_length_bucket": {
                k: v.to_json()
                for k, v in slice_report(samples, predictions, "length_bucket").items()
            },
        }

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def _load_predictions(path: Path) -> dict[str, bool]:
    """Predictions file: JSONL of {"id": str, "hallucinated": bool}."""
    predictions: dict[str, bool] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            predictions[rec["id"]] = bool(rec["hallucinated"])
    return predictions
