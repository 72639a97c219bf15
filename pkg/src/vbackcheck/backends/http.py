"""Remote HTTP clients for the four backend interfaces.

Wire contract (all POST, JSON, UTF-8):

- /ground      {"image_id": str | "image_b64": str, "query": str}
               -> {"token": "SEG", "mask": {RLE}} | {"token": "REJ", "explanation": str}
- /score       {"image_b64": str, "text": str} -> {"score": float}
- /similarity  {"a": str, "b": str} -> {"similarity": float}
- /generate    {"template": str, "slots": {...}} -> {"text": str}

Grounding/scoring/similarity calls are idempotent and retried up to
``max_retries`` times with exponential backoff; generation is never
retried automatically.
"""

from __future__ import annotations

import base64
import time

import httpx

from ..core.masks import RleMask
from ..core.types import GroundToken
from ..errors import FormatError, ProtocolError, TransportError, ValidationError
from .base import (
    GenerationBackend,
    GenerationRequest,
    GroundingBackend,
    GroundingRequest,
    GroundingResponse,
    ScorerBackend,
    ScorerRequest,
    SimilarityBackend,
    SimilarityRequest,
    clamp_score,
)


class _HttpClient:
    def __init__(self, base_url: str, max_retries: int = 3,
                 backoff_base: float = 0.25, timeout: float = 30.0,
                 client: httpx.Client | None = None):
        self.base_url = base_url.rstrip("/")
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._client = client or httpx.Client(timeout=timeout)

    def _post(self, path: str, payload: dict, retry: bool) -> dict:
        url = f"{self.base_url}{path}"
        attempts = self.max_retries + 1 if retry else 1
        last_exc: Exception | None = None
        for attempt in range(attempts):
            if attempt:
                time.sleep(self.backoff_base * (2 ** (attempt - 1)))
            try:
                resp = self._client.post(url, json=payload)
            except httpx.HTTPError as exc:
                last_exc = exc
                continue
            if resp.status_code >= 500:
                last_exc = TransportError(f"{url} -> {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise ProtocolError(
                    f"{url} -> {resp.status_code}", raw=resp.text
                )
            try:
                return resp.json()
            except ValueError as exc:
                raise ProtocolError(
                    f"{url}: response is not JSON", raw=resp.text
                ) from exc
        raise TransportError(f"{url}: unreachable after {attempts} attempts") from last_exc

    def close(self) -> None:
        self._client.close()


class RemoteGrounder(_HttpClient, GroundingBackend):
    def ground(self, req: GroundingRequest) -> GroundingResponse:
        payload: dict = {"query": req.query}
        if req.image_id is not None:
            payload["image_id"] = req.image_id
        else:
            payload["image_b64"] = req.image_b64
        body = self._post("/ground", payload, retry=True)
        token = body.get("token")
        try:
            if token == "SEG":
                return GroundingResponse(
                    token=GroundToken.SEG, mask=RleMask.from_json(body.get("mask"))
                )
            if token == "REJ":
                return GroundingResponse(
                    token=GroundToken.REJ, explanation=body.get("explanation")
                )
        except (ValidationError, FormatError, TypeError) as exc:
            raise ProtocolError(
                f"invalid grounding response: {exc}", raw=str(body)
            ) from exc
        raise ProtocolError(
            f"grounding response token is neither SEG nor REJ: {token!r}",
            raw=str(body),
        )


class RemoteScorer(_HttpClient, ScorerBackend):
    def score_image_text(self, req: ScorerRequest) -> float:
        image_b64 = base64.b64encode(req.image_bytes or b"").decode("ascii")
        body = self._post(
            "/score", {"image_b64": image_b64, "text": req.text}, retry=True
        )
        try:
            return clamp_score(float(body["score"]))
        except (KeyError, TypeError, ValueError, ValidationError) as exc:
            raise ProtocolError(f"invalid score response: {exc}", raw=str(body)) from exc


class RemoteSimilarity(_HttpClient, SimilarityBackend):
    def text_similarity(self, req: SimilarityRequest) -> float:
        body = self._post("/similarity", {"a": req.a, "b": req.b}, retry=True)
        try:
            return clamp_score(float(body["similarity"]))
        except (KeyError, TypeError, ValueError, ValidationError) as exc:
            raise ProtocolError(
                f"invalid similarity response: {exc}", raw=str(body)
            ) from exc


class RemoteGenerator(_HttpClient, GenerationBackend):
    def generate(self, req: GenerationRequest) -> str:
        body = self._post(
            "/generate", {"template": req.template, "slots": req.slots}, retry=False
        )
        text = body.get("text")
        if not isinstance(text, str) or not text:
            raise ProtocolError("generation response missing text", raw=str(body))
        return text
