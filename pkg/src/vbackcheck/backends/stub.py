"""Deterministic in-process stub backends.

Each stub is a pure function of a user-supplied lookup table (loadable
from a JSONL file) plus a declared default. In strict mode a lookup miss
is a configuration error instead of falling back to the default.

Table line schemas, one JSON object per line:

- grounding:  {"image_id": str, "query": str, "token": "SEG", "mask": {RLE}}
              {"image_id": str, "query": str, "token": "REJ", "explanation": str}
- scorer:     {"key": str, "text": str | null, "score": float}
              (null text matches any text for that key)
- similarity: {"a": str, "b": str, "similarity": float}   (stored symmetric)
- generator:  {"template": str, "match": {slot: value, ...} | null, "text": str}
              (first entry whose template matches and whose match dict is a
              subset of the request slots wins; null match matches anything)
"""

from __future__ import annotations

import json
import unicodedata
from pathlib import Path
from typing import Optional

from ..core.masks import RleMask
from ..core.types import GroundToken
from ..errors import ConfigurationError, FormatError
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


def _normalize_query(query: str) -> str:
    return unicodedata.normalize("NFC", query).casefold().strip()


def _read_jsonl(path: str | Path) -> list[dict]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                entries.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
    return entries


class StubGrounder(GroundingBackend):
    """Table-driven grounding oracle keyed on (image_id, normalized query)."""

    def __init__(self, table: Optional[dict] = None, strict: bool = False,
                 default_explanation: str = "no matching region found"):
        self.table = dict(table or {})
        self.strict = strict
        self.default_explanation = default_explanation

    @classmethod
    def from_jsonl(cls, path: str | Path, strict: bool = False) -> "StubGrounder":
        table = {}
        for entry in _read_jsonl(path):
            key = (entry["image_id"], _normalize_query(entry["query"]))
            if entry["token"] == "SEG":
                table[key] = GroundingResponse(
                    token=GroundToken.SEG, mask=RleMask.from_json(entry["mask"])
                )
            else:
                table[key] = GroundingResponse(
                    token=GroundToken.REJ, explanation=entry["explanation"]
                )
        return cls(table=table, strict=strict)

    def add(self, image_id: str, query: str, response: GroundingResponse) -> None:
        self.table[(image_id, _normalize_query(query))] = response

    def ground(self, req: GroundingRequest) -> GroundingResponse:
        key = (req.image_id, _normalize_query(req.query))
        if key in self.table:
            return self.table[key]
        if self.strict:
            raise ConfigurationError(f"grounding stub has no entry for {key}")
        return GroundingResponse(
            token=GroundToken.REJ, explanation=self.default_explanation
        )


class StubScorer(ScorerBackend):
    def __init__(self, table: Optional[dict] = None, default: float = 0.0,
                 strict: bool = False):
        self.table = dict(table or {})
        self.default = clamp_score(default)
        self.strict = strict

    @classmethod
    def from_jsonl(cls, path: str | Path, default: float = 0.0,
                   strict: bool = False) -> "StubScorer":
        table = {}
        for entry in _read_jsonl(path):
            table[(entry["key"], entry.get("text"))] = float(entry["score"])
        return cls(table=table, default=default, strict=strict)

    def score_image_text(self, req: ScorerRequest) -> float:
        for key in ((req.image_key, req.text), (req.image_key, None)):
            if key in self.table:
                return clamp_score(self.table[key])
        if self.strict:
            raise ConfigurationError(
                f"scorer stub has no entry for key={req.image_key!r}"
            )
        return self.default


class StubSimilarity(SimilarityBackend):
    """Symmetric similarity table; identical strings always score 1.0."""

    def __init__(self, table: Optional[dict] = None, default: float = 0.0,
                 strict: bool = False):
        self.table = {}
        for (a, b), value in (table or {}).items():
            self.table[self._key(a, b)] = float(value)
        self.default = clamp_score(default)
        self.strict = strict

    @staticmethod
    def _key(a: str, b: str) -> tuple[str, str]:
        return (a, b) if a <= b else (b, a)

    @classmethod
    def from_jsonl(cls, path: str | Path, default: float = 0.0,
                   strict: bool = False) -> "StubSimilarity":
        table = {}
        for entry in _read_jsonl(path):
            table[(entry["a"], entry["b"])] = float(entry["similarity"])
        return cls(table=table, default=default, strict=strict)

    def text_similarity(self, req: SimilarityRequest) -> float:
        if req.a == req.b:
            return 1.0
        key = self._key(req.a, req.b)
        if key in self.table:
            return clamp_score(self.table[key])
        if self.strict:
            raise ConfigurationError(f"similarity stub has no entry for {key}")
        return self.default


def _default_caption(slots: dict) -> str:
    bbox = slots.get("bbox")
    return f"an object at region {bbox} of image {slots.get('image_id')}"


def _default_inject(slots: dict) -> str:
    caption = slots.get("caption", "")
    return json.dumps(
        {
            "text": caption + ", glowing faintly",
            "type": "nonexistent attribute",
            "explanation": "nothing in the image is glowing",
        }
    )


def _default_holistic(slots: dict) -> str:
    captions = slots.get("captions") or []
    return "The image shows: " + "; ".join(captions) + "."


_DEFAULT_TRANSFORMS = {
    "caption": _default_caption,
    "inject": _default_inject,
    "holistic": _default_holistic,
}


class StubGenerator(GenerationBackend):
    """Entry list with subset-matching on slots; falls back to the
    documented per-template transform unless strict."""

    def __init__(self, entries: Optional[list[dict]] = None, strict: bool = False):
        self.entries = list(entries or [])
        self.strict = strict

    @classmethod
    def from_jsonl(cls, path: str | Path, strict: bool = False) -> "StubGenerator":
        return cls(entries=_read_jsonl(path), strict=strict)

    def generate(self, req: GenerationRequest) -> str:
        for entry in self.entries:
            if entry.get("template") != req.template:
                continue
            match = entry.get("match")
            if match is None or all(
                req.slots.get(k) == v for k, v in match.items()
            ):
                return entry["text"]
        if self.strict:
            raise ConfigurationError(
                f"generator stub has no entry for template {req.template!r}"
            )
        transform = _DEFAULT_TRANSFORMS.get(req.template)
        if transform is None:
            raise ConfigurationError(
                f"no default transform for template {req.template!r}"
            )
        return transform(req.slots)
