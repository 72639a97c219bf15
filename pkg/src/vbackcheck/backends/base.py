"""Backend interfaces and request/response types.

Every external model the system touches (grounding LLM, image-text
scorer, text-similarity scorer, caption/perturbation generator) sits
behind one of these four interfaces. Each has a deterministic stub and
a remote HTTP client, so everything runs without a neural model.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional

from ..core.masks import RleMask
from ..core.types import GroundToken
from ..errors import ValidationError


@dataclass(frozen=True)
class GroundingRequest:
    query: str
    image_id: Optional[str] = None
    image_b64: Optional[str] = None

    def __post_init__(self):
        if (self.image_id is None) == (self.image_b64 is None):
            raise ValidationError("exactly one of image_id/image_b64 required")
        if not self.query.strip():
            raise ValidationError("query must be non-empty")


@dataclass(frozen=True)
class GroundingResponse:
    token: GroundToken
    mask: Optional[RleMask] = None
    explanation: Optional[str] = None

    def __post_init__(self):
        if self.token is GroundToken.SEG:
            if self.mask is None or self.explanation is not None:
                raise ValidationError("SEG response requires a mask and nothing else")
        else:
            if self.explanation is None or len(self.explanation) < 1:
                raise ValidationError("REJ response requires a non-empty explanation")
            if self.mask is not None:
                raise ValidationError("REJ response carries no mask")


@dataclass(frozen=True)
class ScorerRequest:
    """Image-text alignment scoring. ``image_key`` is the stub lookup key;
    remote clients send only the bytes."""

    text: str
    image_bytes: Optional[bytes] = field(default=None, repr=False)
    image_key: Optional[str] = None


@dataclass(frozen=True)
class SimilarityRequest:
    a: str
    b: str


@dataclass(frozen=True)
class GenerationRequest:
    template: str
    slots: dict


def clamp_score(value: float) -> float:
    if not math.isfinite(value):
        raise ValidationError(f"score must be finite, got {value}")
    return min(1.0, max(0.0, float(value)))


class GroundingBackend(ABC):
    @abstractmethod
    def ground(self, req: GroundingRequest) -> GroundingResponse: ...


class ScorerBackend(ABC):
    @abstractmethod
    def score_image_text(self, req: ScorerRequest) -> float: ...


class SimilarityBackend(ABC):
    @abstractmethod
    def text_similarity(self, req: SimilarityRequest) -> float: ...


class GenerationBackend(ABC):
    @abstractmethod
    def generate(self, req: GenerationRequest) -> str: ...
