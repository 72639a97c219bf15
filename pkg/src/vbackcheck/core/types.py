"""Domain types shared across the toolkit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..errors import ValidationError
from .masks import RleMask


class GroundToken(str, Enum):
    SEG = "SEG"
    REJ = "REJ"


class Decision(str, Enum):
    GROUNDED = "grounded"
    HALLUCINATED = "hallucinated"
    ERROR = "error"


class HallucinationCategory(str, Enum):
    ATTRIBUTE = "attribute"
    OBJECT = "object"
    RELATION = "relation"


@dataclass(frozen=True)
class BBox:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValidationError("bbox extents must be positive")


@dataclass(frozen=True)
class ObjectProposal:
    id: str
    image_id: str
    bbox: BBox
    mask: RleMask


@dataclass(frozen=True)
class Caption:
    """Proposal caption; fg/bg scores are None until the quality stages run."""

    proposal_id: str
    text: str
    fg_score: Optional[float] = None
    bg_score: Optional[float] = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValidationError("caption text must be non-empty")
        for score in (self.fg_score, self.bg_score):
            if score is not None and not math.isfinite(score):
                raise ValidationError("caption scores must be finite")


@dataclass(frozen=True)
class Verdict:
    """Per-sentence hallucination decision with evidence."""

    sentence: str
    decision: Decision
    mask: Optional[RleMask] = None
    explanation: Optional[str] = None
    raw_token: Optional[GroundToken] = None
    error: Optional[str] = None

    def __post_init__(self):
        if self.decision is Decision.GROUNDED:
            if self.raw_token is not GroundToken.SEG or self.mask is None:
                raise ValidationError("grounded verdict requires SEG token and mask")
            if self.explanation is not None:
                raise ValidationError("grounded verdict carries no explanation")
        elif self.decision is Decision.HALLUCINATED:
            if self.raw_token is not GroundToken.REJ or self.explanation is None:
                raise ValidationError(
                    "hallucinated verdict requires REJ token and explanation"
                )
            if self.mask is not None:
                raise ValidationError("hallucinated verdict carries no mask")
        else:
            if self.error is None:
                raise ValidationError("error verdict requires an error message")
            if self.mask is not None or self.explanation is not None:
                raise ValidationError("error verdict carries no evidence")

    def to_json(self) -> dict:
        return {
            "sentence": self.sentence,
            "decision": self.decision.value,
            "mask": self.mask.to_json() if self.mask else None,
            "explanation": self.explanation,
        }
