"""Pipeline configuration."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError


@dataclass(frozen=True)
class PipelineConfig:
    consistency_threshold: float = 0.5
    nms_similarity_threshold: float = 0.85
    max_in_flight: int = 1
    negatives_per_caption: int = 1
    caption_template: str = "caption"
    injection_template: str = "inject"
    holistic_template: str = "holistic"

    def __post_init__(self):
        if not 0.0 <= self.consistency_threshold <= 1.0:
            raise ValidationError("consistency_threshold must be in [0, 1]")
        if not 0.0 <= self.nms_similarity_threshold <= 1.0:
            raise ValidationError("nms_similarity_threshold must be in [0, 1]")
        if self.max_in_flight < 1:
            raise ValidationError("max_in_flight must be >= 1")
        if self.negatives_per_caption < 1:
            raise ValidationError("negatives_per_caption must be >= 1")

    @classmethod
    def from_json(cls, obj: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise ValidationError(f"unknown pipeline config keys: {sorted(unknown)}")
        return cls(**obj)
