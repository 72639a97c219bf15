"""Instruction-tuning sample records and JSONL serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

from ..core.masks import RleMask
from ..errors import ValidationError

POSITIVE_RESPONSE = "Sure, the described region is [SEG]."
NEGATIVE_RESPONSE_PREFIX = "[REJ] "


class SampleLabel(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class InstructSample:
    id: str
    image: str
    query: str
    label: SampleLabel
    response: str
    mask: Optional[RleMask] = None
    hallucination_type: Optional[str] = None
    explanation: Optional[str] = None
    provenance: Optional[dict] = None

    def __post_init__(self):
        if self.label is SampleLabel.POSITIVE:
            if "[SEG]" not in self.response or "[REJ]" in self.response:
                raise ValidationError("positive response must contain [SEG] only")
            if self.hallucination_type or self.explanation:
                raise ValidationError("positive sample carries no hallucination info")
        else:
            if "[REJ]" not in self.response or "[SEG]" in self.response:
                raise ValidationError("negative response must contain [REJ] only")
            if not self.hallucination_type or not self.explanation:
                raise ValidationError(
                    "negative sample requires hallucination_type and explanation"
                )
            if self.mask is not None:
                raise ValidationError("negative sample carries no mask")

    def to_json(self) -> dict:
        # Key order is part of the file contract.
        return {
            "id": self.id,
            "image": self.image,
            "query": self.query,
            "label": self.label.value,
            "mask": self.mask.to_json() if self.mask else None,
            "response": self.response,
            "hallucination_type": self.hallucination_type,
            "explanation": self.explanation,
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "InstructSample":
        return cls(
            id=obj["id"],
            image=obj["image"],
            query=obj["query"],
            label=SampleLabel(obj["label"]),
            mask=RleMask.from_json(obj["mask"]) if obj.get("mask") else None,
            response=obj["response"],
            hallucination_type=obj.get("hallucination_type"),
            explanation=obj.get("explanation"),
            provenance=obj.get("provenance"),
        )


def write_samples(samples: list[InstructSample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sample in samples:
            fh.write(json.dumps(sample.to_json(), ensure_ascii=False) + "\n")


def read_samples(path: str | Path) -> list[InstructSample]:
    samples = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                samples.append(InstructSample.from_json(json.loads(line)))
    return samples
