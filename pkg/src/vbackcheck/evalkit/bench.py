"""Benchmark data model: JSONL loading, finalization state, slice reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from ..core.types import HallucinationCategory
from ..errors import FormatError, ValidationError
from .metrics import DetectionEvalItem, DetectionReport, detection_metrics
from .voting import AnnotationRecord

WORD_COUNT_BUCKETS = [(1, 5), (6, 10), (11, 15), (16, 20), (21, 30), (31, 50), (51, 110)]


@dataclass(frozen=True)
class FinalLabel:
    hallucinated: bool
    category: Optional[HallucinationCategory] = None

    def __post_init__(self):
        if self.hallucinated and self.category is None:
            raise ValidationError("hallucinated final label requires a category")
        if not self.hallucinated and self.category is not None:
            raise ValidationError("clean final label must not carry a category")

    def to_json(self) -> dict:
        return {
            "hallucinated": self.hallucinated,
            "category": self.category.value if self.category else None,
        }


@dataclass(frozen=True)
class BenchSample:
    id: str
    image: str
    description: str
    source_model: str
    annotations: tuple[AnnotationRecord, ...] = ()
    final: Optional[FinalLabel] = None

    def __post_init__(self):
        if self.final is not None and len(self.annotations) < 3:
            raise ValidationError("final label requires >= 3 annotations")

    def with_annotation(self, record: AnnotationRecord) -> "BenchSample":
        if any(a.annotator_id == record.annotator_id for a in self.annotations):
            raise ValidationError(
                f"annotator {record.annotator_id!r} already voted on {self.id!r}"
            )
        return replace(self, annotations=self.annotations + (record,))

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "image": self.image,
            "description": self.description,
            "source_model": self.source_model,
            "annotations": [a.to_json() for a in self.annotations],
            "final": self.final.to_json() if self.final else None,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BenchSample":
        final = obj.get("final")
        return cls(
            id=obj["id"],
            image=obj["image"],
            description=obj["description"],
            source_model=obj["source_model"],
            annotations=tuple(
                AnnotationRecord.from_json(a) for a in obj.get("annotations", [])
            ),
            final=FinalLabel(
                hallucinated=final["hallucinated"],
                category=HallucinationCategory(final["category"])
                if final.get("category")
                else None,
            )
            if final
            else None,
        )


def load_bench(path: str | Path) -> list[BenchSample]:
    samples = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                sample = BenchSample.from_json(json.loads(line))
            except (json.JSONDecodeError, KeyError, ValueError, ValidationError) as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from exc
            if sample.id in seen_ids:
                raise FormatError(f"{path}:{lineno}: duplicate sample id {sample.id!r}")
            seen_ids.add(sample.id)
            samples.append(sample)
    return samples


def save_bench(samples: list[BenchSample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sample in samples:
            fh.write(json.dumps(sample.to_json(), ensure_ascii=False) + "\n")


def word_count_bucket(description: str) -> str:
    n = len(description.split())
    for lo, hi in WORD_COUNT_BUCKETS:
        if lo <= n <= hi:
            return f"{lo}-{hi}"
    return "111+" if n > 110 else "0"


def _detection_item(sample: BenchSample, pred_hallucinated: bool) -> DetectionEvalItem:
    return DetectionEvalItem(
        gt_hallucinated=sample.final.hallucinated,
        pred_hallucinated=pred_hallucinated,
        gt_category=sample.final.category,
    )


def slice_report(samples: list[BenchSample], predictions: dict[str, bool],
                 by: str = "source_model") -> dict[str, DetectionReport]:
    """Detection metrics grouped by source model, description word-count
    bucket, or hallucination category. Samples without a final label or
    without a prediction are skipped."""
    if by not in ("source_model", "length_bucket", "category"):
        raise ValidationError(f"unknown slice key {by!r}")
    groups: dict[str, list[DetectionEvalItem]] = {}
    for sample in samples:
        if sample.final is None or sample.id not in predictions:
            continue
        if by == "source_model":
            key = sample.source_model
        elif by == "length_bucket":
            key = word_count_bucket(sample.description)
        else:
            key = sample.final.category.value if sample.final.category else "clean"
        groups.setdefault(key, []).append(
            _detection_item(sample, predictions[sample.id])
        )
    return {key: detection_metrics(items) for key, items in sorted(groups.items())}
