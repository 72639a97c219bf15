"""Three-annotator majority voting."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

from ..core.types import HallucinationCategory
from ..errors import ValidationError


@dataclass(frozen=True)
class AnnotationRecord:
    annotator_id: str
    hallucinated: bool
    category: Optional[HallucinationCategory] = None
    timestamp: Optional[datetime] = None

    def __post_init__(self):
        if self.hallucinated and self.category is None:
            raise ValidationError("hallucinated annotation requires a category")
        if not self.hallucinated and self.category is not None:
            raise ValidationError("clean annotation must not carry a category")

    def to_json(self) -> dict:
        ts = self.timestamp or datetime.now(timezone.utc)
        return {
            "annotator_id": self.annotator_id,
            "hallucinated": self.hallucinated,
            "category": self.category.value if self.category else None,
            "timestamp": ts.isoformat(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AnnotationRecord":
        category = obj.get("category")
        ts = obj.get("timestamp")
        return cls(
            annotator_id=obj["annotator_id"],
            hallucinated=bool(obj["hallucinated"]),
            category=HallucinationCategory(category) if category else None,
            timestamp=datetime.fromisoformat(ts) if ts else None,
        )


@dataclass(frozen=True)
class VoteResult:
    hallucinated: bool
    category: Optional[HallucinationCategory]
    tie_flag: bool

    def to_json(self) -> dict:
        return {
            "hallucinated": self.hallucinated,
            "category": self.category.value if self.category else None,
            "tie_flag": self.tie_flag,
        }


def majority_vote(annotations: list[AnnotationRecord]) -> VoteResult:
    """Final label from exactly 3 annotations by distinct annotators.

    The hallucinated/clean vote can never tie. The category is the
    plurality among the hallucinated voters; a tied plurality picks the
    lexicographically first tied category (attribute < object < relation)
    and raises tie_flag for human escalation.
    """
    if len(annotations) != 3:
        raise ValidationError(f"majority vote needs exactly 3 records, got {len(annotations)}")
    if len({a.annotator_id for a in annotations}) != 3:
        raise ValidationError("annotators must be distinct")

    hallucinated = sum(a.hallucinated for a in annotations) >= 2
    if not hallucinated:
        return VoteResult(hallucinated=False, category=None, tie_flag=False)

    votes = Counter(a.category for a in annotations if a.hallucinated)
    top = max(votes.values())
    tied = sorted(c for c, n in votes.items() if n == top)
    return VoteResult(
        hallucinated=True, category=tied[0], tie_flag=len(tied) > 1
    )
