"""Grounding and hallucination-detection metrics.

Every ratio is carried as (numerator, denominator, value) so shards can
be merged associatively; a ratio with an empty denominator is reported
as absent rather than fabricated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..core.masks import RleMask, mask_overlap, rle_decode
from ..core.types import GroundToken, HallucinationCategory
from ..errors import ShapeError, ValidationError


@dataclass(frozen=True)
class Ratio:
    num: float
    den: float

    @property
    def value(self) -> Optional[float]:
        return self.num / self.den if self.den else None

    def merge(self, other: "Ratio") -> "Ratio":
        return Ratio(self.num + other.num, self.den + other.den)

    def to_json(self) -> dict:
        return {"num": self.num, "den": self.den, "value": self.value}


class GtLabel(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class GroundingEvalItem:
    query: str
    gt_label: GtLabel
    pred_token: GroundToken
    gt_mask: Optional[RleMask] = None
    pred_mask: Optional[RleMask] = None

    def __post_init__(self):
        if (self.gt_label is GtLabel.POSITIVE) != (self.gt_mask is not None):
            raise ValidationError("gt_mask present iff gt_label is positive")
        if (self.pred_token is GroundToken.SEG) != (self.pred_mask is not None):
            raise ValidationError("pred_mask present iff pred_token is SEG")


@dataclass(frozen=True)
class GroundingReport:
    mean_iou: Ratio          # sum of per-item IoU / item count
    cum_iou: Ratio           # total intersection / total union over matched positives
    n_acc: Ratio
    t_acc: Ratio
    t_acc_thresholded: Optional[Ratio] = None
    errors: int = 0

    def to_json(self) -> dict:
        out = {
            "mean_iou": self.mean_iou.to_json(),
            "cum_iou": self.cum_iou.to_json(),
            "n_acc": self.n_acc.to_json(),
            "t_acc": self.t_acc.to_json(),
            "errors": self.errors,
        }
        if self.t_acc_thresholded is not None:
            out["t_acc_thresholded"] = self.t_acc_thresholded.to_json()
        return out


def grounding_metrics(items: list[GroundingEvalItem],
                      t_acc_iou_threshold: Optional[float] = None) -> GroundingReport:
    """Segmentation-protocol metrics.

    n_acc: correctly rejected over ground-truth negatives.
    t_acc: correctly segmented over ground-truth positives (token-level;
    with a threshold, the SEG mask must also reach that IoU, reported
    separately as t_acc_thresholded).
    Per-item IoU: mask IoU on matched positives, 1.0 for correctly
    rejected negatives, 0.0 on a token mismatch.
    """
    mean = Ratio(0.0, 0.0)
    cum = Ratio(0.0, 0.0)
    n_acc = Ratio(0.0, 0.0)
    t_acc = Ratio(0.0, 0.0)
    t_thr = Ratio(0.0, 0.0)
    errors = 0
    for item in items:
        try:
            iou, inter_union = _item_iou(item)
        except ShapeError:
            errors += 1
            continue
        mean = mean.merge(Ratio(iou, 1.0))
        if inter_union is not None:
            cum = cum.merge(Ratio(*inter_union))
        if item.gt_label is GtLabel.NEGATIVE:
            n_acc = n_acc.merge(
                Ratio(1.0 if item.pred_token is GroundToken.REJ else 0.0, 1.0)
            )
        else:
            seg = item.pred_token is GroundToken.SEG
            t_acc = t_acc.merge(Ratio(1.0 if seg else 0.0, 1.0))
            if t_acc_iou_threshold is not None:
                hit = seg and iou >= t_acc_iou_threshold
                t_thr = t_thr.merge(Ratio(1.0 if hit else 0.0, 1.0))
    return GroundingReport(
        mean_iou=mean,
        cum_iou=cum,
        n_acc=n_acc,
        t_acc=t_acc,
        t_acc_thresholded=t_thr if t_acc_iou_threshold is not None else None,
        errors=errors,
    )


def _item_iou(item: GroundingEvalItem):
    if item.gt_label is GtLabel.POSITIVE and item.pred_token is GroundToken.SEG:
        gt = rle_decode(item.gt_mask)
        pred = rle_decode(item.pred_mask)
        inter, union = mask_overlap(gt, pred)
        iou = 1.0 if union == 0 else inter / union
        return iou, (float(inter), float(union))
    if item.gt_label is GtLabel.NEGATIVE and item.pred_token is GroundToken.REJ:
        return 1.0, None
    return 0.0, None


@dataclass(frozen=True)
class DetectionEvalItem:
    gt_hallucinated: bool
    pred_hallucinated: bool
    gt_category: Optional[HallucinationCategory] = None

    def __post_init__(self):
        if self.gt_hallucinated and self.gt_category is None:
            raise ValidationError("hallucinated ground truth requires a category")
        if not self.gt_hallucinated and self.gt_category is not None:
            raise ValidationError("clean ground truth must not carry a category")


@dataclass(frozen=True)
class DetectionReport:
    acc: Ratio
    neg_acc: Ratio           # accuracy on hallucinated ground truth
    pos_acc: Ratio           # accuracy on clean ground truth
    per_category: dict = field(default_factory=dict)

    @property
    def balanced_acc(self) -> Optional[float]:
        if self.neg_acc.value is None or self.pos_acc.value is None:
            return None
        return (self.neg_acc.value + self.pos_acc.value) / 2.0

    def to_json(self) -> dict:
        return {
            "acc": self.acc.to_json(),
            "neg_acc": self.neg_acc.to_json(),
            "pos_acc": self.pos_acc.to_json(),
            "balanced_acc": self.balanced_acc,
            "per_category": {k.value: v.to_json() for k, v in self.per_category.items()},
        }


def detection_metrics(items: list[DetectionEvalItem]) -> DetectionReport:
    """Micro accuracy plus accuracy restricted to hallucinated (neg) and
    clean (pos) ground truth, and per-category hallucinated accuracy."""
    acc = Ratio(0.0, 0.0)
    neg = Ratio(0.0, 0.0)
    pos = Ratio(0.0, 0.0)
    per_cat: dict[HallucinationCategory, Ratio] = {}
    for item in items:
        correct = 1.0 if item.pred_hallucinated == item.gt_hallucinated else 0.0
        acc = acc.merge(Ratio(correct, 1.0))
        if item.gt_hallucinated:
            neg = neg.merge(Ratio(correct, 1.0))
            prev = per_cat.get(item.gt_category, Ratio(0.0, 0.0))
            per_cat[item.gt_category] = prev.merge(Ratio(correct, 1.0))
        else:
            pos = pos.merge(Ratio(correct, 1.0))
    return DetectionReport(acc=acc, neg_acc=neg, pos_acc=pos, per_category=per_cat)


class PopeSplit(str, Enum):
    RANDOM = "random"
    POPULAR = "popular"
    ADVERSARIAL = "adversarial"


def pope_accuracy(items: list[tuple[bool, bool]], split: PopeSplit) -> Optional[float]:
    """Fraction of (gt_yes, pred_yes) pairs that agree, for one split."""
    del split  # items are pre-filtered to the split; kept for report labeling
    if not items:
        return None
    return sum(1 for gt, pred in items if gt == pred) / len(items)
