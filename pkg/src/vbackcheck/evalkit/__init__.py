from .bench import (
    WORD_COUNT_BUCKETS,
    BenchSample,
    FinalLabel,
    load_bench,
    save_bench,
    slice_report,
    word_count_bucket,
)
from .metrics import (
    DetectionEvalItem,
    DetectionReport,
    GroundingEvalItem,
    GroundingReport,
    GtLabel,
    PopeSplit,
    Ratio,
    detection_metrics,
    grounding_metrics,
    pope_accuracy,
)
from .voting import AnnotationRecord, VoteResult, majority_vote

__all__ = [
    "WORD_COUNT_BUCKETS",
    "BenchSample",
    "FinalLabel",
    "load_bench",
    "save_bench",
    "slice_report",
    "word_count_bucket",
    "DetectionEvalItem",
    "DetectionReport",
    "GroundingEvalItem",
    "GroundingReport",
    "GtLabel",
    "PopeSplit",
    "Ratio",
    "detection_metrics",
    "grounding_metrics",
    "pope_accuracy",
    "AnnotationRecord",
    "VoteResult",
    "majority_vote",
]
