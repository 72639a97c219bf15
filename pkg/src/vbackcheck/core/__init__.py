from .masks import (
    KERNEL_BACKEND,
    BinaryMask,
    RleMask,
    mask_iou,
    mask_overlap,
    rle_decode,
    rle_encode,
)
from .sentences import split_sentences
from .types import (
    BBox,
    Caption,
    Decision,
    GroundToken,
    HallucinationCategory,
    ObjectProposal,
    Verdict,
)

__all__ = [
    "KERNEL_BACKEND",
    "BinaryMask",
    "RleMask",
    "mask_iou",
    "mask_overlap",
    "rle_decode",
    "rle_encode",
    "split_sentences",
    "BBox",
    "Caption",
    "Decision",
    "GroundToken",
    "HallucinationCategory",
    "ObjectProposal",
    "Verdict",
]
