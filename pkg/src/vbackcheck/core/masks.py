"""Binary masks, run-length coding, and IoU.

The hot loops live in a compiled extension (``_kernels``); a numpy
fallback is selected at import time when the extension is unavailable.
``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import FormatError, ShapeError, ValidationError

try:
    from . import _kernels as _impl

    KERNEL_BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on build environment
    from . import _kernels_py as _impl

    KERNEL_BACKEND = "python"


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Row-major boolean pixel grid."""

    height: int
    width: int
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValidationError("mask dimensions must be >= 1")
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.size != self.height * self.width:
            raise ValidationError(
                f"bits length {bits.size} != {self.height}x{self.width}"
            )
        bits = (bits != 0).astype(np.uint8).reshape(self.height, self.width)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_array(cls, arr) -> "BinaryMask":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValidationError("expected a 2-D array")
        return cls(height=arr.shape[0], width=arr.shape[1], bits=arr)

    @classmethod
    def zeros(cls, height: int, width: int) -> "BinaryMask":
        return cls(height, width, np.zeros((height, width), dtype=np.uint8))

    @property
    def flat(self) -> np.ndarray:
        return self.bits.reshape(-1)

    def count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return (
            self.height == other.height
            and self.width == other.width
            and bool(np.array_equal(self.bits, other.bits))
        )

    def __hash__(self):
        return hash((self.height, self.width, self.bits.tobytes()))


@dataclass(frozen=True)
class RleMask:
    """Canonical uncompressed RLE: row-major, first run counts zeros.

    The leading zero-run count is always present (it is 0 when the first
    pixel is set); every other run length is positive.
    """

    size: tuple[int, int]
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "size", (int(self.size[0]), int(self.size[1])))
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        h, w = self.size
        if h < 1 or w < 1:
            raise ValidationError("mask dimensions must be >= 1")
        if any(c < 0 for c in self.counts):
            raise FormatError("run lengths must be non-negative")
        if sum(self.counts) != h * w:
            raise FormatError(
                f"counts sum {sum(self.counts)} != {h}x{w} = {h * w}"
            )
        if any(c == 0 for c in self.counts[1:]):
            raise FormatError("only the leading zero-run may be empty")

    def to_json(self) -> dict:
        return {"size": [self.size[0], self.size[1]], "counts": list(self.counts)}

    @classmethod
    def from_json(cls, obj: dict) -> "RleMask":
        try:
            size = obj["size"]
            counts = obj["counts"]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"RLE object missing field: {exc}") from exc
        if not isinstance(size, (list, tuple)) or len(size) != 2:
            raise FormatError("RLE size must be [height, width]")
        return cls(size=(size[0], size[1]), counts=tuple(counts))


def rle_encode(mask: BinaryMask) -> RleMask:
    """Encode a mask into canonical row-major run lengths."""
    counts = _impl.rle_counts(mask.flat)
    return RleMask(size=(mask.height, mask.width), counts=tuple(int(c) for c in counts))


def rle_decode(rle: RleMask) -> BinaryMask:
    """Decode run lengths back into a pixel grid."""
    h, w = rle.size
    counts = np.asarray(rle.counts, dtype=np.int64)
    flat = _impl.rle_fill(counts, h * w)
    return BinaryMask(height=h, width=w, bits=flat)


def mask_iou(a: BinaryMask, b: BinaryMask) -> float:
    """Intersection over union; two empty masks count as a perfect 1.0."""
    if (a.height, a.width) != (b.height, b.width):
        raise ShapeError(
            f"mask shapes differ: {a.height}x{a.width} vs {b.height}x{b.width}"
        )
    inter, union = _impl.mask_overlap(a.flat, b.flat)
    if union == 0:
        return 1.0
    return inter / union


def mask_overlap(a: BinaryMask, b: BinaryMask) -> tuple[int, int]:
    """(intersection, union) pixel counts, for cumulative IoU accounting."""
    if (a.height, a.width) != (b.height, b.width):
        raise ShapeError(
            f"mask shapes differ: {a.height}x{a.width} vs {b.height}x{b.width}"
        )
    inter, union = _impl.mask_overlap(a.flat, b.flat)
    return int(inter), int(union)
