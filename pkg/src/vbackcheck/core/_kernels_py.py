"""Pure-numpy fallback for the compiled mask kernels.

Same contract as ``_kernels``: flat arrays are row-major uint8 0/1.
"""

import numpy as np


def rle_counts(flat: np.ndarray) -> np.ndarray:
    """Row-major run lengths of a flat 0/1 array; first run counts zeros."""
    n = flat.size
    changes = np.flatnonzero(np.diff(flat.astype(np.int8))) + 1
    bounds = np.concatenate(([0], changes, [n]))
    runs = np.diff(bounds).astype(np.int64)
    if flat[0] == 1:
        runs = np.concatenate(([0], runs))
    return runs


def rle_fill(counts: np.ndarray, n: int) -> np.ndarray:
    """Expand run lengths back into a flat uint8 0/1 array of size n."""
    values = (np.arange(len(counts)) % 2).astype(np.uint8)
    return np.repeat(values, counts)


def mask_overlap(a: np.ndarray, b: np.ndarray) -> tuple[int, int]:
    """Return (intersection, union) pixel counts of two flat 0/1 arrays."""
    inter = int(np.count_nonzero(a & b))
    uni = int(np.count_nonzero(a | b))
    return inter, uni
