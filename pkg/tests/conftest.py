import numpy as np
import pytest

from vbackcheck.core.masks import BinaryMask


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_mask(rng, max_side: int = 64) -> BinaryMask:
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    return BinaryMask.from_array(rng.random((h, w)) < rng.random())


def nms_reference(scores, sim, threshold):
    """Independent O(n^2) greedy suppression over an explicit similarity
    matrix; returns kept original indices in keep order."""
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    suppressed = set()
    keep = []
    for i in order:
        if i in suppressed:
            continue
        keep.append(i)
        for j in order:
            if j == i or j in suppressed or j in keep:
                continue
            if sim[i][j] >= threshold:
                suppressed.add(j)
    return keep
