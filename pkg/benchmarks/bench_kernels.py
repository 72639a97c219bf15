#!/usr/bin/env python3
"""Benchmark the compiled mask kernels against the pure-Python fallback.

Times run-length encoding, decoding, and overlap counting on random masks
at several sizes and prints a speedup table.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import timeit

import numpy as np

from vbackcheck.core import _kernels_py

try:
    from vbackcheck.core import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

SIZES = [(32, 32), (128, 128), (512, 512), (1024, 1024)]


def bench(fn, repeats):
    return min(timeit.repeat(fn, number=1, repeat=repeats))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20,
                        help="timing repeats per case (best-of)")
    args = parser.parse_args()

    if _kernels_c is None:
        print("compiled kernels unavailable; benchmarking fallback only")

    rng = np.random.default_rng(0)
    header = f"{'case':<28}{'python':>12}{'compiled':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for h, w in SIZES:
        bits = (rng.random((h, w)) < 0.5).astype(np.uint8).ravel()
        counts = _kernels_py.rle_counts(bits)
        cases = [
            (f"rle_counts {h}x{w}", lambda k, b=bits: k.rle_counts(b)),
            (f"rle_fill {h}x{w}",
             lambda k, c=counts, n=h * w: k.rle_fill(c, n)),
            (f"mask_overlap {h}x{w}",
             lambda k, a=bits, b=bits[::-1].copy(): k.mask_overlap(a, b)),
        ]
        for name, call in cases:
            t_py = bench(lambda: call(_kernels_py), args.repeats)
            if _kernels_c is None:
                print(f"{name:<28}{t_py * 1e6:>10.1f}us{'-':>12}{'-':>10}")
                continue
            t_c = bench(lambda: call(_kernels_c), args.repeats)
            print(f"{name:<28}{t_py * 1e6:>10.1f}us{t_c * 1e6:>10.1f}us"
                  f"{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
