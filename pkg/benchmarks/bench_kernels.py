"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 100003] [--repeat 3]
"""
import argparse
import time

import numpy as np

from arithstruct import _kernels_py as py
from arithstruct.structures import power_indicator

try:
    from arithstruct import _kernels as cy
except ImportError:
    cy = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases(n, seed=0):
    rng = np.random.default_rng(seed)
    mask = (rng.random(n) < 0.5).astype(np.uint8)
    A = np.flatnonzero(rng.random(n) < 0.3).astype(np.int64)
    # a sparse B whose sumset with A is not the whole group
    sparse = np.zeros(n, dtype=np.uint8)
    sparse[rng.choice(n, 40, replace=False)] = 1
    A_small = A[:40]
    shifts = power_indicator(n, 2, warn=False).powers
    order = rng.permutation(n).astype(np.int64)
    freqs = rng.integers(1, n, size=8)
    return {
        "longest_ap_scan (steps 1..200)": lambda k: k.longest_ap_scan(mask, 1, 200, int(mask.sum())),
        "power_diff_count": lambda k: k.power_diff_count(mask, shifts),
        "greedy_power_free": lambda k: k.greedy_power_free(order, n, shifts, n),
        "sumset_mask (dense, saturates)": lambda k: k.sumset_mask(A, mask),
        "sumset_mask (sparse 40+40)": lambda k: k.sumset_mask(A_small, sparse),
        "bohr_norm (rank 8)": lambda k: k.bohr_norm(n, freqs),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=100003)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"N = {args.n}, best of {args.repeat}")
    print(f"{'kernel':34s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, run in cases(args.n).items():
        tp = best_of(lambda: run(py), args.repeat)
        if cy is None:
            print(f"{name:34s} {tp:10.4f} {'n/a':>10s}")
            continue
        tc = best_of(lambda: run(cy), args.repeat)
        print(f"{name:34s} {tp:10.4f} {tc:10.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
