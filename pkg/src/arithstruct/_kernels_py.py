"""Pure-Python/numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` function for function and are used whenever
the compiled extension is unavailable.  Masks are ``uint8`` arrays of
length N with 1 marking membership.
"""
from math import gcd

import numpy as np


def longest_run_on_step(mask, step):
    """Best circular run along the orbits of ``x -> x + step`` (mod N).

    Returns ``(length, start)`` with the smallest start among the longest
    runs.  Orbit ``c`` (for ``0 <= c < gcd(step, N)``) is read as
    ``c, c + step, c + 2*step, ...``.
    """
    n = mask.shape[0]
    g = gcd(step, n)
    cyc = n // g
    best_len, best_start = 0, n
    j = np.arange(cyc, dtype=np.int64)
    for c in range(g):
        order = (c + j * step) % n
        bits = mask[order]
        if bits.all():
            if cyc > best_len or (cyc == best_len and c < best_start):
                best_len, best_start = cyc, c
            continue
        if not bits.any():
            continue
        z = int(np.argmin(bits))  # first zero
        rolled = np.roll(bits, -z).astype(np.int8)
        padded = np.concatenate(([0], rolled, [0]))
        edges = np.diff(padded)
        starts = np.flatnonzero(edges == 1)
        ends = np.flatnonzero(edges == -1)
        lengths = ends - starts
        m = int(lengths.max())
        if m < best_len:
            continue
        elems = order[(starts[lengths == m] + z) % cyc]
        s = int(elems.min())
        if m > best_len or s < best_start:
            best_len, best_start = m, s
    return best_len, best_start


def longest_ap_scan(mask, step_lo, step_hi, ceiling):
    """Scan steps ``step_lo..step_hi`` (inclusive) for the longest AP.

    Stops early once a run of length ``ceiling`` is found.  Returns
    ``(length, start, step)``; ties go to the smallest step, then start.
    """
    best = (0, 0, 0)
    for d in range(step_lo, step_hi + 1):
        length, start = longest_run_on_step(mask, d)
        if length > best[0]:
            best = (length, start, d)
            if length >= ceiling:
                break
    return best


def power_diff_count(mask, shifts):
    """Number of ordered pairs ``(x, x + s)`` inside the mask, summed over shifts."""
    total = 0
    for s in shifts:
        total += int(np.count_nonzero(mask & np.roll(mask, -int(s))))
    return total


def greedy_power_free(order, n, shifts, target):
    """Greedily pick elements of ``order`` avoiding differences in ``shifts``.

    An element x is accepted when neither x + s nor x - s (mod n) has been
    accepted for any shift s.  Stops after ``target`` acceptances.
    """
    taken = bytearray(n)
    out = []
    if target <= 0:
        return np.zeros(0, dtype=np.int64)
    shifts = [int(s) % n for s in shifts]
    for x in order:
        x = int(x) % n
        ok = True
        for s in shifts:
            if taken[(x + s) % n] or taken[(x - s) % n]:
                ok = False
                break
        if ok:
            taken[x] = 1
            out.append(x)
            if len(out) >= target:
                break
    return np.asarray(out, dtype=np.int64)


def sumset_mask(a_elems, b_mask):
    """Indicator of A + B (mod N) via rotate-and-OR on an integer bitset."""
    n = b_mask.shape[0]
    full = (1 << n) - 1
    bits = int.from_bytes(np.packbits(b_mask, bitorder="little").tobytes(), "little")
    acc = 0
    for a in a_elems:
        a = int(a) % n
        acc |= ((bits << a) | (bits >> (n - a))) & full
        if acc == full:
            break
    raw = acc.to_bytes((n + 7) // 8, "little")
    out = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n]
    return out.astype(np.uint8)


def bohr_norm(n, freqs):
    """Per-x value ``max over freqs of ||x*xi/N||`` scaled to an integer distance.

    Returns int64 array ``t[x] = max_xi min((x*xi) % N, N - (x*xi) % N)``;
    x lies in B(freqs, delta) iff ``t[x] <= N*asin(delta/2)/pi``.
    """
    x = np.arange(n, dtype=np.int64)
    out = np.zeros(n, dtype=np.int64)
    for xi in freqs:
        r = (x * int(xi)) % n
        np.maximum(out, np.minimum(r, n - r), out=out)
    return out
