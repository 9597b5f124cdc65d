"""Slow, obviously-correct reference implementations used only by tests.

None of these call into the package's transforms or kernels.
"""
import cmath
import math

import numpy as np


def naive_dft(f):
    n = len(f)
    x = np.arange(n)
    W = np.exp(-2j * np.pi * np.outer(x, x) / n)
    return W @ np.asarray(f, dtype=complex) / n


def naive_inverse(F):
    n = len(F)
    x = np.arange(n)
    W = np.exp(2j * np.pi * np.outer(x, x) / n)
    return W @ np.asarray(F, dtype=complex)


def naive_convolve(f, g):
    n = len(f)
    return np.array([sum(f[y] * g[(x - y) % n] for y in range(n)) for x in range(n)])


def bohr_direct(n, freqs, delta, shift=0):
    out = []
    for x in range(n):
        if all(abs(cmath.exp(2j * math.pi * x * xi / n) - 1) <= delta for xi in freqs):
            out.append((x + shift) % n)
    return sorted(out)


def pair_count(A, n, k):
    """Ordered pairs (a, b) in A with b - a == r^k mod N, 1 <= r <= floor((N/3)^(1/k))."""
    R = 0
    while (R + 1) ** k <= n // 3:
        R += 1
    shifts = [pow(r, k, n) for r in range(1, R + 1)]
    S = set(int(a) % n for a in A)
    return sum(1 for a in S for s in shifts if (a + s) % n in S)


def f1_double_sum(f, B0):
    """E(f(x + y1 - y2) : y1, y2 in B0) by a direct double loop."""
    n = len(f)
    B0 = list(B0)
    m = len(B0)
    out = np.zeros(n)
    for x in range(n):
        out[x] = sum(f[(x + a - b) % n] for a in B0 for b in B0) / m**2
    return out


def longest_ap_brute(S, n):
    """(length, start, step) with ties to the smallest (step, start)."""
    S = set(int(s) % n for s in S)
    best = (0, 0, 0)
    for d in range(1, max(n, 2)):
        for a in range(n):
            if a not in S:
                continue
            L = 0
            while L < n and (a + L * d) % n in S:
                L += 1
                # a progression may not revisit its start
                if (a + L * d) % n == a:
                    break
            if L > best[0]:
                best = (L, a, d)
    return best


def sumset_brute(A, B, n):
    return sorted({(a + b) % n for a in A for b in B})


def l2_direct(F):
    return float(sum(abs(c) ** 2 for c in F))
