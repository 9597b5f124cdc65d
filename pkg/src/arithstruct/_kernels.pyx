# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same contracts as ``_kernels_py``."""
import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t, uint64_t

cnp.import_array()


cdef int64_t _gcd(int64_t a, int64_t b) nogil:
    while b:
        a, b = b, a % b
    return a


cdef void _run_on_step(const uint8_t[:] mask, int64_t step,
                       int64_t* out_len, int64_t* out_start) nogil:
    cdef int64_t n = mask.shape[0]
    cdef int64_t g = _gcd(step, n)
    cdef int64_t cyc = n // g
    cdef int64_t best_len = 0, best_start = n
    cdef int64_t c, j, z, pos, x, run, run_start, s, k
    for c in range(g):
        # find a zero on this orbit
        z = -1
        x = c
        for j in range(cyc):
            if not mask[x]:
                z = j
                break
            x += step
            if x >= n:
                x -= n
        if z < 0:
            if cyc > best_len or (cyc == best_len and c < best_start):
                best_len = cyc
                best_start = c
            continue
        # walk one full orbit beginning just after the zero at index z
        pos = (c + (z % cyc) * step) % n
        run = 0
        run_start = 0
        for k in range(cyc):
            pos += step
            if pos >= n:
                pos -= n
            if mask[pos]:
                if run == 0:
                    run_start = pos
                run += 1
            else:
                if run > 0:
                    if run > best_len or (run == best_len and run_start < best_start):
                        best_len = run
                        best_start = run_start
                run = 0
        if run > 0:
            if run > best_len or (run == best_len and run_start < best_start):
                best_len = run
                best_start = run_start
    out_len[0] = best_len
    out_start[0] = best_start


def longest_run_on_step(const uint8_t[:] mask, int64_t step):
    cdef int64_t length = 0, start = 0
    _run_on_step(mask, step, &length, &start)
    return int(length), int(start)


def longest_ap_scan(const uint8_t[:] mask, int64_t step_lo, int64_t step_hi,
                    int64_t ceiling):
    cdef int64_t d, length = 0, start = 0
    cdef int64_t best_len = 0, best_start = 0, best_step = 0
    with nogil:
        for d in range(step_lo, step_hi + 1):
            _run_on_step(mask, d, &length, &start)
            if length > best_len:
                best_len = length
                best_start = start
                best_step = d
                if length >= ceiling:
                    break
    return int(best_len), int(best_start), int(best_step)


def power_diff_count(const uint8_t[::1] mask, shifts):
    cdef const int64_t[:] sh = np.ascontiguousarray(shifts, dtype=np.int64)
    cdef int64_t n = mask.shape[0]
    cdef int64_t total = 0, i, x, s
    with nogil:
        for i in range(sh.shape[0]):
            s = sh[i] % n
            if s < 0:
                s += n
            # split at the wrap point so the inner loops are branch free
            for x in range(n - s):
                total += mask[x] & mask[x + s]
            for x in range(n - s, n):
                total += mask[x] & mask[x + s - n]
    return int(total)


def greedy_power_free(order, int64_t n, shifts, int64_t target):
    cdef const int64_t[:] od = np.ascontiguousarray(order, dtype=np.int64)
    cdef int64_t[:] sh = np.ascontiguousarray(shifts, dtype=np.int64) % n
    cdef uint8_t[:] taken = np.zeros(n, dtype=np.uint8)
    out_arr = np.empty(od.shape[0], dtype=np.int64)
    cdef int64_t[:] out = out_arr
    cdef int64_t cnt = 0, i, j, x, s, up, dn
    cdef bint ok
    if target <= 0:
        return out_arr[:0]
    with nogil:
        for i in range(od.shape[0]):
            x = od[i] % n
            ok = True
            for j in range(sh.shape[0]):
                s = sh[j]
                up = x + s
                if up >= n:
                    up -= n
                dn = x - s
                if dn < 0:
                    dn += n
                if taken[up] or taken[dn]:
                    ok = False
                    break
            if ok:
                taken[x] = 1
                out[cnt] = x
                cnt += 1
                if cnt >= target:
                    break
    return out_arr[:cnt].copy()


def sumset_mask(a_elems, const uint8_t[::1] b_mask):
    """Rotate-and-OR over 64-bit words."""
    cdef int64_t n = b_mask.shape[0]
    cdef int64_t nw = (n + 63) >> 6
    # doubled copy of B: bit j is B[j mod n] for j < 2n, zero padded
    cdef int64_t dw = ((2 * n + 63) >> 6) + 2
    raw = np.zeros(dw * 8, dtype=np.uint8)
    packed = np.packbits(np.concatenate((b_mask, b_mask)), bitorder="little")
    raw[:packed.shape[0]] = packed
    cdef const uint64_t[::1] dbl = raw.view("<u8")
    acc_arr = np.zeros(nw, dtype="<u8")
    cdef uint64_t[::1] acc = acc_arr
    cdef const int64_t[:] av = np.ascontiguousarray(a_elems, dtype=np.int64)
    cdef int64_t i, a, off, w0, sft, ia
    cdef uint64_t lastmask, all_ones = ~(<uint64_t>0)
    cdef uint64_t one = 1
    cdef bint full
    with nogil:
        if n & 63:
            lastmask = (one << (n & 63)) - 1
        else:
            lastmask = all_ones
        for ia in range(av.shape[0]):
            a = av[ia] % n
            if a < 0:
                a += n
            # rotated[x] = B[(x - a) mod n] = dbl[x + n - a]
            off = n - a
            w0 = off >> 6
            sft = off & 63
            if sft == 0:
                for i in range(nw):
                    acc[i] |= dbl[w0 + i]
            else:
                for i in range(nw):
                    acc[i] |= (dbl[w0 + i] >> sft) | (dbl[w0 + i + 1] << (64 - sft))
            acc[nw - 1] &= lastmask
            # once A + B is everything further shifts change nothing
            if (ia & 15) == 15:
                full = acc[nw - 1] == lastmask
                i = 0
                while full and i < nw - 1:
                    full = acc[i] == all_ones
                    i += 1
                if full:
                    break
    return np.unpackbits(acc_arr.view(np.uint8), bitorder="little")[:n].copy()


def bohr_norm(int64_t n, freqs):
    cdef int64_t[:] fr = np.ascontiguousarray(freqs, dtype=np.int64) % n
    out_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[:] out = out_arr
    cdef int64_t x, i, xi, r, t
    with nogil:
        for i in range(fr.shape[0]):
            xi = fr[i]
            r = 0
            for x in range(n):
                t = r if r <= n - r else n - r
                if t > out[x]:
                    out[x] = t
                r += xi
                if r >= n:
                    r -= n
    return out_arr
