"""Counter-based random numbers: Philox4x32-10 (Salmon et al., SC'11).

Every draw is a pure function of ``(seed, stream, x)``::

    key     = (seed & 0xffffffff, (seed >> 32) & 0xffffffff)
    counter = (x & 0xffffffff, x >> 32, stream, 0)
    u(seed, stream, x) = (out0 >> 5) * 2**-27 + (out1 >> 6) * 2**-53

where ``out0, out1`` are the first two words of the 10-round Philox block.
This gives a 53-bit uniform in [0, 1) that does not depend on evaluation
order, platform, or how many other elements are drawn.  The scheme is
frozen: changing it changes every sampled set.
"""
import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)

#: stream ids; one per independent use of the generator
STREAM_MEMBERSHIP = 0
STREAM_SUBSET = 1
STREAM_GREEDY = 2

SPEC = "Philox4x32-10; key=(seed lo32, seed hi32); counter=(x lo32, x hi32, stream, 0); u=53-bit from words 0,1"


def philox4x32(counter, key, rounds=10):
    """Vectorized Philox4x32 block function.

    ``counter`` is a sequence of four uint32-valued arrays (broadcastable),
    ``key`` a pair of ints.  Returns four uint64 arrays holding 32-bit words.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) & _MASK32 for c in counter)
    c0, c1, c2, c3 = np.broadcast_arrays(c0, c1, c2, c3)
    c0, c1, c2, c3 = c0.copy(), c1.copy(), c2.copy(), c3.copy()
    k0 = np.uint64(int(key[0]) & 0xFFFFFFFF)
    k1 = np.uint64(int(key[1]) & 0xFFFFFFFF)
    for _ in range(rounds):
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0, lo0 = p0 >> _S32, p0 & _MASK32
        hi1, lo1 = p1 >> _S32, p1 & _MASK32
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


def uniforms(seed, xs, stream=0):
    """Uniform draws in [0, 1), one per counter value in ``xs``."""
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    xs = np.asarray(xs, dtype=np.uint64)
    key = (seed & 0xFFFFFFFF, seed >> 32)
    w0, w1, _, _ = philox4x32((xs & _MASK32, xs >> _S32, np.uint64(stream), np.uint64(0)), key)
    hi = (w0 >> np.uint64(5)).astype(np.float64)
    lo = (w1 >> np.uint64(6)).astype(np.float64)
    return (hi * 67108864.0 + lo) / 9007199254740992.0
