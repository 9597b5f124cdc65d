"""Arithmetic-structure detectors and spectral error terms on Z_N."""
from __future__ import annotations

from dataclasses import dataclass
import math
import warnings

import numpy as np

from . import kernels
from . import tolerances as tol
from .fourier import (
    BalancedFunction,
    DensityFunction,
    _values,
    convolve,
    cyclic_convolve,
    dft,
    spectral_lq_norm,
)

#: exhaustive longest-AP search is allowed up to this modulus
LONGEST_AP_CAP = 200_000

#: Green's six-squares constant for ||dft(S)||_12 <= GREEN_CONST * N^-1/2
GREEN_CONST = 2 ** (19 / 12)

#: fitted constant for ||dft(P_k)||_6k <= WARING_C1 * N^(1/k - 1); the
#: measured maximum over k in {2,3,4}, N in {1009, 10007} is about 0.787
WARING_C1 = 0.8


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = math.isqrt(n)
    for d in range(3, r + 1, 2):
        if n % d == 0:
            return False
    return True


def iroot(x, k):
    """floor(x ** (1/k)) for nonnegative integers, exactly."""
    if x < 0:
        raise ValueError("negative radicand")
    r = int(round(x ** (1.0 / k)))
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def power_range(n, k):
    """Largest r with r^k <= N/3, i.e. floor((N/3)^(1/k))."""
    return iroot(n // 3, k)


class PowerCollisionWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class PowerIndicator:
    """Indicator of ``{r^k mod N : 1 <= r <= floor((N/3)^(1/k))}``."""

    modulus: int
    exponent: int
    powers: np.ndarray
    values: np.ndarray
    collisions: int = 0

    @property
    def r_max(self):
        return int(self.powers.shape[0])

    def support(self):
        return np.flatnonzero(self.values)

    def as_density(self):
        return DensityFunction(self.modulus, self.values)


def power_indicator(n, k, warn=True):
    if k < 2:
        raise ValueError(f"exponent must be >= 2, got {k}")
    if n < 1:
        raise ValueError("modulus must be >= 1")
    if warn and not is_prime(n):
        warnings.warn(f"N={n} is not prime; power residues may behave irregularly",
                      PowerCollisionWarning, stacklevel=2)
    R = power_range(n, k)
    powers = np.array([pow(r, k, n) for r in range(1, R + 1)], dtype=np.int64)
    vals = np.zeros(n)
    vals[powers] = 1.0
    collisions = R - int(np.count_nonzero(vals))
    if collisions and warn:
        warnings.warn(f"{collisions} residue collisions among {R} powers mod {n}",
                      PowerCollisionWarning, stacklevel=2)
    powers.setflags(write=False)
    vals.setflags(write=False)
    return PowerIndicator(n, k, powers, vals, collisions)


def _mask(n, elems):
    m = np.zeros(n, dtype=np.uint8)
    elems = np.asarray(list(elems) if not isinstance(elems, np.ndarray) else elems, dtype=np.int64)
    if elems.size:
        m[elems % n] = 1
    return m


def power_difference_count(A, n, k):
    """Ordered pairs (x, x + r^k) with both in A, 1 <= r <= floor((N/3)^(1/k))."""
    shifts = power_indicator(n, k, warn=False).powers
    return kernels.power_diff_count(_mask(n, A), shifts)


def varnavides_average(f, k):
    """``E(f(x) f(x + r^k) | x in Z_N, 1 <= r <= R)`` with R = floor((N/3)^(1/k)).

    Evaluated as ``sum_x f(x) h(x) / (N R)`` with
    ``h(x) = sum_t P(t) f(x + t) = (f * P~)(x)``, P~ the reflected power indicator.
    """
    n, vals = _values(f)
    ind = power_indicator(n, k, warn=False)
    refl = np.zeros(n)
    refl[(-ind.powers) % n] = 1.0
    h = cyclic_convolve(np.asarray(vals, float), refl)
    return float(np.dot(vals, h) / (n * ind.r_max))


def sumset(A, B, n):
    """``A + B`` in Z_N as a sorted array (bitset rotate-and-OR)."""
    A = np.asarray(list(A) if not isinstance(A, np.ndarray) else A, dtype=np.int64) % n
    B = np.asarray(list(B) if not isinstance(B, np.ndarray) else B, dtype=np.int64) % n
    if A.size == 0 or B.size == 0:
        return np.zeros(0, dtype=np.int64)
    if A.size > B.size:
        A, B = B, A
    return np.flatnonzero(kernels.sumset_mask(np.unique(A), _mask(n, B)))


@dataclass(frozen=True)
class ApWitness:
    start: int
    step: int
    length: int
    modulus: int

    def elements(self):
        return [(self.start + j * self.step) % self.modulus for j in range(self.length)]

    def to_record(self):
        return {"start": self.start, "step": self.step, "length": self.length}


def longest_ap(S, n, method="auto"):
    """Longest arithmetic progression (mod N) inside S.

    Progressions have step in 1..N-1 and distinct terms.  Ties are broken
    by the smallest (step, start).  ``method`` is ``"exhaustive"`` (all
    steps; refused above ``LONGEST_AP_CAP``), ``"sieved"`` (steps up to N/2
    only, exploiting that step N-d reads the same runs backwards) or
    ``"auto"`` (exhaustive up to the cap, sieved beyond).
    """
    mask = _mask(n, S)
    size = int(mask.sum())
    if size == 0:
        raise ValueError("longest_ap needs a nonempty set")
    if method == "auto":
        method = "exhaustive" if n <= LONGEST_AP_CAP else "sieved"
    if method == "exhaustive":
        if n > LONGEST_AP_CAP:
            raise ValueError(f"exhaustive search capped at N <= {LONGEST_AP_CAP}")
        hi = n - 1
    elif method == "sieved":
        hi = n // 2
    else:
        raise ValueError(f"unknown method {method!r}")
    if n == 1:
        return ApWitness(0, 1, 1, 1)
    length, start, step = kernels.longest_ap_scan(mask, 1, max(hi, 1), size)
    return ApWitness(int(start), int(step), int(length), n)


@dataclass(frozen=True)
class SpectralErrorTerm:
    """Chain ``|E| <= spectral_sum <= holder <= bound`` for one error term."""

    expectation: float
    spectral_sum: float
    holder: float
    bound: float
    indicator_norm: float
    indicator_norm_exponent: float
    f2_q_norm: float
    q: float
    f2_sup: float
    reference_norm: float | None

    @property
    def chain_ok(self):
        slack = tol.CHAIN_REL * max(1.0, abs(self.bound))
        return (
            abs(self.expectation) <= self.spectral_sum + slack
            and self.spectral_sum <= self.holder + slack
            and self.holder <= self.bound + slack
        )

    def to_record(self):
        return {
            "expectation": self.expectation,
            "spectralSum": self.spectral_sum,
            "holder": self.holder,
            "bound": self.bound,
            "indicatorNorm": self.indicator_norm,
            "indicatorNormExponent": self.indicator_norm_exponent,
            "f2QNorm": self.f2_q_norm,
            "q": self.q,
            "f2Sup": self.f2_sup,
            "referenceNorm": self.reference_norm,
            "chainOk": self.chain_ok,
        }


def restriction_exponent(k):
    """q = (12k - 1)/(6k - 1); 23/11 for squares."""
    return (12 * k - 1) / (6 * k - 1)


def spectral_error_term(f2, indicator):
    """Evaluate ``E(f2(x) f2(x+t) P(t) | x, t)`` and its Hölder bound chain.

    With s = 6k and q = (12k-1)/(6k-1):

    * ``expectation`` = the exact normalized average, equal to
      ``sum_xi |f2^(xi)|^2 P^(-xi)``;
    * ``spectral_sum`` = ``sum_xi |f2^(xi)|^2 |P^(xi)|``;
    * ``holder`` = ``||P^||_s * (sum |f2^|^(2s/(s-1)))^((s-1)/s)``;
    * ``bound`` = ``||P^||_s * ||f2^||_q^((12k-1)/(6k)) * ||f2^||_inf^(1/(6k))``.

    ``reference_norm`` is Green's ``2^(19/12) N^-1/2`` for k = 2, else None.
    """
    n, vals = _values(f2)
    if n != indicator.modulus:
        raise ValueError(f"modulus mismatch: {n} vs {indicator.modulus}")
    k = indicator.exponent
    s = 6 * k
    q = restriction_exponent(k)
    fh = dft(f2).coeffs
    ph = dft(indicator.values).coeffs
    mag2 = np.abs(fh) ** 2
    vals = np.asarray(vals, float)
    # direct physical-side average: (1/N^2) sum_t P(t) sum_x f(x) f(x+t)
    corr = cyclic_convolve(vals, vals[(-np.arange(n)) % n])  # corr[t] = sum_x f(x) f(x - t)
    expectation = float(np.dot(indicator.values, corr[(-np.arange(n)) % n]) / n**2)
    spectral_sum = float(np.dot(mag2, np.abs(ph)))
    pnorm = spectral_lq_norm(ph, s)
    holder_exp = 2 * s / (s - 1)
    holder = pnorm * spectral_lq_norm(fh, holder_exp) ** 2
    fq = spectral_lq_norm(fh, q)
    fsup = spectral_lq_norm(fh, math.inf)
    bound = pnorm * fq ** ((12 * k - 1) / (6 * k)) * fsup ** (1 / (6 * k))
    ref = GREEN_CONST * n ** -0.5 if k == 2 else None
    return SpectralErrorTerm(expectation, spectral_sum, float(holder), float(bound),
                             float(pnorm), float(s), float(fq), float(q), float(fsup), ref)


def l2_error_on_bohr(fi, f2, bprime):
    """``sum_{x in B'} (fi * f2)(x)^2``."""
    n1, _ = _values(fi)
    n2, _ = _values(f2)
    if not n1 == n2 == bprime.modulus:
        raise ValueError(f"modulus mismatch: {n1}, {n2}, {bprime.modulus}")
    conv = convolve(BalancedFunction(n1, _values(fi)[1]), BalancedFunction(n2, _values(f2)[1]))
    return float(np.sum(conv.values[bprime.elements] ** 2))
