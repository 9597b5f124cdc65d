"""Fourier analysis on the cyclic group Z_N.

Normalization is asymmetric and used everywhere in the package::

    dft(f)[xi]     = (1/N) * sum_x f(x) * exp(-2*pi*i*x*xi/N)
    inverse_dft(F) = sum_xi F(xi) * exp(+2*pi*i*x*xi/N)
    (f * g)(x)     = sum_y f(y) g(x - y)

so that ``dft(convolve(f, g)) == N * dft(f) * dft(g)``.

Any length N is handled by the chirp (Bluestein) reduction to a cyclic
convolution of power-of-two length, so prime N costs O(N log N).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from . import tolerances as tol


def _frozen(values, dtype):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DensityFunction:
    """A nonnegative real function on Z_N."""

    modulus: int
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values, float)
        if vals.ndim != 1 or vals.shape[0] != self.modulus:
            raise ValueError(f"expected {self.modulus} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("density values must be finite")
        if vals.size and vals.min() < 0:
            raise ValueError(f"density values must be >= 0 (min {vals.min()!r})")
        object.__setattr__(self, "values", vals)

    @classmethod
    def indicator(cls, modulus, elements, scale=1.0):
        vals = np.zeros(modulus)
        vals[np.asarray(list(elements), dtype=np.int64) % modulus] = scale
        return cls(modulus, vals)

    def mean(self):
        return float(self.values.mean())

    def support(self):
        return np.flatnonzero(self.values > 0)

    def __len__(self):
        return self.modulus


@dataclass(frozen=True, eq=False)
class BalancedFunction:
    """A real function on Z_N that may take negative values."""

    modulus: int
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values, float)
        if vals.ndim != 1 or vals.shape[0] != self.modulus:
            raise ValueError(f"expected {self.modulus} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", vals)

    def mean(self):
        return float(self.values.mean())

    def __len__(self):
        return self.modulus


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients ``coeffs[xi] = dft(f)[xi]``."""

    modulus: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coeffs, complex)
        if c.ndim != 1 or c.shape[0] != self.modulus:
            raise ValueError(f"expected {self.modulus} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    def abs(self):
        return np.abs(self.coeffs)

    def __len__(self):
        return self.modulus


Function = DensityFunction | BalancedFunction


def _values(f):
    if isinstance(f, (DensityFunction, BalancedFunction)):
        return f.modulus, f.values
    arr = np.asarray(f)
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional array")
    return arr.shape[0], arr


def as_function(values, modulus=None):
    """Wrap real values as a DensityFunction when nonnegative, else BalancedFunction.

    Negative entries within floating noise of zero are clipped when the
    rest of the array is nonnegative.
    """
    vals = np.asarray(values, dtype=float)
    n = vals.shape[0] if modulus is None else modulus
    if vals.size == 0 or vals.min() >= 0:
        return DensityFunction(n, vals)
    scale = max(1.0, float(np.abs(vals).max()))
    if vals.min() >= -tol.NEG_NOISE * scale:
        return DensityFunction(n, np.maximum(vals, 0.0))
    return BalancedFunction(n, vals)


# -- raw transforms ----------------------------------------------------------

def _is_pow2(n):
    return n & (n - 1) == 0


@lru_cache(maxsize=64)
def _bluestein_plan(n):
    """Chirp ``w[k] = exp(-i*pi*k^2/n)`` and the transformed conjugate filter."""
    m = 1 << (2 * n - 2).bit_length()
    k = np.arange(n, dtype=np.int64)
    # k^2 mod 2n keeps the angle in [0, 2*pi) without losing precision
    chirp = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
    filt = np.zeros(m, dtype=complex)
    filt[:n] = np.conj(chirp)
    filt[m - n + 1:] = np.conj(chirp[1:][::-1])
    filt_hat = np.fft.fft(filt)
    chirp.setflags(write=False)
    filt_hat.setflags(write=False)
    return m, chirp, filt_hat


def fft_raw(x):
    """Unnormalized forward transform ``sum_x x[t] exp(-2 pi i t xi / N)``."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[0]
    if n <= 2 or _is_pow2(n):
        return np.fft.fft(x)
    m, chirp, filt_hat = _bluestein_plan(n)
    a = np.zeros(m, dtype=complex)
    a[:n] = x * chirp
    conv = np.fft.ifft(np.fft.fft(a) * filt_hat)
    return chirp * conv[:n]


def ifft_raw(spec):
    """Unnormalized inverse ``sum_xi X[xi] exp(+2 pi i t xi / N)``."""
    spec = np.asarray(spec, dtype=complex)
    return np.conj(fft_raw(np.conj(spec)))


def cyclic_convolve(a, b):
    """Circular convolution of two equal-length arrays via transforms."""
    n = len(a)
    out = ifft_raw(fft_raw(a) * fft_raw(b)) / n
    if np.isrealobj(a) and np.isrealobj(b):
        return out.real
    return out


# -- public operations -------------------------------------------------------

def dft(f):
    """Fourier coefficients with the expectation normalization."""
    n, vals = _values(f)
    if n < 1:
        raise ValueError("modulus must be >= 1")
    return Spectrum(n, fft_raw(vals) / n)


def inverse_dft(spectrum, imag_tol=1e-7):
    """Invert ``dft``; returns a DensityFunction or BalancedFunction.

    Raises ValueError when the result has a non-negligible imaginary part,
    i.e. the spectrum is not conjugate symmetric.
    """
    if isinstance(spectrum, Spectrum):
        n, coeffs = spectrum.modulus, spectrum.coeffs
    else:
        coeffs = np.asarray(spectrum, dtype=complex)
        n = coeffs.shape[0]
    if n < 1:
        raise ValueError("modulus must be >= 1")
    vals = ifft_raw(coeffs)
    scale = max(1.0, float(np.abs(vals).max()))
    if np.abs(vals.imag).max() > imag_tol * scale:
        raise ValueError("spectrum is not conjugate symmetric; inverse is complex")
    return as_function(vals.real, n)


def convolve(f, g):
    """Circular convolution ``(f * g)(x) = sum_y f(y) g(x - y)``."""
    nf, a = _values(f)
    ng, b = _values(g)
    if nf != ng:
        raise ValueError(f"modulus mismatch: {nf} vs {ng}")
    out = cyclic_convolve(np.asarray(a, float), np.asarray(b, float))
    signed = isinstance(f, BalancedFunction) or isinstance(g, BalancedFunction)
    if signed:
        return BalancedFunction(nf, out)
    return as_function(out, nf)


def spectral_lq_norm(spectrum, q):
    """``(sum_xi |F(xi)|^q)^(1/q)``; ``q = inf`` gives the max modulus."""
    coeffs = spectrum.coeffs if isinstance(spectrum, Spectrum) else np.asarray(spectrum)
    if q != math.inf and not q >= 1:
        raise ValueError(f"q must be >= 1 or inf, got {q!r}")
    mags = np.abs(coeffs)
    if q == math.inf:
        return float(mags.max()) if mags.size else 0.0
    top = mags.max() if mags.size else 0.0
    if top == 0:
        return 0.0
    # factor out the max to avoid underflow for large q
    return float(top * np.sum((mags / top) ** q) ** (1.0 / q))


def lq_norm(values, q):
    """``(sum_x |f(x)|^q)^(1/q)`` on plain arrays (physical side)."""
    return spectral_lq_norm(np.asarray(values), q)
