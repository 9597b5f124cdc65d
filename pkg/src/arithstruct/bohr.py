"""Bohr sets in Z_N: construction, regularity testing, regular radii.

``B(L, delta) = {x : |exp(2 pi i x xi / N) - 1| <= delta for all xi in L}``.
Since ``|exp(2 pi i t/N) - 1| = 2 sin(pi ||t/N||)``, membership is decided
from the integer distance ``min(t, N - t)`` of ``t = x*xi mod N``, which
keeps the closed-form interval counts exact for rank one.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
import warnings

import numpy as np

from . import kernels

MAX_MODULUS = 1 << 22
GRID_SIZE = 256
DEFAULT_C0 = 0.1
#: calibrated stand-in for the absolute constant in the Bohr-set size bound
C_CAL = 1.0 / (2.0 * math.pi)


class BohrSizeWarning(UserWarning):
    """A regular Bohr set fell below the calibrated size bound."""


@dataclass(frozen=True)
class RegularityReport:
    c0: float
    outer_count: int
    inner_count: int
    size: int
    defect: float
    regular: bool

    def to_record(self):
        return {
            "c0": self.c0,
            "outerCount": self.outer_count,
            "innerCount": self.inner_count,
            "defect": self.defect,
            "regular": self.regular,
        }


@dataclass(frozen=True, eq=False)
class BohrSet:
    """``shift + B(frequencies, radius)`` with its elements materialized."""

    modulus: int
    shift: int
    frequencies: tuple
    radius: float
    elements: np.ndarray
    regularity: RegularityReport | None = None

    @property
    def size(self):
        return int(self.elements.shape[0])

    @property
    def rank(self):
        return len(self.frequencies)

    @property
    def density(self):
        return self.size / self.modulus

    def indicator(self):
        out = np.zeros(self.modulus)
        out[self.elements] = 1.0
        return out

    def mask(self):
        out = np.zeros(self.modulus, dtype=np.uint8)
        out[self.elements] = 1
        return out

    def __contains__(self, x):
        x = int(x) % self.modulus
        i = np.searchsorted(self.elements, x)
        return bool(i < self.size and self.elements[i] == x)

    def to_record(self, include_elements=True):
        rec = {
            "N": self.modulus,
            "b": self.shift,
            "Lambda": list(self.frequencies),
            "delta": self.radius,
        }
        if include_elements:
            rec["elements"] = self.elements.tolist()
        if self.regularity is not None:
            rec["regularity"] = self.regularity.to_record()
        return rec


class RegularRadiusNotFound(RuntimeError):
    """No grid radius passed the regularity test.

    ``defects`` holds one defect per grid candidate, in descending radius
    order (``inf`` for candidates whose outer radius is not below 2).
    """

    def __init__(self, frequencies, delta0, c0, grid, defects):
        self.frequencies = tuple(frequencies)
        self.delta0 = delta0
        self.c0 = c0
        self.grid = grid
        self.defects = defects
        super().__init__(
            f"no regular radius in ({delta0 / 2:g}, {delta0:g}) for rank {len(self.frequencies)}"
            f" with c0={c0:g}; min defect {np.min(defects):.4g}"
        )


def _check_modulus(n):
    if not 1 <= n <= MAX_MODULUS:
        raise ValueError(f"modulus must be in [1, 2^22], got {n}")


def _normalize_freqs(n, freqs):
    return tuple(sorted({int(xi) % n for xi in freqs}))


def _threshold(n, delta):
    """Largest integer distance t with 2 sin(pi t / N) <= delta."""
    return n * math.asin(min(delta, 2.0) / 2.0) / math.pi


class BohrProfile:
    """Sorted per-x Bohr norms for a fixed frequency set.

    ``count(delta) = |B(L, delta)|`` is then a binary search, which makes
    scanning many radii cheap.
    """

    def __init__(self, n, freqs):
        _check_modulus(n)
        self.modulus = n
        self.frequencies = _normalize_freqs(n, freqs)
        live = [xi for xi in self.frequencies if xi != 0]
        if live:
            self.norms = kernels.bohr_norm(n, np.asarray(live, dtype=np.int64))
        else:
            self.norms = np.zeros(n, dtype=np.int64)
        self.sorted_norms = np.sort(self.norms)

    def count(self, delta):
        return int(np.searchsorted(self.sorted_norms, _threshold(self.modulus, delta), side="right"))

    def members(self, delta):
        return np.flatnonzero(self.norms <= _threshold(self.modulus, delta))

    def report(self, delta, c0):
        size = self.count(delta)
        outer = self.count((1 + c0 * c0) * delta)
        inner = self.count((1 - c0 * c0) * delta)
        defect = (outer - inner) / size
        return RegularityReport(float(c0), outer, inner, size, float(defect), bool(defect <= c0))


def _check_radius(delta):
    if not 0 < delta < 2:
        raise ValueError(f"radius must lie in (0, 2), got {delta!r}")


def bohr_elements(n, freqs, delta, shift=0):
    """Materialize ``shift + B(freqs, delta)``."""
    _check_radius(delta)
    prof = BohrProfile(n, freqs)
    base = prof.members(delta)
    elems = np.sort((base + int(shift)) % n)
    elems.setflags(write=False)
    return BohrSet(n, int(shift) % n, prof.frequencies, float(delta), elems)


def regularity_report(n, freqs, delta, c0=DEFAULT_C0, profile=None):
    """Boundary-annulus measure of ``B(freqs, delta)`` relative to its size."""
    if not 0 < c0 < 1:
        raise ValueError(f"c0 must lie in (0, 1), got {c0!r}")
    _check_radius(delta)
    if delta * (1 + c0 * c0) >= 2:
        raise ValueError(f"outer radius {delta * (1 + c0 * c0):g} is not below 2")
    prof = profile if profile is not None else BohrProfile(n, freqs)
    return prof.report(delta, c0)


def radius_grid(delta0, size=GRID_SIZE):
    """``size`` equispaced radii strictly inside (delta0/2, delta0), descending."""
    j = np.arange(size, 0, -1)
    return delta0 / 2 + (delta0 / 2) * j / (size + 1)


def size_bound(c0, delta, rank):
    return (C_CAL * c0 * c0 * delta) ** rank


def find_regular_radius(n, freqs, delta0, c0=DEFAULT_C0, profile=None):
    """Largest grid radius in (delta0/2, delta0) giving a regular Bohr set.

    Raises RegularRadiusNotFound (carrying all grid defects) if none is.
    """
    if not 0 < delta0 < 2:
        raise ValueError(f"delta0 must lie in (0, 2), got {delta0!r}")
    if not 0 < c0 < 1:
        raise ValueError(f"c0 must lie in (0, 1), got {c0!r}")
    prof = profile if profile is not None else BohrProfile(n, freqs)
    if len(prof.frequencies) > math.sqrt(c0) * n:
        raise ValueError("too many frequencies for the regular-radius guarantee")
    grid = radius_grid(delta0)
    defects = np.full(grid.shape, np.inf)
    for i, delta in enumerate(grid):
        if delta * (1 + c0 * c0) >= 2:
            continue
        rep = prof.report(float(delta), c0)
        defects[i] = rep.defect
        if rep.regular:
            return float(delta)
    raise RegularRadiusNotFound(prof.frequencies, delta0, c0, grid, defects)


def regular_bohr_set(n, freqs, delta, c0=DEFAULT_C0, shift=0, profile=None):
    """Bohr set with its regularity report attached; warns on size-bound violation."""
    prof = profile if profile is not None else BohrProfile(n, freqs)
    rep = regularity_report(n, freqs, delta, c0, profile=prof)
    base = prof.members(delta)
    elems = np.sort((base + int(shift)) % n)
    elems.setflags(write=False)
    bs = BohrSet(n, int(shift) % n, prof.frequencies, float(delta), elems, rep)
    if rep.regular and bs.density < size_bound(c0, delta, bs.rank):
        warnings.warn(
            f"regular Bohr set of rank {bs.rank} has density {bs.density:.3g} below "
            f"{size_bound(c0, delta, bs.rank):.3g}",
            BohrSizeWarning,
            stacklevel=2,
        )
    return bs
