"""Structured/random split ``f = f1 + f2`` by averaging over a Bohr set.

With ``L0 = {xi : |f^(xi)| >= eps0}`` and ``B0 = B(L0, eps0)``,
``f1(x) = E(f(x + y1 - y2) : y1, y2 in B0)``.  This is computed as
``f * beta * beta~`` where ``beta = 1_B0 / |B0|``, which in frequency is
``f1^(xi) = f^(xi) * m(xi)`` with ``m = |N beta^|^2`` real in [0, 1].
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from . import tolerances as tol
from .bohr import BohrProfile, BohrSet
from .fourier import BalancedFunction, DensityFunction, as_function, convolve, dft, spectral_lq_norm


def large_spectrum(f, epsilon0):
    """Frequencies with ``|f^(xi)| >= epsilon0``, sorted."""
    if not epsilon0 > 0:
        raise ValueError(f"epsilon0 must be positive, got {epsilon0!r}")
    return np.flatnonzero(dft(f).abs() >= epsilon0)


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    epsilon0: float
    Lambda0: np.ndarray
    B0: BohrSet
    f: DensityFunction
    f1: DensityFunction
    f2: BalancedFunction
    eta: float

    def to_record(self):
        return {
            "epsilon0": self.epsilon0,
            "Lambda0_size": int(len(self.Lambda0)),
            "B0_size": self.B0.size,
            "eta": self.eta,
            "f1_sup": float(self.f1.values.max()),
        }


def _bohr_b0(n, freqs, eps0):
    prof = BohrProfile(n, freqs)
    elems = prof.members(eps0)
    elems.setflags(write=False)
    return BohrSet(n, 0, prof.frequencies, float(eps0), elems)


def decompose(f, nu, epsilon0, eta=None):
    """Split ``f`` into structured ``f1`` and pseudorandom ``f2``.

    ``eta`` defaults to the measured ``max_xi |nu^(xi) - [xi == 0]|``.
    """
    if not 0 < epsilon0 < 1:
        raise ValueError(f"epsilon0 must lie in (0, 1), got {epsilon0!r}")
    if f.modulus != nu.modulus:
        raise ValueError(f"modulus mismatch: {f.modulus} vs {nu.modulus}")
    n = f.modulus
    scale = max(1.0, float(nu.values.max()))
    if np.any(f.values > nu.values + tol.EXACT * scale):
        raise ValueError("f must be majorized by nu pointwise")
    if eta is None:
        dev = dft(nu).coeffs.copy()
        dev[0] -= 1.0
        eta = float(np.abs(dev).max())
    lam0 = large_spectrum(f, epsilon0)
    lam0.setflags(write=False)
    b0 = _bohr_b0(n, lam0, epsilon0)
    beta = np.zeros(n)
    beta[b0.elements] = 1.0 / b0.size
    beta_refl = beta[(-np.arange(n)) % n]
    f1 = convolve(convolve(f, DensityFunction(n, beta)), DensityFunction(n, beta_refl))
    f1 = as_function(f1.values, n)
    f2 = BalancedFunction(n, f.values - f1.values)
    return DecompositionResult(float(epsilon0), lam0, b0, f, f1, f2, float(eta))


def multiplier(result):
    """``m(xi) = |N beta^(xi)|^2``, with ``f1^ = f^ * m``."""
    n = result.B0.modulus
    beta = np.zeros(n)
    beta[result.B0.elements] = 1.0 / result.B0.size
    return np.abs(n * dft(beta).coeffs) ** 2


@dataclass(frozen=True)
class DecompositionCertificate:
    f1_min: float
    f1_max: float
    f1_upper: float
    bounded_ok: bool            # (i)
    mean_gap: float
    mean_ok: bool               # (ii)
    f2_sup: float
    f2_sup_budget: float
    f2_sup_ok: bool             # (iii)
    domination_excess: float
    domination_ok: bool         # (iv)

    @property
    def all_ok(self):
        return self.bounded_ok and self.mean_ok and self.f2_sup_ok and self.domination_ok

    def to_record(self):
        return {
            "f1Min": self.f1_min,
            "f1Max": self.f1_max,
            "f1Upper": self.f1_upper,
            "boundedOk": self.bounded_ok,
            "meanGap": self.mean_gap,
            "meanOk": self.mean_ok,
            "f2Sup": self.f2_sup,
            "f2SupBudget": self.f2_sup_budget,
            "f2SupOk": self.f2_sup_ok,
            "dominationExcess": self.domination_excess,
            "dominationOk": self.domination_ok,
            "allOk": self.all_ok,
        }


def certify_decomposition(result, nu=None):
    """Check the four decomposition properties on one instance.

    (i)   ``0 <= f1 <= 1 + (1 + P(B0)^-1) * eta``
    (ii)  ``E f1 == E f``
    (iii) ``||f2^||_inf <= 3 (1 + eta) eps0``
    (iv)  ``|fi^(xi)| <= |f^(xi)|`` for every xi, i = 1, 2
    """
    n = result.f.modulus
    eta = result.eta
    p_b0 = result.B0.size / n
    f1v = result.f1.values
    upper = 1.0 + (1.0 + 1.0 / p_b0) * eta
    scale = max(1.0, float(result.f.values.max()))
    bounded_ok = bool(f1v.min() >= -tol.EXACT * scale and f1v.max() <= upper + tol.EXACT * scale)
    mean_gap = abs(result.f1.mean() - result.f.mean())
    fh = dft(result.f).abs()
    f1h = dft(result.f1).abs()
    f2h = dft(result.f2).abs()
    f2_sup = float(f2h.max())
    budget = 3.0 * (1.0 + eta) * result.epsilon0
    excess = float(max((f1h - fh).max(), (f2h - fh).max()))
    return DecompositionCertificate(
        f1_min=float(f1v.min()),
        f1_max=float(f1v.max()),
        f1_upper=float(upper),
        bounded_ok=bounded_ok,
        mean_gap=float(mean_gap),
        mean_ok=bool(mean_gap <= tol.EXACT * max(1.0, result.f.mean())),
        f2_sup=f2_sup,
        f2_sup_budget=float(budget),
        f2_sup_ok=bool(f2_sup <= budget + tol.EXACT),
        domination_excess=excess,
        domination_ok=bool(excess <= tol.IDENTITY),
    )


def regime_flags(result, sigma=None, c1=1.0):
    """Where this instance sits relative to the smallness regimes for eps0.

    ``eps0_small``: ``log(1/eps0) < c1 log log N``; ``f1_le_2``: ``||f1||_inf <= 2``;
    ``f1_le_1_plus_sigma`` when ``sigma`` is given.
    """
    n = result.f.modulus
    lhs = math.log(1 / result.epsilon0)
    rhs = c1 * math.log(math.log(n)) if n > 2 else float("-inf")
    out = {
        "eps0_small_lhs": lhs,
        "eps0_small_rhs": rhs,
        "eps0_small_ok": lhs < rhs,
        "c1": c1,
        "f1_sup": float(result.f1.values.max()),
        "f1_le_2": bool(result.f1.values.max() <= 2.0),
    }
    if sigma is not None:
        out["f1_le_1_plus_sigma"] = bool(result.f1.values.max() <= 1.0 + sigma)
    return out


def f2_q_norms(result, qs=(19 / 9, 23 / 11, 2.0)):
    fh = dft(result.f)
    f2h = dft(result.f2)
    return {q: (spectral_lq_norm(f2h, q), spectral_lq_norm(fh, q)) for q in qs}
