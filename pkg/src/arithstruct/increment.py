"""Density-increment dichotomy on Bohr sets and its iteration.

One step takes f supported on a regular Bohr set ``B = b + B(G, delta)``
with mean ``alpha`` on B and either

* finds a regular ``B' = 2b + B(G, delta')`` on which ``f*f >= (alpha^2/2)|B|``
  for at least a ``1 - sigma`` fraction of points (``Found``), or
* produces a narrower regular Bohr set ``B''`` of rank ``|G| + |Lambda|`` on
  which the mean of f is at least ``alpha (1 + 2^-5)`` (``Increment``), or
* reports explicitly that neither could be certified (``DichotomyFailure``).

``f*f`` of a function supported on ``b + B(G, delta)`` lives around ``2b``,
so B' is centered there.  The frequency set Lambda is a greedy
dissociated-like subset of the large spectrum of the witness set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from . import tolerances as tol
from .bohr import BohrProfile, BohrSet, RegularRadiusNotFound, find_regular_radius, regular_bohr_set
from .fourier import BalancedFunction, _values, cyclic_convolve, dft

GROWTH = 1 + 2 ** -5


def _ge(values, thr):
    return values >= thr - tol.EXACT * max(1.0, abs(thr))


def _checked_values(f, B):
    n, vals = _values(f)
    vals = np.asarray(vals, float)
    if n != B.modulus:
        raise ValueError(f"modulus mismatch: {n} vs {B.modulus}")
    outside = np.ones(n, dtype=bool)
    outside[B.elements] = False
    if np.any(np.abs(vals[outside]) > tol.EXACT):
        raise ValueError("f must be supported on the Bohr set B")
    return n, vals


def restrict(f, B):
    """f times the indicator of B, as a plain array."""
    _, vals = _values(f)
    out = np.zeros(B.modulus)
    out[B.elements] = np.asarray(vals, float)[B.elements]
    return out


def balanced_function(f, B):
    """``g = f - alpha * 1_B`` with ``alpha = E(f | B)``."""
    n, vals = _checked_values(f, B)
    alpha = vals[B.elements].sum() / B.size
    g = vals.copy()
    g[B.elements] -= alpha
    return BalancedFunction(n, g)


def self_convolution(vals):
    return cyclic_convolve(vals, vals)


def witness_set(f, B, Bprime, alpha, sigma, conv=None):
    """The ``ceil(sigma |B'|)`` points of B' with smallest f*f below ``(alpha^2/2)|B|``.

    Ties are broken by element order.  Raises ValueError when there are too
    few sub-threshold points, which means the Found alternative holds.
    """
    _, vals = _values(f)
    if conv is None:
        conv = self_convolution(np.asarray(vals, float))
    thr = alpha * alpha / 2 * B.size
    elems = Bprime.elements
    cvals = conv[elems]
    low = ~_ge(cvals, thr)
    need = math.ceil(sigma * Bprime.size - 1e-12)
    if int(low.sum()) < need:
        raise ValueError(
            f"only {int(low.sum())} sub-threshold points in B', need {need}: the Found case holds"
        )
    cand, cv = elems[low], cvals[low]
    order = np.lexsort((cand, cv))
    return np.sort(cand[order[:need]])


def select_frequencies(spectrum_abs, large, exclude=(), cap=None):
    """Greedy dissociated-like subset of ``large``.

    Candidates are taken by decreasing ``spectrum_abs`` (then increasing
    frequency); a candidate is skipped when it is 0, lies in ``±exclude``,
    or equals ``±c`` or ``±c1 ± c2`` for already-chosen c, c1, c2.
    Returns ``(chosen, cap_hit)``.
    """
    n = spectrum_abs.shape[0]
    large = np.asarray(large, dtype=np.int64)
    order = large[np.lexsort((large, -spectrum_abs[large]))]
    blocked = {0}
    for e in exclude:
        blocked.update({e % n, (-e) % n})
    chosen = []
    cap_hit = False
    for xi in order:
        xi = int(xi)
        if xi in blocked:
            continue
        if cap is not None and len(chosen) >= cap:
            cap_hit = True
            break
        for c in chosen:
            for s in (xi + c, xi - c, -xi + c, -xi - c):
                blocked.add(s % n)
        blocked.update({xi, (-xi) % n, (2 * xi) % n, (-2 * xi) % n})
        chosen.append(xi)
    return chosen, cap_hit


@dataclass(frozen=True)
class Found:
    B: BohrSet
    Bprime: BohrSet
    alpha: float
    threshold: float
    good_count: int
    good_fraction: float
    sigma: float

    tag = "found"

    def to_record(self):
        return {
            "outcome": self.tag,
            "alpha": self.alpha,
            "threshold": self.threshold,
            "goodCount": self.good_count,
            "goodFraction": self.good_fraction,
            "B": self.B.to_record(include_elements=False),
            "Bprime": self.Bprime.to_record(include_elements=False),
            "B_size": self.B.size,
            "Bprime_size": self.Bprime.size,
        }


@dataclass(frozen=True)
class Increment:
    B: BohrSet
    Bprime: BohrSet
    Bdoubleprime: BohrSet
    alpha: float
    new_mean: float
    Lambda: tuple
    cap_hit: bool
    diagnostics: dict = field(default_factory=dict)

    tag = "increment"

    def to_record(self):
        return {
            "outcome": self.tag,
            "alpha": self.alpha,
            "newMean": self.new_mean,
            "Lambda": list(self.Lambda),
            "capHit": self.cap_hit,
            "Bdoubleprime": self.Bdoubleprime.to_record(include_elements=False),
            "Bdoubleprime_size": self.Bdoubleprime.size,
            **self.diagnostics,
        }


@dataclass(frozen=True)
class DichotomyFailure:
    """Neither alternative could be certified; ``reason`` says why."""

    B: BohrSet
    alpha: float
    reason: str
    new_mean: float | None = None
    defects: tuple | None = None
    diagnostics: dict = field(default_factory=dict)

    tag = "failure"

    def to_record(self):
        return {
            "outcome": self.tag,
            "alpha": self.alpha,
            "reason": self.reason,
            "newMean": self.new_mean,
            **self.diagnostics,
        }


IncrementOutcome = Found | Increment | DichotomyFailure


def _failure(B, alpha, err, new_mean=None):
    defects = tuple(float(x) for x in err.defects) if isinstance(err, RegularRadiusNotFound) else None
    return DichotomyFailure(B, alpha, str(err), new_mean, defects)


def increment_step(f, B, sigma, c0=0.1):
    """Run the dichotomy once for f supported on the regular Bohr set B."""
    n, vals = _checked_values(f, B)
    if not 0 < sigma <= 1:
        raise ValueError(f"sigma must lie in (0, 1], got {sigma!r}")
    scale = max(1.0, float(np.abs(vals).max()))
    if vals.min() < -tol.EXACT * scale or vals.max() > 1 + tol.EXACT:
        raise ValueError("f must take values in [0, 1]")
    alpha = float(vals[B.elements].sum() / B.size)
    if alpha <= 0:
        raise ValueError("f must have positive mean on B")
    gamma = B.frequencies
    d = len(gamma)
    delta, b = B.radius, B.shift

    prof = BohrProfile(n, gamma)
    try:
        delta_p = find_regular_radius(n, gamma, min(2 * c0 * alpha**2 * delta / d, 1.999), c0, profile=prof)
    except RegularRadiusNotFound as err:
        return _failure(B, alpha, err)
    Bp = regular_bohr_set(n, gamma, delta_p, c0, shift=2 * b, profile=prof)

    conv = self_convolution(vals)
    thr = alpha * alpha / 2 * B.size
    good = int(np.count_nonzero(_ge(conv[Bp.elements], thr)))
    frac = good / Bp.size
    if frac >= 1 - sigma:
        return Found(B, Bp, alpha, thr, good, frac, sigma)

    S = witness_set(vals, B, Bp, alpha, sigma, conv=conv)
    s_ind = np.zeros(n)
    s_ind[S] = 1.0
    s_hat = np.abs(dft(s_ind).coeffs)
    l_thr = alpha * sigma * Bp.size / (4 * n)
    L = np.flatnonzero(s_hat >= l_thr)
    l_bound = (4 * n / (alpha * sigma * Bp.size)) ** 2 * len(S) / n
    if len(L) > l_bound * (1 + tol.EXACT):
        raise AssertionError(f"large spectrum of size {len(L)} exceeds Chebyshev bound {l_bound}")

    g = vals.copy()
    g[B.elements] -= alpha
    g_hat = dft(g).coeffs
    energy = float(n / B.size * np.sum(np.abs(g_hat[L]) ** 2))

    log_inv_sigma = math.log(1 / sigma)
    cap = max(1, math.ceil(16 * alpha**-2 * log_inv_sigma))
    lam, cap_hit = select_frequencies(s_hat, L, exclude=gamma, cap=cap)
    new_gamma = tuple(sorted(set(gamma) | set(lam)))
    budget = delta_p * alpha**2 * 4 / (d * d * log_inv_sigma) if log_inv_sigma > 0 else math.inf
    top = min(delta_p, budget)
    diagnostics = {
        "deltaPrime": delta_p,
        "Bprime_size": Bp.size,
        "goodFraction": frac,
        "S_size": int(len(S)),
        "L_size": int(len(L)),
        "L_bound": float(l_bound),
        "energy": energy,
        "energyTarget": alpha**2 / 4,
        "energyErrorBudget": d * delta_p / delta,
        "lambdaCap": cap,
        "changBudget": budget,
    }

    prof2 = BohrProfile(n, new_gamma)
    try:
        delta_pp = find_regular_radius(n, new_gamma, top, c0, profile=prof2)
    except RegularRadiusNotFound as err:
        fail = _failure(B, alpha, err)
        return DichotomyFailure(fail.B, alpha, fail.reason, None, fail.defects, diagnostics)
    base = prof2.members(delta_pp)
    base_ind = np.zeros(n)
    base_ind[base] = 1.0
    # local sums over x + base; base is symmetric so this is f * 1_base
    local = cyclic_convolve(vals, base_ind)
    b2 = int(np.argmax(local))
    new_mean = float(local[b2] / base.size)
    Bpp = regular_bohr_set(n, new_gamma, delta_pp, c0, shift=b2, profile=prof2)
    diagnostics["deltaDoublePrime"] = delta_pp
    if new_mean >= alpha * GROWTH * (1 - tol.EXACT):
        return Increment(B, Bp, Bpp, alpha, new_mean, tuple(lam), cap_hit, diagnostics)
    return DichotomyFailure(
        B, alpha, f"density increment {new_mean:.6g} below {alpha * GROWTH:.6g}", new_mean, None, diagnostics
    )


def step_bound(alpha):
    """ceil(log(1/alpha) / log(33/32)) + 1."""
    return math.ceil(math.log(1 / alpha) / math.log(GROWTH)) + 1


@dataclass
class IterationTrace:
    steps: list
    terminal: Found | None
    alpha: float
    sigma: float
    c0: float
    step_bound: int
    anomalies: list = field(default_factory=list)
    outcomes: list = field(default_factory=list)

    @property
    def terminated(self):
        return self.terminal is not None

    def csv_rows(self):
        return [
            {"k": s["k"], "gamma_size": s["gamma_size"], "delta": s["delta"], "alpha": s["alpha"],
             "outcome": s["outcome"]}
            for s in self.steps
        ]

    def to_record(self):
        return {
            "alpha": self.alpha,
            "sigma": self.sigma,
            "c0": self.c0,
            "stepBound": self.step_bound,
            "terminated": self.terminated,
            "anomalies": list(self.anomalies),
            "steps": list(self.steps),
            "terminal": None if self.terminal is None else self.terminal.to_record(),
        }


def initial_bohr_set(f_vals, c0):
    """Regular ``b0 + B({0}, delta0)`` with delta0 the top grid radius below 1."""
    n = f_vals.shape[0]
    gamma0 = (0,)
    prof = BohrProfile(n, gamma0)
    delta0 = find_regular_radius(n, gamma0, 1.0, c0, profile=prof)
    base = prof.members(delta0)
    ind = np.zeros(n)
    ind[base] = 1.0
    b0 = int(np.argmax(cyclic_convolve(f_vals, ind)))
    return regular_bohr_set(n, gamma0, delta0, c0, shift=b0, profile=prof)


def iterate_increment(f_global, sigma, c0=0.1, max_steps=None):
    """Iterate ``increment_step`` from ``B({0}, ~1)`` until Found.

    ``f_global`` must take values in [0, 1] with positive mean.  Each step
    works with f restricted to the current Bohr set.  The run stops on
    Found, on a DichotomyFailure, or after ``max_steps`` (default: the
    step bound), recording anomalies in the latter two cases.
    """
    n, vals = _values(f_global)
    vals = np.asarray(vals, float)
    if vals.min() < -tol.EXACT or vals.max() > 1 + tol.EXACT:
        raise ValueError("f_global must take values in [0, 1]")
    alpha = float(vals.mean())
    if alpha <= 0:
        raise ValueError("f_global must have positive mean")
    bound = step_bound(alpha)
    if max_steps is None:
        max_steps = bound
    trace = IterationTrace([], None, alpha, sigma, c0, bound)
    try:
        Bk = initial_bohr_set(vals, c0)
    except RegularRadiusNotFound as err:
        trace.anomalies.append(f"initial radius: {err}")
        return trace
    prev_alpha = None
    for k in range(max_steps):
        fk = restrict(vals, Bk)
        out = increment_step(fk, Bk, sigma, c0)
        trace.outcomes.append(out)
        rec = {
            "k": k,
            "gamma_size": Bk.rank,
            "delta": Bk.radius,
            "alpha": out.alpha,
            "B_size": Bk.size,
            "outcome": out.tag,
        }
        if prev_alpha is not None and out.alpha < prev_alpha * GROWTH * (1 - tol.EXACT):
            trace.anomalies.append(f"step {k}: alpha growth below 33/32")
        prev_alpha = out.alpha
        trace.steps.append(rec)
        if isinstance(out, Found):
            trace.terminal = out
            return trace
        if isinstance(out, DichotomyFailure):
            trace.anomalies.append(f"step {k}: {out.reason}")
            return trace
        Bk = out.Bdoubleprime
    trace.anomalies.append(f"no Found outcome within {max_steps} steps")
    return trace


def recount_found(f_vals, found):
    """Direct recount of ``{x in B' : (f|B * f|B)(x) >= (alpha^2/2)|B|}``.

    Uses an O(|B'| |B|) sum over the Bohr set rather than transforms.
    """
    n = found.B.modulus
    fb = np.zeros(n)
    fb[found.B.elements] = np.asarray(f_vals, float)[found.B.elements]
    belem = found.B.elements
    wts = fb[belem]
    count = 0
    for x in found.Bprime.elements:
        s = float(np.dot(wts, fb[(x - belem) % n]))
        if s >= found.threshold - tol.EXACT * max(1.0, found.threshold):
            count += 1
    return count


def rank_radius_condition(sigma, gamma_size, delta_prime, n):
    """Compare ``(4 sigma)^-1`` with ``|G|^-1 delta' N^(1/|G|)``."""
    lhs = 1 / (4 * sigma)
    if gamma_size == 0:
        return {"lhs": lhs, "rhs": math.inf, "ok": True}
    rhs = delta_prime * n ** (1 / gamma_size) / gamma_size
    return {"lhs": lhs, "rhs": rhs, "ok": rhs >= lhs}


def normalize_for_increment(f1_vals):
    """Scale ``f1`` into [0, 1]: divide by 2 when ``||f1||_inf <= 2``, else by the sup."""
    top = float(np.max(f1_vals))
    if top <= 2.0:
        return np.asarray(f1_vals, float) / 2.0, 2.0, False
    return np.asarray(f1_vals, float) / top, top, True
