"""Random sparse sets W of Z_N, their measures, and pseudorandomness certificates."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

import numpy as np

from . import kernels, rng
from .fourier import DensityFunction, cyclic_convolve, dft, spectral_lq_norm
from .structures import power_indicator

STRATEGIES = ("uniform-random", "progression-intersect", "square-difference-free-greedy")


def _sorted_frozen(elems):
    arr = np.unique(np.asarray(elems, dtype=np.int64))
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RandomSetSample:
    """A sampled W (and optionally a chosen subset A of W)."""

    modulus: int
    p: float
    seed: int
    W: np.ndarray
    A: np.ndarray | None = None
    strategy: str | None = None
    shortfall: bool = False
    details: dict = field(default_factory=dict)

    @property
    def theta(self):
        """Exponent with ``p = N^-theta``."""
        if self.modulus <= 1 or self.p >= 1:
            return 0.0
        return -math.log(self.p) / math.log(self.modulus)

    @property
    def alpha(self):
        if self.A is None:
            return None
        return len(self.A) / len(self.W) if len(self.W) else 0.0

    def to_record(self):
        return {
            "N": self.modulus,
            "p": self.p,
            "seed": self.seed,
            "theta": self.theta,
            "W_size": int(len(self.W)),
            "A_size": None if self.A is None else int(len(self.A)),
            "strategy": self.strategy,
            "shortfall": self.shortfall,
        }


def sample_w(n, p, seed):
    """Include each x in Z_N independently with probability p.

    The coin for x is ``rng.uniforms(seed, x, STREAM_MEMBERSHIP) < p``.
    """
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    if n < 1:
        raise ValueError(f"modulus must be >= 1, got {n}")
    u = rng.uniforms(seed, np.arange(n, dtype=np.uint64), rng.STREAM_MEMBERSHIP)
    return RandomSetSample(n, float(p), int(seed), _sorted_frozen(np.flatnonzero(u < p)))


def build_measures(sample):
    """``nu = W/p`` and ``f = A/p``; ``f`` is None when A is absent."""
    n, p = sample.modulus, sample.p
    nu = DensityFunction.indicator(n, sample.W, 1.0 / p)
    f = None if sample.A is None else DensityFunction.indicator(n, sample.A, 1.0 / p)
    return nu, f


@dataclass(frozen=True)
class PseudorandomCertificate:
    eta: float
    eta_budget: float
    l2_norm_sq: float
    l2_plancherel: float
    l2_budget: float | None
    restriction_q: float
    restriction_norm: float | None
    restriction_budget: float
    eta_ok: bool
    l2_ok: bool | None
    restriction_ok: bool | None

    def to_record(self):
        return {
            "eta": self.eta,
            "etaBudget": self.eta_budget,
            "l2NormSq": self.l2_norm_sq,
            "l2Plancherel": self.l2_plancherel,
            "l2Budget": self.l2_budget,
            "restrictionQ": self.restriction_q,
            "restrictionNorm": self.restriction_norm,
            "restrictionBudget": self.restriction_budget,
            "etaOk": self.eta_ok,
            "l2Ok": self.l2_ok,
            "restrictionOk": self.restriction_ok,
        }


def default_eta_budget(n):
    return 3.0 * n ** (-0.2)


def certify_pseudorandom(nu, f=None, q=23 / 11, M=10.0, eta_budget=None, l2_budget=None):
    """Measure the pseudorandomness hypotheses and compare with budgets.

    ``eta = max_xi |dft(nu)(xi) - [xi == 0]|``.  When ``f`` is given, also
    ``||dft(f)||_2^2`` (with its Plancherel twin ``N^-1 ||f||_2^2``) and
    ``||dft(f)||_q``.  ``l2_budget`` defaults to ``2 * max(nu)``, i.e. 2/p.
    """
    n = nu.modulus
    if eta_budget is None:
        eta_budget = default_eta_budget(n)
    dev = dft(nu).coeffs.copy()
    dev[0] -= 1.0
    eta = float(np.abs(dev).max())
    l2 = l2p = None
    rnorm = None
    if f is not None:
        fh = dft(f)
        l2 = float(np.sum(np.abs(fh.coeffs) ** 2))
        l2p = float(np.sum(f.values ** 2) / n)
        rnorm = spectral_lq_norm(fh, q)
        if l2_budget is None:
            l2_budget = 2.0 * float(nu.values.max())
    return PseudorandomCertificate(
        eta=eta,
        eta_budget=float(eta_budget),
        l2_norm_sq=l2 if l2 is not None else float("nan"),
        l2_plancherel=l2p if l2p is not None else float("nan"),
        l2_budget=l2_budget,
        restriction_q=float(q),
        restriction_norm=rnorm,
        restriction_budget=float(M),
        eta_ok=eta <= eta_budget,
        l2_ok=None if l2 is None else l2 <= l2_budget,
        restriction_ok=None if rnorm is None else rnorm <= M,
    )


def progression_for(n, alpha):
    """Step ceil(1/alpha), length ceil(alpha N) progression starting at 0."""
    step = math.ceil(1 / alpha)
    length = min(math.ceil(alpha * n), n)
    return step, length, np.unique((step * np.arange(length, dtype=np.int64)) % n)


def adversarial_subset(sample, alpha, strategy="uniform-random", k=2):
    """Choose A inside W of relative size at least ``alpha`` (if achievable).

    Strategies:

    ``uniform-random``
        the ``ceil(alpha |W|)`` elements of W with the smallest subset-stream
        uniforms (a uniformly random subset, keyed by the sample seed).
    ``progression-intersect``
        ``W ∩ (P + x)`` for the step-``ceil(1/alpha)`` progression P of length
        ``ceil(alpha N)``, with x maximizing the intersection (smallest x on ties).
    ``square-difference-free-greedy``
        scan W in seed-determined order, keeping elements that create no
        difference ``r^k`` (``1 <= r <= floor((N/3)^(1/k))``) mod N.
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    n, W = sample.modulus, sample.W
    target = math.ceil(alpha * len(W) - 1e-9)
    details = {}
    if strategy == "uniform-random":
        u = rng.uniforms(sample.seed, W.astype(np.uint64), rng.STREAM_SUBSET)
        order = np.lexsort((W, u))
        A = W[order[:target]]
    elif strategy == "progression-intersect":
        step, length, P = progression_for(n, alpha)
        wmask = np.zeros(n)
        wmask[W] = 1.0
        pmask = np.zeros(n)
        pmask[P] = 1.0
        # counts[x] = |W ∩ (P + x)| = sum_t P(t) W(t + x)
        counts = np.rint(cyclic_convolve(wmask, pmask[(-np.arange(n)) % n]))
        x = int(np.argmax(counts))
        A = np.intersect1d(W, (P + x) % n)
        details = {"P_step": step, "P_length": length, "P_size": int(len(P)), "shift": x}
    else:
        u = rng.uniforms(sample.seed, W.astype(np.uint64), rng.STREAM_GREEDY)
        order = W[np.lexsort((W, u))]
        shifts = power_indicator(n, k, warn=False).powers
        A = kernels.greedy_power_free(order, n, shifts, target)
    A = _sorted_frozen(A)
    return replace(
        sample,
        A=A,
        strategy=strategy,
        shortfall=bool(len(A) < target),
        details={"target": target, **details},
    )
