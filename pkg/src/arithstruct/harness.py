"""Deterministic experiment runner.

Each experiment maps ``(config, seed)`` to one row: a flat dict of scalar
columns (written to CSV) plus a nested ``certificates`` record (JSON only).
Rows never depend on other seeds, so sweeps can run in any order or in
parallel and still assemble into identical reports.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import asdict, dataclass, field, fields, replace
import datetime as _dt
import io
import json
import logging
import math
import os

import numpy as np

from . import __version__, kernels, rng
from . import decomposition as dec
from . import increment as inc
from . import random_model as rm
from . import structures as st

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
EXPERIMENTS = ("sarkozy", "power-diff", "sumset-size", "sumset-ap", "decomposition-audit", "increment-trace")
PRIME_REQUIRED = ("sarkozy", "power-diff")

NOTES = [
    "Square- and power-difference results are tested in the reading 'holds with probability "
    "1 - o(1)'; a statement of the same result with probability o(1) is treated as a misprint.",
    "Success fractions estimate probabilities that should tend to 1 as N grows.",
    "Regular radii come from a 256-point grid search over (delta0/2, delta0).",
    "Frequency selection in the increment step is a greedy dissociated-like subset of the "
    "large spectrum, standing in for a localized Chang bound.",
    "Regime constants (c1, C, C1, C2) are set to 1 and only logged; desk-scale N cannot meet "
    "the asymptotic regimes.",
]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    N: int = 10007
    p: float = 0.3
    alpha: float = 0.4
    k: int | None = None
    beta: float | None = None
    sigma: float | None = None
    epsilon0: float = 0.05
    q: float | None = None
    c0: float = 0.1
    M: float = 10.0
    seeds: tuple = tuple(range(10))
    strategy: str = "uniform-random"
    out: str | None = None
    format: str = "json"

    @property
    def theta(self):
        return -math.log(self.p) / math.log(self.N) if self.p < 1 and self.N > 1 else 0.0

    def resolved(self):
        """Fill experiment-dependent defaults and validate."""
        e = self.experiment
        if e not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {e!r}; expected one of {EXPERIMENTS}")
        k = self.k
        if k is None:
            k = {"power-diff": 3, "sumset-ap": 5, "increment-trace": 5}.get(e, 2)
        q = self.q
        if q is None:
            q = st.restriction_exponent(k) if e in ("sarkozy", "power-diff") else 19 / 9
        sigma = self.sigma
        if sigma is None:
            if e == "sumset-size" and self.beta is not None:
                sigma = (self.alpha - self.beta) / 20
            else:
                sigma = 1 / (16 * k)
        cfg = replace(self, k=int(k), q=float(q), sigma=float(sigma),
                      seeds=tuple(int(s) for s in self.seeds))
        cfg.validate()
        return cfg

    def validate(self):
        if not isinstance(self.N, int) or self.N < 2:
            raise ConfigError(f"N must be an integer >= 2, got {self.N!r}")
        if self.experiment in PRIME_REQUIRED and not st.is_prime(self.N):
            raise ConfigError(f"experiment {self.experiment} needs prime N, got {self.N}")
        for name in ("p", "alpha"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ConfigError(f"{name} must lie in (0, 1], got {v!r}")
        if self.experiment == "sumset-size":
            if self.beta is None or not 0 <= self.beta < self.alpha:
                raise ConfigError(f"sumset-size needs 0 <= beta < alpha, got beta={self.beta!r}")
        if not 0 < self.epsilon0 < 1:
            raise ConfigError(f"epsilon0 must lie in (0, 1), got {self.epsilon0!r}")
        if not 0 < self.c0 < 1:
            raise ConfigError(f"c0 must lie in (0, 1), got {self.c0!r}")
        if self.sigma is not None and not 0 < self.sigma <= 1:
            raise ConfigError(f"sigma must lie in (0, 1], got {self.sigma!r}")
        if self.k is not None and self.k < 2:
            raise ConfigError(f"k must be >= 2, got {self.k!r}")
        if self.strategy not in rm.STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}; expected one of {rm.STRATEGIES}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        if any(s < 0 or s >= 2**64 for s in self.seeds):
            raise ConfigError("seeds must be 64-bit unsigned integers")

    def to_dict(self):
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        d["schema_version"] = SCHEMA_VERSION
        return d

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        version = data.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported config schema_version {version}")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in data:
            raise ConfigError("config needs an 'experiment' key")
        if "seeds" in data:
            data["seeds"] = parse_seeds(data["seeds"])
        return cls(**data)


def parse_seeds(spec):
    """An int count n means seeds 0..n-1; lists and "a,b,c" strings are taken as is."""
    if isinstance(spec, bool):
        raise ConfigError("seeds must be a count or a list")
    if isinstance(spec, int):
        return tuple(range(spec))
    if isinstance(spec, str):
        spec = spec.strip()
        if not spec:
            return ()
        if "," not in spec and spec.isdigit():
            return tuple(range(int(spec)))
        return tuple(int(s) for s in spec.split(",") if s.strip())
    return tuple(int(s) for s in spec)


def load_config(path):
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))


# -- regime bookkeeping -------------------------------------------------------

def regime_report(cfg):
    """Evaluate the asymptotic side conditions with all constants set to 1."""
    n, a, k, eps0 = cfg.N, cfg.alpha, cfg.k, cfg.epsilon0
    L = math.log(n)
    ll = math.log(L)
    lll = math.log(ll) if ll > 1 else float("nan")
    lhs = math.log(1 / eps0)
    out = {
        "constants": {"c1": 1.0, "C": 1.0, "C1": 1.0, "C2": 1.0},
        "eps0_small": {"lhs": lhs, "rhs": ll, "ok": lhs < ll},
    }
    if a < 1 and k >= 3:
        rhs8 = a**-2 * math.log(1 / a) * math.log(k) * (math.log(math.log(k)) + math.log(1 / a))
        out["eps0_power_regime"] = {"lhs": lhs, "rhs": rhs8, "ok": lhs >= rhs8}
    out["alpha_floor"] = {"lhs": a, "rhs": ll / math.sqrt(L), "ok": a >= ll / math.sqrt(L)}
    if a < 1 and not math.isnan(lll):
        kmax = math.exp(a**2 * ll / (math.log(1 / a) * (lll + math.log(1 / a))))
        out["ap_length_ceiling"] = {"lhs": k, "rhs": kmax, "ok": k <= kmax}
    return out


# -- pipelines ----------------------------------------------------------------

def _base(cfg, seed):
    sample = rm.sample_w(cfg.N, cfg.p, seed)
    sample = rm.adversarial_subset(sample, cfg.alpha, cfg.strategy, k=cfg.k)
    return sample


def _common_cols(cfg, seed, sample, cert):
    return {
        "seed": seed,
        "N": cfg.N,
        "p": cfg.p,
        "alpha": cfg.alpha,
        "strategy": cfg.strategy,
        "W_size": int(len(sample.W)),
        "A_size": int(len(sample.A)),
        "A_fraction": float(sample.alpha),
        "shortfall": bool(sample.shortfall),
        "eta": cert.eta,
        "eta_ok": bool(cert.eta_ok),
        "l2_norm_sq": cert.l2_norm_sq,
        "l2_ok": bool(cert.l2_ok) if cert.l2_ok is not None else None,
        "restriction_norm": cert.restriction_norm,
        "restriction_ok": bool(cert.restriction_ok) if cert.restriction_ok is not None else None,
    }


def trisect(A, n):
    """Largest of ``A ∩ [iN/3, (i+1)N/3)``; returns ``(index, part)``."""
    A = np.asarray(A, dtype=np.int64)
    cuts = [0, math.ceil(n / 3), math.ceil(2 * n / 3), n]
    parts = [A[(A >= cuts[i]) & (A < cuts[i + 1])] for i in range(3)]
    i = int(np.argmax([len(p) for p in parts]))
    return i, parts[i]


def run_power_difference(cfg, seed):
    k = cfg.k
    sample = _base(cfg, seed)
    n = cfg.N
    full = st.power_difference_count(sample.A, n, k)
    part_idx, part = trisect(sample.A, n)
    count = st.power_difference_count(part, n, k)
    part_sample = replace(sample, A=part)
    nu, f = rm.build_measures(part_sample)
    cert = rm.certify_pseudorandom(nu, f, q=cfg.q, M=cfg.M)
    row = _common_cols(cfg, seed, sample, cert)
    ind = st.power_indicator(n, k, warn=False)
    indicator_part = np.zeros(n)
    indicator_part[part] = 1.0
    va = st.varnavides_average(indicator_part, k)
    consistency = abs(va * n * ind.r_max - count) < 1e-6 * max(1.0, count)
    certs = {"sample": sample.to_record(), "pseudorandom": cert.to_record()}
    err = None
    dcert = None
    try:
        d = dec.decompose(f, nu, cfg.epsilon0, eta=cert.eta) if len(part) else None
    except ValueError as exc:
        d = None
        certs["decomposition_error"] = str(exc)
    if d is not None:
        dcert = dec.certify_decomposition(d)
        err = st.spectral_error_term(d.f2, ind)
        certs["decomposition"] = {**d.to_record(), **dcert.to_record(), **dec.regime_flags(d)}
        certs["error_term"] = err.to_record()
        certs["main_term"] = st.varnavides_average(d.f1, k)
    row.update({
        "k": k,
        "full_count": int(full),
        "part_index": part_idx,
        "part_size": int(len(part)),
        "part_count": int(count),
        "varnavides": va,
        "consistency_ok": bool(consistency),
        "lambda0_size": int(len(d.Lambda0)) if d is not None else None,
        "decomposition_ok": bool(dcert.all_ok) if dcert is not None else None,
        "error_spectral_sum": err.spectral_sum if err is not None else None,
        "error_bound": err.bound if err is not None else None,
        "chain_ok": bool(err.chain_ok) if err is not None else None,
        "success": bool(count > 0),
    })
    return row, certs


def run_sumset_size(cfg, seed):
    n = cfg.N
    sample = _base(cfg, seed)
    nu, f = rm.build_measures(sample)
    cert = rm.certify_pseudorandom(nu, f, q=cfg.q, M=cfg.M)
    row = _common_cols(cfg, seed, sample, cert)
    AA = st.sumset(sample.A, sample.A, n)
    size = int(len(AA))
    extremal = None
    p_size = sample.details.get("P_size")
    if p_size is not None:
        extremal = size <= 2 * p_size + 1
    d = dec.decompose(f, nu, cfg.epsilon0, eta=cert.eta)
    dcert = dec.certify_decomposition(d)
    alpha_f = f.mean()
    f1f1 = inc.self_convolution(d.f1.values)
    big = int(np.count_nonzero(f1f1 >= cfg.sigma * alpha_f * n))
    certs = {
        "sample": sample.to_record(),
        "pseudorandom": cert.to_record(),
        "decomposition": {**d.to_record(), **dcert.to_record(), **dec.regime_flags(d, sigma=cfg.sigma)},
        "large_f1_self_convolution": {"count": big, "target": (alpha_f - 3 * cfg.sigma) * n},
        "sumset_lower_bound": {"count": size, "target": (alpha_f - 10 * cfg.sigma) * n},
    }
    row.update({
        "sumset_size": size,
        "sumset_density": size / n,
        "beta": cfg.beta,
        "P_size": p_size,
        "extremal_bound_ok": extremal,
        "decomposition_ok": bool(dcert.all_ok),
        "success": bool(size >= cfg.beta * n),
    })
    return row, certs


def run_sumset_ap(cfg, seed):
    n = cfg.N
    sample = _base(cfg, seed)
    nu, f = rm.build_measures(sample)
    cert = rm.certify_pseudorandom(nu, f, q=cfg.q, M=cfg.M)
    row = _common_cols(cfg, seed, sample, cert)
    AA = st.sumset(sample.A, sample.A, n)
    ap = st.longest_ap(AA, n)
    d = dec.decompose(f, nu, cfg.epsilon0, eta=cert.eta)
    g, scale, rescaled = inc.normalize_for_increment(d.f1.values)
    trace = inc.iterate_increment(g, cfg.sigma, cfg.c0)
    certs = {"sample": sample.to_record(), "pseudorandom": cert.to_record(),
             "decomposition": d.to_record(), "sumset_ap": ap.to_record(),
             "trace": trace.to_record(), "normalization": {"scale": scale, "flagged": rescaled}}
    good_len = None
    good_in_sumset = None
    good_size = 0
    if trace.terminal is not None:
        fd = trace.terminal
        alpha_f = f.mean()
        ff = inc.self_convolution(f.values)
        thr = alpha_f**2 / 10 * fd.B.size
        good = fd.Bprime.elements[ff[fd.Bprime.elements] >= thr]
        good_size = int(len(good))
        if good_size:
            gap = st.longest_ap(good, n)
            good_len = gap.length
            aa_mask = np.zeros(n, dtype=bool)
            aa_mask[AA] = True
            good_in_sumset = bool(all(aa_mask[x] for x in gap.elements()))
            certs["good_set_ap"] = gap.to_record()
        else:
            good_in_sumset = True
        certs["rank_radius"] = inc.rank_radius_condition(cfg.sigma, fd.B.rank, fd.Bprime.radius, n)
    row.update({
        "k": cfg.k,
        "sumset_size": int(len(AA)),
        "ap_length": ap.length,
        "ap_start": ap.start,
        "ap_step": ap.step,
        "steps": len(trace.steps),
        "terminated": trace.terminated,
        "good_set_size": good_size,
        "good_ap_length": good_len,
        "good_ap_in_sumset": good_in_sumset,
        "success": bool(ap.length >= cfg.k),
    })
    return row, certs


def run_decomposition_audit(cfg, seed):
    sample = _base(cfg, seed)
    nu, f = rm.build_measures(sample)
    cert = rm.certify_pseudorandom(nu, f, q=cfg.q, M=cfg.M)
    row = _common_cols(cfg, seed, sample, cert)
    d = dec.decompose(f, nu, cfg.epsilon0, eta=cert.eta)
    dcert = dec.certify_decomposition(d)
    m = dec.multiplier(d)
    norms = dec.f2_q_norms(d)
    monotone = all(a <= b * (1 + 1e-9) + 1e-12 for a, b in norms.values())
    certs = {"sample": sample.to_record(), "pseudorandom": cert.to_record(),
             "decomposition": {**d.to_record(), **dcert.to_record(), **dec.regime_flags(d)},
             "q_norms": {repr(q): {"f2": a, "f": b} for q, a, b in ((q, *v) for q, v in norms.items())}}
    row.update({
        "epsilon0": cfg.epsilon0,
        "lambda0_size": int(len(d.Lambda0)),
        "B0_size": d.B0.size,
        "check_i": dcert.bounded_ok,
        "check_ii": dcert.mean_ok,
        "check_iii": dcert.f2_sup_ok,
        "check_iv": dcert.domination_ok,
        "multiplier_ok": bool(m.min() >= -1e-9 and m.max() <= 1 + 1e-9),
        "q_norm_monotone": bool(monotone),
        "success": bool(dcert.all_ok),
    })
    return row, certs


def run_increment_trace(cfg, seed):
    sample = _base(cfg, seed)
    nu, f = rm.build_measures(sample)
    cert = rm.certify_pseudorandom(nu, f, q=cfg.q, M=cfg.M)
    row = _common_cols(cfg, seed, sample, cert)
    d = dec.decompose(f, nu, cfg.epsilon0, eta=cert.eta)
    g, scale, rescaled = inc.normalize_for_increment(d.f1.values)
    trace = inc.iterate_increment(g, cfg.sigma, cfg.c0)
    recount_ok = None
    if trace.terminal is not None:
        fd = trace.terminal
        cnt = inc.recount_found(g, fd)
        recount_ok = cnt >= (1 - cfg.sigma) * fd.Bprime.size
    certs = {"sample": sample.to_record(), "pseudorandom": cert.to_record(),
             "decomposition": d.to_record(), "trace": trace.to_record(),
             "normalization": {"scale": scale, "flagged": rescaled,
                               "raw_threshold_factor": scale**2}}
    row.update({
        "steps": len(trace.steps),
        "step_bound": trace.step_bound,
        "terminated": trace.terminated,
        "final_rank": trace.steps[-1]["gamma_size"] if trace.steps else None,
        "final_B_size": trace.terminal.B.size if trace.terminal else None,
        "good_fraction": trace.terminal.good_fraction if trace.terminal else None,
        "recount_ok": recount_ok,
        "anomalies": len(trace.anomalies),
        "success": bool(trace.terminated and recount_ok and len(trace.steps) <= trace.step_bound),
    })
    return row, certs


PIPELINES = {
    "sarkozy": run_power_difference,
    "power-diff": run_power_difference,
    "sumset-size": run_sumset_size,
    "sumset-ap": run_sumset_ap,
    "decomposition-audit": run_decomposition_audit,
    "increment-trace": run_increment_trace,
}

COMMON_COLUMNS = ("seed", "N", "p", "alpha", "strategy", "W_size", "A_size", "A_fraction", "shortfall",
                  "eta", "eta_ok", "l2_norm_sq", "l2_ok", "restriction_norm", "restriction_ok")
EXTRA_COLUMNS = {
    "sarkozy": ("k", "full_count", "part_index", "part_size", "part_count", "varnavides", "consistency_ok",
                "lambda0_size", "decomposition_ok", "error_spectral_sum", "error_bound", "chain_ok"),
    "sumset-size": ("sumset_size", "sumset_density", "beta", "P_size", "extremal_bound_ok",
                    "decomposition_ok"),
    "sumset-ap": ("k", "sumset_size", "ap_length", "ap_start", "ap_step", "steps", "terminated",
                  "good_set_size", "good_ap_length", "good_ap_in_sumset"),
    "decomposition-audit": ("epsilon0", "lambda0_size", "B0_size", "check_i", "check_ii", "check_iii",
                            "check_iv", "multiplier_ok", "q_norm_monotone"),
    "increment-trace": ("steps", "step_bound", "terminated", "final_rank", "final_B_size", "good_fraction",
                        "recount_ok", "anomalies"),
}
EXTRA_COLUMNS["power-diff"] = EXTRA_COLUMNS["sarkozy"]


def columns_for(experiment):
    return COMMON_COLUMNS + EXTRA_COLUMNS[experiment] + ("success", "anomaly")


def run_one(cfg, seed):
    """One trial; internal errors become an anomaly on a failed row."""
    try:
        row, certs = PIPELINES[cfg.experiment](cfg, seed)
        row["anomaly"] = None
    except Exception as exc:  # noqa: BLE001 - a sweep never aborts on one trial
        log.warning("seed %s: %s", seed, exc)
        row = {c: None for c in columns_for(cfg.experiment)}
        row.update(seed=seed, N=cfg.N, p=cfg.p, alpha=cfg.alpha, strategy=cfg.strategy,
                   success=False, anomaly=f"{type(exc).__name__}: {exc}")
        certs = {}
    row = {c: row.get(c) for c in columns_for(cfg.experiment)}
    return {**row, "certificates": _jsonable(certs)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


@dataclass
class ExperimentReport:
    config: dict
    rows: list
    metadata: dict = field(default_factory=dict)

    @property
    def aggregate(self):
        return aggregate(self.rows)

    def to_dict(self):
        return {"config": self.config, "aggregate": self.aggregate, "metadata": self.metadata,
                "rows": self.rows}


def aggregate(rows):
    n = len(rows)
    succ = sum(1 for r in rows if r.get("success") in (True, "true"))
    return {"trials": n, "successes": succ, "success_fraction": succ / n if n else None}


def run_trials(config, workers=1):
    """Run every seed of ``config``; invalid configs raise before any trial."""
    cfg = config.resolved()
    seeds = list(cfg.seeds)
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_one, [cfg] * len(seeds), seeds))
    else:
        rows = [run_one(cfg, s) for s in seeds]
    meta = {
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "rng": rng.SPEC,
        "notes": NOTES,
        "regime": _jsonable(regime_report(cfg)),
        "columns": list(columns_for(cfg.experiment)),
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    return ExperimentReport(cfg.to_dict(), rows, meta)


# -- emission -----------------------------------------------------------------

def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def report_csv(report):
    """Per-seed rows in the experiment's fixed column order."""
    cols = columns_for(report.config["experiment"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in report.rows:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def trace_csv(report):
    """Per-step rows ``seed,k,gamma_size,delta,alpha,outcome`` from trace certificates."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("seed", "k", "gamma_size", "delta", "alpha", "outcome"))
    for r in report.rows:
        trace = r.get("certificates", {}).get("trace")
        if not trace:
            continue
        for s in trace["steps"]:
            w.writerow([_cell(r["seed"])] + [_cell(s[c]) for c in ("k", "gamma_size", "delta", "alpha", "outcome")])
    return buf.getvalue()


def report_json(report):
    return json.dumps(_jsonable(report.to_dict()), indent=1, sort_keys=False) + "\n"


def emit_report(report, fmt, path):
    """Write the report as ``json``, ``csv`` or ``trace-csv``; returns the path."""
    if fmt == "json":
        text = report_json(report)
    elif fmt == "csv":
        text = report_csv(report)
    elif fmt == "trace-csv":
        text = trace_csv(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    try:
        parent = os.path.dirname(os.path.abspath(path))
        os.makedirs(parent, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path


def load_report_json(path):
    with open(path) as fh:
        d = json.load(fh)
    return ExperimentReport(d["config"], d["rows"], d.get("metadata", {}))


def parse_csv_rows(text):
    """Rows from ``report_csv`` text, with booleans and numbers restored."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append({k: _parse_cell(v) for k, v in rec.items()})
    return rows


def _parse_cell(v):
    if v == "":
        return None
    if v == "true":
        return True
    if v == "false":
        return False
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v


def default_suite():
    """The shipped configurations, sorted by file name."""
    here = os.path.join(os.path.dirname(__file__), "configs")
    return [(name, load_config(os.path.join(here, name)))
            for name in sorted(os.listdir(here)) if name.endswith(".json")]
