"""Acceptance gate: one test per criterion, each recording a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary lists
every criterion.
"""
import time

import numpy as np

from arithstruct import decomposition as D
from arithstruct import harness as h
from arithstruct import increment as inc
from arithstruct import random_model as rm
from arithstruct import structures as S
from arithstruct.fourier import BalancedFunction, Spectrum, convolve, dft, inverse_dft, spectral_lq_norm

from acceptance_log import record
from instances import check_sound, constructed_instances
from oracles import naive_convolve, naive_dft, naive_inverse, pair_count


def _gate(number, ok, detail):
    record(number, ok, detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def test_criterion_01_fourier_core():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for n in (4, 8, 13, 101, 257, 512):
        f, g = rng.random(n), rng.random(n)
        ref = naive_dft(f)
        worst = max(worst, np.max(np.abs(dft(f).coeffs - ref)) / np.max(np.abs(ref)))
        inv_ref = naive_inverse(ref).real
        worst = max(worst, np.max(np.abs(inverse_dft(Spectrum(n, ref)).values - inv_ref)) / np.max(np.abs(inv_ref)))
        cref = naive_convolve(f, g)
        worst = max(worst, np.max(np.abs(convolve(f, g).values - cref)) / np.max(np.abs(cref)))
    ident = 0.0
    sizes = (4, 8, 13, 101, 257, 512)
    for i in range(1000):
        n = sizes[i % len(sizes)]
        f, g = rng.normal(size=n), rng.normal(size=n)
        F, G = dft(f).coeffs, dft(g).coeffs
        ident = max(ident, abs(np.sum(np.abs(F) ** 2) - np.sum(f**2) / n) / (np.sum(f**2) / n))
        FG = dft(convolve(BalancedFunction(n, f), BalancedFunction(n, g))).coeffs
        ident = max(ident, np.max(np.abs(FG - n * F * G)) / max(1e-300, np.max(np.abs(n * F * G))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and ident <= 1e-8 and dt < 5
    _gate(1, ok, f"oracle rel err {worst:.2e} (<=1e-9), identity err {ident:.2e} (<=1e-8), {dt:.2f}s (<5s)")


def test_criterion_02_six_squares_bound():
    t0 = time.perf_counter()
    ratios = {}
    for n in (101, 1009, 10007, 100003):
        ind = S.power_indicator(n, 2)
        ratios[n] = spectral_lq_norm(dft(ind.values), 12) / (S.GREEN_CONST * n**-0.5)
    dt = time.perf_counter() - t0
    ok = all(r <= 1 for r in ratios.values()) and dt < 30
    _gate(2, ok, "||S^||_12 / (2^(19/12) N^-1/2): "
          + ", ".join(f"N={n}: {r:.3f}" for n, r in ratios.items()) + f"; {dt:.2f}s (<30s)")


def test_criterion_03_power_indicator_norms():
    ratios = {}
    for k in (2, 3, 4):
        for n in (1009, 10007):
            P = S.power_indicator(n, k)
            ratios[(k, n)] = spectral_lq_norm(dft(P.values), 6 * k) / n ** (1 / k - 1)
    fitted = max(ratios.values())
    ok = fitted <= S.WARING_C1 <= 4
    _gate(3, ok, f"fitted c1 {fitted:.4f} <= frozen c1 {S.WARING_C1} <= 4")


def test_criterion_04_decomposition_certificates():
    t0 = time.perf_counter()
    passed = total = 0
    failures = []
    for p in (0.3, 0.1):
        for eps0 in (0.1, 0.05):
            for seed in range(100):
                s = rm.adversarial_subset(rm.sample_w(10007, p, seed), 0.4)
                nu, f = rm.build_measures(s)
                cert = D.certify_decomposition(D.decompose(f, nu, eps0))
                total += 1
                if cert.all_ok:
                    passed += 1
                else:
                    failures.append((p, eps0, seed))
    dt = time.perf_counter() - t0
    ok = passed == total and dt < 120
    _gate(4, ok, f"{passed}/{total} instances pass (i)-(iv) (100 per (p, eps0)); {dt:.1f}s (<120s)"
          + (f"; failures {failures[:5]}" if failures else ""))


def test_criterion_05_pseudorandomness():
    eta_ok = l2_ok = 0
    for seed in range(100):
        s = rm.adversarial_subset(rm.sample_w(10007, 0.3, seed), 0.4)
        nu, f = rm.build_measures(s)
        c = rm.certify_pseudorandom(nu, f, eta_budget=3 * 10007 ** (-1 / 5), l2_budget=2 / 0.3)
        eta_ok += c.eta_ok
        l2_ok += c.l2_ok
    ok = eta_ok >= 95 and l2_ok >= 95
    _gate(5, ok, f"eta <= 3 N^-1/5 in {eta_ok}/100 seeds, ||f^||_2^2 <= 2/p in {l2_ok}/100 seeds (need >=95)")


def test_criterion_06_structure_counters():
    rng = np.random.default_rng(6)
    primes = [n for n in range(11, 2004) if S.is_prime(n)]
    mismatches = identity_fail = 0
    for i in range(500):
        n = int(rng.choice(primes))
        k = int(rng.integers(2, 5))
        A = np.unique(rng.integers(0, n, size=int(rng.integers(0, min(n, 120)))))
        count = S.power_difference_count(A, n, k)
        if count != pair_count(A, n, k):
            mismatches += 1
        f = np.zeros(n)
        f[A] = 1.0
        R = S.power_indicator(n, k, warn=False).r_max
        scaled = S.varnavides_average(f, k) * n * R
        if round(scaled) != count or abs(scaled - count) > 1e-6:
            identity_fail += 1
    ok = mismatches == 0 and identity_fail == 0
    _gate(6, ok, f"{500 - mismatches}/500 counts match brute force; counting identity exact in "
          f"{500 - identity_fail}/500")


def _sweep(**kw):
    return h.run_trials(h.ExperimentConfig(**kw))


def test_criterion_07_sarkozy():
    t0 = time.perf_counter()
    common = dict(experiment="sarkozy", N=10007, p=0.3, alpha=0.4, seeds=tuple(range(100)))
    fr = {}
    for strat in ("uniform-random", "progression-intersect"):
        fr[strat] = _sweep(strategy=strat, **common).aggregate["success_fraction"]
    greedy = _sweep(strategy="square-difference-free-greedy", **common)
    achieved = np.mean([r["A_fraction"] for r in greedy.rows])
    dt = time.perf_counter() - t0
    ok = all(v == 1.0 for v in fr.values()) and dt < 300
    _gate(7, ok, f"success uniform {fr['uniform-random']:.2f}, progression {fr['progression-intersect']:.2f} "
          f"(need 1.00); greedy achieves |A|/|W| = {achieved:.4f} vs alpha 0.4; {dt:.1f}s (<300s)")


def test_criterion_08_sumset_size():
    common = dict(experiment="sumset-size", N=10007, p=0.5, alpha=0.4, beta=0.15, seeds=tuple(range(100)))
    uni = _sweep(strategy="uniform-random", **common)
    prog = _sweep(strategy="progression-intersect", **common)
    extremal = sum(1 for r in prog.rows if r["extremal_bound_ok"] is True)
    frac = uni.aggregate["success_fraction"]
    ok = frac == 1.0 and extremal == 100
    _gate(8, ok, f"uniform success {frac:.2f} (need 1.00); |A+A| <= 2|P|+1 in {extremal}/100 progression seeds")


def test_criterion_09_increment_machinery():
    t0 = time.perf_counter()
    sigma = 1 / 80
    problems = []
    steps = []
    for label, f in constructed_instances():
        trace = inc.iterate_increment(f, sigma)
        steps.append(len(trace.steps))
        bound = inc.step_bound(trace.alpha)
        try:
            for out in trace.outcomes:
                check_sound(f, out.B, out, sigma)
        except AssertionError as exc:
            problems.append(f"{label}: unsound outcome {exc}")
        if not trace.terminated:
            problems.append(f"{label}: no Found ({trace.anomalies})")
            continue
        if len(trace.steps) > bound:
            problems.append(f"{label}: {len(trace.steps)} steps > {bound}")
        fd = trace.terminal
        if inc.recount_found(inc.restrict(f, fd.B), fd) < (1 - sigma) * fd.Bprime.size:
            problems.append(f"{label}: recount below (1 - sigma)|B'|")
    dt = time.perf_counter() - t0
    ok = not problems and dt < 600
    _gate(9, ok, f"20 instances, steps per run {min(steps)}-{max(steps)}, {len(problems)} problems; "
          f"{dt:.1f}s (<600s)" + (f"; {problems[:3]}" if problems else ""))


def test_criterion_10_sumset_ap():
    rep = _sweep(experiment="sumset-ap", N=10007, p=0.5, alpha=0.45, k=5, seeds=tuple(range(20)))
    long_ok = sum(1 for r in rep.rows if r["ap_length"] is not None and r["ap_length"] >= 5)
    inside = sum(1 for r in rep.rows if r["good_ap_in_sumset"] is True)
    ok = long_ok == 20 and inside == 20
    _gate(10, ok, f"longest AP in A+A >= 5 in {long_ok}/20 seeds; good-set AP inside A+A in {inside}/20")


def test_criterion_11_determinism():
    first = {name: h.report_csv(h.run_trials(cfg)) for name, cfg in h.default_suite()}
    second = {name: h.report_csv(h.run_trials(cfg)) for name, cfg in h.default_suite()}
    same = [n for n in first if first[n] == second[n]]
    ok = len(same) == len(first) and len(first) > 0
    _gate(11, ok, f"{len(same)}/{len(first)} default-suite CSV bodies byte-identical across two runs")
