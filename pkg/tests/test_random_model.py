import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arithstruct import random_model as rm
from arithstruct.fourier import dft

from oracles import l2_direct, pair_count


def test_sample_is_deterministic():
    a = rm.sample_w(1009, 0.3, 5)
    b = rm.sample_w(1009, 0.3, 5)
    assert np.array_equal(a.W, b.W)
    assert not np.array_equal(a.W, rm.sample_w(1009, 0.3, 6).W)


def test_sample_prefix_consistent():
    # membership of x does not depend on N
    small = set(rm.sample_w(500, 0.4, 3).W)
    big = set(rm.sample_w(1000, 0.4, 3).W)
    assert small == {x for x in big if x < 500}


def test_p_one_and_bad_p():
    assert len(rm.sample_w(50, 1.0, 0).W) == 50
    for p in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            rm.sample_w(50, p, 0)


def test_theta():
    s = rm.sample_w(10007, 10007**-0.25, 0)
    assert s.theta == pytest.approx(0.25)


def test_measures():
    s = rm.adversarial_subset(rm.sample_w(1009, 0.3, 1), 0.5)
    nu, f = rm.build_measures(s)
    assert np.all(f.values <= nu.values)
    assert nu.values.max() == pytest.approx(1 / 0.3)
    assert f.mean() == pytest.approx(len(s.A) / (0.3 * 1009))


@pytest.mark.parametrize("strategy", rm.STRATEGIES)
def test_subset_inside_w(strategy):
    s = rm.adversarial_subset(rm.sample_w(2003, 0.3, 2), 0.4, strategy)
    assert set(s.A) <= set(s.W)
    assert s.strategy == strategy
    if strategy == "uniform-random":
        assert len(s.A) == math.ceil(0.4 * len(s.W))
        assert not s.shortfall


def test_greedy_is_power_free():
    n = 2003
    s = rm.adversarial_subset(rm.sample_w(n, 0.3, 4), 0.4, "square-difference-free-greedy", k=2)
    assert pair_count(s.A, n, 2) == 0
    assert s.shortfall


def test_progression_intersect_is_best_translate():
    n = 503
    s = rm.adversarial_subset(rm.sample_w(n, 0.5, 9), 0.3, "progression-intersect")
    step, length, P = rm.progression_for(n, 0.3)
    W = set(s.W)
    best = max(len(W & {(p + x) % n for p in P}) for x in range(n))
    assert len(s.A) == best
    assert s.details["P_size"] == len(P)


def test_unknown_strategy():
    with pytest.raises(ValueError):
        rm.adversarial_subset(rm.sample_w(11, 0.5, 0), 0.5, "nope")


def test_certificate_quantities():
    s = rm.adversarial_subset(rm.sample_w(1009, 0.3, 3), 0.4)
    nu, f = rm.build_measures(s)
    c = rm.certify_pseudorandom(nu, f)
    F = dft(f).coeffs
    assert c.l2_norm_sq == pytest.approx(l2_direct(F))
    assert c.l2_norm_sq == pytest.approx(c.l2_plancherel)
    assert c.l2_budget == pytest.approx(2 / 0.3)
    dev = dft(nu).coeffs.copy()
    dev[0] -= 1
    assert c.eta == pytest.approx(np.abs(dev).max())
    assert c.eta_budget == pytest.approx(3 * 1009**-0.2)


def test_certificate_without_f():
    nu, _ = rm.build_measures(rm.sample_w(101, 0.5, 0))
    c = rm.certify_pseudorandom(nu)
    assert c.l2_ok is None and c.restriction_ok is None


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**63), st.floats(0.05, 1.0))
def test_sampling_density_property(seed, p):
    s = rm.sample_w(4001, p, seed)
    # five-sigma band around the binomial mean
    sd = math.sqrt(4001 * p * (1 - p)) + 1
    assert abs(len(s.W) - 4001 * p) <= 5 * sd
