import math

import numpy as np
import pytest

from arithstruct import increment as inc
from arithstruct.bohr import bohr_elements, find_regular_radius, regular_bohr_set

from instances import bohr_indicator, check_sound, pipeline_f1


def _full(n):
    return inc.initial_bohr_set(np.ones(n), 0.1)


def test_step_bound():
    assert inc.step_bound(0.5) == math.ceil(math.log(2) / math.log(33 / 32)) + 1
    assert inc.step_bound(0.999) == 2


def test_balanced_function_mean_zero():
    n = 101
    B = bohr_elements(n, [3], 0.8)
    f = np.zeros(n)
    f[B.elements] = np.linspace(0, 1, B.size)
    g = inc.balanced_function(f, B)
    assert abs(g.values[B.elements].sum()) < 1e-12


def test_support_is_checked():
    n = 101
    B = bohr_elements(n, [3], 0.5)
    with pytest.raises(ValueError):
        inc.balanced_function(np.ones(n), B)


def test_found_on_full_density():
    n = 1009
    B = _full(n)
    out = inc.increment_step(np.ones(n), B, 0.1)
    assert isinstance(out, inc.Found)
    check_sound(np.ones(n), B, out, 0.1)


def test_witness_set_properties():
    n = 1009
    f = bohr_indicator(n, 1, 0.5)
    B = _full(n)
    alpha = f.mean()
    Bp = bohr_elements(n, [0], 0.5)
    conv = inc.self_convolution(f)
    S = inc.witness_set(f, B, Bp, alpha, 0.05, conv=conv)
    assert len(S) == math.ceil(0.05 * Bp.size)
    assert np.all(conv[S] < alpha**2 / 2 * B.size)


def test_witness_set_raises_when_found_holds():
    n = 101
    B = _full(n)
    with pytest.raises(ValueError):
        inc.witness_set(np.ones(n), B, B, 1.0, 0.1)


def test_select_frequencies_rules():
    n = 31
    s = np.zeros(n)
    s[[1, 2, 3, 5, 30]] = [5, 4, 3, 2, 1]
    chosen, cap_hit = inc.select_frequencies(s, [1, 2, 3, 5, 30], exclude=(5,))
    # 2 = 2*1 and 30 = -1 are blocked once 1 is chosen; 5 is excluded
    assert chosen == [1, 3]
    assert not cap_hit
    chosen, cap_hit = inc.select_frequencies(s, [1, 3], cap=1)
    assert chosen == [1] and cap_hit


@pytest.mark.parametrize("n,xi,delta", [(1009, 1, 0.6), (1009, 17, 0.3), (10007, 3, 0.4)])
def test_bohr_indicator_iteration(n, xi, delta):
    f = bohr_indicator(n, xi, delta)
    trace = inc.iterate_increment(f, 1 / 80)
    assert trace.terminated
    assert len(trace.steps) <= trace.step_bound
    B = trace.outcomes[0].B
    for out in trace.outcomes:
        check_sound(f, out.B, out, 1 / 80)
    fd = trace.terminal
    assert inc.recount_found(inc.restrict(f, fd.B), fd) >= (1 - 1 / 80) * fd.Bprime.size
    assert B.size == n


def test_pipeline_iteration_and_records():
    f = pipeline_f1(1009, 0.5, 0.45, 1, "progression-intersect")
    trace = inc.iterate_increment(f, 1 / 80)
    assert trace.terminated
    rec = trace.to_record()
    assert rec["terminated"] and rec["steps"]
    rows = trace.csv_rows()
    assert list(rows[0]) == ["k", "gamma_size", "delta", "alpha", "outcome"]
    assert rows[-1]["outcome"] == "found"


def test_iterate_rejects_bad_input():
    with pytest.raises(ValueError):
        inc.iterate_increment(np.full(11, 2.0), 0.1)
    with pytest.raises(ValueError):
        inc.iterate_increment(np.zeros(11), 0.1)


def test_increment_step_validation():
    n = 101
    B = _full(n)
    with pytest.raises(ValueError):
        inc.increment_step(np.ones(n), B, 0.0)
    with pytest.raises(ValueError):
        inc.increment_step(np.zeros(n), B, 0.1)


def test_regular_shifted_set_for_step():
    n = 1009
    d = find_regular_radius(n, [5], 0.5)
    B = regular_bohr_set(n, [5], d, shift=100)
    f = np.zeros(n)
    f[B.elements] = 1.0
    out = inc.increment_step(f, B, 0.1)
    check_sound(f, B, out, 0.1)


def test_normalize_for_increment():
    v, s, flagged = inc.normalize_for_increment(np.array([0.0, 1.5]))
    assert s == 2.0 and not flagged and v.max() == 0.75
    v, s, flagged = inc.normalize_for_increment(np.array([0.0, 3.0]))
    assert s == 3.0 and flagged and v.max() == 1.0


def test_rank_radius_condition():
    r = inc.rank_radius_condition(0.05, 2, 0.1, 10007)
    assert r["lhs"] == pytest.approx(5.0)
    assert r["rhs"] == pytest.approx(0.1 * 10007**0.5 / 2)
    assert r["ok"]
