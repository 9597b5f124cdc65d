import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arithstruct import tolerances as tol
from arithstruct.fourier import (
    BalancedFunction,
    DensityFunction,
    Spectrum,
    as_function,
    convolve,
    dft,
    fft_raw,
    inverse_dft,
    lq_norm,
    spectral_lq_norm,
)

from oracles import naive_convolve, naive_dft, naive_inverse

SIZES = [1, 2, 3, 4, 5, 8, 13, 64, 101, 257, 512, 1009]


@pytest.mark.parametrize("n", SIZES)
def test_dft_matches_naive(n):
    rng = np.random.default_rng(n)
    f = rng.random(n)
    got = dft(f).coeffs
    ref = naive_dft(f)
    assert np.max(np.abs(got - ref)) <= tol.TRANSFORM_REL * max(1.0, np.max(np.abs(ref)))


@pytest.mark.parametrize("n", SIZES)
def test_inverse_roundtrip(n):
    rng = np.random.default_rng(n + 1)
    f = rng.random(n)
    back = inverse_dft(dft(f))
    assert np.max(np.abs(back.values - f)) <= tol.ROUNDTRIP_ABS
    assert np.allclose(naive_inverse(naive_dft(f)).real, f)


@pytest.mark.parametrize("n", [7, 13, 64, 101])
def test_convolve_matches_naive(n):
    rng = np.random.default_rng(n + 2)
    f, g = rng.random(n), rng.random(n)
    got = convolve(f, g).values
    assert np.allclose(got, naive_convolve(f, g), rtol=1e-10, atol=1e-10)


def test_delta_and_constant():
    n = 13
    d = np.zeros(n)
    d[0] = 1
    assert np.allclose(dft(d).coeffs, 1 / n)
    c = dft(np.ones(n)).coeffs
    assert abs(c[0] - 1) < 1e-12
    assert np.max(np.abs(c[1:])) < 1e-12


def test_convolution_is_sumset_count():
    n = 11
    A = [1, 2, 5]
    ind = DensityFunction.indicator(n, A)
    conv = convolve(ind, ind).values
    for x in range(n):
        r = sum(1 for a in A for b in A if (a + b) % n == x)
        assert abs(conv[x] - r) < 1e-9


def test_modulus_mismatch():
    with pytest.raises(ValueError):
        convolve(DensityFunction(5, np.ones(5)), DensityFunction(7, np.ones(7)))


def test_density_rejects_negative():
    with pytest.raises(ValueError):
        DensityFunction(3, np.array([1.0, -0.5, 0.0]))


def test_signed_convolution_is_balanced():
    out = convolve(BalancedFunction(3, np.array([1.0, -1.0, 0.0])), np.ones(3))
    assert isinstance(out, BalancedFunction)


def test_as_function_clips_noise():
    f = as_function(np.array([1.0, -1e-14, 0.5]))
    assert f.values.min() == 0.0


def test_inverse_rejects_asymmetric_spectrum():
    F = np.zeros(5, complex)
    F[1] = 1.0
    with pytest.raises(ValueError):
        inverse_dft(Spectrum(5, F))


def test_spectral_norm_edges():
    F = dft(np.arange(7.0))
    with pytest.raises(ValueError):
        spectral_lq_norm(F, 0.5)
    assert spectral_lq_norm(F, np.inf) == pytest.approx(np.abs(F.coeffs).max())
    assert spectral_lq_norm(F, 2) == pytest.approx(np.sqrt(np.sum(np.abs(F.coeffs) ** 2)))
    assert lq_norm(np.array([3.0, 4.0]), 2) == pytest.approx(5.0)


def test_spectral_norm_tiny_values_do_not_underflow():
    F = np.full(4, 1e-200)
    assert spectral_lq_norm(F, 23 / 11) == pytest.approx(1e-200 * 4 ** (11 / 23))


def test_fft_raw_prime_length_large():
    n = 10007
    x = np.random.default_rng(0).random(n)
    got = fft_raw(x)
    # spot-check against direct sums
    for xi in (0, 1, 17, n - 1):
        ref = np.sum(x * np.exp(-2j * np.pi * xi * np.arange(n) / n))
        assert abs(got[xi] - ref) < 1e-9 * np.sum(x)


vec = st.integers(2, 60).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(-5, 5, allow_nan=False), min_size=n, max_size=n),
        st.lists(st.floats(-5, 5, allow_nan=False), min_size=n, max_size=n),
    )
)


@settings(max_examples=80, deadline=None)
@given(vec)
def test_plancherel_and_convolution_identity(pair):
    f, g = (np.array(v) for v in pair)
    n = len(f)
    F, G = dft(f).coeffs, dft(g).coeffs
    scale = 1 + np.sum(f**2)
    assert abs(np.sum(np.abs(F) ** 2) - np.sum(f**2) / n) <= tol.IDENTITY * scale
    fg = dft(convolve(BalancedFunction(n, f), BalancedFunction(n, g))).coeffs
    assert np.max(np.abs(fg - n * F * G)) <= tol.IDENTITY * (1 + np.sum(np.abs(f)) * np.sum(np.abs(g)))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=80))
def test_roundtrip_property(vals):
    f = np.array(vals)
    assert np.max(np.abs(inverse_dft(dft(f)).values - f)) <= tol.ROUNDTRIP_ABS * max(1.0, f.max())
