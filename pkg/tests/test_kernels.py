import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import favard_series, sign_convolution_sup
from svapprox import (
    KernelSpecError,
    bernoulli_kernel,
    coefficient_kernel,
    convolve_with_sign,
    favard_constant,
    parse_kernel_spec,
    poisson_kernel,
    sign_function,
)
from svapprox.kernels import Kernel, sign_samples
from svapprox.set_functions import PeriodicGrid


def test_favard_constants_closed_form():
    assert favard_constant(1) == pytest.approx(math.pi / 2, abs=1e-12)
    assert favard_constant(2) == pytest.approx(math.pi**2 / 8, abs=1e-12)
    for r in (1, 2, 3, 4):
        assert favard_constant(r) == pytest.approx(favard_series(r), abs=1e-5)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_bernoulli_series_vs_closed_form(r):
    K = bernoulli_kernel(r)
    x = np.linspace(0.3, 2 * math.pi - 0.3, 101)
    # truncation error of the series away from the jump: O(M^-r), plus oscillation for r=1
    tol = {1: 2e-3, 2: 1e-5, 3: 1e-8}[r]
    assert np.max(np.abs(K(x) - K.exact(x))) < tol


@pytest.mark.parametrize("r", [1, 2, 3])
def test_bernoulli_zero_mean(r):
    K = bernoulli_kernel(r, M=64)
    assert K.mean_integral() == 0
    assert np.mean(K.on_grid(512)) == pytest.approx(0, abs=1e-14)


def test_bernoulli_r1_is_sawtooth():
    K = bernoulli_kernel(1)
    t = np.array([0.5, 1.0, 3.0])
    assert np.allclose(K.exact(t), (math.pi - t) / (2 * math.pi))
    assert K.exact(np.array([0.0]))[0] == 0


def test_poisson_closed_form_and_mass():
    K = poisson_kernel(0.5)
    x = np.linspace(0, 2 * math.pi, 50)
    closed = (1 - 0.25) / (2 * math.pi * (1 - 2 * 0.5 * np.cos(x) + 0.25))
    assert np.allclose(K(x), closed, atol=1e-15)
    assert K.mean_integral() == pytest.approx(1.0)


def test_poisson_rejects_bad_rho():
    for rho in (0, 1, -0.2, 1.5):
        with pytest.raises(ValueError):
            poisson_kernel(rho)


def test_on_grid_matches_direct_evaluation():
    K = bernoulli_kernel(2, M=100)
    for N in (32, 64, 256):  # includes aliasing (M > N/2)
        x = 2 * math.pi * np.arange(N) / N
        assert np.allclose(K.on_grid(N), K(x), atol=1e-12)


@given(st.floats(0, 2 * math.pi))
def test_shift(t0):
    K = poisson_kernel(0.3)
    x = np.linspace(0, 2 * math.pi, 17)
    assert np.allclose(K.shifted(t0)(x), K(x - t0), atol=1e-12)


def test_from_samples_interpolates():
    rng = np.random.default_rng(0)
    for N in (16, 17):
        v = rng.standard_normal(N)
        K = Kernel.from_samples(v)
        assert np.allclose(K.on_grid(N), v, atol=1e-12)


@pytest.mark.parametrize("text,tag", [
    ("bernoulli:1", "bernoulli:r=1,M=4096"),
    ("family=bernoulli r=2 M=64", "bernoulli:r=2,M=64"),
    ("poisson:0.5", None),
    ("family=poisson rho=0.25", None),
])
def test_parse_kernel_spec(text, tag):
    K = parse_kernel_spec(text)
    if tag:
        assert K.tag == tag


def test_parse_coeffs():
    K = parse_kernel_spec("coeffs a0=1 ak=[0, 2] bk=[1, 0]")
    x = np.linspace(0, 6, 7)
    assert np.allclose(K(x), 0.5 + np.sin(x) + 2 * np.cos(2 * x))


@pytest.mark.parametrize("bad", ["gauss:1", "bernoulli:x", "family=bernoulli", "coeffs", "bernoulli:1 extra",
                                 "family=poisson rho=0.5 q=1"])
def test_parse_errors(bad):
    with pytest.raises(KernelSpecError):
        parse_kernel_spec(bad)


def test_sign_function_exact_zeros():
    phi = sign_function(3)
    x = np.array([0, math.pi / 3, 2 * math.pi / 3, math.pi / 6, math.pi / 2])
    assert np.array_equal(phi(x), [0, 0, 0, 1, -1])
    s = sign_samples(2, PeriodicGrid(8)).values
    assert np.array_equal(s, [0, 1, 0, -1, 0, 1, 0, -1])


def test_sign_convolution_of_trig_polynomial():
    # phi_n has only odd multiples of n, so a kernel of order < n annihilates it
    K = coefficient_kernel(0.3, [1.0, -2.0], [0.5, 0.1])
    sc = convolve_with_sign(K, 3)
    assert sc.sup == 0.0


def test_sign_convolution_single_harmonic():
    # a unit cos(nt) coefficient convolved with phi_n gives 4 sin(nx)
    K = coefficient_kernel(0.0, [0, 0, 0, 0, 1.0], [])
    sc = convolve_with_sign(K, 5)
    assert sc.sup == pytest.approx(4.0, rel=1e-12)


@pytest.mark.parametrize("r,n", [(1, 1), (1, 2), (2, 1), (2, 3)])
def test_sign_convolution_sup_vs_quadrature_oracle(r, n):
    K = bernoulli_kernel(r)
    sc = convolve_with_sign(K, n)
    ref = sign_convolution_sup(K.exact, n)
    assert ref == pytest.approx(favard_constant(r) / n**r, abs=1e-7)
    assert abs(sc.sup - ref) <= sc.tail_bound + 1e-9


def test_poisson_sign_convolution_vs_oracle():
    K = poisson_kernel(0.5)
    for n in (1, 2):
        assert convolve_with_sign(K, n).sup == pytest.approx(sign_convolution_sup(K.exact, n), abs=1e-9)
