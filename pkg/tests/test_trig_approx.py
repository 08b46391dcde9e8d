import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from svapprox import bernoulli_kernel, coefficient_kernel, favard_constant, poisson_kernel
from svapprox.kernels import convolve_with_sign
from svapprox.set_functions import PeriodicGrid, lp_norm
from svapprox.trig_approx import (
    TrigPolynomial,
    best_approx,
    best_L1,
    best_L2,
    best_Linf,
    check_Nn_star,
    dual_witness,
    trig_basis,
)


def test_basis_and_polynomial_evaluation():
    x = np.linspace(0, 2 * math.pi, 9)
    T = TrigPolynomial.from_vector(3, [2.0, 1.0, 0.5, -1.0, 0.25])
    expect = 1.0 + np.cos(x) + 0.5 * np.cos(2 * x) - np.sin(x) + 0.25 * np.sin(2 * x)
    assert np.allclose(T(x), expect)
    assert np.allclose(trig_basis(x, 3) @ T.vector(), expect)
    assert np.allclose(T.on_grid(16), T(2 * math.pi * np.arange(16) / 16))


def test_polynomial_json_and_zero():
    T = TrigPolynomial.zero(2)
    assert np.all(T.vector() == 0)
    assert set(T.to_json()) >= {"n", "a0", "a", "b"}


@pytest.mark.parametrize("q", [1, 2, math.inf])
def test_kernel_in_H_has_zero_error(q):
    K = coefficient_kernel(0.4, [1.0, -0.5], [0.2, 0.3])
    res = best_approx(K, 3, q)
    assert res.error <= 1e-9
    assert res.certified


def test_L2_exact_tail():
    K = coefficient_kernel(0.0, [1.0, 0.0, 2.0], [0.0, 1.0, 0.0])
    res = best_L2(K, 2)
    assert res.error == pytest.approx(math.sqrt(math.pi * 5))
    assert res.certified


@given(st.integers(0, 1000))
def test_L2_projection_orthogonal_on_samples(seed):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(64)
    res = best_L2(y, 4)
    assert res.certified
    # any perturbation increases the discrete L2 error
    T2 = TrigPolynomial.from_vector(4, res.polynomial.vector() + 1e-3 * rng.standard_normal(7))
    assert lp_norm(y - T2.on_grid(64), 2) >= res.error


def test_Linf_single_harmonic():
    y = np.cos(3 * 2 * math.pi * np.arange(3072) / 3072)
    res = best_Linf(y, 3)
    assert res.error == pytest.approx(1.0, abs=1e-12)
    assert res.certificate["alternation_count"] >= 6


def test_Linf_D2_n1_is_half_oscillation():
    K = bernoulli_kernel(2)
    res = best_Linf(K, 1)
    t = np.linspace(0, 2 * math.pi, 200001)
    v = K.exact(t)
    assert res.error == pytest.approx((v.max() - v.min()) / 2, abs=5e-4)
    assert res.error == pytest.approx(math.pi / 8, abs=5e-4)
    assert res.certified


def test_Linf_alternation_certificate():
    rng = np.random.default_rng(3)
    y = rng.standard_normal(512)
    y = np.convolve(np.r_[y, y[:15]], np.ones(16) / 16, "valid")
    for n in (1, 2, 4):
        res = best_Linf(y, n)
        vals = np.asarray(res.certificate["alternant_values"])
        assert len(vals) >= 2 * n
        assert np.all(np.sign(vals[1:]) != np.sign(vals[:-1]))
        # de la Vallee Poussin: min |alternant| <= E <= max |residual|
        assert np.min(np.abs(vals)) <= res.error + 1e-12


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_L1_favard(r, n):
    K = bernoulli_kernel(r)
    res = best_L1(K, n)
    ref = favard_constant(r) / n**r
    assert res.certified
    assert abs(res.error - ref) <= 2e-3
    c = res.certificate
    assert c["sign_check"]["violations"] == 0
    # duality bracket; the fine-grid trapezoid norm of |K - T| carries O(1e-7)
    # error from the kinks of |K - T| when K has 4096 harmonics
    assert c["dual_lower_bound"] <= res.error + 1e-6
    assert c["dual_lower_bound"] >= res.error - 2e-3


def test_L1_poisson_needs_orientation():
    K = poisson_kernel(0.5)
    for n in (1, 2, 4):
        res = best_L1(K, n)
        assert res.certified
        sc = convolve_with_sign(K, n)
        assert res.error == pytest.approx(sc.sup, abs=1e-6)


def test_L1_on_samples_beats_perturbations():
    rng = np.random.default_rng(11)
    y = np.cumsum(rng.standard_normal(256))
    y -= np.linspace(0, y[-1], 256)
    res = best_L1(y, 3)
    for _ in range(20):
        T2 = TrigPolynomial.from_vector(3, res.polynomial.vector() + 1e-2 * rng.standard_normal(5))
        assert lp_norm(y - T2.on_grid(256), 1) >= res.error - 1e-10


def test_check_Nn_star_detects_wrong_phase():
    K = bernoulli_kernel(1)
    res = best_L1(K, 2)
    c = res.certificate
    N = c["sign_check"]["grid"]
    ok, rep = check_Nn_star(K, res.polynomial, c["theta"], sign=c["sign"], n=2, N=N)
    assert ok and rep["violations"] == 0
    bad, rep2 = check_Nn_star(K, res.polynomial, c["theta"] + math.pi / 4, sign=c["sign"], n=2, N=N)
    assert not bad and rep2["violations"] > 0


@pytest.mark.parametrize("q", [1, 2, math.inf])
def test_dual_witness_attains_norm(q):
    xg = PeriodicGrid(1024)
    K = bernoulli_kernel(2, M=256)
    T = best_approx(K, 2, q).polynomial
    for x0 in (0.0, 1.3):
        g = dual_witness(K, T, q, x0, xg)
        p = {1: math.inf, 2: 2, math.inf: 1}[q]
        assert g.norm(p) <= 1 + 1e-12
        r = K.on_grid(1024) - T.on_grid(1024)
        i0 = int(round(x0 / xg.step))
        val = xg.step * np.sum(r[(i0 - np.arange(1024)) % 1024] * g.values)
        assert val == pytest.approx(lp_norm(r, q), rel=1e-12)


def test_best_approx_rejects_bad_norm():
    with pytest.raises(ValueError):
        best_approx(bernoulli_kernel(1), 1, 3)
