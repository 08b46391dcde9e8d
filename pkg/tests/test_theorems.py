import json
import math

import pytest

from svapprox import bernoulli_kernel, coefficient_kernel, direction_grid, poisson_kernel
from svapprox.kernels import sign_samples
from svapprox.set_functions import PeriodicGrid, constant_function, random_Phi_p_sample, scalar_times_point
from svapprox.theorems import (
    GridConfig,
    InflatedApproximant,
    SetTrigApproximant,
    linear_approx_error,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
    verify_theorem4,
    verify_theorem5,
)
from svapprox.convex_sets import contains, singleton
from svapprox.trig_approx import TrigPolynomial, best_L1

SMALL = GridConfig(N_x=128, m=2, n_xi=16)
IN_H = coefficient_kernel(0.2, [1.0, -0.4], [0.3, 0.0])  # order 2, lies in H for n = 3


def test_linear_approx_error_trivial_cases():
    xg, dg = SMALL.xgrid, SMALL.dgrid
    T = TrigPolynomial(3, IN_H.a0, IN_H.a, IN_H.b)
    g = random_Phi_p_sample(math.inf, 0, xg, dg)
    assert linear_approx_error(IN_H, T, g, math.inf) == pytest.approx(0, abs=1e-12)
    z = constant_function(singleton([0, 0], dg), xg)
    assert linear_approx_error(bernoulli_kernel(1, M=32), TrigPolynomial.zero(2), z, 1) == 0


def test_linear_approx_error_rejects_outside_unit_ball():
    xg, dg = SMALL.xgrid, SMALL.dgrid
    g = random_Phi_p_sample(1, 0, xg, dg, scale=1.5)
    with pytest.raises(ValueError):
        linear_approx_error(IN_H, TrigPolynomial.zero(2), g, 1)


@pytest.mark.parametrize("n", [1, 2, 4])
def test_linear_approx_error_on_phi_n_equals_favard(n):
    # (D1 - T*) * phi_n attains ||D1 - T*||_1 under the sign condition
    xg = PeriodicGrid(4096)
    dg = direction_grid(2, 8)
    K = bernoulli_kernel(1)
    T = best_L1(K, n).polynomial
    g = scalar_times_point(sign_samples(n, xg), dg.directions[0], xg, dg)
    val = linear_approx_error(K, T, g, math.inf)
    assert val == pytest.approx(math.pi / (2 * n), abs=2e-3)


def test_inflated_approximant_contains_base():
    xg, dg = SMALL.xgrid, SMALL.dgrid
    base = SetTrigApproximant(TrigPolynomial.from_vector(2, [0.1, 0.5, -0.2]), random_Phi_p_sample(1, 3, xg, dg))
    tilde = InflatedApproximant(base, 0.3).materialize()
    tau = base.materialize()
    tau.validate()
    for j in range(0, xg.N_x, 17):
        assert contains(tilde[j], tau[j])
    with pytest.raises(ValueError):
        InflatedApproximant(base, -1.0)


@pytest.mark.parametrize("verify,args", [
    (verify_theorem1, (math.inf,)),
    (verify_theorem5, (1,)),
])
def test_kernel_in_H_gives_zero(verify, args):
    rep = verify(IN_H, 3, *args, samples=5, grid=SMALL)
    assert rep.passed
    assert rep.lhs <= 1e-9 and rep.rhs <= 1e-9


def test_theorem2_kernel_in_H():
    rep = verify_theorem2(IN_H, 3, math.inf, sweep=10, grid=SMALL)
    assert rep.passed
    v = rep.values
    assert max(v["upper_E_L1"], v["lower"], v["sign_convolution_sup"]) <= 1e-9


def test_theorem4_kernel_in_H():
    rep = verify_theorem4(IN_H, 3, 1, grid=GridConfig(512, 2, 8), competitors=3)
    assert rep.passed and rep.values["U_computed"] <= 1e-9


def test_theorem1_D1_n2_bound_and_activity():
    rep = verify_theorem1(bernoulli_kernel(1), 2, math.inf, samples=100, grid=SMALL)
    assert rep.passed
    v = rep.values["sup"]
    assert v["max_error"] <= math.pi / 4 + 1e-3
    assert 0.5 <= rep.values["max_ratio"] <= 1 + 1e-3


def test_theorem2_D1_n1():
    rep = verify_theorem2(bernoulli_kernel(1), 1, math.inf)
    assert rep.passed
    assert rep.lhs == pytest.approx(math.pi / 2, abs=2e-3)
    assert rep.rhs == pytest.approx(math.pi / 2, abs=2e-3)
    assert rep.values["sweep"]["count"] >= 200


def test_theorem2_D2_n2_p1():
    rep = verify_theorem2(bernoulli_kernel(2), 2, 1)
    assert rep.passed
    assert rep.rhs == pytest.approx(math.pi**2 / 32, abs=2e-3)
    assert rep.lhs == pytest.approx(math.pi**2 / 32, abs=2e-3)


def test_theorem2_exploratory_p_is_labelled():
    rep = verify_theorem2(bernoulli_kernel(2), 1, 2, sweep=20, grid=GridConfig(512, 2, 8))
    assert any("conjectural" in s for s in rep.notes)


def test_theorem2_uncertified_is_not_applicable():
    # a kernel whose residual has more sign changes than phi_n allows
    K = coefficient_kernel(0.0, [0.0, 1.0, 0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
    assert not best_L1(K, 1).certified
    rep = verify_theorem2(K, 1, math.inf, sweep=10, grid=GridConfig(512, 2, 8))
    assert rep.verdict == "not applicable"


def test_theorem3_D1():
    rep = verify_theorem3(bernoulli_kernel(1), 2, math.inf, 1, samples=3, sweep=20)
    assert rep.passed
    assert rep.values["singleton_reduction_error"] <= 1e-10
    with pytest.raises(ValueError):
        verify_theorem3(bernoulli_kernel(1), 2, 1, math.inf)


def test_theorem3_kernel_in_H_gives_zero():
    rep = verify_theorem3(IN_H, 3, 2, 2, samples=2, sweep=5, grid=GridConfig(256, 2, 8))
    assert rep.passed
    assert rep.values["lower_E_KFp"] <= 1e-9


def test_theorem4_D1_n2_q1():
    rep = verify_theorem4(bernoulli_kernel(1), 2, 1)
    assert rep.passed
    assert rep.values["U_computed"] == pytest.approx(math.pi / 4, abs=2e-3)
    assert rep.values["witness_value_at_x0"] == pytest.approx(rep.values["E"], abs=1e-3)


def test_theorem5_D1_n2():
    rep = verify_theorem5(bernoulli_kernel(1), 2, math.inf, samples=100, grid=SMALL)
    assert rep.passed
    assert rep.values["max_one_sided_error"] <= math.pi / 2 + rep.tolerances["combined"] * 2
    assert rep.values["min_containment_margin"] >= -1e-9
    assert rep.values["samples_with_error_ge_E"] >= 1


def test_reports_are_deterministic_and_serialisable():
    a = verify_theorem5(poisson_kernel(0.5), 2, 1, samples=10, seed=3, grid=SMALL).to_json()
    b = verify_theorem5(poisson_kernel(0.5), 2, 1, samples=10, seed=3, grid=SMALL).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["schema"].startswith("svapprox.theorem-report/")
    assert a["config"]["N_x"] == SMALL.N_x


def test_threads_do_not_change_results(monkeypatch):
    K = bernoulli_kernel(2)
    a = verify_theorem1(K, 2, 1, samples=12, grid=SMALL).to_json()
    monkeypatch.setenv("SVAPPROX_THREADS", "4")
    b = verify_theorem1(K, 2, 1, samples=12, grid=SMALL).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
