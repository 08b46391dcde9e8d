import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from svapprox import ball, direction_grid, singleton
from svapprox.set_functions import (
    PeriodicGrid,
    ScalarPeriodicFunction,
    SetValuedFunction,
    conjugate,
    constant_function,
    delta_LAp,
    in_F_p,
    in_Phi_p,
    lp_norm,
    parse_p,
    random_F_p_sample,
    random_Phi_p_sample,
    scalar_times_point,
    selection_residual,
    selection_sampler,
    zero_function,
)

XG = PeriodicGrid(64)
DG = direction_grid(2, 16)
P_VALUES = [1.0, 2.0, math.inf]
seeds = st.integers(0, 2**31 - 1)
ps = st.sampled_from(P_VALUES)


@pytest.mark.parametrize("s,v", [("1", 1.0), ("2", 2.0), ("inf", math.inf), ("linf", math.inf), (math.inf, math.inf)])
def test_parse_p(s, v):
    assert parse_p(s) == v


@pytest.mark.parametrize("bad", ["3", "abc", 0, -1])
def test_parse_p_rejects(bad):
    with pytest.raises(ValueError):
        parse_p(bad)


def test_conjugate_pairs():
    assert conjugate(1) == math.inf
    assert conjugate(math.inf) == 1
    assert conjugate(2) == 2


def test_periodic_grid_rejects_tiny():
    with pytest.raises(ValueError):
        PeriodicGrid(3)


def test_lp_norm_constant():
    c = np.full(XG.N_x, 0.5)
    assert lp_norm(c, 1) == pytest.approx(math.pi)
    assert lp_norm(c, 2) == pytest.approx(0.5 * math.sqrt(2 * math.pi))
    assert lp_norm(c, math.inf) == 0.5


def test_trapezoid_exact_for_trig_polynomials():
    u = ScalarPeriodicFunction.from_callable(lambda x: np.cos(3 * x), XG)
    assert u.norm(2) == pytest.approx(math.sqrt(math.pi), rel=1e-13)


@given(seeds, seeds, seeds, ps)
def test_delta_LAp_metric_axioms(s1, s2, s3, p):
    f, g, h = (random_Phi_p_sample(p, s, XG, DG) for s in (s1, s2, s3))
    assert delta_LAp(f, f, p) == 0
    assert delta_LAp(f, g, p) == pytest.approx(delta_LAp(g, f, p), abs=1e-14)
    assert delta_LAp(f, h, p) <= delta_LAp(f, g, p) + delta_LAp(g, h, p) + 1e-12


@given(seeds, ps)
def test_random_samples_in_unit_ball(seed, p):
    f = random_Phi_p_sample(p, seed, XG, DG)
    f.validate()
    assert in_Phi_p(f, p)
    assert lp_norm(f.pointwise_norm(), p) == pytest.approx(1.0)
    u = random_F_p_sample(p, seed, XG)
    assert in_F_p(u, p)
    assert u.norm(p) == pytest.approx(1.0)


def test_random_samples_deterministic():
    a = random_Phi_p_sample(1, 7, XG, DG)
    b = random_Phi_p_sample(1, 7, XG, DG)
    assert np.array_equal(a.H, b.H)


def test_zero_and_constant_functions():
    z = zero_function(XG, DG)
    assert delta_LAp(z, z, 1) == 0
    B = constant_function(ball(2.0, DG), XG)
    assert delta_LAp(B, z, math.inf) == pytest.approx(2.0)
    assert delta_LAp(B, z, 1) == pytest.approx(4 * math.pi)


def test_plus_ball_and_scaling():
    f = random_Phi_p_sample(math.inf, 3, XG, DG)
    assert delta_LAp(f.plus_ball(0.25), f, math.inf) == pytest.approx(0.25)
    g = f.scaled(-2.0)
    g.validate()
    assert lp_norm(g.pointwise_norm(), math.inf) == pytest.approx(2.0)


def test_scalar_times_point_is_singleton_valued():
    u = random_F_p_sample(2, 1, XG)
    a = DG.directions[3]  # norms are read off grid directions
    f = scalar_times_point(u, a, XG, DG)
    for j in (0, 17, 63):
        assert np.allclose(f[j].h, singleton(u.values[j] * a, DG).h)
    assert lp_norm(f.pointwise_norm(), 2) == pytest.approx(u.norm(2))


def test_json_roundtrip():
    f = random_Phi_p_sample(2, 4, XG, DG)
    g = SetValuedFunction.from_json(f.to_json())
    assert np.array_equal(f.H, g.H)


@given(seeds, st.sampled_from(["mixed", "extremal", "convex"]))
def test_selections_are_members(seed, mode):
    f = random_Phi_p_sample(math.inf, seed, XG, DG)
    psi = selection_sampler(f, seed, mode)
    assert selection_residual(f, psi) <= 1e-9 * (1 + np.max(np.abs(f.H)))


def test_selection_m1():
    dg = direction_grid(1)
    f = random_Phi_p_sample(1, 0, XG, dg)
    psi = selection_sampler(f, 0, "convex")
    assert selection_residual(f, psi) <= 1e-12
