import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from nsn_ddu import (
    FollowerIndeterminateError,
    FollowerUnboundedError,
    LeaderProfile,
    build_reaction_map,
    follower_reaction,
    uncertainty_interval,
    verify_follower_gne,
)

from .conftest import random_profile, random_spec, variant


def lp_optimum(follower, x, w, y_others):
    """Solve one follower's LP with a generic LP solver."""
    rhs = w + follower.alpha @ y_others - sum(g @ xi for g, xi in zip(follower.g, x))
    res = linprog(
        -follower.e,
        A_eq=follower.h[None, :],
        b_eq=[rhs],
        bounds=[(0, None), (None, None)],
        method="highs",
    )
    assert res.status == 0
    return -res.fun


def test_reference_map_coefficients(rmap):
    np.testing.assert_array_equal(rmap.A, [[2, 0, 2, 0], [2, 0, 2, 0]])
    np.testing.assert_array_equal(rmap.b, [-2, -2])
    np.testing.assert_array_equal(rmap.c0, [0, 0])
    np.testing.assert_array_equal(rmap.theta, [2, 2])
    assert rmap.provenance == "analytic"


@pytest.mark.parametrize(
    "x, w, expected",
    [
        ([[0, 0], [1, 0]], 2.8, [-3.6, -3.6]),
        ([[0, 0], [1, 1]], 2.0, [-2.0, -2.0]),
        ([[0.3, 0.9], [0.4, 0.1]], 0.7, [0.0, 0.0]),
    ],
)
def test_follower_reaction_examples(rmap, x, w, expected):
    np.testing.assert_allclose(follower_reaction(rmap, x, w), expected, atol=1e-12)


def test_decoupled_variant(spec):
    s = variant(spec, followers={0: {"alpha": [0]}, 1: {"alpha": [0]}})
    r = build_reaction_map(s)
    np.testing.assert_array_equal(r.A, [[-2, 0, -2, 0], [-2, 0, -2, 0]])
    np.testing.assert_array_equal(r.b, [2, 2])


def test_singular_coupling(spec):
    # theta = 1 with alpha = 1 on both followers makes I - T singular
    s = variant(spec, followers={j: {"e": [1, 1]} for j in range(2)})
    with pytest.raises(FollowerIndeterminateError, match="indeterminate"):
        build_reaction_map(s)


def test_unbounded_follower(spec):
    s = variant(spec, followers={0: {"e": [3, 1]}})
    with pytest.raises(FollowerUnboundedError, match="unbounded"):
        build_reaction_map(s)


def test_tie_case_is_bounded(spec):
    # e1 - e2 h1 / h2 == 0: any v_1 gives the same value
    s = variant(spec, followers={0: {"e": [4, 2]}})
    build_reaction_map(s)


def test_displacement_margins(spec):
    margins, ok = verify_follower_gne(spec, [[0, 0], [1, 1]], 2.0, [0, 0])
    np.testing.assert_allclose(margins, [2.0, 2.0])
    assert not ok
    margins, ok = verify_follower_gne(spec, [[0, 0], [1, 1]], 2.0, [-2, -2])
    np.testing.assert_array_equal(margins, [0, 0])
    assert ok


def test_fixed_point_consistency_sweep(spec, rmap):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        x = random_profile(spec, rng)
        lo, hi = uncertainty_interval(spec, x)
        w = rng.uniform(lo, hi)
        margins, ok = verify_follower_gne(spec, x, w, follower_reaction(rmap, x, w), 1e-9)
        assert ok
        worst = max(worst, margins.max())
    assert worst <= 1e-9


def test_against_generic_lp_solver(spec, rmap):
    rng = np.random.default_rng(11)
    for _ in range(50):
        x = random_profile(spec, rng)
        w = rng.uniform(-2, 2)
        y = follower_reaction(rmap, x, w)
        for j, f in enumerate(spec.followers):
            others = np.delete(y, j)
            assert lp_optimum(f, x.x, w, others) == pytest.approx(y[j], abs=1e-7)


@pytest.mark.parametrize("seed", range(10))
def test_random_instances_against_lp_solver(seed):
    rng = np.random.default_rng(seed)
    s = random_spec(rng)
    r = build_reaction_map(s)
    for _ in range(10):
        x = random_profile(s, rng)
        w = rng.uniform(s.w_base_lo, s.w_base_hi)
        y = follower_reaction(r, x, w)
        assert verify_follower_gne(s, x, w, y, 1e-9)[1]
        for j, f in enumerate(s.followers):
            assert lp_optimum(f, x.x, w, np.delete(y, j)) == pytest.approx(y[j], abs=1e-6)


unit = st.floats(0.0, 1.0)
point = st.tuples(st.lists(unit, min_size=4, max_size=4), st.floats(-4, 4))


@settings(max_examples=200)
@given(point, point, st.floats(0.001, 0.999))
def test_graph_convexity(spec, rmap, p1, p2, gamma):
    x1, w1 = np.array(p1[0]), p1[1]
    x2, w2 = np.array(p2[0]), p2[1]
    y1, y2 = rmap(x1, w1), rmap(x2, w2)
    ym = rmap(gamma * x1 + (1 - gamma) * x2, gamma * w1 + (1 - gamma) * w2)
    np.testing.assert_allclose(ym, gamma * y1 + (1 - gamma) * y2, atol=1e-9)


@given(st.lists(unit, min_size=4, max_size=4), st.floats(-4, 4), st.floats(-4, 4))
def test_displacement_is_linear_in_w(spec, rmap, xs, w, delta):
    x = LeaderProfile.from_flat(spec, xs)
    diff = follower_reaction(rmap, x, w + delta) - follower_reaction(rmap, x, w)
    np.testing.assert_allclose(diff, rmap.b * delta, atol=1e-9)
