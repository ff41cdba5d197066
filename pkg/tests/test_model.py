import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsn_ddu import (
    EmptyUncertaintySetError,
    LeaderProfile,
    ScenarioError,
    check_profile_feasible,
    eval_payoff,
    load_scenario,
    uncertainty_interval,
)
from nsn_ddu.model import bundled_scenario_path

from .conftest import variant


def test_bundled_scenario_matches_example(spec):
    assert spec.n == 2 and spec.m == 2
    for leader in spec.leaders:
        np.testing.assert_array_equal(leader.a, [1.3, 0.0])
        np.testing.assert_array_equal(leader.box_lo, [0, 0])
        np.testing.assert_array_equal(leader.box_hi, [1, 1])
        np.testing.assert_array_equal(leader.sigma, [0, 2])
        assert leader.c == 0.2 and leader.d == 2.0
    np.testing.assert_array_equal(spec.leaders[0].b, [-1.2, -1.2])
    np.testing.assert_array_equal(spec.leaders[1].b, [0.4, 0.4])
    assert (spec.w_base_lo, spec.w_base_hi) == (-4.0, 4.0)
    assert spec.ddu_enabled


def _doc():
    return json.loads(bundled_scenario_path().read_text())


def test_round_trip_document(spec):
    again = load_scenario(json.dumps(spec.to_document()))
    assert again.to_document() == spec.to_document()


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d["leaders"][0].update(b=[1, 2, 3]), "leaders[0].b"),
        (lambda d: d["leaders"][1].update(box_lo=[0, 2]), "leaders[1].box_lo[1]"),
        (lambda d: d["leaders"][0].update(sigma=[0]), "leaders[0].sigma"),
        (lambda d: d["followers"][0].update(g=[[1, 0]]), "followers[0].g"),
        (lambda d: d["followers"][1].update(g=[[1, 0], [1]]), "followers[1].g[1]"),
        (lambda d: d["followers"][0].update(alpha=[1, 2]), "followers[0].alpha"),
        (lambda d: d["leaders"][0].pop("c"), "leaders[0].c"),
        (lambda d: d["leaders"][0].update(c="x"), "leaders[0].c"),
        (lambda d: d.update(leaders=[]), "leaders"),
        (lambda d: d.update(followers=[]), "followers"),
        (lambda d: d["uncertainty"].update(lo=5), "uncertainty.lo"),
        (lambda d: d.pop("uncertainty"), "uncertainty"),
    ],
)
def test_schema_errors_name_the_field(mutate, path):
    doc = _doc()
    mutate(doc)
    with pytest.raises(ScenarioError) as info:
        load_scenario(json.dumps(doc))
    assert info.value.path == path


def test_invalid_json():
    with pytest.raises(ScenarioError):
        load_scenario("{not json")


def test_eval_payoff_examples(spec):
    x = [[0, 0], [1, 1]]
    assert eval_payoff(spec, 0, x, [-2, -2], 2) == pytest.approx(4.8, abs=1e-12)
    assert eval_payoff(spec, 1, x, [-2, -2], 2) == pytest.approx(-0.3, abs=1e-12)
    for i in range(2):
        assert eval_payoff(spec, i, [[0, 0], [0, 0]], [0, 0], spec.leaders[i].d) == 0.0
    with pytest.raises(IndexError):
        eval_payoff(spec, 2, x, [0, 0], 0)


@pytest.mark.parametrize(
    "x, expected",
    [
        ([[0, 0], [1, 1]], (-2.0, 2.0)),
        ([[0, 0], [0, 0]], (-4.0, 4.0)),
        ([[0, 1], [1, 0]], (-2.0, 2.0)),
        ([[1, 1], [1, 1]], (0.0, 0.0)),
    ],
)
def test_uncertainty_interval(spec, x, expected):
    assert uncertainty_interval(spec, x) == expected


def test_over_restriction_is_an_error(spec):
    s = variant(spec, leaders={0: {"sigma": [0, 3]}})
    with pytest.raises(EmptyUncertaintySetError):
        uncertainty_interval(s, [[0, 1], [0, 1]])


def test_feasibility_report(spec):
    rep = check_profile_feasible(spec, [[0, 0], [1, 1]])
    assert all(r.feasible and r.violation == 0 for r in rep)
    rep = check_profile_feasible(spec, [[-0.1, 0], [1, 1]])
    assert not rep[0].feasible and rep[0].violation == pytest.approx(0.1)
    assert rep[1].feasible
    rep = check_profile_feasible(spec, [[0, 0], [1, 2]])
    assert rep[0].feasible and not rep[1].feasible and rep[1].violation == pytest.approx(1.0)


unit = st.floats(0.0, 1.0, allow_nan=False)
profiles = st.tuples(st.tuples(unit, unit), st.tuples(unit, unit))


@given(profiles)
def test_diu_interval_ignores_x(diu_spec, x):
    assert uncertainty_interval(diu_spec, x) == (-4.0, 4.0)


@given(profiles)
def test_interval_width_formula(spec, x):
    lo, hi = uncertainty_interval(spec, x)
    r = sum(l.sigma @ np.asarray(xi) for l, xi in zip(spec.leaders, x))
    assert hi - lo == pytest.approx(8.0 - 2.0 * r, abs=1e-12)


@given(profiles, st.integers(0, 3), st.floats(0.0, 0.5))
def test_interval_width_monotone(spec, x, k, bump):
    lo, hi = uncertainty_interval(spec, x)
    flat = np.array(x, dtype=float).reshape(-1)
    flat[k] = min(flat[k] + bump, 1.0)
    lo2, hi2 = uncertainty_interval(spec, LeaderProfile.from_flat(spec, flat))
    assert hi2 - lo2 <= hi - lo + 1e-12


@settings(max_examples=200)
@given(
    st.integers(0, 1),
    profiles,
    st.tuples(st.floats(-10, 10), st.floats(-10, 10)),
    st.floats(-4, 4),
    st.floats(0.25, 2.0),
)
def test_payoff_second_difference_in_w(spec, i, x, y, w, step):
    f = lambda t: eval_payoff(spec, i, x, y, t)  # noqa: E731
    second = (f(w + step) - 2 * f(w) + f(w - step)) / step**2
    assert second == pytest.approx(2 * spec.leaders[i].c, abs=1e-9)
