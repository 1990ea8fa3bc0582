import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import central_difference, relative_error
from toporeg.errors import ConfigError, DegenerateCloudError, TooFewPointsError
from toporeg.topoloss import (TopoLossSpec, TopoLossTerm, centrality, sample_size, spec_gradient,
                              spec_value, term_gradient, term_value, total_persistence)

EQUILATERAL = np.array([(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)])
TWO = np.array([(0.0, 0.0), (2.0, 0.0)])

FAMILIES = {
    "plain_h0": TopoLossTerm(dim=0, i=2),
    "plain_h1": TopoLossTerm(dim=1, i=1, j=2, mu=-1),
    "p2": TopoLossTerm(dim=0, i=2, j=6, p=2.0),
    "p1q1": TopoLossTerm(dim=1, i=1, j=3, p=1.0, q=1.0),
    "tau": TopoLossTerm(dim=0, i=3, j=3, mu=-1, tau=0.75),
    "sampled": TopoLossTerm(dim=0, i=2, f_s=0.5, n_s=3),
}


def cloud(seed, n=20):
    return np.random.default_rng(seed).random((n, 2))


# centrality

def test_centrality_examples():
    assert np.allclose(centrality([(0, 0), (1, 0), (2, 0)]), [0, 1, 0])
    c = centrality(cloud(0))
    assert c.min() == 0 and c.max() <= 1
    with pytest.raises(DegenerateCloudError):
        centrality([(1, 1), (1, 1)])


# values

def test_two_point_value_and_gradient():
    term = TopoLossTerm(dim=0)
    assert term_value(TWO, term) == 1.0
    v, g = term_gradient(TWO, term)
    assert v == 1.0 and np.array_equal(g, [[-1, 0], [1, 0]])


def test_equilateral_h1():
    v = term_value(EQUILATERAL, TopoLossTerm(dim=1, i=1, j=1, mu=-1))
    assert v == pytest.approx(-1 / 12)


def test_indices_beyond_diagram_contribute_nothing():
    assert term_value(EQUILATERAL, TopoLossTerm(dim=1, i=2)) == 0.0
    assert term_value(EQUILATERAL, TopoLossTerm(dim=0, i=5, j=9)) == 0.0


def test_essential_pair_is_skipped():
    pts = cloud(1)
    full = term_value(pts, TopoLossTerm(dim=0, i=1))
    assert full == term_value(pts, TopoLossTerm(dim=0, i=2))
    assert full == pytest.approx(total_persistence(pts))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 7), st.sampled_from([0, 1]))
def test_sampling_with_full_fraction_equals_unsampled(seed, n_s, dim):
    pts = cloud(seed, 15)
    plain = TopoLossTerm(dim=dim, i=1 + dim, p=2.0)
    sampled = TopoLossTerm(dim=dim, i=1 + dim, p=2.0, f_s=1.0, n_s=n_s)
    value, grad = term_gradient(pts, sampled, seed)
    assert value == term_value(pts, plain)
    assert np.array_equal(grad, term_gradient(pts, plain)[1])


@pytest.mark.parametrize("tau", [1.0, 1.5])
def test_tau_at_least_one_equals_unrestricted(tau):
    pts = cloud(3)
    assert term_value(pts, TopoLossTerm(dim=1, mu=-1, tau=tau)) == term_value(pts, TopoLossTerm(dim=1, mu=-1))


def test_restriction_uses_only_far_points():
    pts = cloud(4, 30)
    keep = centrality(pts) <= 0.5
    term = TopoLossTerm(dim=0, i=2, tau=0.5)
    assert term_value(pts, term) == term_value(pts[keep], TopoLossTerm(dim=0, i=2))
    _, g = term_gradient(pts, term)
    assert not np.any(g[~keep])


def test_sample_size_rounds_half_up():
    assert sample_size(34, 0.25) == 9   # 8.5
    assert sample_size(50, 0.1) == 5
    assert sample_size(10, 0.25) == 3   # 2.5


def test_too_few_points():
    with pytest.raises(TooFewPointsError):
        term_value(cloud(0, 20), TopoLossTerm(dim=0, f_s=0.1))
    with pytest.raises(TooFewPointsError):
        term_value(cloud(0, 20), TopoLossTerm(dim=0, tau=1e-9))


def test_sampling_determinism():
    pts = cloud(5, 30)
    term = TopoLossTerm(dim=0, i=2, f_s=0.3, n_s=5)
    a, b = term_gradient(pts, term, 7), term_gradient(pts, term, 7)
    assert a[0] == b[0] and np.array_equal(a[1], b[1])
    assert term_value(pts, term, 7) == a[0]
    assert term_value(pts, term, 8) != a[0]


def test_sampling_with_replacement():
    pts = cloud(6, 30)
    term = TopoLossTerm(dim=0, i=2, f_s=0.5, n_s=2, replace=True)
    v, g = term_gradient(pts, term, 1)
    assert v == term_value(pts, term, 1) and np.isfinite(g).all()


# specs

def test_single_term_spec_equals_term():
    pts = cloud(7)
    term = FAMILIES["p1q1"]
    v, g = spec_gradient(pts, TopoLossSpec.single(term), 3)
    tv, tg = term_gradient(pts, term, np.random.default_rng(3))
    assert v == tv and np.array_equal(g, tg)


def test_flare_spec_is_linear_combination():
    pts = cloud(8, 40)
    a = TopoLossTerm(dim=0, i=2)
    b = TopoLossTerm(dim=0, i=3, j=3, mu=-1, tau=0.75)
    spec = TopoLossSpec(((1.0, a), (1.0, b)))
    assert spec_value(pts, spec) == pytest.approx(term_value(pts, a) + term_value(pts, b))
    assert term_value(pts, b) <= 0


def test_karate_spec_runs_on_34_points():
    spec = TopoLossSpec.from_dict({"terms": [{"weight": 1.0, "dim": 0, "i": 2, "j": 2, "mu": -1,
                                              "p": 1.0, "q": 0.0, "f_s": 0.25, "n_s": 10, "tau": None}]})
    v, g = spec_gradient(cloud(9, 34), spec, 0)
    assert v < 0 and g.shape == (34, 2)


def test_spec_json_round_trip():
    doc = {"terms": [{"weight": 2.0, "dim": 1, "i": 1, "j": None, "mu": -1, "p": 2.0, "q": 0.5,
                      "f_s": 0.5, "n_s": 3, "tau": 0.8}]}
    spec = TopoLossSpec.from_dict(doc)
    assert TopoLossSpec.from_dict(spec.to_dict()) == spec
    assert spec.to_dict() == doc


@pytest.mark.parametrize("bad", [
    {"terms": []},
    {"terms": [{"dim": 2}]},
    {"terms": [{"dim": 0, "mu": 0}]},
    {"terms": [{"dim": 0, "i": 3, "j": 2}]},
    {"terms": [{"dim": 0, "f_s": 1.5}]},
    {"terms": [{"dim": 0, "bogus": 1}]},
    {"terms": [{"dim": 0}], "extra": 1},
])
def test_spec_rejects_invalid(bad):
    with pytest.raises(ConfigError):
        TopoLossSpec.from_dict(bad)


# gradients

@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_term_gradient_matches_finite_differences(name):
    term = FAMILIES[name]
    pts = cloud(2024)
    v, g = term_gradient(pts, term, 11)
    fd = central_difference(lambda x: term_value(x, term, 11), pts)
    assert relative_error(g, fd) <= 1e-4
    assert v == term_value(pts, term, 11)


def test_gradient_descent_step_decreases_two_point_loss():
    term = TopoLossTerm(dim=0)
    v, g = term_gradient(TWO, term)
    assert term_value(TWO - 1e-3 * g, term) < v


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["plain_h0", "plain_h1", "p2", "p1q1"]))
def test_homogeneity(seed, name):
    term = FAMILIES[name]
    pts = cloud(seed)
    v, g = term_gradient(pts, term)
    k = 2 * (term.p + term.q)
    assert term_value(2 * pts, term) == pytest.approx(2 ** k * v, rel=1e-9, abs=1e-15)
    assert np.sum(g * pts) == pytest.approx(k * v, rel=1e-6, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-20, 20), st.floats(-20, 20),
       st.sampled_from(sorted(FAMILIES)))
def test_translation(seed, dx, dy, name):
    term = FAMILIES[name]
    pts = cloud(seed)
    v, g = term_gradient(pts + [dx, dy], term, 0)
    assert v == pytest.approx(term_value(pts, term, 0), rel=1e-6, abs=1e-12)
    assert np.allclose(g.sum(axis=0), 0, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3), st.booleans())
def test_sign(seed, dim_i, minimize):
    mu = 1 if minimize else -1
    for dim in (0, 1):
        v = term_value(cloud(seed), TopoLossTerm(dim=dim, i=dim_i, mu=mu))
        assert v >= 0 if mu == 1 else v <= 0
