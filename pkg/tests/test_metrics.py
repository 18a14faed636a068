import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermograph.errors import ConfigError, NoCompletion, NumericFailure
from thermograph.graph import rose, standard_graph
from thermograph.metrics import (MetricPath, Profile, constant, distance_upper_bound, entropy_norm,
                                 linear, path_length, path_point, pressure_norm, segment,
                                 solve_dependent, surface, tangent_project)
from thermograph.quadrature import gauss_legendre_adaptive
from thermograph.rose import escape_path
from thermograph.spectral import entropy, grad_pressure, normalize_unit_entropy

GRAPHS = ["rose:2", "rose:3", "theta:2", "barbell", "G:2,2", "rose_theta:3"]


@pytest.mark.parametrize("f, a, b, exact", [
    (np.sin, 0.0, np.pi, 2.0),
    (np.exp, -1.0, 2.0, np.exp(2) - np.exp(-1)),
    (lambda x: 1 / np.sqrt(x), 1e-8, 1.0, 2 - 2e-4),
])
def test_quadrature(f, a, b, exact):
    assert gauss_legendre_adaptive(f, a, b, tol=1e-12) == pytest.approx(exact, rel=1e-9)


def test_quadrature_gives_up():
    rng = np.random.default_rng(0)
    with pytest.raises(NumericFailure):
        gauss_legendre_adaptive(lambda x: rng.random(), 0.0, 1.0, max_depth=6)


@pytest.mark.parametrize("free, dep, expected", [
    ([np.log(5), np.log(5), np.nan], 2, np.log(5)),
    ([np.log(2), np.nan], 1, np.log(5)),
])
def test_complete_rose(free, dep, expected):
    r = len(free)
    assert surface(rose(r)).complete(free, dep)[dep] == pytest.approx(expected, abs=1e-12)


def test_no_completion():
    with pytest.raises(NoCompletion):
        surface(rose(3)).complete([0.5, 0.5, np.nan], 2)


@pytest.mark.parametrize("family", GRAPHS)
def test_entropy_norm_matches_hessian_of_entropy(family):
    g = standard_graph(family)
    rng = np.random.default_rng(5)
    ell = normalize_unit_entropy(g, rng.uniform(0.3, 2.0, g.n_edges))
    v = tangent_project(g, ell, rng.normal(size=g.n_edges))
    # second derivative of entropy along the tangent line, by central differences
    step = 1e-4
    vals = [entropy(g, ell + k * step * v.components) for k in (-1, 0, 1)]
    second = (vals[0] - 2 * vals[1] + vals[2]) / step**2
    assert entropy_norm(g, ell, v) ** 2 == pytest.approx(second, rel=1e-5)


@pytest.mark.parametrize("family", GRAPHS)
def test_conformal_relation(family):
    g = standard_graph(family)
    rng = np.random.default_rng(6)
    for _ in range(10):
        ell = normalize_unit_entropy(g, rng.uniform(0.3, 2.0, g.n_edges))
        v = tangent_project(g, ell, rng.normal(size=g.n_edges))
        ratio = ell @ grad_pressure(g, ell)
        assert pressure_norm(g, ell, v) ** 2 == pytest.approx(ratio * entropy_norm(g, ell, v) ** 2,
                                                              rel=1e-6)


def test_norm_rejects_normal_vector():
    g = rose(2)
    ell = np.full(2, np.log(3))
    with pytest.raises(ConfigError):
        entropy_norm(g, ell, surface(g).grad(ell))
    with pytest.raises(ConfigError):
        tangent_project(g, np.ones(2), [1.0, 0.0])


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(-3.0, 3.0))
def test_profiles(t, slope):
    p = linear(1.0, 1.0 + slope)
    assert p.value(t) == pytest.approx(1.0 + slope * t)
    q = Profile("log", 3.0, 1.0)
    h = 1e-6
    assert q.deriv(t) == pytest.approx((q.value(t + h) - q.value(t - h)) / (2 * h), rel=1e-6)
    sq = q.reparametrized(2)
    assert sq.value(t) == pytest.approx(q.value(t * t))


def test_constant_path_has_zero_length():
    ell = np.full(3, np.log(5))
    path = MetricPath(rose(3), (constant(ell[0]), constant(ell[1]), constant(0.0)), 2)
    assert path_length(path) == 0.0


def test_dependent_speed_is_tangent():
    path = escape_path(3, 0.9)
    s = surface(path.graph)
    for t in (0.1, 0.5, 0.8):
        ell, v = path_point(path, t)
        assert abs(s.F(ell)) < 1e-12
        assert abs(v @ s.grad(ell)) < 1e-12
        assert solve_dependent(path, t)[2] == pytest.approx(ell[2])


def test_path_length_additive():
    g = rose(3)
    a = np.array([np.log(5), np.log(5)])
    b = np.array([1.2, 2.4])
    mid = 0.5 * (a + b)
    whole = path_length(segment(g, np.r_[a, 0], np.r_[b, 0], 2))
    parts = (path_length(segment(g, np.r_[a, 0], np.r_[mid, 0], 2))
             + path_length(segment(g, np.r_[mid, 0], np.r_[b, 0], 2)))
    assert whole == pytest.approx(parts, rel=1e-8)


def test_distance_upper_bound():
    g = rose(2)
    a = np.full(2, np.log(3))
    b = surface(g).complete([np.log(2), np.nan], 1)
    assert distance_upper_bound(g, a, a) == 0.0
    d = distance_upper_bound(g, a, b, budget=2)
    # on the one-dimensional rose-2 surface the straight chart path is the only path
    assert d == pytest.approx(path_length(segment(g, [np.log(3), 0], [np.log(2), 0], 1)), rel=1e-6)
    swapped = distance_upper_bound(g, a, b[::-1], budget=2)
    assert swapped == pytest.approx(d, abs=1e-6)
