import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermograph.errors import ConfigError
from thermograph.graph import barbell, rose, standard_graph, theta
from thermograph.spectral import (entropy, grad_pressure, normalize_unit_entropy, perron, pressure,
                                  quotient_matrix, spectral_radius, transition_matrix)

GRAPHS = ["rose:2", "rose:3", "rose:4", "theta:2", "theta:3", "barbell", "G:2,2", "rose_theta:3"]

lengths = st.lists(st.floats(0.1, 4.0), min_size=5, max_size=5)


@pytest.mark.parametrize("r", range(2, 7))
def test_rose_unit_lengths(r):
    assert entropy(rose(r), np.ones(r)) == pytest.approx(np.log(2 * r - 1), abs=1e-10)


def test_theta_unit_lengths():
    assert entropy(theta(2), np.ones(3)) == pytest.approx(np.log(2), abs=1e-10)


def test_barbell_quotient_labels():
    m = quotient_matrix(barbell())
    assert m.kind == "quotient"
    assert len(m.labels) == 4


@pytest.mark.parametrize("family", GRAPHS)
def test_perron_matches_eig(family):
    g = standard_graph(family)
    rng = np.random.default_rng(1)
    for _ in range(5):
        ell = rng.uniform(0.1, 3.0, g.n_edges)
        m = transition_matrix(g, ell)
        dense = m.entries
        expected = np.max(np.abs(np.linalg.eigvals(dense)))
        rho, right, left = perron(m)
        assert rho == pytest.approx(expected, rel=1e-10)
        assert np.allclose(dense @ right, rho * right, atol=1e-10 * np.abs(right).max())
        assert np.allclose(left @ dense, rho * left, atol=1e-10 * np.abs(left).max())
        assert spectral_radius(quotient_matrix(g, ell)) == pytest.approx(rho, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(lengths, st.floats(0.1, 10.0))
def test_entropy_scaling(ell, a):
    g = standard_graph("G:2,2")
    ell = np.array(ell)
    assert a * entropy(g, a * ell) == pytest.approx(entropy(g, ell), rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(lengths)
def test_normalize_and_pressure(ell):
    g = standard_graph("G:2,2")
    unit = normalize_unit_entropy(g, np.array(ell))
    assert entropy(g, unit) == pytest.approx(1.0, abs=1e-10)
    assert abs(pressure(g, -unit)) < 1e-8
    gp = grad_pressure(g, unit)
    assert np.all(gp > 0)
    assert gp.sum() == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("family", ["rose:3", "theta:2", "barbell"])
def test_grad_pressure_finite_differences(family):
    g = standard_graph(family)
    ell = np.random.default_rng(2).uniform(0.3, 2.0, g.n_edges)
    # grad of P(-ell) with respect to ell, normalized to unit L1 norm
    step = 1e-6
    fd = np.array([(pressure(g, -(ell - d)) - pressure(g, -(ell + d))) / (2 * step)
                   for d in np.eye(g.n_edges) * step])
    assert np.allclose(grad_pressure(g, ell), fd / fd.sum(), atol=1e-7)


@pytest.mark.parametrize("bad", [[1.0, 0.0], [1.0, -2.0], [1.0, np.inf], [1.0, np.nan], [1.0]])
def test_entropy_rejects(bad):
    with pytest.raises(ConfigError):
        entropy(rose(2), np.array(bad))


def test_rose_one_has_no_entropy():
    with pytest.raises(ConfigError):
        normalize_unit_entropy(rose(1), np.ones(1))
