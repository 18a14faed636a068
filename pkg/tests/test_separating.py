import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermograph.errors import ConfigError, NoCompletion
from thermograph.graph import barbell, double_rose, theta
from thermograph.separating import (Y_separating, aitken_limit, bridge_decay_ratio,
                                    escape_path_separating, factorization_residual, separate,
                                    shortcut_experiment, side_F, solve_bridge, stratum_pairing,
                                    with_bridge)
from thermograph.spectral import entropy

G22 = separate(double_rose(2, 2), "e0")
BARBELL = separate(barbell(), "c")


def test_separate_sides():
    assert G22.graph1.n_edges == 2 and G22.graph2.n_edges == 2
    assert set(G22.side1) | set(G22.side2) | {G22.bridge} == set(range(5))
    with pytest.raises(ConfigError):
        separate(theta(2), "e1")


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.05, 3.0), min_size=5, max_size=5))
def test_factorization(ell):
    assert factorization_residual(G22, ell) < 1e-11
    assert factorization_residual(BARBELL, ell[:3]) < 1e-11


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 4.0), st.floats(0.05, 4.0))
def test_barbell_Y(a, b):
    x, y = np.exp(-a), np.exp(-b)
    assert Y_separating(BARBELL, [a, b, 1.0]) == pytest.approx(4 * x * y * (1 - x) * (1 - y), abs=1e-15)


def test_Y_independent_of_bridge():
    ell = np.array([0.7, 1.1, 1.9, 0.4, 1.0])
    other = ell.copy()
    other[G22.bridge] = 5.0
    assert Y_separating(G22, ell) == pytest.approx(Y_separating(G22, other), abs=1e-12)


def test_side_F_value():
    f1, f2 = side_F(G22, np.full(5, np.log(4)))
    assert f1 == pytest.approx(0.17578125, abs=1e-15)
    assert f2 == pytest.approx(0.17578125, abs=1e-15)


def test_bridge_solve():
    ell = np.full(5, np.log(4))
    assert solve_bridge(G22, ell) == pytest.approx(np.log(4), abs=1e-12)
    assert entropy(G22.graph, with_bridge(G22, ell)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(NoCompletion):
        solve_bridge(G22, np.full(5, 0.5))


def test_stratum_pairing():
    whole, parts = stratum_pairing(G22, [0.9, 1.7, 1.2, 2.2, 1.0])
    assert whole == pytest.approx(parts, abs=1e-10)
    unit = np.log(3)
    whole, _ = stratum_pairing(G22, [unit, unit, unit, unit, 1.0])
    assert abs(whole) < 1e-9


def test_escape_path_start():
    path = escape_path_separating(G22, [np.log(3)] * 2, [np.log(4)] * 2)
    assert np.allclose(path.free_lengths(0.0)[list(G22.side1)], np.log(4))
    ratios = [bridge_decay_ratio(G22, path, t) for t in 1 - np.geomspace(0.5, 1e-6, 10)]
    assert min(ratios) > 0
    assert max(ratios) / min(ratios) < 100


def test_shortcut_errors():
    with pytest.raises(ConfigError):
        shortcut_experiment(G22, [0.0], [np.log(3)] * 2, [np.log(4)] * 2, [2.0, 1.5])


def test_aitken_geometric():
    seq = [1 + 0.5**k for k in range(3)]
    assert aitken_limit(seq) == pytest.approx(1.0)
