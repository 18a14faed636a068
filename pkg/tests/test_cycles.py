import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermograph.cycles import (F_via_cycles, F_via_det, enumerate_cycles, grad_F, hessian_F,
                                pairing_hessian, pairing_volume)
from thermograph.errors import BudgetExceeded
from thermograph.graph import barbell, collapse, pullback_length, rose, standard_graph, theta

GRAPHS = ["rose:2", "rose:3", "rose:4", "theta:2", "theta:3", "barbell", "G:2,2", "rose_theta:3"]


@pytest.mark.parametrize("family, kind, count", [
    ("barbell", "full", 8),
    ("barbell", "quotient", 6),
    ("rose:1", "full", 2),
])
def test_cycle_counts(family, kind, count):
    g = rose(1) if family == "rose:1" else standard_graph(family)
    assert enumerate_cycles(g, kind).n_cycles == count


def test_rose_one_full():
    # the two loops e and its reverse are vertex-disjoint, so F = (1 - x)^2
    cx = enumerate_cycles(rose(1), "full")
    for ell in (0.3, 1.0, 2.5):
        x = np.exp(-ell)
        assert F_via_cycles(cx, [ell]) == pytest.approx((1 - x) ** 2, abs=1e-14)


def test_barbell_quotient_single_edge():
    cx = enumerate_cycles(barbell(), "quotient")
    assert cx.n_simplices == 1 + 6 + 1


@pytest.mark.parametrize("family", GRAPHS)
@pytest.mark.parametrize("kind", ["full", "quotient"])
def test_cycles_match_determinant(family, kind):
    g = standard_graph(family)
    cx = enumerate_cycles(g, kind)
    rng = np.random.default_rng(3)
    for _ in range(20):
        ell = rng.uniform(0.05, 3.0, g.n_edges)
        assert F_via_cycles(cx, ell) == pytest.approx(F_via_det(g, ell, kind), abs=1e-12)


def test_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_cycles(rose(5), "full")
    with pytest.raises(BudgetExceeded):
        enumerate_cycles(theta(2), "full", budget=3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.05, 4.0), min_size=3, max_size=3))
def test_barbell_factorization(ell):
    x, y, z = np.exp(-np.array(ell))
    expected = (1 - x) * (1 - y) * (1 - x - y + x * y - 4 * x * y * z * z)
    assert F_via_cycles(enumerate_cycles(barbell(), "full"), ell) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.05, 4.0), min_size=2, max_size=2))
def test_collapse_identity(ell0):
    for g, forest in ((theta(2), ["e3"]), (barbell(), ["c"])):
        target, cmap = collapse(g, forest)
        lhs = F_via_cycles(enumerate_cycles(g, "full"), pullback_length(cmap, ell0))
        assert lhs == pytest.approx(F_via_cycles(enumerate_cycles(target, "full"), ell0), abs=1e-12)


@pytest.mark.parametrize("family", GRAPHS)
def test_derivatives(family):
    g = standard_graph(family)
    cx = enumerate_cycles(g, "quotient")
    ell = np.random.default_rng(4).uniform(0.2, 2.0, g.n_edges)
    step = 1e-5
    eye = np.eye(g.n_edges) * step
    fd = np.array([(F_via_cycles(cx, ell + d) - F_via_cycles(cx, ell - d)) / (2 * step) for d in eye])
    assert np.allclose(grad_F(cx, ell), fd, atol=1e-6)
    fdh = np.array([(grad_F(cx, ell + d) - grad_F(cx, ell - d)) / (2 * step) for d in eye])
    h = hessian_F(cx, ell)
    assert np.allclose(h, fdh, atol=1e-6)
    assert np.allclose(h, h.T)
    assert pairing_volume(cx, ell) == pytest.approx(ell @ grad_F(cx, ell), abs=1e-12)
    v = np.arange(1.0, g.n_edges + 1)
    assert pairing_hessian(cx, ell, v) == pytest.approx(v @ h @ v, abs=1e-12)


def test_extended_lengths():
    # an infinite petal drops out of the rose polynomial
    cx3 = enumerate_cycles(rose(3), "quotient")
    cx2 = enumerate_cycles(rose(2), "quotient")
    ell = np.array([0.7, 1.3])
    assert F_via_cycles(cx3, [0.7, 1.3, np.inf]) == pytest.approx(F_via_cycles(cx2, ell), abs=1e-15)
    assert np.isfinite(pairing_volume(cx3, [0.7, 1.3, np.inf]))


def test_dump_is_deterministic():
    a = enumerate_cycles(barbell(), "quotient").dump()
    assert a == enumerate_cycles(barbell(), "quotient").dump()
    lines = a.splitlines()
    assert lines[0] == "cycles 6 simplices 8"
    assert sum(int(line.split()[0]) for line in lines[1:]) == 6
