"""Invariant checks grouped into suites, shared by the CLI and the test-suite."""
from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import rose as rose_mod
from .bounds import rank2_check
from .cycles import F_via_cycles, F_via_det, enumerate_cycles, grad_F, hessian_F, pairing_volume
from .errors import BudgetExceeded, NoCompletion, NumericFailure
from .graph import barbell, collapse, double_rose, pullback_length, rose, standard_graph, theta
from .metrics import (MetricPath, Profile, acceleration_norm_sq, distance_upper_bound, entropy_norm,
                      path_length, path_point, pressure_norm, surface, tangent_project)
from .separating import (Y_separating, bridge_decay_ratio, escape_path_separating,
                         factorization_residual, separate, stratum_pairing, with_bridge)
from .spectral import (entropy, grad_pressure, normalize_unit_entropy, pressure, quotient_matrix,
                       spectral_radius, transition_matrix)

SPECTRAL_GRAPHS = ("rose:2", "rose:3", "rose:4", "rose:5", "theta:2", "theta:3", "theta:4",
                   "barbell", "G:2,2")
STANDARD_GRAPHS = ("rose:2", "rose:3", "rose:4", "rose:5", "theta:2", "theta:3", "theta:4",
                   "barbell", "G:2,2", "rose_theta:3", "rose_theta:4")
METRIC_GRAPHS = ("rose:2", "rose:3", "rose:4", "theta:2", "theta:3", "barbell", "G:2,2",
                 "rose_theta:3")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    measured: float
    tolerance: float
    status: str  # pass, fail or skip
    note: str = ""


def _rng(seed: int, name: str):
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def random_lengths(graph, rng, lo=0.2, hi=3.0) -> np.ndarray:
    return rng.uniform(lo, hi, graph.n_edges)


def random_unit_point(graph, rng, lo=0.2, hi=3.0) -> np.ndarray:
    return normalize_unit_entropy(graph, random_lengths(graph, rng, lo, hi))


def _rel(a, b) -> float:
    return float(abs(a - b) / max(1.0, abs(a), abs(b)))


# graph ------------------------------------------------------------------

def _graph_involution(rng):
    worst = 0.0
    for name in STANDARD_GRAPHS:
        g = standard_graph(name)
        bar, o, t = g.bar, g.origin, g.terminus
        for e in range(2 * g.n_edges):
            ok = bar[bar[e]] == e and bar[e] != e and o[e] == t[bar[e]]
            worst = max(worst, 0.0 if ok else 1.0)
    return worst


def _graph_rose_shape(rng):
    bad = 0
    for r in range(1, 7):
        g = rose(r)
        bad += (g.n_edges != r) + (len(g.vertices) != 1)
    return float(bad)


def _graph_collapse_support(rng):
    bad = 0
    for g, forest in ((theta(2), ["e3"]), (barbell(), ["c"]), (double_rose(2, 2), ["e0"])):
        target, cmap = collapse(g, forest)
        ell = pullback_length(cmap, rng.uniform(0.5, 2.0, target.n_edges))
        support = {g.edges[k] for k in range(g.n_edges) if ell[k] > 0}
        bad += support != set(g.edges) - set(forest)
    return float(bad)


# spectral ---------------------------------------------------------------

def _rose_entropy(rng):
    return max(abs(entropy(rose(r), np.ones(r)) - np.log(2 * r - 1)) for r in range(2, 7))


def _theta_entropy(rng):
    return abs(entropy(theta(2), np.ones(3)) - np.log(2))


def _same_spectral_radius(rng):
    worst = 0.0
    for name in SPECTRAL_GRAPHS:
        g = standard_graph(name)
        for _ in range(50):
            ell = random_lengths(g, rng, 0.1, 3.0)
            full = spectral_radius(transition_matrix(g, ell))
            quot = spectral_radius(quotient_matrix(g, ell))
            worst = max(worst, _rel(full, quot))
    return worst


def _pressure_zero_iff_unit(rng):
    worst = 0.0
    for name in SPECTRAL_GRAPHS:
        g = standard_graph(name)
        for _ in range(10):
            ell = random_unit_point(g, rng)
            worst = max(worst, abs(pressure(g, -ell)))
            off = ell * rng.choice([rng.uniform(0.5, 0.99), rng.uniform(1.01, 2.0)])
            # away from the surface both quantities must be visibly nonzero
            if abs(pressure(g, -off)) < 1e-8 or abs(entropy(g, off) - 1) < 1e-8:
                worst = max(worst, 1.0)
    return worst


def _entropy_scaling(rng):
    worst = 0.0
    for name in SPECTRAL_GRAPHS:
        g = standard_graph(name)
        for _ in range(10):
            ell = random_lengths(g, rng)
            a = rng.uniform(0.1, 10.0)
            worst = max(worst, _rel(a * entropy(g, a * ell), entropy(g, ell)))
    return worst


def _entropy_euler(rng):
    worst = 0.0
    for name in SPECTRAL_GRAPHS:
        g = standard_graph(name)
        for _ in range(5):
            ell = random_lengths(g, rng)
            h = entropy(g, ell)
            grad = np.empty(g.n_edges)
            for k in range(g.n_edges):
                step = 1e-5 * ell[k]
                up, dn = ell.copy(), ell.copy()
                up[k] += step
                dn[k] -= step
                grad[k] = (entropy(g, up) - entropy(g, dn)) / (2 * step)
            worst = max(worst, abs(ell @ grad + h))
    return worst


def _grad_pressure_norm(rng):
    worst = 0.0
    for name in SPECTRAL_GRAPHS:
        g = standard_graph(name)
        for _ in range(20):
            gp = grad_pressure(g, random_unit_point(g, rng))
            worst = max(worst, abs(gp.sum() - 1.0), 1.0 if np.any(gp <= 0) else 0.0)
    return worst


# cycles -----------------------------------------------------------------

def _cycles_vs_det(name, kind):
    def check(rng):
        g = standard_graph(name)
        cx = enumerate_cycles(g, kind)
        worst = 0.0
        for _ in range(100):
            ell = random_lengths(g, rng, 0.05, 3.0)
            worst = max(worst, abs(F_via_cycles(cx, ell) - F_via_det(g, ell, kind)))
        return worst
    return check


def _collapse_identity(rng):
    worst = 0.0
    for g, forest in ((theta(2), ["e3"]), (barbell(), ["c"])):
        target, cmap = collapse(g, forest)
        cg, ct = enumerate_cycles(g, "full"), enumerate_cycles(target, "full")
        for _ in range(50):
            ell0 = random_lengths(target, rng, 0.05, 3.0)
            worst = max(worst, abs(F_via_cycles(cg, pullback_length(cmap, ell0))
                                   - F_via_cycles(ct, ell0)))
    return worst


def _sign_facts(rng):
    worst = 0.0
    for name in SPECTRAL_GRAPHS:
        g = standard_graph(name)
        for _ in range(10):
            ell = random_unit_point(g, rng)
            worst = max(worst, abs(F_via_det(g, ell, "full")))
            if not F_via_det(g, ell * rng.uniform(1.05, 3.0), "full") > 0:
                worst = max(worst, 1.0)
    return worst


def _barbell_factorization(rng):
    cx = enumerate_cycles(barbell(), "full")
    worst = 0.0
    for _ in range(200):
        ell = rng.uniform(0.05, 3.0, 3)
        x, y, z = np.exp(-ell)
        exact = (1 - x) * (1 - y) * (1 - x - y + x * y - 4 * x * y * z * z)
        worst = max(worst, abs(F_via_cycles(cx, ell) - exact))
    return worst


def _rose_ray_root(rng):
    bad = 0
    grid = np.geomspace(1e-3, 1e3, 400)
    for r in range(2, 6):
        cx = enumerate_cycles(rose(r), "quotient")
        for _ in range(20):
            ell = rng.uniform(0.1, 3.0, r)
            vals = np.array([F_via_cycles(cx, s * ell) for s in grid])
            bad += int(np.count_nonzero(np.diff(np.sign(vals)) != 0) != 1)
    return float(bad)


def _F_derivatives(rng):
    worst = 0.0
    for name in SPECTRAL_GRAPHS:
        g = standard_graph(name)
        cx = enumerate_cycles(g, "quotient")
        for _ in range(5):
            ell = random_lengths(g, rng)
            step = 1e-5
            eye = np.eye(g.n_edges) * step
            fd_grad = np.array([(F_via_cycles(cx, ell + d) - F_via_cycles(cx, ell - d)) / (2 * step)
                                for d in eye])
            fd_hess = np.array([(grad_F(cx, ell + d) - grad_F(cx, ell - d)) / (2 * step)
                                for d in eye])
            worst = max(worst, np.abs(fd_grad - grad_F(cx, ell)).max(),
                        np.abs(fd_hess - hessian_F(cx, ell)).max())
    return worst


def _pairing_volume(rng):
    worst = 0.0
    for name in SPECTRAL_GRAPHS:
        g = standard_graph(name)
        cx = enumerate_cycles(g, "quotient")
        for _ in range(10):
            ell = random_lengths(g, rng)
            worst = max(worst, abs(pairing_volume(cx, ell) - ell @ grad_F(cx, ell)))
    return worst


def _exact_polynomials(rng):
    c2 = enumerate_cycles(rose(2), "quotient")
    c3 = enumerate_cycles(rose(3), "quotient")
    cb = enumerate_cycles(barbell(), "quotient")
    worst = 0.0
    for _ in range(1000):
        ell = rng.uniform(0.01, 5.0, 3)
        x, y, z = np.exp(-ell)
        worst = max(worst,
                    abs(F_via_cycles(c2, ell[:2]) - (1 - x - y - 3 * x * y)),
                    abs(F_via_cycles(c3, ell) - (1 - x - y - z - 3 * (x * y + x * z + y * z)
                                                 - 5 * x * y * z)),
                    abs(F_via_cycles(cb, ell) - (1 - (x + y + 4 * x * y * z * z) + x * y)))
    return worst


# metrics ----------------------------------------------------------------

def _conformal(rng):
    worst = 0.0
    for name in METRIC_GRAPHS:
        g = standard_graph(name)
        for _ in range(50):
            ell = random_unit_point(g, rng)
            v = tangent_project(g, ell, rng.normal(size=g.n_edges))
            lhs = pressure_norm(g, ell, v) ** 2
            rhs = (ell @ grad_pressure(g, ell)) * entropy_norm(g, ell, v) ** 2
            worst = max(worst, _rel(lhs, rhs))
    return worst


def _test_paths(rng):
    paths = [rose_mod.escape_path(3, 0.9)]
    for name, dep in (("theta:2", 2), ("barbell", 1), ("rose:3", 2)):
        g = standard_graph(name)
        while True:
            a, b = random_unit_point(g, rng), random_unit_point(g, rng)
            profs = tuple(Profile("log", np.exp(a[k]), np.exp(b[k]) - np.exp(a[k]))
                          for k in range(g.n_edges))
            path = MetricPath(g, profs, dep)
            try:
                for t in np.linspace(0, 1, 33):
                    path_point(path, t)
            except NumericFailure:
                continue
            paths.append(path)
            break
    return paths


def _two_norm_forms(rng):
    worst = 0.0
    for path in _test_paths(rng):
        s = surface(path.graph)
        for t in np.linspace(path.t0 + 0.05, path.t1 - 0.05, 7):
            ell, v = path_point(path, t)
            step = 1e-3
            at = [s.complete(path.free_lengths(t + k * step), path.dependent)
                  for k in (-2, -1, 1, 2)]
            acc = (-at[0] + 16 * at[1] - 30 * ell + 16 * at[2] - at[3]) / (12 * step**2)
            worst = max(worst, _rel(acceleration_norm_sq(path.graph, ell, acc),
                                    entropy_norm(path.graph, ell, v) ** 2))
    return worst


def _reparametrization(rng):
    worst = 0.0
    for path in _test_paths(rng)[1:]:
        squared = MetricPath(path.graph, tuple(p.reparametrized(2) for p in path.profiles),
                             path.dependent, path.t0, path.t1)
        worst = max(worst, _rel(path_length(path), path_length(squared)))
    return worst


def _rank2(rng, family):
    worst = -np.inf
    for _ in range(100):
        length, bound = rank2_check(family, rng)
        worst = max(worst, bound - length)
    return max(worst, 0.0)


def _triangle(rng):
    worst = 0.0
    g = rose(3)
    for _ in range(3):
        a, b, c = (random_unit_point(g, rng, 0.8, 2.5) for _ in range(3))
        d = lambda p, q: distance_upper_bound(g, p, q, budget=4)
        worst = max(worst, d(a, c) - d(a, b) - d(b, c))
    return max(worst, 0.0)


# rose -------------------------------------------------------------------

def _rose_vs_cycles(rng):
    worst = 0.0
    for r in range(2, 6):
        cx = enumerate_cycles(rose(r), "quotient")
        for _ in range(100):
            ell = rng.uniform(0.05, 3.0, r)
            worst = max(worst, abs(rose_mod.F_rose(ell) - F_via_cycles(cx, ell)))
    return worst


def _rose_partials(rng):
    worst = 0.0
    for r in range(2, 6):
        cx = enumerate_cycles(rose(r), "quotient")
        for _ in range(20):
            ell = rng.uniform(0.05, 3.0, r)
            worst = max(worst, np.abs(rose_mod.grad_F_rose(ell) - grad_F(cx, ell)).max(),
                        np.abs(rose_mod.hessian_F_rose(ell) - hessian_F(cx, ell)).max())
    return worst


def _rose_split(rng):
    worst = 0.0
    for r in range(2, 6):
        for _ in range(50):
            ell = rng.uniform(0.05, 3.0, r)
            i = int(rng.integers(r))
            split = rose_mod.X(ell, i) - np.exp(-ell[i]) * rose_mod.Y(ell, i)
            worst = max(worst, abs(rose_mod.F_rose(ell) - split))
    return worst


def _short_petal(rng):
    worst = 0.0
    for r in range(3, 6):
        n = 0
        while n < 100:
            ell = np.exp(rng.uniform(0.0, 3.0, r))
            try:
                ell[-1] = rose_mod.solve_edge(ell, r - 1)
            except NoCompletion:
                continue
            if ell[-1] < np.log(3):
                continue
            n += 1
            worst = max(worst, ell[:-1].min() - rose_mod.short_petal_bound(r))
    return max(worst, 0.0)


def _escape_envelope(rng):
    length = path_length(rose_mod.escape_path(3))
    return max(length - rose_mod.escape_bound(3), 0.0)


def _escape_closed_form(rng):
    path = rose_mod.escape_path(3)
    s = surface(path.graph)
    return max(abs(s.complete(path.free_lengths(t), 2)[2] - rose_mod.escape_closed_form(3, t))
               for t in np.linspace(0.0, 1 - 1e-6, 50))


def _infinite_length(rng):
    """Measured prefix of admissible paths toward a petal of length eps, versus D = 1.

    The target eps is far below double precision, so each path is measured
    only until its first petal reaches ``log(1 + eta)`` with ``eta`` about
    1e-10.  Every path into the eps region must pass such a prefix, so the
    prefix length is a lower estimate of the full path length.
    """
    eps = rose_mod.infinite_length_eps(3, 1.0)
    if not eps < 1e-10:
        raise NumericFailure("expected a target below the prefix cutoff")
    worst = -np.inf
    for _ in range(10):
        eta = 10 ** rng.uniform(-11, -9)
        growth = rng.uniform(2.0, 10.0) * 8 / eta
        profs = (Profile("log", 5.0, -(4.0 - eta)), Profile("log", 5.0, 0.0),
                 Profile("log", 5.0, growth))
        path = MetricPath(rose(3), profs, 1)
        worst = max(worst, 1.0 - path_length(path))
    return max(worst, 0.0)


# separating -------------------------------------------------------------

def _sep_factorization(rng):
    worst = 0.0
    for g, bridge in ((barbell(), "c"), (double_rose(2, 2), "e0")):
        sg = separate(g, bridge)
        for _ in range(50):
            worst = max(worst, factorization_residual(sg, random_lengths(g, rng, 0.05, 3.0)))
    return worst


def _sep_Y_independence(rng):
    worst = 0.0
    for g, bridge in ((barbell(), "c"), (double_rose(2, 2), "e0")):
        sg = separate(g, bridge)
        for _ in range(20):
            ell = random_lengths(g, rng)
            a, b = ell.copy(), ell.copy()
            a[sg.bridge], b[sg.bridge] = 1.0, 5.0
            worst = max(worst, abs(Y_separating(sg, a) - Y_separating(sg, b)))
    return worst


def _sep_stratum_pairing(rng):
    sg = separate(double_rose(2, 2), "e0")
    worst = 0.0
    for _ in range(20):
        whole, parts = stratum_pairing(sg, random_lengths(sg.graph, rng))
        worst = max(worst, abs(whole - parts))
    return worst


def _sep_pairing_sign(rng):
    sg = separate(double_rose(2, 2), "e0")
    r2 = rose(2)
    worst = 0.0
    for _ in range(20):
        ell = np.empty(sg.graph.n_edges)
        ell[list(sg.side1)] = random_unit_point(r2, rng)
        ell[list(sg.side2)] = random_unit_point(r2, rng)
        whole, _ = stratum_pairing(sg, ell)
        worst = max(worst, abs(whole))
        ell[list(sg.side2)] *= rng.uniform(1.1, 2.0)
        if stratum_pairing(sg, ell)[0] < 0:
            worst = max(worst, 1.0)
    return worst


def _sep_bridge_solve(rng):
    sg = separate(double_rose(2, 2), "e0")
    worst = 0.0
    for _ in range(20):
        ell = rng.uniform(1.2, 3.0, sg.graph.n_edges)
        try:
            full = with_bridge(sg, ell)
        except NoCompletion:
            continue
        worst = max(worst, abs(entropy(sg.graph, full) - 1.0))
    return worst


def _sep_decay_shape(rng):
    sg = separate(double_rose(2, 2), "e0")
    path = escape_path_separating(sg, [np.log(3)] * 2, [np.log(4)] * 2)
    ts = 1 - np.geomspace(0.5, 1e-6, 40)
    ratios = np.array([bridge_decay_ratio(sg, path, t) for t in ts])
    if not ratios.min() > 0:
        return np.inf
    return float(ratios.max() / ratios.min())


def _sep_escape_stability(rng):
    sg = separate(double_rose(2, 2), "e0")
    path = escape_path_separating(sg, [np.log(3)] * 2, [np.log(4)] * 2)
    return abs(path_length(path, tol=1e-8) - path_length(path, tol=1e-11))


# registry ---------------------------------------------------------------

def _simple(fn, tol):
    return lambda rng: (fn(rng), tol, "")


SUITES: dict[str, list[tuple[str, Callable]]] = {
    "graph": [
        ("involution", _simple(_graph_involution, 0.0)),
        ("rose_shape", _simple(_graph_rose_shape, 0.0)),
        ("collapse_support", _simple(_graph_collapse_support, 0.0)),
    ],
    "spectral": [
        ("rose_unit_entropy", _simple(_rose_entropy, 1e-10)),
        ("theta_unit_entropy", _simple(_theta_entropy, 1e-10)),
        ("quotient_spectral_radius", _simple(_same_spectral_radius, 1e-10)),
        ("pressure_zero_iff_unit", _simple(_pressure_zero_iff_unit, 1e-8)),
        ("entropy_scaling", _simple(_entropy_scaling, 1e-9)),
        ("entropy_euler_relation", _simple(_entropy_euler, 1e-6)),
        ("grad_pressure_l1_norm", _simple(_grad_pressure_norm, 1e-8)),
    ],
    "cycles": [
        *((f"cycles_vs_det_{kind}[{name}]", _simple(_cycles_vs_det(name, kind), 1e-12))
          for kind in ("full", "quotient") for name in STANDARD_GRAPHS),
        ("collapse_identity", _simple(_collapse_identity, 1e-12)),
        ("sign_facts", _simple(_sign_facts, 1e-9)),
        ("barbell_factorization", _simple(_barbell_factorization, 1e-12)),
        ("rose_ray_single_root", _simple(_rose_ray_root, 0.0)),
        ("F_derivatives_fd", _simple(_F_derivatives, 1e-6)),
        ("pairing_volume", _simple(_pairing_volume, 1e-12)),
        ("exact_polynomials", _simple(_exact_polynomials, 1e-12)),
    ],
    "metrics": [
        ("conformal_relation", _simple(_conformal, 1e-6)),
        ("two_norm_forms", _simple(_two_norm_forms, 1e-6)),
        ("reparametrization", _simple(_reparametrization, 1e-6)),
        ("rank2_rose", _simple(lambda rng: _rank2(rng, "rose"), 1e-6)),
        ("rank2_barbell", _simple(lambda rng: _rank2(rng, "barbell"), 1e-6)),
        ("rank2_theta", _simple(lambda rng: _rank2(rng, "theta"), 1e-6)),
        ("triangle_inequality", _simple(_triangle, 1e-4)),
    ],
    "rose": [
        ("rose_vs_cycles", _simple(_rose_vs_cycles, 1e-12)),
        ("rose_partials", _simple(_rose_partials, 1e-12)),
        ("rose_split", _simple(_rose_split, 1e-12)),
        ("short_petal", _simple(_short_petal, 0.0)),
        ("escape_envelope", _simple(_escape_envelope, 0.0)),
        ("escape_closed_form", _simple(_escape_closed_form, 1e-10)),
        ("infinite_length_prefix", _simple(_infinite_length, 1e-3)),
    ],
    "separating": [
        ("factorization", _simple(_sep_factorization, 1e-11)),
        ("Y_bridge_independence", _simple(_sep_Y_independence, 1e-12)),
        ("stratum_pairing", _simple(_sep_stratum_pairing, 1e-10)),
        ("pairing_sign", _simple(_sep_pairing_sign, 1e-9)),
        ("bridge_solve", _simple(_sep_bridge_solve, 1e-10)),
        ("bridge_decay_shape", _simple(_sep_decay_shape, 100.0)),
        ("escape_stability", _simple(_sep_escape_stability, 1e-4)),
    ],
}


def run_check(suite: str, name: str, fn, seed: int) -> Check:
    try:
        measured, tol, note = fn(_rng(seed, f"{suite}/{name}"))
    except BudgetExceeded as exc:
        return Check(suite, name, float("nan"), float("nan"), "skip", str(exc))
    except NumericFailure as exc:
        return Check(suite, name, float("nan"), float("nan"), "fail", str(exc))
    status = "pass" if measured <= tol else "fail"
    return Check(suite, name, float(measured), float(tol), status, note)


def run_suite(suite: str, seed: int = 0) -> list[Check]:
    names = list(SUITES) if suite == "all" else [suite]
    return [run_check(s, name, fn, seed) for s in names for name, fn in SUITES[s]]
