"""Entropy and pressure norms on the unit-entropy surface and path lengths.

Points on the surface are length vectors with ``F(ell) = 0``.  Paths are
charted by giving every edge but one an explicit profile in ``t`` and solving
the remaining (dependent) edge from ``F = 0``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cycles import _simplex_lengths, enumerate_cycles
from .errors import ConfigError, NoCompletion, NumericFailure
from .graph import Graph
from .quadrature import gauss_legendre_adaptive
from .spectral import normalize_unit_entropy

log = logging.getLogger(__name__)

RADICAND_SLACK = 1e-10


class Surface:
    """Cycle-sum evaluations of F and its derivatives for one graph."""

    def __init__(self, graph: Graph, kind: str = "quotient"):
        self.graph = graph
        self.kind = kind
        self.cx = enumerate_cycles(graph, kind)
        self.profiles = self.cx.profiles
        self.coeffs = self.cx.coeffs

    def terms(self, ell):
        u = np.exp(-np.asarray(ell, dtype=float))
        return self.coeffs * np.prod(u[None, :] ** self.profiles, axis=1)

    def F(self, ell) -> float:
        return float(self.terms(ell).sum())

    def grad(self, ell) -> np.ndarray:
        return -(self.terms(ell) @ self.profiles)

    def hessian(self, ell) -> np.ndarray:
        t = self.terms(ell)
        return (self.profiles * t[:, None]).T @ self.profiles

    def pairing_volume(self, ell) -> float:
        t = self.terms(ell)
        lv = _simplex_lengths(self.cx, ell)
        with np.errstate(invalid="ignore"):
            return float(-np.sum(np.where(t != 0, lv * t, 0.0)))

    def pairing_hessian(self, ell, v) -> float:
        pv = self.profiles @ np.asarray(v, dtype=float)
        return float(np.sum(pv**2 * self.terms(ell)))

    def complete(self, ell, dep: int) -> np.ndarray:
        """Fill in coordinate ``dep`` so that F vanishes.

        F is a polynomial of degree at most 2 in ``u = exp(-ell[dep])``; the
        completion is its smallest root in ``(0, 1)``.
        """
        ell = np.array(ell, dtype=float)
        ell[dep] = np.inf
        u = np.exp(-ell)
        u[dep] = 1.0
        t = self.coeffs * np.prod(u[None, :] ** self.profiles, axis=1)
        power = self.profiles[:, dep]
        alpha = [float(t[power == k].sum()) for k in range(3)]
        if np.any(power > 2):
            raise NumericFailure("unexpected multiplicity above 2")
        root = _smallest_root(*alpha)
        if root is None:
            raise NoCompletion(f"no unit-entropy completion of edge {self.graph.edges[dep]}")
        ell[dep] = -np.log(root)
        return ell


def _smallest_root(a0, a1, a2):
    if not a0 > 0:
        return None
    scale = abs(a0) + abs(a1) + abs(a2)
    if abs(a2) <= 1e-15 * scale:
        roots = [-a0 / a1] if a1 < 0 else []
    else:
        disc = a1 * a1 - 4 * a0 * a2
        if disc < 0:
            return None
        q = -0.5 * (a1 + np.copysign(np.sqrt(disc), a1))
        roots = [q / a2, a0 / q] if q != 0 else []
    roots = sorted(r for r in roots if 0 < r <= 1.0 + 1e-12)
    if not roots:
        return None
    u = min(roots[0], 1.0)
    for _ in range(2):
        f = a0 + u * (a1 + u * a2)
        df = a1 + 2 * a2 * u
        if df == 0:
            break
        step = f / df
        if not 0 < u - step <= 1.0:
            break
        u -= step
    if u >= 1.0:
        return None
    return u


@lru_cache(maxsize=None)
def surface(graph: Graph, kind: str = "quotient") -> Surface:
    return Surface(graph, kind)


@dataclass(frozen=True)
class TangentVector:
    base: np.ndarray
    components: np.ndarray


def tangent_project(graph: Graph, ell, w, tol: float = 1e-8) -> TangentVector:
    """Remove the component of ``w`` along the surface normal at ``ell``."""
    s = surface(graph)
    ell = np.asarray(ell, dtype=float)
    g = s.grad(ell)
    if abs(s.F(ell)) > tol:
        raise ConfigError("base point is not on the unit-entropy surface")
    gg = g @ g
    if gg == 0:
        raise NumericFailure("vanishing gradient of F")
    w = np.asarray(w, dtype=float)
    return TangentVector(ell, w - (w @ g) / gg * g)


def _components(v):
    return np.asarray(getattr(v, "components", v), dtype=float)


def _clamped_sqrt(num: float, den: float, scale: float) -> float:
    rad = num / den
    if rad < 0:
        if rad < -RADICAND_SLACK * max(1.0, scale / abs(den)):
            raise NumericFailure(f"negative squared norm {rad:.3e}; vector not tangent?")
        log.debug("clamped radicand %.3e to 0", rad)
        rad = 0.0
    return float(np.sqrt(rad))


def _norm(graph: Graph, ell, v, metric: str, check: bool = True) -> float:
    s = surface(graph)
    ell = np.asarray(ell, dtype=float)
    v = _components(v)
    terms = s.terms(ell)
    pv = s.profiles @ v
    if check:
        g = -(terms @ s.profiles)
        if abs(v @ g) > 1e-9 * max(1.0, np.abs(v) @ np.abs(g)):
            raise ConfigError("vector is not tangent to the unit-entropy surface")
    num = -float(np.sum(pv**2 * terms))
    scale = float(np.sum(pv**2 * np.abs(terms)))
    if metric == "entropy":
        den = s.pairing_volume(ell)
    elif metric == "pressure":
        den = float(np.abs(terms @ s.profiles).sum())
    else:
        raise ConfigError(f"unknown metric {metric!r}")
    if den <= 0:
        raise NumericFailure("non-positive normalizer; base point off the surface?")
    return _clamped_sqrt(num, den, scale)


def entropy_norm(graph: Graph, ell, v) -> float:
    """sqrt(-<v, H v> / <ell, grad F>) with H, grad F from cycle sums."""
    return _norm(graph, ell, v, "entropy")


def pressure_norm(graph: Graph, ell, v) -> float:
    """sqrt(-<v, H v> / |grad F|_1)."""
    return _norm(graph, ell, v, "pressure")


def acceleration_norm_sq(graph: Graph, ell, acc, metric: str = "entropy") -> float:
    """Squared speed from the acceleration of a surface path: <acc, grad F> / normalizer."""
    s = surface(graph)
    g = s.grad(ell)
    den = s.pairing_volume(ell) if metric == "entropy" else float(np.abs(g).sum())
    return float(np.asarray(acc, dtype=float) @ g / den)


@dataclass(frozen=True)
class Profile:
    """One edge's length as a function of t: constant, linear or log-affine in ``t**power``."""

    kind: str
    a: float
    b: float = 0.0
    power: int = 1

    def _inner(self, t):
        return self.a + self.b * t**self.power

    def _dinner(self, t):
        return self.b * self.power * t ** (self.power - 1)

    def value(self, t):
        if self.kind == "constant":
            return self.a
        if self.kind == "linear":
            return self._inner(t)
        if self.kind == "log":
            return np.log(self._inner(t))
        raise ConfigError(f"unknown profile kind {self.kind!r}")

    def deriv(self, t):
        if self.kind == "constant":
            return 0.0
        if self.kind == "linear":
            return self._dinner(t)
        return self._dinner(t) / self._inner(t)

    def reparametrized(self, power: int) -> "Profile":
        """The same curve traversed in ``t**power``."""
        return Profile(self.kind, self.a, self.b, self.power * power)


def constant(c):
    return Profile("constant", float(c))


def linear(start, end, t0=0.0, t1=1.0):
    slope = (end - start) / (t1 - t0)
    return Profile("linear", start - slope * t0, slope)


@dataclass(frozen=True)
class MetricPath:
    graph: Graph
    profiles: tuple  # one per edge; the dependent edge's entry is ignored
    dependent: int
    t0: float = 0.0
    t1: float = 1.0
    singular_at: float | None = None  # integrable 1/sqrt singularity location

    def free_lengths(self, t) -> np.ndarray:
        return np.array([np.nan if k == self.dependent else p.value(t)
                         for k, p in enumerate(self.profiles)], dtype=float)

    def free_velocity(self, t) -> np.ndarray:
        return np.array([0.0 if k == self.dependent else p.deriv(t)
                         for k, p in enumerate(self.profiles)], dtype=float)


def solve_dependent(path: MetricPath, t: float) -> np.ndarray:
    return surface(path.graph).complete(path.free_lengths(t), path.dependent)


def path_point(path: MetricPath, t: float):
    """Length vector and velocity at ``t``; the dependent speed comes from tangency."""
    s = surface(path.graph)
    ell = s.complete(path.free_lengths(t), path.dependent)
    v = path.free_velocity(t)
    g = s.grad(ell)
    gd = g[path.dependent]
    if not gd > 0:
        raise NumericFailure("dependent edge has vanishing partial derivative")
    v[path.dependent] = -(v @ g) / gd
    return ell, v


def path_length(path: MetricPath, metric: str = "entropy", tol: float = 1e-8) -> float:
    def speed(t):
        ell, v = path_point(path, t)
        return _norm(path.graph, ell, v, metric, check=False)

    if path.singular_at is None:
        return gauss_legendre_adaptive(speed, path.t0, path.t1, tol=tol)
    # t = c - s**2 removes a 1/sqrt(c - t) singularity
    c = path.singular_at
    s0, s1 = np.sqrt(c - path.t1), np.sqrt(c - path.t0)
    return gauss_legendre_adaptive(lambda x: 2 * x * speed(c - x * x), s0, s1, tol=tol)


def segment(graph: Graph, start, end, dependent: int) -> MetricPath:
    """Path whose free coordinates move linearly from ``start`` to ``end``."""
    profs = tuple(constant(a) if a == b else linear(a, b)
                  for a, b in zip(np.asarray(start, float), np.asarray(end, float)))
    return MetricPath(graph, profs, dependent)


def _polyline_length(graph, nodes, dep, metric, tol):
    return sum(path_length(segment(graph, a, b, dep), metric, tol)
               for a, b in zip(nodes[:-1], nodes[1:]))


def distance_upper_bound(graph: Graph, ell_a, ell_b, budget: int = 10, n_nodes: int = 5,
                         metric: str = "entropy", dependent: int | None = None,
                         tol: float = 1e-8) -> float:
    """Length of the shortest polyline path found between two surface points.

    Starts from the straight segment in ``u = exp(-ell)`` coordinates with
    every node pushed back onto the surface, then runs ``budget`` sweeps of
    coordinate descent on the interior nodes.  The result is the length of an
    explicit path and therefore an upper bound on the distance.
    """
    s = surface(graph)
    ell_a = np.asarray(ell_a, dtype=float)
    ell_b = np.asarray(ell_b, dtype=float)
    if np.array_equal(ell_a, ell_b):
        return 0.0
    deps = [dependent] if dependent is not None else list(range(graph.n_edges))[::-1]
    nodes = dep = None
    for d in deps:
        try:
            ua, ub = np.exp(-ell_a), np.exp(-ell_b)
            cand = [ell_a]
            for x in np.linspace(0, 1, n_nodes)[1:-1]:
                cand.append(s.complete(-np.log((1 - x) * ua + x * ub), d))
            cand.append(ell_b)
            _polyline_length(graph, cand, d, metric, 1e-6)
            nodes, dep = cand, d
            break
        except NumericFailure:
            continue
    if nodes is None:
        mid = normalize_unit_entropy(graph, 0.5 * (ell_a + ell_b))
        for d in deps:
            try:
                nodes = [ell_a, mid, ell_b]
                _polyline_length(graph, nodes, d, metric, 1e-6)
                dep = d
                break
            except NumericFailure:
                nodes = None
        if nodes is None:
            raise NumericFailure("could not build an admissible initial path")

    def local(i, node):
        return (path_length(segment(graph, nodes[i - 1], node, dep), metric, 1e-6)
                + path_length(segment(graph, node, nodes[i + 1], dep), metric, 1e-6))

    step = 0.1 * max(1e-3, float(np.max(np.abs(ell_a - ell_b))))
    for _ in range(budget):
        improved = False
        for i in range(1, len(nodes) - 1):
            best = local(i, nodes[i])
            for k in range(graph.n_edges):
                if k == dep:
                    continue
                for sgn in (1.0, -1.0):
                    trial = nodes[i].copy()
                    trial[k] += sgn * step
                    if trial[k] <= 0:
                        continue
                    try:
                        trial = s.complete(trial, dep)
                        val = local(i, trial)
                    except NumericFailure:
                        continue
                    if val < best:
                        best, nodes[i], improved = val, trial, True
                        break
        if not improved:
            step *= 0.5
    return _polyline_length(graph, nodes, dep, metric, tol)
