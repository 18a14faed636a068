"""Transition matrices, Perron roots, pressure, entropy and the pressure gradient."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigError, NumericFailure
from .graph import Graph

MAX_EDGES = 64


@dataclass(frozen=True)
class WeightedTransitionMatrix:
    labels: tuple
    row_edges: tuple  # positive edge index carried by each row
    counts: np.ndarray = field(compare=False)  # unweighted legal-turn counts
    entries: np.ndarray = field(compare=False)
    kind: str = "full"

    def dump(self) -> str:
        rows = [" ".join(repr(float(x)) for x in row) for row in self.entries]
        return "\n".join([" ".join(self.labels)] + rows) + "\n"


def _lengths(graph: Graph, f) -> np.ndarray:
    if f is None:
        return np.zeros(graph.n_edges)
    f = np.asarray(f, dtype=float)
    if f.shape != (graph.n_edges,):
        raise ConfigError(f"expected {graph.n_edges} edge values, got shape {f.shape}")
    return f


@lru_cache(maxsize=None)
def _full_counts(graph: Graph) -> np.ndarray:
    if graph.n_edges > MAX_EDGES:
        raise ConfigError(f"graphs with more than {MAX_EDGES} edges are not supported")
    org, ter = graph.origin, graph.terminus
    n = len(org)
    a = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if ter[i] == org[j] and j != (i ^ 1):
                a[i, j] = 1.0
    return a


def has_involution_symmetry(graph: Graph) -> bool:
    """True when some vertex bijection sends every edge to its reverse."""
    phi = {}
    for o, t in graph.ends:
        for a, b in ((o, t), (t, o)):
            if phi.setdefault(a, b) != b:
                return False
    return len(set(phi.values())) == len(phi)


@lru_cache(maxsize=None)
def _quotient_counts(graph: Graph):
    full = _full_counts(graph)
    names = graph.directed_edges
    if has_involution_symmetry(graph):
        # rows are pair representatives, columns sum over {e, bar e}
        reps = list(range(0, full.shape[0], 2))
        counts = full[reps][:, 0::2] + full[reps][:, 1::2]
        labels = tuple(f"{e}{e}~" for e in graph.edges)
        return labels, tuple(range(graph.n_edges)), counts
    keep, labels, row_edges, groups = [], [], [], []
    for k, e in enumerate(graph.edges):
        if graph.is_loop(k):
            keep.append(2 * k)
            groups.append([2 * k, 2 * k + 1])
            labels.append(f"{e}{e}~")
            row_edges.append(k)
        else:
            for d in (2 * k, 2 * k + 1):
                keep.append(d)
                groups.append([d])
                labels.append(names[d])
                row_edges.append(k)
    counts = np.array([[full[r, g].sum() for g in groups] for r in keep])
    return tuple(labels), tuple(row_edges), counts


def transition_matrix(graph: Graph, f=None) -> WeightedTransitionMatrix:
    """Full transition matrix with row ``e`` weighted by ``exp(-f(e))``."""
    f = _lengths(graph, f)
    counts = _full_counts(graph)
    row_edges = tuple(k // 2 for k in range(counts.shape[0]))
    w = np.exp(-f[list(row_edges)])
    return WeightedTransitionMatrix(graph.directed_edges, row_edges, counts,
                                    counts * w[:, None], "full")


def quotient_matrix(graph: Graph, f=None) -> WeightedTransitionMatrix:
    """Merged-pair transition matrix with the same Perron root as the full one."""
    f = _lengths(graph, f)
    labels, row_edges, counts = _quotient_counts(graph)
    w = np.exp(-f[list(row_edges)])
    return WeightedTransitionMatrix(labels, row_edges, counts, counts * w[:, None], "quotient")


def perron(M, tol: float = 1e-13, max_squarings: int = 64):
    """Perron root with right and left eigenvectors of a nonnegative matrix.

    Powers of ``M + sigma I`` are formed by repeated squaring, which is power
    iteration run ``2**k`` steps at a time; the shift removes periodicity.
    """
    a = np.asarray(getattr(M, "entries", M), dtype=float)
    n = a.shape[0]
    sigma = 1e-3 * a.sum(axis=1).max()
    if sigma == 0.0:
        ones = np.ones(n) / n
        return 0.0, ones, ones
    b = a + sigma * np.eye(n)
    p = b / np.abs(b).max()
    prev = None
    for _ in range(max_squarings):
        p = p @ p
        p /= np.abs(p).max()
        x = p.sum(axis=1)
        lam = x @ (b @ x) / (x @ x)
        if prev is not None and abs(lam - prev) <= tol * abs(lam):
            # a few plain steps polish the vector direction
            for _ in range(3):
                x = b @ x
                x /= np.abs(x).max()
            lam = x @ (b @ x) / (x @ x)
            y = p.sum(axis=0)
            for _ in range(3):
                y = y @ b
                y /= np.abs(y).max()
            return lam - sigma, x, y
        prev = lam
    raise NumericFailure("power iteration did not converge")


def spectral_radius(M) -> float:
    return float(perron(M)[0])


def pressure(graph: Graph, f) -> float:
    """log of the Perron root of the matrix row-weighted by ``exp(f)``."""
    f = _lengths(graph, f)
    return float(np.log(spectral_radius(quotient_matrix(graph, -f))))


def grad_pressure(graph: Graph, lengths) -> np.ndarray:
    """Gradient of the pressure at ``-lengths``; positive with unit L1 norm."""
    m = quotient_matrix(graph, lengths)
    _, v, w = perron(m)
    share = w * v / (w @ v)
    return np.bincount(np.array(m.row_edges), weights=share, minlength=graph.n_edges)


def entropy(graph: Graph, lengths) -> float:
    """The t > 0 where the pressure of ``-t * lengths`` vanishes."""
    ell = np.asarray(lengths, dtype=float)
    if ell.shape != (graph.n_edges,) or np.any(ell <= 0) or not np.all(np.isfinite(ell)):
        raise ConfigError("entropy needs finite positive lengths, one per edge")
    if graph.euler_characteristic() >= 0:
        raise ConfigError("entropy needs a graph of rank at least 2")

    def g(t):
        return pressure(graph, -t * ell)

    lo = hi = 1.0
    if g(1.0) > 0:
        while g(hi) > 0:
            lo, hi = hi, 2 * hi
            if hi > 1e300:
                raise NumericFailure("could not bracket the entropy")
    else:
        while g(lo) <= 0:
            hi, lo = lo, lo / 2
            if lo < 1e-300:
                raise NumericFailure("could not bracket the entropy")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(5):
        val = g(t)
        if val == 0.0:
            break
        slope = -ell @ grad_pressure(graph, t * ell)
        step = val / slope
        t_new = t - step
        if not lo <= t_new <= hi:
            break
        t = t_new
        if abs(step) <= 1e-16 * t:
            break
    return float(t)


def normalize_unit_entropy(graph: Graph, lengths) -> np.ndarray:
    ell = np.asarray(lengths, dtype=float)
    return entropy(graph, ell) * ell
