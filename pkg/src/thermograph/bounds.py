"""Random monotone test paths for the length lower bounds."""
from __future__ import annotations

import numpy as np

from .errors import ConfigError, NumericFailure
from .graph import barbell, rose, theta
from .metrics import MetricPath, constant, linear, path_length, surface
from .rose import lower_bound, rank2_lower_bound, threshold_length

# free coordinates and the dependent edge of each rank-2 chart
RANK2_CHARTS = {
    "rose": (rose(2), (0,), 1),
    "barbell": (barbell(), (0, 2), 1),
    "theta": (theta(2), (0, 1), 2),
}

GRID = np.linspace(0.0, 1.0, 65)


def rank2_volume(family: str, ell) -> float:
    """Sum of the lengths with the separating edge of the barbell counted twice."""
    ell = np.asarray(ell, dtype=float)
    if family == "barbell":
        return float(ell[0] + ell[1] + 2 * ell[2])
    if family in ("rose", "theta"):
        return float(ell.sum())
    raise ConfigError(f"unknown rank-2 family {family!r}")


def _chart_path(graph, free, dep, start, end) -> MetricPath:
    profs = [constant(0.0)] * graph.n_edges
    for k, a, b in zip(free, start, end):
        profs[k] = constant(a) if a == b else linear(a, b)
    return MetricPath(graph, tuple(profs), dep)


def _volumes(path: MetricPath, family: str) -> np.ndarray:
    s = surface(path.graph)
    return np.array([rank2_volume(family, s.complete(path.free_lengths(t), path.dependent))
                     for t in GRID])


def random_rank2_path(family: str, rng, min_volume: float = 4.0, tries: int = 1000):
    """A linear chart path with monotone volume starting at volume >= ``min_volume``.

    Returns ``(path, m0, m1)``.
    """
    graph, free, dep = RANK2_CHARTS[family]
    for _ in range(tries):
        start = np.exp(rng.uniform(np.log(1e-3), np.log(6.0), len(free)))
        end = np.exp(rng.uniform(np.log(1e-3), np.log(6.0), len(free)))
        path = _chart_path(graph, free, dep, start, end)
        try:
            m = _volumes(path, family)
        except NumericFailure:
            continue
        steps = np.diff(m)
        monotone = np.all(steps >= -1e-6) or np.all(steps <= 1e-6)
        if monotone and m[0] >= min_volume and m[-1] >= min_volume:
            return path, float(m[0]), float(m[-1])
    raise NumericFailure(f"no admissible {family} path after {tries} tries")


def rank2_check(family: str, rng, tol: float = 1e-8):
    """Measured length and lower bound for one random path."""
    path, m0, m1 = random_rank2_path(family, rng)
    return path_length(path, tol=tol), rank2_lower_bound(family, min(m0, m1), max(m0, m1))


def random_sqrt_bound_path(r: int, rng, span: float = 10.0) -> MetricPath:
    """Petal 1 is the shortest of the first ``r - 1``, grows, and starts at the threshold.

    The remaining free petals start at or above petal 1 and grow at least as
    fast, so the minimum condition holds along the whole path.
    """
    if r < 3:
        raise ConfigError("need r >= 3")
    lo = threshold_length(r) + rng.uniform(0.0, 2.0)
    hi = lo + rng.uniform(0.1, span)
    start = np.empty(r - 1)
    end = np.empty(r - 1)
    start[0], end[0] = lo, hi
    start[1:] = lo + rng.uniform(0.0, 3.0, r - 2)
    end[1:] = start[1:] + (hi - lo) * rng.uniform(1.0, 2.0, r - 2)
    return _chart_path(rose(r), range(r - 1), r - 1, start, end)


def sqrt_bound_check(r: int, rng, tol: float = 1e-8):
    """Measured length and the square-root lower bound for one random path."""
    path = random_sqrt_bound_path(r, rng)
    first = path.profiles[0]
    petals = np.array([path.free_lengths(t)[: r - 1] for t in GRID])
    if not np.all(petals.argmin(axis=1) == 0):
        raise NumericFailure("petal 1 stopped being the shortest")
    return path_length(path, tol=tol), lower_bound(r, first.value(0.0), first.value(1.0))
