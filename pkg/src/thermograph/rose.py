"""Closed forms on the unit-entropy moduli of the rose with r petals.

Subset sums over petals are computed through elementary symmetric
polynomials of ``u = exp(-ell)``: the sum over subsets S of
``(a + b|S|) u^S`` equals ``sum_k (a + b k) e_k(u)``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
import os

import numpy as np

from .errors import ConfigError, NoCompletion, NumericFailure
from .graph import rose
from .metrics import MetricPath, Profile, constant, linear, path_length, surface
from .spectral import entropy


def _elementary(u) -> np.ndarray:
    coeffs = np.zeros(len(u) + 1)
    coeffs[0] = 1.0
    for x in u:
        coeffs[1:] = coeffs[1:] + x * coeffs[:-1]
    return coeffs


def _subset_sum(u, a: float, b: float) -> float:
    e = _elementary(np.asarray(u, dtype=float))
    k = np.arange(len(e))
    return float(np.sum((a + b * k) * e))


def _u(ell) -> np.ndarray:
    return np.exp(-np.asarray(ell, dtype=float))


def _drop(ell, *idx) -> np.ndarray:
    keep = [k for k in range(len(ell)) if k not in idx]
    return _u(np.asarray(ell, dtype=float)[keep])


def F_rose(ell) -> float:
    """sum over petal subsets S of (1 - 2|S|) exp(-ell(S))."""
    return _subset_sum(_u(ell), 1.0, -2.0)


def X(ell, i: int) -> float:
    return _subset_sum(_drop(ell, i), 1.0, -2.0)


def Y(ell, i: int) -> float:
    return _subset_sum(_drop(ell, i), 1.0, 2.0)


def X_pair(ell, i: int, j: int) -> float:
    return _subset_sum(_drop(ell, i, j), 1.0, 2.0)


def Y_pair(ell, i: int, j: int) -> float:
    return _subset_sum(_drop(ell, i, j), 3.0, 2.0)


def grad_F_rose(ell) -> np.ndarray:
    u = _u(ell)
    return np.array([u[i] * Y(ell, i) for i in range(len(u))])


def hessian_F_rose(ell) -> np.ndarray:
    u = _u(ell)
    r = len(u)
    h = np.empty((r, r))
    for i in range(r):
        h[i, i] = -u[i] * Y(ell, i)
        for j in range(i + 1, r):
            h[i, j] = h[j, i] = -u[i] * u[j] * Y_pair(ell, i, j)
    return h


def solve_edge(ell, i: int) -> float:
    """Length of petal ``i`` completing the others to unit entropy."""
    x = X(ell, i)
    if not x > 0:
        raise NoCompletion("the other petals already have entropy >= 1")
    return float(np.log(Y(ell, i) / x))


def symmetric_completion(r: int, L: float) -> float:
    """Last petal when the other ``r - 1`` petals all have length ``log L``."""
    if not L > 2 * r - 3:
        raise ConfigError(f"need L > {2 * r - 3}")
    return float(np.log((L + 2 * r - 1) / (L - 2 * r + 3)))


def pair_completion(eps: float) -> float:
    """Partner length of a 2-petal unit-entropy point with one petal ``eps``."""
    return float(np.log((np.exp(eps) + 3) / np.expm1(eps)))


def escape_closed_form(r: int, t: float) -> float:
    return float(np.log((2 * r - 1 - t) / (1 - t)))


def escape_path(r: int, t_max: float = 1 - 1e-8) -> MetricPath:
    """Petals ``1..r-1`` at ``log(2(r - t) - 1)``; the last petal runs off to infinity."""
    if r < 3:
        raise ConfigError("the escape path needs r >= 3")
    profs = tuple([Profile("log", 2 * r - 1, -2.0)] * (r - 1) + [constant(0.0)])
    return MetricPath(rose(r), profs, r - 1, 0.0, t_max, singular_at=1.0)


def escape_bound(r: int) -> float:
    """2 sqrt(C) with C the constant bounding the squared speed by C / (1 - t)."""
    c = 2 * (2 * r - 1) / ((r - 1) ** 2 * np.log(2 * r - 3))
    return float(2 * np.sqrt(c))


def bound_constants(r: int) -> tuple[float, float]:
    return 4.0 * (r - 1), float(2 ** (r + 3) * (2 * r - 1))


def threshold_length(r: int) -> float:
    """Smallest length (rounded up to 1e-6) with both exponential terms at most 1."""
    raw = np.log(max(2**r * (2 * r - 3), 288 * r))
    return float(np.ceil(raw * 1e6) / 1e6)


def lower_bound(r: int, start: float, end: float) -> float:
    """Length lower bound for paths whose shortest non-final petal grows from ``start`` to ``end``."""
    if end < start:
        raise ConfigError("end must not be below start")
    b1, b2 = bound_constants(r)
    return float((np.sqrt(b1 * end + b2) - np.sqrt(b1 * start + b2)) / (2 * np.sqrt(2) * b1))


def rank2_lower_bound(family: str, m0: float, m1: float) -> float:
    """Lower bound for rank-2 paths with monotone volume from ``m0`` to ``m1``."""
    factor = {"rose": 1.0, "barbell": 1 / np.sqrt(2), "theta": 1 / np.sqrt(5)}[family]
    return float(factor * (np.sqrt(m1) - np.sqrt(m0)))


def short_petal_bound(r: int) -> float:
    return float(np.log(4 * r - 5))


def definite_length_bound(eps: float) -> float:
    """Every other petal is longer than this when one petal has length ``eps``."""
    return float(-np.log(np.expm1(eps)))


def infinite_length_eps(r: int, D: float) -> float:
    """An ``eps`` such that reaching a petal of length ``eps`` costs at least ``D``."""
    start = max(short_petal_bound(r), threshold_length(r))
    lo, hi = 1e-300, np.log(2.0)
    if lower_bound(r, start, max(start, definite_length_bound(hi))) >= D:
        return hi
    if lower_bound(r, start, max(start, definite_length_bound(lo))) < D:
        raise NumericFailure(f"D = {D} needs eps below double precision")
    for _ in range(200):
        mid = np.exp(0.5 * (np.log(lo) + np.log(hi)))
        ok = lower_bound(r, start, max(start, definite_length_bound(mid))) >= D
        lo, hi = (mid, hi) if ok else (lo, mid)
        if hi / lo < 1 + 1e-12:
            break
    return float(lo)


def strata_embed(S, ell_S, r: int) -> np.ndarray:
    """Place a point of the smaller rose on petals ``S``; other petals get infinity."""
    S = list(S)
    if len(S) < 2:
        raise ConfigError("strata need at least two finite petals")
    out = np.full(r, np.inf)
    out[S] = np.asarray(ell_S, dtype=float)
    return out


def extended_entropy(ell) -> float:
    """Entropy of the finite petals; infinite petals are dropped."""
    ell = np.asarray(ell, dtype=float)
    fin = ell[np.isfinite(ell)]
    if len(fin) < 2:
        raise ConfigError("need at least two finite petals")
    return entropy(rose(len(fin)), fin)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("THERMOGRAPH_THREADS", "1")))
    except ValueError:
        return 1


def slice_point(r: int, i: int, eps: float, free, dep: int) -> np.ndarray:
    ell = np.array(free, dtype=float)
    ell[i] = eps
    ell[dep] = solve_edge(ell, dep)
    return ell


def slice_path(ell, i: int, t_max: float = 40.0) -> MetricPath:
    """Grow every petal but ``i`` and the shortest other one at unit rate."""
    r = len(ell)
    others = [k for k in range(r) if k != i]
    j = min(others, key=lambda k: (ell[k], k))
    profs = tuple(constant(ell[k]) if k in (i, j) else linear(ell[k], ell[k] + t_max)
                  for k in range(r))
    return MetricPath(rose(r), profs, j, 0.0, 1.0)


def _slice_distance(ell, i: int) -> tuple[int, float]:
    if len(ell) == 2:
        return 1 - i, 0.0
    path = slice_path(ell, i)
    return path.dependent, path_length(path, tol=1e-8)


def sample_slice(r: int, i: int, eps: float, n: int, rng) -> list:
    """Points with petal ``i`` pinned at ``eps``; the last other petal is solved."""
    dep = max(k for k in range(r) if k != i)
    lo, hi = np.log(np.log(2 * r - 3) + 1e-3), np.log(20.0)
    pts, tries = [], 0
    while len(pts) < n:
        tries += 1
        if tries > 1000 * n:
            raise NumericFailure("slice sampling keeps failing")
        free = np.exp(rng.uniform(lo, hi, r))
        try:
            pts.append(slice_point(r, i, eps, free, dep))
        except NoCompletion:
            continue
    return pts


def slice_diameter(r: int, i: int, eps: float, samples: int = 16, seed: int = 0):
    """Upper bound on the diameter of the slice where petal ``i`` has length ``eps``.

    Every sample is joined to a two-petal stratum point along the slice path,
    and stratum points are joined through the symmetric slice point, so the
    bound is twice the largest sample distance plus twice the hub distance.
    Returns ``(bound, 1 / -log(exp(eps) - 1))``.
    """
    if not 0 < eps < np.log(2):
        raise ConfigError("need 0 < eps < log 2")
    shape = 1.0 / definite_length_bound(eps)
    if r == 2:
        return 0.0, shape
    rng = np.random.default_rng(seed)
    # the symmetric point (all other petals equal) is always included
    pts = [_symmetric_slice_point(r, i, eps)] + sample_slice(r, i, eps, samples, rng)
    with ThreadPoolExecutor(_workers()) as pool:
        dists = list(pool.map(lambda p: _slice_distance(p, i), pts))
    hub = dists[0][1]
    # any two points: up to a stratum point, across via the symmetric point, back down
    best = 2 * max(d for _, d in dists) + 2 * hub
    return best, shape


def _symmetric_slice_point(r: int, i: int, eps: float) -> np.ndarray:
    from scipy.optimize import brentq

    def resid(x):
        ell = np.full(r, x)
        ell[i] = eps
        return F_rose(ell)

    x = brentq(resid, definite_length_bound(eps) - 1e-9, 200.0, xtol=1e-14, rtol=1e-15)
    ell = np.full(r, x)
    ell[i] = eps
    dep = max(k for k in range(r) if k != i)
    ell[dep] = solve_edge(ell, dep)
    return ell


def fit_decay(eps_values, diameters) -> tuple[float, float]:
    """Least-squares constant C in diam ~ C / -log(exp(eps) - 1), and max misfit factor."""
    shape = np.array([1.0 / definite_length_bound(e) for e in eps_values])
    d = np.asarray(diameters, dtype=float)
    c = float(np.exp(np.mean(np.log(d / shape))))
    ratio = d / (c * shape)
    return c, float(max(ratio.max(), 1 / ratio.min()))
