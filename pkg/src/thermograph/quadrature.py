"""Adaptive composite Gauss-Legendre integration."""
import numpy as np

from .errors import NumericFailure

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(16)


def _panel(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.array([f(mid + half * x) for x in _NODES])
    return half * (_WEIGHTS @ vals)


def gauss_legendre_adaptive(f, a, b, tol=1e-9, max_depth=40, initial_panels=4, noise=1e-6,
                             noise_depth=20):
    """Integrate ``f`` on ``[a, b]`` by bisecting panels until halves agree.

    A panel is accepted when its two halves differ from the whole by at most
    ``tol`` relative to the running estimate of the integral, prorated by width.
    Below ``noise_depth`` bisections a panel is also accepted once the
    disagreement is within ``noise`` of its own value: integrands evaluated
    near a chart boundary carry rounding noise that no bisection removes.
    """
    if a == b:
        return 0.0
    edges = np.linspace(a, b, initial_panels + 1)
    work = [(lo, hi, _panel(f, lo, hi), 0) for lo, hi in zip(edges[:-1], edges[1:])]
    scale = abs(sum(w[2] for w in work))
    width = abs(b - a)
    total = 0.0
    while work:
        lo, hi, whole, depth = work.pop()
        mid = 0.5 * (lo + hi)
        left, right = _panel(f, lo, mid), _panel(f, mid, hi)
        err = abs(left + right - whole)
        if (err <= tol * max(scale, 1e-300) * abs(hi - lo) / width
                or (depth >= noise_depth and err <= noise * abs(left + right))
                or err <= 1e-300):
            total += left + right
        elif depth >= max_depth:
            raise NumericFailure(f"quadrature did not converge on [{lo}, {hi}]")
        else:
            work.append((mid, hi, right, depth + 1))
            work.append((lo, mid, left, depth + 1))
    return float(total)
