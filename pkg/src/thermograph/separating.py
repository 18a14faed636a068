"""Graphs split by a bridge: factorization of F, bridge solves and escape paths."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cycles import F_via_det, enumerate_cycles
from .errors import ConfigError, NoCompletion
from .graph import Graph, build_graph
from .metrics import MetricPath, Profile, constant, linear, path_length, surface


@dataclass(frozen=True)
class SeparatedGraph:
    graph: Graph
    bridge: int
    side1: tuple  # edge indices on the bridge's origin side
    side2: tuple
    graph1: Graph
    graph2: Graph


def _component(graph: Graph, start, skip: int) -> set:
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for k, (o, t) in enumerate(graph.ends):
            if k == skip:
                continue
            for a, b in ((o, t), (t, o)):
                if a == v and b not in seen:
                    seen.add(b)
                    stack.append(b)
    return seen


def separate(graph: Graph, bridge) -> SeparatedGraph:
    k0 = graph.edge_index(bridge) if isinstance(bridge, str) else int(bridge)
    o, t = graph.ends[k0]
    comp = _component(graph, o, k0)
    if t in comp:
        raise ConfigError(f"edge {graph.edges[k0]!r} does not separate the graph")
    sides = []
    for verts in (comp, set(graph.vertices) - comp):
        idx = tuple(k for k, (a, _) in enumerate(graph.ends) if k != k0 and a in verts)
        sub = build_graph([v for v in graph.vertices if v in verts],
                          [(graph.edges[k],) + graph.ends[k] for k in idx],
                          name=f"{graph.name}[{','.join(sorted(verts))}]", strict=False)
        sides.append((idx, sub))
    (s1, g1), (s2, g2) = sides
    return SeparatedGraph(graph, k0, s1, s2, g1, g2)


def side_F(sg: SeparatedGraph, ell):
    """Full F of each side evaluated at its own lengths."""
    ell = np.asarray(ell, dtype=float)
    c1 = enumerate_cycles(sg.graph1, "full")
    c2 = enumerate_cycles(sg.graph2, "full")
    from .cycles import F_via_cycles
    return F_via_cycles(c1, ell[list(sg.side1)]), F_via_cycles(c2, ell[list(sg.side2)])


def Y_separating(sg: SeparatedGraph, ell) -> float:
    """Minus the signed sum over simplices crossing the bridge, with the bridge weight removed."""
    cx = enumerate_cycles(sg.graph, "full")
    ell = np.array(ell, dtype=float)
    ell[sg.bridge] = 0.0
    u = np.exp(-ell)
    sel = cx.profiles[:, sg.bridge] == 2
    if np.any((cx.profiles[:, sg.bridge] != 0) & ~sel):
        raise ConfigError("bridge visited once by some simplex; not separating")
    terms = cx.coeffs[sel] * np.prod(u[None, :] ** cx.profiles[sel], axis=1)
    return float(-terms.sum())


def factorization_residual(sg: SeparatedGraph, ell) -> float:
    ell = np.asarray(ell, dtype=float)
    f1, f2 = side_F(sg, ell)
    u0 = np.exp(-ell[sg.bridge])
    return abs(F_via_det(sg.graph, ell, "full") - (f1 * f2 - u0 * u0 * Y_separating(sg, ell)))


def solve_bridge(sg: SeparatedGraph, ell) -> float:
    """Bridge length giving unit entropy; ``ell`` supplies both sides."""
    f1, f2 = side_F(sg, ell)
    if not (f1 > 0 and f2 > 0):
        raise NoCompletion("a side is already at or over unit entropy")
    y = Y_separating(sg, ell)
    if not y > f1 * f2:
        raise NoCompletion("sides too short for a positive bridge")
    return float(0.5 * np.log(y / (f1 * f2)))


def with_bridge(sg: SeparatedGraph, ell) -> np.ndarray:
    out = np.array(ell, dtype=float)
    out[sg.bridge] = solve_bridge(sg, out)
    return out


def stratum_pairing(sg: SeparatedGraph, ell):
    """Both sides of the pairing identity at a point with infinite bridge."""
    from .cycles import pairing_volume
    ell = np.array(ell, dtype=float)
    ell[sg.bridge] = np.inf
    f1, f2 = side_F(sg, ell)
    p1 = pairing_volume(enumerate_cycles(sg.graph1, "full"), ell[list(sg.side1)])
    p2 = pairing_volume(enumerate_cycles(sg.graph2, "full"), ell[list(sg.side2)])
    whole = pairing_volume(enumerate_cycles(sg.graph, "full"), ell)
    return whole, f2 * p1 + f1 * p2


def escape_path_separating(sg: SeparatedGraph, target1, side2, t_max: float = 1 - 1e-8) -> MetricPath:
    """Side-1 edges at ``log(x + 1 - t)`` toward the unit-entropy target ``log x``; bridge solved."""
    profs = [constant(0.0)] * sg.graph.n_edges
    for k, x in zip(sg.side1, np.exp(np.asarray(target1, dtype=float))):
        profs[k] = Profile("log", x + 1.0, -1.0)
    for k, val in zip(sg.side2, np.asarray(side2, dtype=float)):
        profs[k] = constant(val)
    return MetricPath(sg.graph, tuple(profs), sg.bridge, 0.0, t_max, singular_at=1.0)


def bridge_decay_ratio(sg: SeparatedGraph, path: MetricPath, t: float) -> float:
    """exp(-2 * bridge) / (1 - t) along an escape path."""
    ell = surface(sg.graph).complete(path.free_lengths(t), sg.bridge)
    return float(np.exp(-2 * ell[sg.bridge]) / (1 - t))


def shortcut_loop(sg: SeparatedGraph, side1, side2_a, side2_b, growth: float):
    """Three linear legs on side 2 with side 1 fixed and the bridge solved:
    grow from A by ``growth``, slide to B (grown), shrink back to B."""
    n = sg.graph.n_edges
    s1 = np.asarray(side1, dtype=float)
    a = np.asarray(side2_a, dtype=float)
    b = np.asarray(side2_b, dtype=float)
    stops = [a, a + growth, b + growth, b]
    legs = []
    for p, q in zip(stops[:-1], stops[1:]):
        profs = [constant(0.0)] * n
        for k, x in zip(sg.side1, s1):
            profs[k] = constant(x)
        for k, x, y in zip(sg.side2, p, q):
            profs[k] = constant(x) if x == y else linear(x, y)
        legs.append(MetricPath(sg.graph, tuple(profs), sg.bridge))
    return legs


def shortcut_experiment(sg: SeparatedGraph, deltas, side1_unit, side2_a, side2_b,
                        growth: float = 1.0, tol: float = 1e-8):
    """Loop lengths with side 1 at ``(1 + delta)`` times a unit-entropy point.

    Returns rows ``(delta, leg lengths..., total, max bridge length)``.
    """
    rows = []
    for d in deltas:
        if not d > 0:
            raise ConfigError("delta must be positive")
        side1 = (1.0 + d) * np.asarray(side1_unit, dtype=float)
        legs = shortcut_loop(sg, side1, side2_a, side2_b, growth)
        lengths = [path_length(p, tol=tol) for p in legs]
        bridge = max(surface(sg.graph).complete(p.free_lengths(t), sg.bridge)[sg.bridge]
                     for p in legs for t in (0.0, 0.5, 1.0))
        rows.append((float(d), *lengths, float(sum(lengths)), float(bridge)))
    return rows


def aitken_limit(values) -> float:
    """Limit of a geometrically converging sequence from its last three terms."""
    x0, x1, x2 = values[-3:]
    den = (x2 - x1) - (x1 - x0)
    if den == 0:
        return float(x2)
    return float(x2 - (x2 - x1) ** 2 / den)
