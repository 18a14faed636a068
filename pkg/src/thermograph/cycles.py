"""Simple cycles of the turn digraph, the cycle complex, and F with its derivatives.

F is evaluated as an alternating sum over collections of pairwise disjoint
simple cycles.  Terms are grouped by their edge multiplicity profile, so an
evaluation is a single vectorized sum in the coordinates ``u = exp(-length)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import networkx as nx
import numpy as np

from .errors import BudgetExceeded
from .graph import Graph
from .spectral import quotient_matrix, transition_matrix

SIMPLEX_BUDGET = 10**7
CYCLE_BUDGET = 20000


@dataclass(frozen=True)
class SimpleCycle:
    vertices: tuple  # matrix rows in canonical rotation
    labels: tuple
    multiplicity: int  # number of distinct arc choices along the vertex cycle
    profile: tuple  # per positive edge, number of visits


@dataclass(frozen=True)
class CycleComplex:
    graph: Graph
    kind: str
    cycles: tuple
    n_simplices: int  # counting parallel-arc choices, empty simplex included
    profiles: np.ndarray = field(compare=False)  # distinct multiplicity profiles
    coeffs: np.ndarray = field(compare=False)  # summed signs per profile

    @property
    def n_cycles(self) -> int:
        return sum(c.multiplicity for c in self.cycles)

    def dump(self) -> str:
        lines = [f"cycles {self.n_cycles} simplices {self.n_simplices}"]
        for c in self.cycles:
            lines.append(f"{c.multiplicity} {' '.join(c.labels)}")
        return "\n".join(lines) + "\n"


def _canonical(cycle):
    k = cycle.index(min(cycle))
    return tuple(cycle[k:] + cycle[:k])


@lru_cache(maxsize=None)
def enumerate_cycles(graph: Graph, kind: str = "quotient",
                     budget: int = SIMPLEX_BUDGET) -> CycleComplex:
    m = quotient_matrix(graph) if kind == "quotient" else transition_matrix(graph)
    counts = m.counts.astype(int)
    n = counts.shape[0]
    dg = nx.DiGraph()
    dg.add_nodes_from(range(n))
    dg.add_edges_from((i, j) for i in range(n) for j in range(n) if counts[i, j])
    raw = []
    for c in nx.simple_cycles(dg):
        raw.append(_canonical(c))
        if len(raw) > CYCLE_BUDGET:
            raise BudgetExceeded(f"{graph.name} has more than {CYCLE_BUDGET} simple cycles")
    raw.sort(key=lambda c: (len(c), c))
    cycles, profs, mults = [], [], []
    for c in raw:
        mult = int(np.prod([counts[a, b] for a, b in zip(c, c[1:] + c[:1])]))
        prof = np.bincount([m.row_edges[v] for v in c], minlength=graph.n_edges)
        cycles.append(SimpleCycle(c, tuple(m.labels[v] for v in c), mult, tuple(int(x) for x in prof)))
        profs.append(prof)
        mults.append(mult)

    # compat[k]: bitset of later cycles vertex-disjoint from cycle k
    nc = len(cycles)
    inc = np.zeros((nc, n), dtype=np.int32)
    for k, c in enumerate(cycles):
        inc[k, list(c.vertices)] = 1
    clash = (inc @ inc.T) > 0
    later = np.triu(np.ones((nc, nc), dtype=bool), 1)
    compat = [int.from_bytes(np.packbits(row[::-1]).tobytes(), "big") >> (-nc % 8)
              for row in (~clash & later)]

    acc: dict = {}
    count = expanded = 0
    stack = [((1 << nc) - 1, np.zeros(graph.n_edges, dtype=int), 1, 1)]
    while stack:
        cand, prof, sign, mult = stack.pop()
        key = tuple(int(x) for x in prof)
        acc[key] = acc.get(key, 0) + sign * mult
        count += 1
        expanded += mult
        if count > budget:
            raise BudgetExceeded(f"cycle complex of {graph.name} exceeds {budget} simplices")
        while cand:
            low = cand & -cand
            k = low.bit_length() - 1
            cand ^= low
            stack.append((cand & compat[k], prof + profs[k], -sign, mult * mults[k]))
    keys = sorted(acc)
    profiles = np.array(keys, dtype=float).reshape(len(keys), graph.n_edges)
    coeffs = np.array([acc[k] for k in keys], dtype=float)
    return CycleComplex(graph, kind, tuple(cycles), expanded, profiles, coeffs)


def _terms(cx: CycleComplex, lengths) -> np.ndarray:
    """Signed terms ``coeff * exp(-ell(Delta))`` per profile; inf lengths give u = 0."""
    u = np.exp(-np.asarray(lengths, dtype=float))
    return cx.coeffs * np.prod(u[None, :] ** cx.profiles, axis=1)


def _simplex_lengths(cx: CycleComplex, lengths) -> np.ndarray:
    ell = np.asarray(lengths, dtype=float)
    with np.errstate(invalid="ignore"):
        prod = np.where(cx.profiles > 0, cx.profiles * ell[None, :], 0.0)
    return prod.sum(axis=1)


def F_via_cycles(cx: CycleComplex, lengths) -> float:
    return float(_terms(cx, lengths).sum())


def F_via_det(graph: Graph, lengths, kind: str = "full") -> float:
    m = quotient_matrix(graph, lengths) if kind == "quotient" else transition_matrix(graph, lengths)
    return float(np.linalg.det(np.eye(len(m.labels)) - m.entries))


def grad_F(cx: CycleComplex, lengths) -> np.ndarray:
    return -(_terms(cx, lengths) @ cx.profiles)


def hessian_F(cx: CycleComplex, lengths) -> np.ndarray:
    t = _terms(cx, lengths)
    return (cx.profiles * t[:, None]).T @ cx.profiles


def pairing_volume(cx: CycleComplex, lengths) -> float:
    """<ell, grad F>; a simplex of infinite length contributes 0."""
    t = _terms(cx, lengths)
    lv = _simplex_lengths(cx, lengths)
    with np.errstate(invalid="ignore"):
        return float(-np.sum(np.where(t != 0, lv * t, 0.0)))


def pairing_hessian(cx: CycleComplex, lengths, v) -> float:
    """<v, H v> as a cycle sum."""
    pv = cx.profiles @ np.asarray(v, dtype=float)
    return float(np.sum(pv**2 * _terms(cx, lengths)))
