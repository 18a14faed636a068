"""Serre graphs, standard families, forest collapses and length plumbing.

Directed edges are indexed so that positive edge ``k`` has directed index
``2k`` and its reverse has index ``2k + 1``.  Lengths are stored once per
positive edge as a float array (``inf`` allowed in extended mode).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Graph:
    name: str
    vertices: tuple
    edges: tuple  # positive edge ids (E+)
    ends: tuple  # (origin, terminus) per positive edge

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def directed_edges(self) -> tuple:
        out = []
        for e in self.edges:
            out += [e, e + "~"]
        return tuple(out)

    @property
    def positive_part(self) -> tuple:
        return tuple(range(0, 2 * self.n_edges, 2))

    @property
    def origin(self) -> tuple:
        out = []
        for o, t in self.ends:
            out += [o, t]
        return tuple(out)

    @property
    def terminus(self) -> tuple:
        out = []
        for o, t in self.ends:
            out += [t, o]
        return tuple(out)

    @property
    def bar(self) -> tuple:
        return tuple(k ^ 1 for k in range(2 * self.n_edges))

    def edge_index(self, edge_id: str) -> int:
        return self.edges.index(edge_id)

    def is_loop(self, k: int) -> bool:
        o, t = self.ends[k]
        return o == t

    def valence(self, v) -> int:
        return sum((o == v) + (t == v) for o, t in self.ends)

    def euler_characteristic(self) -> int:
        return len(self.vertices) - self.n_edges

    def rank(self) -> int:
        return 1 - self.euler_characteristic()

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for o, t in self.ends:
                for a, b in ((o, t), (t, o)):
                    if a == v and b not in seen:
                        seen.add(b)
                        stack.append(b)
        return len(seen) == len(self.vertices)

    def validate(self, strict: bool = True) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            raise ConfigError("duplicate vertex ids")
        if len(set(self.edges)) != len(self.edges):
            raise ConfigError("duplicate edge ids")
        for o, t in self.ends:
            if o not in self.vertices or t not in self.vertices:
                raise ConfigError(f"edge endpoint {o!r}/{t!r} is not a vertex")
        if not self.is_connected():
            raise ConfigError(f"graph {self.name!r} is not connected")
        if strict:
            low = [v for v in self.vertices if self.valence(v) < 3]
            if low:
                raise ConfigError(f"vertices with valence < 3: {low}")
            if self.euler_characteristic() >= 0:
                raise ConfigError("Euler characteristic must be negative")


def build_graph(vertices, edges, name: str = "graph", strict: bool = True) -> Graph:
    """Build a graph from vertex ids and ``(edge_id, origin, terminus)`` triples."""
    edges = list(edges)
    g = Graph(
        name=name,
        vertices=tuple(vertices),
        edges=tuple(str(e[0]) for e in edges),
        ends=tuple((e[1], e[2]) for e in edges),
    )
    g.validate(strict)
    return g


def rose(r: int) -> Graph:
    if r < 1:
        raise ConfigError("rose needs r >= 1")
    return build_graph(["v"], [(f"e{i}", "v", "v") for i in range(1, r + 1)],
                       name=f"rose:{r}", strict=r >= 2)


def theta(r: int) -> Graph:
    if r < 2:
        raise ConfigError("theta needs r >= 2")
    return build_graph(["v", "w"], [(f"e{i}", "v", "w") for i in range(1, r + 2)],
                       name=f"theta:{r}")


def barbell() -> Graph:
    return build_graph(["v", "w"], [("a", "v", "v"), ("b", "w", "w"), ("c", "v", "w")],
                       name="barbell")


def double_rose(n1: int, n2: int) -> Graph:
    """Roses of ``n1`` and ``n2`` petals joined by a bridge ``e0`` (listed last)."""
    if n1 < 1 or n2 < 1:
        raise ConfigError("G(n1,n2) needs n1, n2 >= 1")
    edges = [(f"a{i}", "v1", "v1") for i in range(1, n1 + 1)]
    edges += [(f"b{i}", "v2", "v2") for i in range(1, n2 + 1)]
    edges.append(("e0", "v1", "v2"))
    return build_graph(["v1", "v2"], edges, name=f"G:{n1},{n2}")


def rose_theta(r: int) -> Graph:
    """``r - 2`` loops at ``v`` plus three edges from ``v`` to ``w``."""
    if r <= 2:
        raise ConfigError("rose_theta needs r > 2")
    edges = [(f"e{i}", "v", "v") for i in range(1, r - 1)]
    edges += [(f"f{i}", "v", "w") for i in range(3)]
    return build_graph(["v", "w"], edges, name=f"rose_theta:{r}")


def standard_graph(family: str) -> Graph:
    """Parse ``rose:3``, ``theta:2``, ``barbell``, ``G:2,2`` or ``rose_theta:4``."""
    kind, _, arg = family.partition(":")
    try:
        if kind == "rose":
            return rose(int(arg))
        if kind == "theta":
            return theta(int(arg))
        if kind == "barbell" and not arg:
            return barbell()
        if kind == "G":
            n1, n2 = (int(x) for x in arg.split(","))
            return double_rose(n1, n2)
        if kind == "rose_theta":
            return rose_theta(int(arg))
    except ValueError as exc:
        raise ConfigError(f"bad family parameters in {family!r}") from exc
    raise ConfigError(f"unknown graph family {family!r}")


@dataclass(frozen=True)
class LengthFunction:
    graph: Graph
    values: np.ndarray = field(compare=False)
    extended: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.graph.n_edges,):
            raise ConfigError(f"expected {self.graph.n_edges} lengths, got {vals.shape}")
        if np.any(np.isnan(vals)):
            raise ConfigError("lengths must not be NaN")
        if self.extended:
            if np.any(vals < 0):
                raise ConfigError("extended lengths must be >= 0")
        elif np.any(~np.isfinite(vals)) or np.any(vals <= 0):
            raise ConfigError("strict lengths must be finite and positive")
        object.__setattr__(self, "values", vals)

    @property
    def support(self) -> tuple:
        return tuple(i for i, x in enumerate(self.values) if 0 < x < np.inf)

    def u(self) -> np.ndarray:
        return np.exp(-self.values)

    def directed(self, k: int) -> float:
        return float(self.values[k // 2])

    def of_path(self, directed_path) -> float:
        return float(sum(self.values[k // 2] for k in directed_path))

    def volume(self) -> float:
        return float(self.values.sum())


@dataclass(frozen=True)
class CollapseMap:
    source: Graph
    target: Graph
    edge_image: tuple  # per source positive edge: ("edge", k) or ("vertex", v)


def collapse(graph: Graph, forest) -> tuple[Graph, CollapseMap]:
    """Collapse a forest given as positive edge ids or indices."""
    idx = sorted({graph.edge_index(f) if isinstance(f, str) else int(f) for f in forest})
    parent = {v: v for v in graph.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for k in idx:
        a, b = (find(x) for x in graph.ends[k])
        if a == b:
            raise ConfigError(f"collapsed set contains a cycle through {graph.edges[k]!r}")
        parent[b] = a
    verts = [v for v in graph.vertices if find(v) == v]
    kept, image = [], []
    for k, (o, t) in enumerate(graph.ends):
        if k in idx:
            image.append(("vertex", find(o)))
        else:
            image.append(("edge", len(kept)))
            kept.append((graph.edges[k], find(o), find(t)))
    target = build_graph(verts, kept, name=f"{graph.name}/{','.join(graph.edges[k] for k in idx)}"
                         if idx else graph.name, strict=False)
    return target, CollapseMap(graph, target, tuple(image))


def pullback_length(cmap: CollapseMap, lengths) -> np.ndarray:
    """Pull back target lengths; collapsed edges get length 0."""
    lengths = np.asarray(lengths, dtype=float)
    out = np.zeros(cmap.source.n_edges)
    for k, (kind, val) in enumerate(cmap.edge_image):
        if kind == "edge":
            out[k] = lengths[val]
    return out


def format_graph(graph: Graph, lengths=None) -> str:
    lines = [f"graph {graph.name}"]
    lines += [f"v {v}" for v in graph.vertices]
    lines += [f"e {e} {o} {t}" for e, (o, t) in zip(graph.edges, graph.ends)]
    if lengths is not None:
        for e, x in zip(graph.edges, np.asarray(lengths, dtype=float)):
            lines.append(f"len {e} {'inf' if x == np.inf else repr(float(x))}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str, strict: bool = True):
    """Parse the line format; returns ``(graph, lengths or None)``."""
    name, verts, edges, lens = "graph", [], [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        tag = parts[0]
        try:
            if tag == "graph":
                name = parts[1]
            elif tag == "v":
                verts.append(parts[1])
            elif tag == "e":
                edges.append((parts[1], parts[2], parts[3]))
            elif tag == "len":
                lens[parts[1]] = float(parts[2])
            else:
                raise ConfigError(f"line {lineno}: unknown tag {tag!r}")
        except IndexError as exc:
            raise ConfigError(f"line {lineno}: missing fields") from exc
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad number") from exc
    graph = build_graph(verts, edges, name=name, strict=strict)
    if not lens:
        return graph, None
    missing = [e for e in graph.edges if e not in lens]
    if missing:
        raise ConfigError(f"no length for edges {missing}")
    return graph, np.array([lens[e] for e in graph.edges])


def read_graph(path, strict: bool = True):
    with open(path) as fh:
        return parse_graph(fh.read(), strict)


def write_graph(path, graph: Graph, lengths=None) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(graph, lengths))
