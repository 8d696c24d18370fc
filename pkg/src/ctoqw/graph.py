"""Finite simple undirected graphs and the matrices that define a walk on them.

Vertices are 0-indexed.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances

FAMILIES = ("cycle", "path", "star", "complete")


class GraphError(ValueError):
    """Malformed graph input or a graph unsuitable for the requested matrix."""


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GraphError(f"vertex count must be positive, got {self.n}")
        normalized = set()
        for j, k in self.edges:
            if j == k:
                raise GraphError(f"self-loop at vertex {j}")
            if not (0 <= j < self.n and 0 <= k < self.n):
                raise GraphError(f"edge ({j}, {k}) out of range for n={self.n}")
            normalized.add((min(j, k), max(j, k)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        return cls(n, frozenset((int(j), int(k)) for j, k in edges))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for j, k in self.sorted_edges():
            adj[j].append(k)
            adj[k].append(j)
        return adj

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for j, k in self.edges:
            deg[j] += 1
            deg[k] += 1
        return deg

    def components(self) -> list[list[int]]:
        """Connected components as sorted vertex lists, ordered by smallest vertex."""
        adj = self.neighbors()
        seen = [False] * self.n
        comps = []
        for start in range(self.n):
            if seen[start]:
                continue
            seen[start] = True
            stack, comp = [start], []
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in adj[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def to_edge_list(self) -> str:
        lines = [f"n {self.n}"] + [f"{j} {k}" for j, k in self.sorted_edges()]
        return "\n".join(lines) + "\n"


def parse_edge_list(text: str | io.TextIOBase) -> Graph:
    """Parse the ``j k`` per line edge-list format.

    ``#`` comments and blank lines are skipped. An ``n <count>`` header fixes
    the vertex count; otherwise it is one more than the largest index seen.
    Duplicate edges (in either orientation) collapse to one.
    """
    if not isinstance(text, str):
        text = text.read()
    declared_n: int | None = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "n":
            if len(tokens) != 2:
                raise GraphError(f"line {lineno}: header must be 'n <count>'")
            declared_n = _parse_int(tokens[1], lineno)
            if declared_n < 1:
                raise GraphError(f"line {lineno}: vertex count must be positive")
            continue
        if len(tokens) != 2:
            raise GraphError(f"line {lineno}: expected two vertex indices, got {line!r}")
        j, k = (_parse_int(t, lineno) for t in tokens)
        if j < 0 or k < 0:
            raise GraphError(f"line {lineno}: negative vertex index")
        if j == k:
            raise GraphError(f"line {lineno}: self-loop at vertex {j}")
        if declared_n is not None and max(j, k) >= declared_n:
            raise GraphError(f"line {lineno}: index {max(j, k)} >= declared n {declared_n}")
        edges.append((j, k))
    if declared_n is None:
        if not edges:
            raise GraphError("empty edge list without an 'n <count>' header")
        declared_n = 1 + max(max(e) for e in edges)
    return Graph.from_edges(declared_n, edges)


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise GraphError(f"line {lineno}: non-integer token {token!r}") from None


def generate(family: str, size: int) -> Graph:
    """Canonical member of a graph family.

    ``size`` is the vertex count for cycle, path and complete graphs and the
    number of edges for a star, whose hub is vertex 0.
    """
    minimum = {"cycle": 3, "path": 2, "complete": 2, "star": 1}
    if family not in minimum:
        raise GraphError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if size < minimum[family]:
        raise GraphError(f"{family} needs size >= {minimum[family]}, got {size}")
    if family == "path":
        return Graph.from_edges(size, [(v, v + 1) for v in range(size - 1)])
    if family == "cycle":
        return Graph.from_edges(size, [(v, (v + 1) % size) for v in range(size)])
    if family == "star":
        return Graph.from_edges(size + 1, [(0, v) for v in range(1, size + 1)])
    return Graph.from_edges(size, [(j, k) for j in range(size) for k in range(j + 1, size)])


def disjoint_union(*graphs: Graph) -> Graph:
    offset, edges = 0, []
    for g in graphs:
        edges.extend((j + offset, k + offset) for j, k in g.edges)
        offset += g.n
    return Graph.from_edges(offset, edges)


def random_connected(n: int, rng: np.random.Generator, extra_edge_prob: float = 0.3) -> Graph:
    """Random spanning tree on ``n`` vertices plus independent extra edges."""
    if n < 1:
        raise GraphError("n must be positive")
    order = rng.permutation(n)
    edges = set()
    for i in range(1, n):
        parent = order[rng.integers(i)]
        edges.add((int(min(order[i], parent)), int(max(order[i], parent))))
    for j in range(n):
        for k in range(j + 1, n):
            if (j, k) not in edges and rng.random() < extra_edge_prob:
                edges.add((j, k))
    return Graph(n, frozenset(edges))


def adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for j, k in g.edges:
        a[j, k] = a[k, j] = 1.0
    return a


def degree_matrix(g: Graph) -> np.ndarray:
    return np.diag(np.asarray(g.degrees(), dtype=float))


def laplacian(g: Graph) -> np.ndarray:
    """``L = D - A``."""
    return degree_matrix(g) - adjacency(g)


def transition_matrix(g: Graph) -> np.ndarray:
    """Column-stochastic ``M = A D^{-1}``, i.e. ``M[j, k] = 1/deg(k)`` on edges.

    Raises GraphError if some vertex is isolated, since column ``k`` would
    divide by ``deg(k) = 0``.
    """
    deg = g.degrees()
    isolated = [v for v, d in enumerate(deg) if d == 0]
    if isolated:
        raise GraphError(f"transition matrix undefined: isolated vertices {isolated}")
    return adjacency(g) / np.asarray(deg, dtype=float)[np.newaxis, :]


@dataclass(frozen=True)
class GraphClass:
    connected: bool
    regular: bool
    doubly_stochastic_M: bool
    components: int


def classify(g: Graph, tol: Tolerances = DEFAULT_TOLERANCES) -> GraphClass:
    deg = g.degrees()
    regular = len(set(deg)) == 1
    if 0 in deg:
        # M is undefined, so it cannot be doubly stochastic
        doubly = False
    else:
        row_sums = transition_matrix(g).sum(axis=1)
        doubly = bool(np.all(np.abs(row_sums - 1.0) <= tol.stochastic))
    n_comp = len(g.components())
    return GraphClass(n_comp == 1, regular, doubly, n_comp)


def matrix_to_csv(m: np.ndarray) -> str:
    """Row-major CSV at full double precision."""
    buf = io.StringIO()
    np.savetxt(buf, np.atleast_2d(m), fmt="%.17g", delimiter=",")
    return buf.getvalue()
