"""Undirected multigraphs with loops and parallel edges.

Vertex ids are arbitrary non-negative ints and stay stable across deletions;
ids of deleted vertices are never reused implicitly.  A loop at v contributes
2 to deg(v) but only its multiplicity to the edge count m.  Graphs have value
semantics: ``copy`` is cheap and mutation never aliases.
"""
from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Tuple


class MultiGraph:
    __slots__ = ("_adj", "_m")

    def __init__(self) -> None:
        # _adj[u][v] = multiplicity; loops stored once as _adj[v][v].
        self._adj: Dict[int, Dict[int, int]] = {}
        self._m = 0

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[int] = (),
        edges: Iterable[Tuple[int, int]] = (),
    ) -> "MultiGraph":
        g = cls()
        for v in vertices:
            g.add_vertex(v)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    def add_vertex(self, v: int | None = None) -> int:
        if v is None:
            v = max(self._adj, default=-1) + 1
        if v < 0:
            raise ValueError(f"vertex ids must be non-negative, got {v}")
        if v not in self._adj:
            self._adj[v] = {}
        return v

    def add_edge(self, u: int, v: int, mult: int = 1) -> None:
        if mult <= 0:
            raise ValueError(f"edge multiplicity must be positive, got {mult}")
        self.add_vertex(u)
        self.add_vertex(v)
        self._adj[u][v] = self._adj[u].get(v, 0) + mult
        if u != v:
            self._adj[v][u] = self._adj[v].get(u, 0) + mult
        self._m += mult

    def set_multiplicity(self, u: int, v: int, mult: int) -> None:
        """Overwrite the multiplicity of an existing edge (0 removes it)."""
        if mult < 0:
            raise ValueError("multiplicity must be >= 0")
        cur = self.multiplicity(u, v)
        if cur == 0 and mult > 0:
            self.add_edge(u, v, mult)
            return
        self._m += mult - cur
        if mult == 0:
            self._adj[u].pop(v, None)
            self._adj[v].pop(u, None)
        else:
            self._adj[u][v] = mult
            if u != v:
                self._adj[v][u] = mult

    def remove_vertex(self, v: int) -> None:
        nbs = self._adj.pop(v)
        for u, mult in nbs.items():
            self._m -= mult
            if u != v:
                del self._adj[u][v]

    # ------------------------------------------------------------------
    # queries

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return self._m

    def has_vertex(self, v: int) -> bool:
        return v in self._adj

    def vertices(self) -> List[int]:
        return sorted(self._adj)

    def vertex_set(self) -> frozenset:
        return frozenset(self._adj)

    def neighbors(self, v: int) -> List[int]:
        return sorted(self._adj[v])

    def multiplicity(self, u: int, v: int) -> int:
        return self._adj[u].get(v, 0)

    def loops_at(self, v: int) -> int:
        return self._adj[v].get(v, 0)

    def degree(self, v: int) -> int:
        # loops count twice
        deg = 0
        for u, mult in self._adj[v].items():
            deg += mult * (2 if u == v else 1)
        return deg

    def edges(self) -> Iterator[Tuple[int, int, int]]:
        """Yield (u, v, mult) with u <= v, sorted, each edge once."""
        for u in sorted(self._adj):
            for v in sorted(self._adj[u]):
                if u <= v:
                    yield (u, v, self._adj[u][v])

    def edge_lines(self) -> Iterator[Tuple[int, int]]:
        """Every edge repeated by multiplicity (round-trip form)."""
        for u, v, mult in self.edges():
            for _ in range(mult):
                yield (u, v)

    # ------------------------------------------------------------------
    # derived graphs

    def copy(self) -> "MultiGraph":
        g = MultiGraph()
        g._adj = {v: dict(nbs) for v, nbs in self._adj.items()}
        g._m = self._m
        return g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return self._adj == other._adj

    def __repr__(self) -> str:
        return f"MultiGraph(n={self.n}, m={self.m})"


def induced(g: MultiGraph, keep: Iterable[int]) -> MultiGraph:
    """Subgraph induced by ``keep``.  Raises KeyError on unknown ids."""
    keep_set = set(keep)
    for v in keep_set:
        if not g.has_vertex(v):
            raise KeyError(f"vertex {v} not in graph")
    h = MultiGraph()
    for v in keep_set:
        h.add_vertex(v)
    for u, v, mult in g.edges():
        if u in keep_set and v in keep_set:
            h.add_edge(u, v, mult)
    return h


def minus(g: MultiGraph, drop: Iterable[int]) -> MultiGraph:
    """g with the vertices in ``drop`` removed."""
    drop_set = set(drop)
    return induced(g, (v for v in g.vertices() if v not in drop_set))


def connected_components(g: MultiGraph) -> List[List[int]]:
    """Components as sorted vertex lists, ordered by smallest member."""
    seen: set = set()
    comps: List[List[int]] = []
    for start in g.vertices():
        if start in seen:
            continue
        comp = []
        stack = [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in g.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


def is_forest(g: MultiGraph) -> bool:
    """True iff g has no cycle; loops and parallel edges are cycles."""
    parent = {v: v for v in g.vertices()}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, mult in g.edges():
        if u == v or mult >= 2:
            return False
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True
