"""Simple undirected graphs and the two graph operations used for graph states.

Vertex identifiers are strings. Graphs are treated as immutable values:
:func:`local_complement` and :func:`fuse_vertices` return new graphs.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from itertools import combinations

import networkx as nx

from .clifford import CliffordRecord

__all__ = [
    "Graph",
    "GraphError",
    "local_complement",
    "fuse_vertices",
    "p_succ_from_loss",
]


class GraphError(ValueError):
    """Raised for invalid vertices, edges, or operation preconditions."""


def _key(v: str):
    # Sort numerically-looking ids by value, everything else lexicographically.
    return (0, int(v), "") if v.isdigit() else (1, 0, v)


class Graph:
    """A simple undirected graph with stable string vertex ids.

    Parameters
    ----------
    vertices : iterable of str
        Vertex ids. Endpoints of ``edges`` are added implicitly.
    edges : iterable of pairs
        Unordered vertex pairs. Self-loops raise :class:`GraphError`;
        duplicates are merged.
    """

    __slots__ = ("_adj", "_hash")

    def __init__(self, vertices: Iterable = (), edges: Iterable = ()) -> None:
        adj: dict[str, set[str]] = {str(v): set() for v in vertices}
        for u, v in edges:
            u, v = str(u), str(v)
            if u == v:
                raise GraphError(f"self-loop on vertex {u!r}")
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        self._adj = {v: frozenset(nb) for v, nb in adj.items()}
        self._hash = None

    @classmethod
    def _from_adj(cls, adj: Mapping[str, Iterable[str]]) -> Graph:
        g = cls.__new__(cls)
        g._adj = {v: frozenset(nb) for v, nb in adj.items()}
        g._hash = None
        return g

    # -- basic queries -------------------------------------------------

    @property
    def vertices(self) -> frozenset[str]:
        return frozenset(self._adj)

    @property
    def edges(self) -> frozenset[frozenset[str]]:
        return frozenset(
            frozenset((u, v)) for u, nb in self._adj.items() for v in nb
        )

    def sorted_vertices(self) -> list[str]:
        return sorted(self._adj, key=_key)

    def sorted_edges(self) -> list[tuple[str, str]]:
        out = set()
        for u, nb in self._adj.items():
            for v in nb:
                a, b = sorted((u, v), key=_key)
                out.add((a, b))
        return sorted(out, key=lambda e: (_key(e[0]), _key(e[1])))

    def adj(self, v: str) -> frozenset[str]:
        try:
            return self._adj[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def degree(self, v: str) -> int:
        return len(self.adj(v))

    def has_vertex(self, v: str) -> bool:
        return v in self._adj

    def has_edge(self, u: str, v: str) -> bool:
        return v in self._adj.get(u, ())

    @property
    def num_vertices(self) -> int:
        return len(self._adj)

    @property
    def num_edges(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    @property
    def max_edges(self) -> int:
        n = self.num_vertices
        return n * (n - 1) // 2

    def adjacency(self) -> dict[str, set[str]]:
        """Return a mutable copy of the adjacency map."""
        return {v: set(nb) for v, nb in self._adj.items()}

    def connected_components(self) -> list[set[str]]:
        seen: set[str] = set()
        comps = []
        for start in self.sorted_vertices():
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            while stack:
                u = stack.pop()
                for w in self._adj[u]:
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            comps.append(comp)
        return comps

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.sorted_vertices())
        g.add_edges_from(self.sorted_edges())
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> Graph:
        return cls(g.nodes, g.edges)

    def relabel(self, mapping: Mapping[str, str]) -> Graph:
        adj = {
            mapping.get(v, v): {mapping.get(u, u) for u in nb}
            for v, nb in self._adj.items()
        }
        if len(adj) != len(self._adj):
            raise GraphError("relabeling merges vertices")
        return Graph._from_adj(adj)

    # -- value semantics -----------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._adj.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(|V|={self.num_vertices}, |E|={self.num_edges})"

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __iter__(self):
        return iter(self.sorted_vertices())

    def __len__(self) -> int:
        return len(self._adj)


# -- operations on mutable adjacency maps (shared with the unraveler) -------


def _toggle(adj: dict[str, set[str]], u: str, v: str) -> None:
    if v in adj[u]:
        adj[u].discard(v)
        adj[v].discard(u)
    else:
        adj[u].add(v)
        adj[v].add(u)


def _lc_inplace(adj: dict[str, set[str]], v: str) -> None:
    for a, b in combinations(sorted(adj[v]), 2):
        _toggle(adj, a, b)


def _fuse_inplace(adj: dict[str, set[str]], v1: str, v2: str) -> None:
    if v1 == v2:
        raise GraphError("cannot fuse a vertex with itself")
    if v2 in adj[v1]:
        raise GraphError(f"cannot fuse adjacent vertices {v1!r} and {v2!r}")
    n1, n2 = sorted(adj[v1]), sorted(adj[v2])
    for u1 in n1:
        for u2 in n2:
            if u1 != u2:
                _toggle(adj, u1, u2)
    for v in (v1, v2):
        for u in adj.pop(v):
            adj[u].discard(v)


def local_complement(
    graph: Graph, v: str, record: CliffordRecord | None = None
) -> tuple[Graph, CliffordRecord]:
    """Local complementation at ``v``.

    Every pair of neighbours of ``v`` is toggled. The Clifford record is
    updated by R_X^dagger on ``v`` and R_Z on each neighbour, the single-qubit
    gates that take the graph state of ``graph`` to that of the result.
    """
    nbrs = graph.adj(v)
    adj = graph.adjacency()
    _lc_inplace(adj, v)
    if record is None:
        record = CliffordRecord()
    record = record.apply_lc(v, nbrs)
    return Graph._from_adj(adj), record


def fuse_vertices(graph: Graph, v1: str, v2: str) -> Graph:
    """Graph-level effect of a successful fusion of unconnected ``v1``, ``v2``.

    For every u1 in adj(v1) and u2 in adj(v2) with u1 != u2 the edge
    {u1, u2} is toggled, then both fused vertices are deleted.
    """
    graph.adj(v1)
    graph.adj(v2)
    adj = graph.adjacency()
    _fuse_inplace(adj, v1, v2)
    return Graph._from_adj(adj)


def p_succ_from_loss(eta: float) -> float:
    """Fusion success probability with per-photon loss ``eta``."""
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"loss probability must lie in [0, 1), got {eta}")
    return (1.0 - eta) ** 2 / 2.0
