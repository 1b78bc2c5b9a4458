"""Unraveling: replace bipartitely-complete subgraphs (BCSs) and maximal
cliques by simpler structures plus deferred external fusions and local
complementations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

import networkx as nx

from .clifford import CliffordRecord
from .graph import Graph, GraphError, _fuse_inplace, _key, _lc_inplace

__all__ = [
    "Bcs",
    "BcsUnravel",
    "CliqueUnravel",
    "UnravelResult",
    "UnravelError",
    "find_bcss",
    "unravel_bcs",
    "find_maximal_cliques",
    "unravel_clique",
    "unravel",
    "recover",
    "check_components",
]


class UnravelError(ValueError):
    pass


def _sorted(vs) -> list[str]:
    return sorted(vs, key=_key)


@dataclass(frozen=True)
class Bcs:
    part1: frozenset[str]
    part2: frozenset[str]

    def validate(self, graph: Graph) -> None:
        if len(self.part1) < 2 or len(self.part2) < 2:
            raise UnravelError("both BCS parts need at least two vertices")
        if self.part1 & self.part2:
            raise UnravelError("BCS parts overlap")
        for a in self.part1:
            nb = graph.adj(a)
            if not self.part2 <= nb:
                raise UnravelError(f"{a!r} is not adjacent to the whole second part")


@dataclass(frozen=True)
class BcsUnravel:
    part1: tuple[str, ...]
    part2: tuple[str, ...]
    new_v1: str
    new_v2: str


@dataclass(frozen=True)
class CliqueUnravel:
    clique: tuple[str, ...]
    v0: str
    new_v1: str | None
    new_v2: str | None
    lc_vertex: str


@dataclass(frozen=True)
class UnravelResult:
    original: Graph
    unraveled: Graph
    journal: tuple[BcsUnravel | CliqueUnravel, ...] = ()
    external_fusions: tuple[tuple[str, str], ...] = ()
    cliffords: CliffordRecord = field(default_factory=CliffordRecord)


class _Fresh:
    """Mints ``w<k>`` ids that are not already used in ``adj``."""

    def __init__(self, adj: dict[str, set[str]]) -> None:
        self.adj = adj
        self.k = 0

    def __call__(self) -> str:
        while f"w{self.k}" in self.adj:
            self.k += 1
        name = f"w{self.k}"
        self.k += 1
        return name


# -- BCSs -----------------------------------------------------------------


def _find_bcss(adj: dict[str, set[str]], rng: random.Random) -> list[Bcs]:
    found = []
    in_bcs: set[str] = set()
    checked: set[frozenset[str]] = set()
    order = _sorted(adj)
    rng.shuffle(order)
    for v in order:
        if v in in_bcs:
            continue
        unchecked = _sorted(u for u in adj[v] if frozenset((v, u)) not in checked)
        pairs = list(combinations(unchecked, 2))
        rng.shuffle(pairs)
        for v1, v2 in pairs:
            if v1 in in_bcs or v2 in in_bcs:
                continue
            part1 = adj[v1] & adj[v2]
            if len(part1) < 2:
                continue
            part2 = set.intersection(*(adj[u] for u in part1))
            if (part1 | part2) & in_bcs:
                continue
            found.append(Bcs(frozenset(part1), frozenset(part2)))
            in_bcs |= part1 | part2
        for u in adj[v]:
            if u not in in_bcs:
                checked.add(frozenset((v, u)))
    return found


def find_bcss(graph: Graph, rng: random.Random) -> list[Bcs]:
    """Find vertex-disjoint BCSs by randomised neighbour-pair scanning."""
    return _find_bcss(graph.adjacency(), rng)


def _unravel_bcs(adj, bcs: Bcs, fresh: _Fresh) -> BcsUnravel:
    w1, w2 = fresh(), fresh()
    adj[w1] = set()
    adj[w2] = set()
    for a in bcs.part1:
        for b in bcs.part2:
            adj[a].discard(b)
            adj[b].discard(a)
    for w, part in ((w1, bcs.part1), (w2, bcs.part2)):
        for a in part:
            adj[w].add(a)
            adj[a].add(w)
    return BcsUnravel(tuple(_sorted(bcs.part1)), tuple(_sorted(bcs.part2)), w1, w2)


def unravel_bcs(graph: Graph, bcs: Bcs) -> tuple[Graph, BcsUnravel]:
    """Cut all cross edges of ``bcs`` and attach two fresh hubs, one per part.

    Fusing the two hubs restores the original graph.
    """
    bcs.validate(graph)
    adj = graph.adjacency()
    event = _unravel_bcs(adj, bcs, _Fresh(adj))
    return Graph._from_adj(adj), event


# -- cliques --------------------------------------------------------------


def _maximal_cliques(adj) -> list[frozenset[str]]:
    g = nx.Graph()
    g.add_nodes_from(_sorted(adj))
    g.add_edges_from((u, v) for u in _sorted(adj) for v in _sorted(adj[u]) if _key(u) < _key(v))
    cliques = [frozenset(c) for c in nx.find_cliques(g) if len(c) >= 3]
    cliques.sort(key=lambda c: [_key(v) for v in _sorted(c)])
    return cliques


def find_maximal_cliques(graph: Graph) -> list[frozenset[str]]:
    """All maximal cliques with at least three vertices."""
    return _maximal_cliques(graph.adjacency())


def _is_maximal_clique(adj, clique: frozenset[str]) -> bool:
    for a, b in combinations(clique, 2):
        if b not in adj[a]:
            return False
    common = set.intersection(*(adj[v] for v in clique))
    return not common


def _unravel_clique(adj, clique, rng: random.Random, fresh: _Fresh):
    members = _sorted(clique)
    no_outer = [v for v in members if adj[v] <= clique]
    if no_outer:
        v0 = rng.choice(no_outer)
        nbrs = set(adj[v0])
        _lc_inplace(adj, v0)
        return CliqueUnravel(tuple(members), v0, None, None, v0), v0, nbrs
    v0 = rng.choice(members)
    rest = [v for v in members if v != v0]
    v1, v2 = fresh(), fresh()
    adj[v1] = set()
    adj[v2] = set()
    for u in rest:
        adj[v0].discard(u)
        adj[u].discard(v0)
        adj[u].add(v1)
        adj[v1].add(u)
    adj[v0].add(v2)
    adj[v2].add(v0)
    nbrs = set(adj[v1])
    _lc_inplace(adj, v1)
    return CliqueUnravel(tuple(members), v0, v1, v2, v1), v1, nbrs


def unravel_clique(
    graph: Graph,
    clique,
    rng: random.Random,
    record: CliffordRecord | None = None,
) -> tuple[Graph, CliqueUnravel, CliffordRecord]:
    """Unravel one maximal clique of size >= 3.

    If some clique vertex has no neighbours outside the clique, one such
    vertex is chosen and the graph is locally complemented there. Otherwise a
    random vertex ``v0`` is split off, a fresh ``v1`` takes its place in the
    clique, a fresh ``v2`` hangs off ``v0``, ``(v1, v2)`` becomes an external
    fusion and the graph is locally complemented at ``v1``.
    """
    clique = frozenset(clique)
    if len(clique) < 3:
        raise UnravelError("only cliques of size >= 3 are unraveled")
    for v in clique:
        graph.adj(v)
    adj = graph.adjacency()
    if not _is_maximal_clique(adj, clique):
        raise UnravelError("vertex set is not a maximal clique")
    event, lc_v, nbrs = _unravel_clique(adj, clique, rng, _Fresh(adj))
    record = (record or CliffordRecord()).apply_lc(lc_v, nbrs)
    return Graph._from_adj(adj), event, record


# -- driver ---------------------------------------------------------------


def check_components(graph: Graph) -> None:
    for comp in graph.connected_components():
        if len(comp) < 3:
            raise UnravelError(
                f"connected component {_sorted(comp)} has fewer than 3 vertices; "
                "graphs are built from 3-qubit resource states"
            )


def unravel(graph: Graph, rng: random.Random, enabled: bool = True) -> UnravelResult:
    """Repeatedly unravel disjoint BCSs and maximal cliques until none remain.

    Each round randomly picks whether BCSs or cliques are handled first.
    With ``enabled=False`` the graph is returned untouched.
    """
    check_components(graph)
    if not enabled:
        return UnravelResult(graph, graph)
    adj = graph.adjacency()
    fresh = _Fresh(adj)
    journal = []
    fusions = []
    record = CliffordRecord()
    limit = 4 * (graph.num_vertices + graph.num_edges) + 16
    for _ in range(limit):
        kinds = ("bcs", "clique") if rng.random() < 0.5 else ("clique", "bcs")
        found = False
        for kind in kinds:
            if kind == "bcs":
                for bcs in _find_bcss(adj, rng):
                    ev = _unravel_bcs(adj, bcs, fresh)
                    journal.append(ev)
                    fusions.append((ev.new_v1, ev.new_v2))
                    found = True
            else:
                cliques = _maximal_cliques(adj)
                rng.shuffle(cliques)
                used: set[str] = set()
                for c in cliques:
                    if c & used:
                        continue
                    used |= c
                    ev, lc_v, nbrs = _unravel_clique(adj, c, rng, fresh)
                    record = record.apply_lc(lc_v, nbrs)
                    journal.append(ev)
                    if ev.new_v1 is not None:
                        fusions.append((ev.new_v1, ev.new_v2))
                    found = True
        if not found:
            break
    else:
        raise UnravelError("unraveling did not terminate")
    return UnravelResult(
        graph, Graph._from_adj(adj), tuple(journal), tuple(fusions), record
    )


def recover(result: UnravelResult) -> Graph:
    """Undo the journal in reverse order, returning the original graph."""
    adj = result.unraveled.adjacency()
    try:
        for ev in reversed(result.journal):
            if isinstance(ev, BcsUnravel):
                _fuse_inplace(adj, ev.new_v1, ev.new_v2)
            elif isinstance(ev, CliqueUnravel):
                _lc_inplace(adj, ev.lc_vertex)
                if ev.new_v1 is not None:
                    _fuse_inplace(adj, ev.new_v1, ev.new_v2)
            else:
                raise UnravelError(f"unknown journal entry {ev!r}")
    except (KeyError, GraphError) as exc:
        raise UnravelError(f"corrupted journal: {exc}") from exc
    return Graph._from_adj(adj)
