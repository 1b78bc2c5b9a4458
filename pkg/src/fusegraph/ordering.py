"""Fusion ordering by link contraction on a weighted multigraph.

Node weights track the expected number of resource states (``"overhead"``)
or expected fusion attempts (``"fusions"``) spent on the entangled state a
node stands for. Contracting a link merges its endpoints; the merged weight
is the expected cost including retries after failed fusions.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import networkx as nx

from .network import FusionNetwork

__all__ = [
    "OVERHEAD",
    "FUSIONS",
    "ContractionState",
    "FusionSchedule",
    "OrderingError",
    "merged_weight",
    "contract_link",
    "maximum_matching",
    "determine_order",
    "random_order",
    "evaluate_order",
]

OVERHEAD = "overhead"
FUSIONS = "fusions"
_MEASURES = (OVERHEAD, FUSIONS)
REL_TOL = 1e-9


class OrderingError(ValueError):
    pass


def _check(p_succ: float, measure: str) -> None:
    if not 0.0 < p_succ <= 1.0:
        raise OrderingError(f"p_succ must lie in (0, 1], got {p_succ}")
    if measure not in _MEASURES:
        raise OrderingError(f"unknown measure {measure!r}")


def merged_weight(w1: float, w2: float | None, p_succ: float, measure: str) -> float:
    """Weight after one fusion; ``w2`` is None for a loop."""
    extra = 1.0 if measure == FUSIONS else 0.0
    if w2 is None:
        return (w1 + extra) / p_succ
    return (w1 + w2 + extra) / p_succ


class ContractionState:
    """A weighted multigraph under link contraction.

    ``links`` maps a link id to its current endpoints; merged nodes keep the
    name of the first endpoint of the contracted link.
    """

    def __init__(
        self,
        weights: dict[str, float],
        links: dict[int, tuple[str, str]],
        p_succ: float,
        measure: str = OVERHEAD,
    ) -> None:
        _check(p_succ, measure)
        self.weights = dict(weights)
        self.links = dict(links)
        self.p_succ = p_succ
        self.measure = measure
        self._inc: dict[str, set[int]] = {n: set() for n in self.weights}
        for lid, (a, b) in self.links.items():
            self._inc[a].add(lid)
            self._inc[b].add(lid)

    @classmethod
    def from_network(
        cls, network: FusionNetwork, p_succ: float, measure: str = OVERHEAD
    ) -> ContractionState:
        w0 = 1.0 if measure == OVERHEAD else 0.0
        return cls(
            {n.name: w0 for n in network.nodes},
            {i: l.ends for i, l in enumerate(network.links)},
            p_succ,
            measure,
        )

    def copy(self) -> ContractionState:
        return ContractionState(self.weights, self.links, self.p_succ, self.measure)

    def link_weight(self, lid: int) -> float:
        a, b = self.links[lid]
        wa = self.weights[a]
        return merged_weight(wa, None if a == b else self.weights[b], self.p_succ, self.measure)

    def contract(self, lid: int) -> str:
        """Contract link ``lid`` in place and return the merged node's name."""
        try:
            a, b = self.links.pop(lid)
        except KeyError:
            raise OrderingError(f"link {lid} is not present") from None
        self._inc[a].discard(lid)
        self._inc[b].discard(lid)
        if a == b:
            self.weights[a] = merged_weight(self.weights[a], None, self.p_succ, self.measure)
            return a
        self.weights[a] = merged_weight(
            self.weights[a], self.weights.pop(b), self.p_succ, self.measure
        )
        for other in self._inc.pop(b):
            x, y = self.links[other]
            self.links[other] = (a if x == b else x, a if y == b else y)
            self._inc[a].add(other)
        return a

    @property
    def total(self) -> float:
        return sum(self.weights.values())


def contract_link(state: ContractionState, lid: int) -> ContractionState:
    """Return a new state with link ``lid`` contracted."""
    out = state.copy()
    out.contract(lid)
    return out


@dataclass(frozen=True)
class FusionSchedule:
    """Contraction rounds; links inside a round touch disjoint nodes."""

    rounds: tuple[tuple[int, ...], ...]
    q_value: float
    p_succ: float
    measure: str = OVERHEAD

    @property
    def order(self) -> tuple[int, ...]:
        return tuple(l for r in self.rounds for l in r)

    def round_of(self) -> dict[int, int]:
        return {l: i + 1 for i, r in enumerate(self.rounds) for l in r}


def _forest_matching(adj: dict[str, set[str]], rng: random.Random) -> list[tuple[str, str]]:
    # Matching a leaf to its only neighbour is always part of some maximum
    # matching of a forest.
    adj = {v: set(nb) for v, nb in adj.items()}
    out = []
    leaves = sorted(v for v, nb in adj.items() if len(nb) == 1)
    while leaves:
        v = leaves.pop(rng.randrange(len(leaves)))
        if v not in adj or len(adj[v]) != 1:
            continue
        (u,) = adj[v]
        out.append((v, u))
        for x in (v, u):
            for y in adj.pop(x):
                if y in adj:
                    adj[y].discard(x)
                    if len(adj[y]) == 1:
                        leaves.append(y)
    return out


def maximum_matching(
    nodes: Iterable[str],
    links: Sequence[tuple[str, str]],
    rng: random.Random | None = None,
) -> list[int]:
    """Indices of a maximum-cardinality set of node-disjoint links.

    Loops are never matched and parallel links count once. ``rng`` breaks
    ties between equally large matchings.
    """
    rng = rng or random.Random(0)
    by_pair: dict[frozenset[str], list[int]] = {}
    for i, (a, b) in enumerate(links):
        if a != b:
            by_pair.setdefault(frozenset((a, b)), []).append(i)
    if not by_pair:
        return []
    pairs = sorted(by_pair, key=lambda p: min(by_pair[p]))
    rng.shuffle(pairs)
    adj: dict[str, set[str]] = {}
    for p in pairs:
        a, b = sorted(p)
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)

    if sum(len(nb) for nb in adj.values()) // 2 == len(adj) - _count_components(adj):
        matched = _forest_matching(adj, rng)
    else:
        g = nx.Graph()
        verts = sorted(adj)
        rng.shuffle(verts)
        g.add_nodes_from(verts)
        g.add_edges_from(tuple(sorted(p)) for p in pairs)
        matched = nx.max_weight_matching(g, maxcardinality=True)
    return sorted(rng.choice(by_pair[frozenset(e)]) for e in matched)


def _count_components(adj: dict[str, set[str]]) -> int:
    seen: set[str] = set()
    count = 0
    for v in adj:
        if v in seen:
            continue
        count += 1
        stack = [v]
        seen.add(v)
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return count


def determine_order(
    network: FusionNetwork,
    p_succ: float,
    measure: str = OVERHEAD,
    rng: random.Random | None = None,
) -> FusionSchedule:
    """Min-weight-maximum-matching-first contraction order.

    Each round takes the links of smallest merged weight, finds a maximum
    matching among them and contracts it in parallel. If only loops are of
    minimal weight, one of them is contracted.
    """
    _check(p_succ, measure)
    rng = rng or random.Random(0)
    state = ContractionState.from_network(network, p_succ, measure)
    rounds = []
    while state.links:
        lids = sorted(state.links)
        weights = [state.link_weight(l) for l in lids]
        wmin = min(weights)
        cand = [l for l, w in zip(lids, weights) if w <= wmin * (1 + REL_TOL)]
        movable = [l for l in cand if state.links[l][0] != state.links[l][1]]
        if movable:
            picked = maximum_matching((), [state.links[l] for l in movable], rng)
            chosen = tuple(sorted(movable[i] for i in picked))
        else:
            chosen = (rng.choice(cand),)
        for l in chosen:
            state.contract(l)
        rounds.append(chosen)
    return FusionSchedule(tuple(rounds), state.total, p_succ, measure)


def _validate_order(network: FusionNetwork, order: Sequence[int]) -> None:
    if sorted(order) != list(range(len(network.links))):
        raise OrderingError("order must be a permutation of the network's link indices")


def evaluate_order(
    network: FusionNetwork,
    order: Sequence[int],
    p_succ: float,
    measure: str = OVERHEAD,
) -> float:
    """Total final weight after contracting links in the given sequence."""
    _check(p_succ, measure)
    _validate_order(network, order)
    state = ContractionState.from_network(network, p_succ, measure)
    for l in order:
        state.contract(l)
    return state.total


def random_order(
    network: FusionNetwork,
    p_succ: float,
    measure: str = OVERHEAD,
    rng: random.Random | None = None,
) -> FusionSchedule:
    """A uniformly random fusion order, one link per round."""
    rng = rng or random.Random(0)
    order = list(range(len(network.links)))
    rng.shuffle(order)
    q = evaluate_order(network, order, p_succ, measure)
    return FusionSchedule(tuple((l,) for l in order), q, p_succ, measure)


def schedule_from_order(
    network: FusionNetwork,
    order: Sequence[int],
    p_succ: float,
    measure: str = OVERHEAD,
) -> FusionSchedule:
    q = evaluate_order(network, order, p_succ, measure)
    return FusionSchedule(tuple((l,) for l in order), q, p_succ, measure)
