"""Fusion networks: which 3-qubit star resource states to fuse, and how.

Every vertex ``v`` of the unraveled graph with degree >= 2 is realised as a
star with ``deg(v)`` leaves, built from a chain of ``deg(v) - 1`` resource
states (a node group). Edges of the unraveled graph become leaf-to-leaf
links between groups; external fusions become links whose root indicators
depend on the degrees of the fused vertices.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .graph import _key
from .unravel import UnravelResult, check_components

__all__ = [
    "FNode",
    "FLink",
    "FusionNetwork",
    "NetworkError",
    "build_network",
    "INTRA",
    "INTER",
    "EXTERNAL",
]

INTRA = "intra"
INTER = "inter"
EXTERNAL = "external"


class NetworkError(ValueError):
    pass


@dataclass(frozen=True)
class FNode:
    name: str
    group: str
    is_seed: bool
    free_leaf_slots: int = 0
    root_used: bool = False
    # Degree-1 vertices of the unraveled graph realised as leaf qubits here.
    hosted: tuple[str, ...] = ()


@dataclass(frozen=True)
class FLink:
    """A fusion between two nodes.

    ``roots[i]`` is 1 when the fusion consumes the root qubit of ``ends[i]``.
    ``vertices`` names the unraveled-graph vertex of each fused qubit, when
    that qubit is a vertex of the unraveled graph (external fusions only).
    """

    ends: tuple[str, str]
    roots: tuple[int, int]
    provenance: str
    clifford_flag: bool = False
    vertices: tuple[str | None, str | None] = (None, None)

    @property
    def kind(self) -> str:
        return {2: "RR", 1: "RL", 0: "LL"}[sum(self.roots)]


@dataclass(frozen=True)
class FusionNetwork:
    nodes: tuple[FNode, ...]
    links: tuple[FLink, ...]

    def node(self, name: str) -> FNode:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    def groups(self) -> dict[str, list[FNode]]:
        out: dict[str, list[FNode]] = {}
        for n in self.nodes:
            out.setdefault(n.group, []).append(n)
        return out


class _Slots:
    """Free leaf qubits per node of one group."""

    def __init__(self, names: list[str], free: dict[str, int]) -> None:
        self.names = names
        self.free = free

    def take(self, rng: random.Random) -> str:
        open_ = [n for n in self.names if self.free[n] > 0]
        if not open_:
            raise NetworkError(f"no free leaf slot left in group of {self.names[0]}")
        name = rng.choice(open_)
        self.free[name] -= 1
        return name


def build_network(result: UnravelResult, rng: random.Random) -> FusionNetwork:
    """Build a randomised fusion network for an unraveled graph.

    Random choices: the seed position within each group's chain, and which
    node of a group supplies the leaf qubit for each edge or external fusion.
    """
    graph = result.unraveled
    check_components(graph)
    cliffords = result.cliffords

    nodes: dict[str, dict] = {}
    links: list[FLink] = []
    slots: dict[str, _Slots] = {}
    seed_of: dict[str, str] = {}

    for v in graph.sorted_vertices():
        deg = graph.degree(v)
        if deg < 2:
            continue
        size = deg - 1
        s = rng.randrange(size)
        names = []
        j = 1
        for pos in range(size):
            if pos == s:
                names.append(v)
            else:
                names.append(f"{v}-{j}")
                j += 1
        # Root qubits of non-seed nodes are consumed by the link towards the
        # seed; the node nearer the seed gives a leaf.
        free = {n: 2 for n in names}
        for pos in range(size - 1):
            a, b = names[pos], names[pos + 1]
            if pos < s:
                leaf_side, root_side = b, a
            else:
                leaf_side, root_side = a, b
            free[leaf_side] -= 1
            links.append(
                FLink(
                    (leaf_side, root_side), (0, 1), INTRA
                )
            )
        for pos, n in enumerate(names):
            nodes[n] = {
                "group": v,
                "is_seed": pos == s,
                "root_used": pos != s,
                "hosted": [],
            }
        slots[v] = _Slots(names, free)
        seed_of[v] = v

    ext_members: dict[str, tuple[str, str]] = {}
    for a, b in result.external_fusions:
        for x in (a, b):
            if not graph.has_vertex(x):
                raise NetworkError(f"external fusion references missing vertex {x!r}")
            if x in ext_members:
                raise NetworkError(f"vertex {x!r} appears in two external fusions")
        if graph.has_edge(a, b):
            raise NetworkError(f"external fusion pair {a!r}, {b!r} is adjacent")
        ext_members[a] = (a, b)
        ext_members[b] = (a, b)

    # Leaf qubit consumers: one per (group, neighbour) incidence.
    jobs: list[tuple[str, str]] = []
    for u, v in graph.sorted_edges():
        du, dv = graph.degree(u), graph.degree(v)
        if du >= 2 and dv >= 2:
            jobs.append(("edge", u, v))
        elif du == 1 and dv == 1:
            raise NetworkError(f"isolated edge {u!r}-{v!r}")
        else:
            hub, leaf = (u, v) if du >= 2 else (v, u)
            if leaf not in ext_members:
                jobs.append(("leaf", hub, leaf))
    rng.shuffle(jobs)

    for kind, x, y in jobs:
        if kind == "edge":
            nx_, ny = slots[x].take(rng), slots[y].take(rng)
            links.append(FLink((nx_, ny), (0, 0), INTER))
        else:
            host = slots[x].take(rng)
            nodes[host]["hosted"].append(y)

    ext_links = []
    for a, b in result.external_fusions:
        ends, roots = [], []
        for x in (a, b):
            if graph.degree(x) >= 2:
                seed = seed_of[x]
                if nodes[seed]["root_used"]:
                    raise NetworkError(f"root of {seed!r} already used")
                nodes[seed]["root_used"] = True
                ends.append(seed)
                roots.append(1)
            else:
                (hub,) = graph.adj(x)
                ends.append(slots[hub].take(rng))
                roots.append(0)
        ga, gb = nodes[ends[0]]["group"], nodes[ends[1]]["group"]
        if ga == gb:
            raise NetworkError(f"external fusion ({a}, {b}) inside one node group")
        flag = not (cliffords[a].is_identity and cliffords[b].is_identity)
        ext_links.append(
            FLink(tuple(ends), tuple(roots), EXTERNAL, flag, (a, b))
        )
    links.extend(ext_links)

    out_nodes = []
    for name in sorted(nodes, key=lambda n: (_key(nodes[n]["group"]), not nodes[n]["is_seed"], _key(n))):
        d = nodes[name]
        g = d["group"]
        out_nodes.append(
            FNode(
                name,
                g,
                d["is_seed"],
                slots[g].free[name],
                d["root_used"],
                tuple(sorted(d["hosted"], key=_key)),
            )
        )
    for s in slots.values():
        if any(s.free.values()):
            raise NetworkError(f"unused leaf slot in group {s.names}")
    return FusionNetwork(tuple(out_nodes), tuple(links))
