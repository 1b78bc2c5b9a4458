"""Graph families: stars, cycles, lattices, RHG lattices, trees, repeater
graphs, parity-encoded graphs and Erdős–Rényi G(n, M) samples.

Family specs can be written as short strings, e.g. ``"star:6"``,
``"rhg:2,2,2"``, ``"tree:2,2,2"``, ``"parity:3star,4,4"`` or ``"er:12,40"``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product

from .graph import Graph

__all__ = [
    "FamilySpec",
    "FamilySpecError",
    "generate",
    "parse_family",
    "star",
    "cycle",
    "complete",
    "lattice",
    "rhg",
    "tree",
    "repeater",
    "parity_encoded",
    "random_er",
]


class FamilySpecError(ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    """A graph family name with its integer parameters.

    ``logical`` is only used by the ``parity`` family and holds the
    spec of the logical-level graph.
    """

    family: str
    params: tuple[int, ...]
    logical: FamilySpec | None = None

    def __str__(self) -> str:
        if self.family == "parity":
            return f"parity:{_logical_name(self.logical)},{self.params[0]},{self.params[1]}"
        return f"{self.family}:{','.join(map(str, self.params))}"


_ARITY = {
    "star": 1,
    "cycle": 1,
    "complete": 1,
    "lattice": 2,
    "rhg": 3,
    "repeater": 1,
    "er": 2,
}


def _logical_name(spec: FamilySpec) -> str:
    if spec.family in ("star", "cycle", "complete"):
        return f"{spec.params[0]}{spec.family}"
    return str(spec).replace(",", "_")


def _parse_logical(token: str) -> FamilySpec:
    for fam in ("star", "cycle", "complete"):
        if token.endswith(fam) and token[: -len(fam)].isdigit():
            return FamilySpec(fam, (int(token[: -len(fam)]),))
    raise FamilySpecError(
        f"unknown logical graph {token!r}; use e.g. 3star, 6cycle, 4complete"
    )


def parse_family(text: str) -> FamilySpec:
    """Parse ``"name:p1,p2,..."`` into a validated :class:`FamilySpec`."""
    name, _, rest = text.strip().partition(":")
    name = name.lower()
    if name == "random_er":
        name = "er"
    if name == "parity_encoded":
        name = "parity"
    if not rest:
        raise FamilySpecError(f"missing parameters in {text!r}")
    tokens = [t.strip() for t in rest.split(",")]
    if name == "parity":
        if len(tokens) != 3:
            raise FamilySpecError("parity expects <logical>,n,m")
        spec = FamilySpec("parity", _ints(tokens[1:]), _parse_logical(tokens[0]))
    else:
        spec = FamilySpec(name, _ints(tokens))
    validate(spec)
    return spec


def _ints(tokens: list[str]) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in tokens)
    except ValueError:
        raise FamilySpecError(f"non-integer parameter in {tokens}") from None


def validate(spec: FamilySpec) -> None:
    fam, p = spec.family, spec.params
    if fam == "tree":
        if not p:
            raise FamilySpecError("tree needs at least one branching number")
    elif fam == "parity":
        if len(p) != 2 or spec.logical is None:
            raise FamilySpecError("parity needs a logical graph and (n, m)")
        validate(spec.logical)
    elif fam in _ARITY:
        if len(p) != _ARITY[fam]:
            raise FamilySpecError(f"{fam} takes {_ARITY[fam]} parameter(s), got {len(p)}")
    else:
        raise FamilySpecError(f"unknown graph family {fam!r}")
    if any(x < 1 for x in p):
        raise FamilySpecError(f"size parameters must be >= 1: {spec}")
    if fam == "star" and p[0] < 3:
        raise FamilySpecError("star needs m >= 3")
    if fam == "cycle" and p[0] < 3:
        raise FamilySpecError("cycle needs m >= 3")
    if fam == "er" and p[1] > p[0] * (p[0] - 1) // 2:
        raise FamilySpecError(f"{p[1]} edges exceed the maximum for {p[0]} vertices")


def generate(spec: FamilySpec | str, rng: random.Random | None = None) -> Graph:
    """Build the graph named by ``spec``; ``rng`` is only used by ``er``."""
    if isinstance(spec, str):
        spec = parse_family(spec)
    else:
        validate(spec)
    fam, p = spec.family, spec.params
    if fam == "star":
        return star(*p)
    if fam == "cycle":
        return cycle(*p)
    if fam == "complete":
        return complete(*p)
    if fam == "lattice":
        return lattice(*p)
    if fam == "rhg":
        return rhg(*p)
    if fam == "tree":
        return tree(*p)
    if fam == "repeater":
        return repeater(*p)
    if fam == "parity":
        return parity_encoded(generate(spec.logical), *p)
    if fam == "er":
        return random_er(p[0], p[1], rng if rng is not None else random.Random(0))
    raise FamilySpecError(f"unknown graph family {fam!r}")


def star(m: int) -> Graph:
    """Root ``"0"`` joined to leaves ``"1"`` .. ``"m-1"``."""
    return Graph(range(m), ((0, i) for i in range(1, m)))


def cycle(m: int) -> Graph:
    return Graph(range(m), ((i, (i + 1) % m) for i in range(m)))


def complete(m: int) -> Graph:
    return Graph(range(m), combinations(range(m), 2))


def lattice(mx: int, my: int) -> Graph:
    """Square grid with ``mx`` columns and ``my`` rows; vertex id ``y*mx + x``."""

    def idx(x, y):
        return y * mx + x

    edges = []
    for x, y in product(range(mx), range(my)):
        if x + 1 < mx:
            edges.append((idx(x, y), idx(x + 1, y)))
        if y + 1 < my:
            edges.append((idx(x, y), idx(x, y + 1)))
    return Graph(range(mx * my), edges)


def rhg(lx: int, ly: int, lz: int) -> Graph:
    """RHG lattice on an ``lx*ly*lz`` block of unit cubes.

    One vertex per face and per edge of the cubic cell complex, with each face
    joined to its four bounding edges. Positions use doubled coordinates: a
    point with one odd coordinate is an edge midpoint, two odd coordinates a
    face centre.
    """
    dims = (lx, ly, lz)
    sites = [
        c
        for c in product(*(range(2 * d + 1) for d in dims))
        if sum(x % 2 for x in c) in (1, 2)
    ]
    index = {c: i for i, c in enumerate(sites)}
    edges = []
    for c in sites:
        odd = [k for k in range(3) if c[k] % 2]
        if len(odd) != 2:
            continue
        for k in odd:
            for step in (-1, 1):
                e = list(c)
                e[k] += step
                edges.append((index[c], index[tuple(e)]))
    return Graph(range(len(sites)), edges)


def tree(*branching: int) -> Graph:
    """Rooted tree: the root has ``branching[0]`` children, every
    generation-i vertex has ``branching[i]`` children."""
    edges = []
    frontier = [0]
    nxt = 1
    for b in branching:
        new = []
        for parent in frontier:
            for _ in range(b):
                edges.append((parent, nxt))
                new.append(nxt)
                nxt += 1
        frontier = new
    return Graph(range(nxt), edges)


def repeater(m: int) -> Graph:
    """``2m`` mutually adjacent inner vertices, each with one pendant leaf."""
    inner = range(2 * m)
    edges = list(combinations(inner, 2))
    edges += [(i, 2 * m + i) for i in inner]
    return Graph(range(4 * m), edges)


def parity_encoded(logical: Graph, n: int, m: int) -> Graph:
    """Physical-level graph of an (n, m) parity-encoded graph state.

    Each logical vertex ``v`` becomes ``n*m`` physical vertices: a bundle
    ``v:0..v:m-1`` carrying the logical Z operator, and ``n-1`` hubs
    ``v:h<j>`` joined to every bundle vertex, each hub with ``m-1`` private
    leaves. Every logical edge becomes the complete bipartite graph between
    the two bundles.
    """
    edges = []
    names = []
    for v in logical.sorted_vertices():
        bundle = [f"{v}:{k}" for k in range(m)]
        names += bundle
        for j in range(1, n):
            hub = f"{v}:h{j}"
            names.append(hub)
            edges += [(hub, b) for b in bundle]
            for k in range(1, m):
                leaf = f"{v}:h{j}.{k}"
                names.append(leaf)
                edges.append((hub, leaf))
    for u, v in logical.sorted_edges():
        edges += [(f"{u}:{a}", f"{v}:{b}") for a in range(m) for b in range(m)]
    g = Graph(names, edges)
    # Compact integer ids keep exports readable.
    return g.relabel({name: str(i) for i, name in enumerate(names)})


def random_er(n: int, num_edges: int, rng: random.Random) -> Graph:
    """Uniform sample from all graphs on ``n`` labelled vertices with exactly
    ``num_edges`` edges."""
    pairs = list(combinations(range(n), 2))
    if not 0 <= num_edges <= len(pairs):
        raise FamilySpecError(f"cannot place {num_edges} edges on {n} vertices")
    return Graph(range(n), rng.sample(pairs, num_edges))
