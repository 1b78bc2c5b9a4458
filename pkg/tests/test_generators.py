import random
from collections import Counter

import networkx as nx
import pytest

from fusegraph.generators import (
    FamilySpecError,
    generate,
    parse_family,
    parity_encoded,
    random_er,
    rhg,
    star,
)

# (family spec, |V|, |E|) for every row of the reference table.
REFERENCE_ROWS = [
    ("star:6", 6, 5),
    ("star:12", 12, 11),
    ("star:18", 18, 17),
    ("star:24", 24, 23),
    ("lattice:3,3", 9, 12),
    ("lattice:4,4", 16, 24),
    ("lattice:5,5", 25, 40),
    ("lattice:6,6", 36, 60),
    ("rhg:1,1,1", 18, 24),
    ("rhg:2,2,2", 90, 144),
    ("tree:2,2", 7, 6),
    ("tree:2,2,2", 15, 14),
    ("tree:2,2,2,2", 31, 30),
    ("tree:3,3,3", 40, 39),
    ("tree:4,4,4", 85, 84),
    ("tree:8,2,2", 57, 56),
    ("repeater:3", 12, 21),
    ("repeater:4", 16, 36),
    ("repeater:6", 24, 78),
    ("parity:3star,2,2", 12, 17),
    ("parity:3star,3,3", 27, 48),
    ("parity:3star,4,4", 48, 95),
    ("parity:3star,5,5", 75, 158),
    ("parity:6cycle,2,2", 24, 42),
    ("parity:6cycle,3,3", 54, 114),
    ("parity:6cycle,4,4", 96, 222),
]


def test_reference_has_26_rows():
    assert len(REFERENCE_ROWS) == 26


@pytest.mark.parametrize("spec,nv,ne", REFERENCE_ROWS)
def test_reference_counts(spec, nv, ne):
    g = generate(spec)
    assert (g.num_vertices, g.num_edges) == (nv, ne)


@pytest.mark.parametrize("dims", [(1, 1, 1), (2, 2, 2), (1, 2, 3), (3, 1, 2)])
def test_rhg_closed_form(dims):
    lx, ly, lz = dims
    faces = lx * ly * (lz + 1) + ly * lz * (lx + 1) + lz * lx * (ly + 1)
    ledges = lx * (ly + 1) * (lz + 1) + ly * (lz + 1) * (lx + 1) + lz * (lx + 1) * (ly + 1)
    g = rhg(*dims)
    assert g.num_vertices == faces + ledges
    assert g.num_edges == 4 * faces


def test_rhg_is_bipartite_face_edge_incidence():
    g = rhg(1, 1, 1)
    nxg = g.to_networkx()
    assert nx.is_bipartite(nxg)
    degs = Counter(d for _, d in nxg.degree)
    # 6 faces of degree 4; 12 cube edges each on 2 faces
    assert degs == {4: 6, 2: 12}


def test_repeater_structure():
    g = generate("repeater:3")
    degs = Counter(g.degree(v) for v in g.vertices)
    assert degs == {6: 6, 1: 6}


def test_tree_structure():
    g = generate("tree:2,2,2")
    assert nx.is_tree(g.to_networkx())
    assert g.degree("0") == 2


def test_parity_encoded_per_vertex_block():
    # a single logical vertex: bundle of m plus (n-1) hubs each with m-1 leaves
    from fusegraph.graph import Graph

    g = parity_encoded(Graph(["a"]), 3, 4)
    assert g.num_vertices == 3 * 4
    assert g.num_edges == (3 - 1) * (2 * 4 - 1)


def test_parity_edge_block_is_complete_bipartite():
    from fusegraph.graph import Graph

    one = parity_encoded(Graph(["a", "b"]), 2, 3)
    two = parity_encoded(Graph(["a", "b"], [("a", "b")]), 2, 3)
    assert two.num_edges - one.num_edges == 9


def test_star_root_and_leaves():
    g = star(5)
    assert g.degree("0") == 4
    assert all(g.degree(str(i)) == 1 for i in range(1, 5))


class TestER:
    def test_exact_counts(self):
        rng = random.Random(0)
        for n, m in [(5, 0), (5, 10), (12, 40), (16, 24)]:
            g = random_er(n, m, rng)
            assert (g.num_vertices, g.num_edges) == (n, m)

    def test_every_isomorphism_class_appears(self):
        # oracle: all 5-vertex 4-edge graphs up to isomorphism, enumerated directly
        from itertools import combinations

        pairs = list(combinations(range(5), 2))
        classes = []
        for es in combinations(pairs, 4):
            h = nx.Graph(es)
            h.add_nodes_from(range(5))
            if not any(nx.is_isomorphic(h, c) for c in classes):
                classes.append(h)
        seen = [False] * len(classes)
        rng = random.Random(7)
        for _ in range(10_000):
            g = random_er(5, 4, rng).to_networkx()
            for i, c in enumerate(classes):
                if not seen[i] and nx.is_isomorphic(g, c):
                    seen[i] = True
            if all(seen):
                break
        assert len(classes) == 6
        assert all(seen)

    def test_uniform_over_labelled_graphs(self):
        # chi-square against the uniform law on the C(6, 2) = 15 labelled graphs
        from scipy.stats import chisquare

        rng = random.Random(11)
        counts = Counter(frozenset(random_er(4, 2, rng).edges) for _ in range(15_000))
        assert len(counts) == 15
        assert chisquare(list(counts.values())).pvalue > 1e-4

    def test_too_many_edges(self):
        with pytest.raises(FamilySpecError):
            random_er(4, 7, random.Random(0))


class TestParse:
    @pytest.mark.parametrize(
        "text",
        ["star:6", "rhg:2,2,2", "tree:2,2,2", "parity:3star,4,4", "er:12,40",
         "parity:6cycle,2,2", "lattice:3,3", "repeater:6", "complete:4", "cycle:5"],
    )
    def test_round_trip(self, text):
        assert str(parse_family(text)) == text

    def test_aliases(self):
        assert parse_family("random_er:5,3") == parse_family("er:5,3")
        assert parse_family("parity_encoded:3star,2,2") == parse_family("parity:3star,2,2")

    @pytest.mark.parametrize(
        "text",
        ["star:2", "star", "star:x", "lattice:3", "rhg:1,1", "er:4,7", "tree:",
         "parity:3star,2", "parity:3blob,2,2", "blob:3", "cycle:2", "lattice:0,3"],
    )
    def test_invalid(self, text):
        with pytest.raises(FamilySpecError):
            parse_family(text)

    def test_er_is_seeded(self):
        a = generate("er:12,30", random.Random(5))
        b = generate("er:12,30", random.Random(5))
        assert a == b
