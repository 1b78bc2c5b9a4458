import random
from collections import Counter

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusegraph import Graph, generate, unravel
from fusegraph.clifford import CliffordRecord
from fusegraph.network import EXTERNAL, INTER, INTRA, NetworkError, build_network
from fusegraph.unravel import UnravelResult

from test_unravel import C4, valid_er


def net_for(g, seed=0, enabled=True):
    rng = random.Random(seed)
    return build_network(unravel(g, rng, enabled), rng)


def check_invariants(r: UnravelResult, net):
    g = r.unraveled
    groups = net.groups()
    big = [v for v in g.vertices if g.degree(v) >= 2]
    # node count and one seed per group, named after its vertex
    assert len(net.nodes) == sum(g.degree(v) - 1 for v in big)
    assert set(groups) == set(big)
    for v, nodes in groups.items():
        seeds = [n for n in nodes if n.is_seed]
        assert [n.name for n in seeds] == [v]
        others = sorted(n.name for n in nodes if not n.is_seed)
        assert others == sorted(f"{v}-{j}" for j in range(1, len(nodes)))
    group_of = {n.name: n.group for n in net.nodes}
    # intra links form a path per group
    for v, nodes in groups.items():
        h = nx.MultiGraph()
        h.add_nodes_from(n.name for n in nodes)
        h.add_edges_from(l.ends for l in net.links if l.provenance == INTRA and group_of[l.ends[0]] == v)
        assert h.number_of_edges() == len(nodes) - 1
        assert nx.is_tree(nx.Graph(h)) and max((d for _, d in h.degree), default=0) <= 2
    # link census
    inter_edges = [(u, v) for u, v in g.sorted_edges() if g.degree(u) >= 2 and g.degree(v) >= 2]
    kinds = Counter(l.provenance for l in net.links)
    assert kinds[INTER] == len(inter_edges)
    assert kinds[EXTERNAL] == len(r.external_fusions)
    assert kinds[INTRA] == sum(len(n) - 1 for n in groups.values())
    # slot conservation: 1 root + 2 leaves per node
    root_uses, leaf_uses = Counter(), Counter()
    for l in net.links:
        for end, root in zip(l.ends, l.roots):
            (root_uses if root else leaf_uses)[end] += 1
    for n in net.nodes:
        assert root_uses[n.name] <= 1
        assert root_uses[n.name] == int(n.root_used)
        assert leaf_uses[n.name] + len(n.hosted) + n.free_leaf_slots == 2
        assert n.free_leaf_slots == 0
    # external links join different groups and carry the right root indicators
    for l in net.links:
        if l.provenance == EXTERNAL:
            a, b = l.ends
            assert group_of[a] != group_of[b]
            for x, root in zip(l.vertices, l.roots):
                assert root == int(g.degree(x) >= 2)
            flag = not (r.cliffords[l.vertices[0]].is_identity and r.cliffords[l.vertices[1]].is_identity)
            assert l.clifford_flag == flag
        else:
            assert not l.clifford_flag
    # each degree-1 vertex is hosted once, or fused externally
    ext = {x for p in r.external_fusions for x in p}
    hosted = Counter(h for n in net.nodes for h in n.hosted)
    for v in g.vertices:
        if g.degree(v) == 1:
            assert hosted[v] == (0 if v in ext else 1)


def test_star5_chain():
    net = net_for(generate("star:5"))
    assert len(net.nodes) == 3
    assert [l.kind for l in net.links] == ["RL", "RL"]
    assert {l.provenance for l in net.links} == {INTRA}


def test_star3_single_node():
    net = net_for(generate("star:3"))
    assert len(net.nodes) == 1 and net.links == ()
    assert net.nodes[0].hosted == ("1", "2")


def test_unraveled_four_cycle():
    r = unravel(C4, random.Random(0))
    net = build_network(r, random.Random(0))
    assert len(net.nodes) == 2
    (l,) = net.links
    assert l.kind == "RR" and l.provenance == EXTERNAL
    check_invariants(r, net)


def test_raw_four_cycle():
    net = net_for(C4, enabled=False)
    assert len(net.nodes) == 4
    assert [l.kind for l in net.links] == ["LL"] * 4
    h = nx.Graph([l.ends for l in net.links])
    assert nx.cycle_graph(4).number_of_edges() == h.number_of_edges()
    assert all(d == 2 for _, d in h.degree)


def test_leaf_external_fusion_uses_hub_slot():
    # path a-b-c plus d-e-f, with an external fusion between leaves c and d
    g = Graph([], [("a", "b"), ("b", "c"), ("d", "e"), ("e", "f")])
    r = UnravelResult(g, g, (), (("c", "d"),), CliffordRecord())
    net = build_network(r, random.Random(0))
    ext = [l for l in net.links if l.provenance == EXTERNAL]
    assert len(ext) == 1 and ext[0].kind == "LL"
    assert {net.node(x).group for x in ext[0].ends} == {"b", "e"}


def test_clifford_flag():
    g = Graph([], [("a", "b"), ("b", "c"), ("d", "e"), ("e", "f")])
    rec = CliffordRecord().apply("b", "H")
    r = UnravelResult(g, g, (), (("b", "e"),), rec)
    (ext,) = [l for l in build_network(r, random.Random(0)).links if l.provenance == EXTERNAL]
    assert ext.clifford_flag and ext.kind == "RR"


def test_errors():
    g = Graph([], [("a", "b"), ("b", "c"), ("d", "e"), ("e", "f")])
    bad = UnravelResult(g, g, (), (("b", "zz"),), CliffordRecord())
    with pytest.raises(NetworkError, match="missing"):
        build_network(bad, random.Random(0))
    twice = UnravelResult(g, g, (), (("a", "d"), ("a", "f")), CliffordRecord())
    with pytest.raises(NetworkError):
        build_network(twice, random.Random(0))
    same_group = UnravelResult(g, g, (), (("a", "c"),), CliffordRecord())
    with pytest.raises(NetworkError, match="one node group"):
        build_network(same_group, random.Random(0))


def test_seed_position_is_uniform():
    # the seed sits at each of the 4 chain positions about equally often
    pos = Counter()
    for seed in range(2000):
        net = build_network(unravel(generate("star:6"), random.Random(seed)), random.Random(seed))
        chain = nx.Graph([l.ends for l in net.links])
        ends = [n for n, d in chain.degree if d == 1]
        path = nx.shortest_path(chain, *sorted(ends))
        pos[min(path.index("0"), 3 - path.index("0"))] += 1
    # end positions and inner positions, 1000 expected each
    assert abs(pos[0] - 1000) < 120 and abs(pos[1] - 1000) < 120


def test_deterministic():
    g = generate("repeater:3")
    assert net_for(g, 4) == net_for(g, 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_invariants_on_random_graphs(seed, enabled):
    g = valid_er(seed)
    rng = random.Random(seed)
    r = unravel(g, rng, enabled)
    check_invariants(r, build_network(r, rng))


@pytest.mark.parametrize("spec", ["rhg:1,1,1", "parity:3star,2,2", "lattice:3,3", "tree:2,2,2"])
def test_invariants_on_families(spec):
    rng = random.Random(1)
    r = unravel(generate(spec), rng)
    check_invariants(r, build_network(r, rng))
