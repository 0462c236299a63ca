import itertools
import json
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from causalid.graph import Admg, GraphError, LatentDag, latent_project, load_graph, parse_graph
from conftest import admgs

SMOKING = "Smoking -> Tar\nTar -> Cancer\nSmoking -> Cancer\n"
CONFOUNDED = SMOKING + "Smoking <-> Tar\n"


def test_parse_smoking_graph():
    g = parse_graph(SMOKING)
    assert g.nodes == ("Smoking", "Tar", "Cancer")
    assert g.directed == {("Smoking", "Tar"), ("Tar", "Cancer"), ("Smoking", "Cancer")}
    assert not g.bidirected


def test_parse_confounded_graph():
    g = parse_graph(CONFOUNDED)
    assert g.bidirected == {("Smoking", "Tar")}


def test_bidirected_stored_sorted():
    assert Admg(["B", "A"], [], [("B", "A")]).bidirected == {("A", "B")}


@pytest.mark.parametrize(
    "text, line",
    [
        ("X -> X", 1),
        ("A -> B\nA -> B", 2),
        ("A -> B\nB <-> A\nA <-> B", 3),
        ("A -> B\nA => B", 2),
        ("# c\n\nA -> B C", 3),
    ],
)
def test_edge_list_errors(text, line):
    with pytest.raises(GraphError) as info:
        parse_graph(text)
    assert info.value.line == line


def test_cycle_rejected():
    with pytest.raises(GraphError, match="cycle"):
        parse_graph("A -> B\nB -> C\nC -> A")


def test_unknown_node_rejected():
    with pytest.raises(GraphError):
        Admg(["A"], [("A", "B")])
    with pytest.raises(GraphError):
        parse_graph('{"nodes": ["A"], "directed": [["A", "B"]]}', "json")


def test_comments_reverse_arrow_and_bare_nodes():
    g = parse_graph("# header\nB <- A  # trailing\nC\n")
    assert g.nodes == ("B", "A", "C")
    assert g.directed == {("A", "B")}


def test_latent_edge_list():
    g = parse_graph("latent U\nU -> X\nU -> Y\n")
    assert isinstance(g, LatentDag)
    assert g.observed == ("X", "Y")
    assert latent_project(g) == Admg(["X", "Y"], [], [("X", "Y")])


def test_json_round_trip(tmp_path):
    g = parse_graph(CONFOUNDED)
    text = json.dumps(g.to_json())
    assert parse_graph(text, "json") == g
    path = tmp_path / "g.json"
    path.write_text(text)
    assert load_graph(path) == g
    edge_path = tmp_path / "g.txt"
    edge_path.write_text(g.to_edge_list())
    assert load_graph(edge_path) == g


def test_load_projects_latent(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("latent U\nU -> X\nU -> Y\nX -> Y\n")
    assert load_graph(path).bidirected == {("X", "Y")}
    assert isinstance(load_graph(path, project=False), LatentDag)


def test_projection_examples():
    g = LatentDag(["U", "L", "X", "Y"], [("U", "L"), ("L", "X"), ("U", "Y")], ["U", "L"])
    assert latent_project(g) == Admg(["X", "Y"], [], [("X", "Y")])
    plain = LatentDag(["A", "B"], [("A", "B")], [])
    assert latent_project(plain) == Admg(["A", "B"], [("A", "B")])


def test_projection_directed_through_latent():
    g = LatentDag(["X", "L", "Y"], [("X", "L"), ("L", "Y")], ["L"])
    assert latent_project(g) == Admg(["X", "Y"], [("X", "Y")])


def test_ancestors():
    g = parse_graph(SMOKING)
    assert g.ancestors({"Cancer"}) == {"Smoking", "Tar", "Cancer"}
    assert g.ancestors(set()) == set()
    assert g.ancestors({"Smoking"}) == {"Smoking"}
    with pytest.raises(GraphError):
        g.ancestors({"Nope"})


def test_districts():
    # blocks are ordered by their smallest member name
    assert parse_graph(CONFOUNDED).districts() == [frozenset({"Cancer"}), frozenset({"Smoking", "Tar"})]
    assert parse_graph(SMOKING).districts() == [frozenset({v}) for v in ["Cancer", "Smoking", "Tar"]]
    assert Admg(["X", "Y", "Z"], [], [("X", "Y"), ("Y", "Z")]).districts() == [frozenset("XYZ")]


def test_subgraph():
    g = parse_graph(CONFOUNDED)
    s = g.subgraph({"Smoking", "Tar"})
    assert s.directed == {("Smoking", "Tar")} and s.bidirected == {("Smoking", "Tar")}
    assert g.subgraph(g.nodes) == g
    assert g.subgraph(set()).nodes == ()


def test_mutilate():
    g = parse_graph(CONFOUNDED)
    m = g.mutilate(cut_incoming={"Smoking"})
    assert not m.bidirected and m.parents("Smoking") == ()
    assert g.mutilate() == g
    bare = g.mutilate(cut_incoming=g.nodes)
    assert not bare.directed and not bare.bidirected and bare.nodes == g.nodes
    out = g.mutilate(cut_outgoing={"Smoking"})
    assert out.directed == {("Tar", "Cancer")} and out.bidirected == g.bidirected


def test_topological_order():
    assert parse_graph(SMOKING).topological_order() == ("Smoking", "Tar", "Cancer")
    assert Admg(["B", "A"]).topological_order() == ("A", "B")
    assert parse_graph("Z -> Y\nY -> X").topological_order() == ("Z", "Y", "X")


@given(admgs, st.randoms(use_true_random=False))
def test_ancestor_properties(g, r):
    s = set(r.sample(g.nodes, r.randint(0, len(g.nodes))))
    t = s | set(r.sample(g.nodes, r.randint(0, len(g.nodes))))
    an = g.ancestors(s)
    assert s <= an <= g.ancestors(t)
    assert g.ancestors(an) == an
    dag = nx.DiGraph(list(g.directed))
    dag.add_nodes_from(g.nodes)
    assert an == set(s).union(*(nx.ancestors(dag, v) for v in s))


@given(admgs)
def test_district_partition(g):
    blocks = g.districts()
    assert set().union(*blocks) == set(g.nodes)
    assert sum(map(len, blocks)) == len(g.nodes)
    bi = nx.Graph(list(g.bidirected))
    bi.add_nodes_from(g.nodes)
    assert sorted(map(sorted, blocks)) == sorted(map(sorted, nx.connected_components(bi)))
    assert [min(b) for b in blocks] == sorted(min(b) for b in blocks)


@given(admgs)
def test_identity_operations(g):
    assert g.subgraph(g.nodes) == g
    assert g.mutilate(set(), set()) == g


@given(admgs)
def test_topological_order_valid_and_stable(g):
    order = g.topological_order()
    assert sorted(order) == sorted(g.nodes)
    position = {v: i for i, v in enumerate(order)}
    assert all(position[u] < position[v] for u, v in g.directed)
    assert order == g.topological_order() == Admg(g.nodes, g.directed, g.bidirected).topological_order()


def _random_latent_dag(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    nodes = [f"V{i}" for i in range(n)]
    rng.shuffle(nodes)
    edges = [(nodes[i], nodes[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.35]
    latent = [v for v in nodes if rng.random() < 0.35]
    return LatentDag(sorted(nodes), edges, latent)


def _brute_projection(g: LatentDag) -> Admg:
    dag = nx.DiGraph(list(g.directed))
    dag.add_nodes_from(g.nodes)
    latent = set(g.latent)

    def latent_path(u, v):
        return any(set(p[1:-1]) <= latent for p in nx.all_simple_paths(dag, u, v))

    observed = [v for v in g.nodes if v not in latent]
    directed = [(u, v) for u in observed for v in observed if u != v and latent_path(u, v)]
    bidirected = [
        (a, b)
        for a, b in itertools.combinations(observed, 2)
        if any(latent_path(u, a) and latent_path(u, b) for u in latent)
    ]
    return Admg(observed, directed, bidirected)


@given(st.integers(0, 10**9))
def test_projection_matches_path_oracle(seed):
    g = _random_latent_dag(seed)
    assert latent_project(g) == _brute_projection(g)


@given(st.integers(0, 10**9))
def test_projection_commutes_with_relabel(seed):
    g = _random_latent_dag(seed)
    mapping = {v: f"R{v}" for v in g.observed}
    assert latent_project(g.relabel(mapping)) == latent_project(g).relabel(mapping)
