from __future__ import annotations

import itertools

import pytest
from hypothesis import given

from clearbench import bruteforce as bf
from clearbench.errors import (
    CycleInDag,
    CyclicGraph,
    DuplicateEdge,
    EdgeKindMismatch,
    NoCycleExists,
    NoPathExists,
    SelfLoop,
    UnknownEndpoint,
    UnknownNode,
)
from clearbench.graph import (
    Edge,
    GraphKind,
    MixedGraph,
    Step,
    TripleKind,
    build_graph,
    classify_triple,
    classify_triples,
    cycles,
    enumerate_paths,
    enumerate_triples,
    parse_graph_text,
    path_from_nodes,
    query_elements,
    relatives,
    topological,
)
from strategies import sampled_graphs, small_dags


# build_graph


def test_build_chain(g_chain):
    assert g_chain.kind is GraphKind.DAG
    assert g_chain.nodes == ("A", "B", "C")
    assert g_chain.n_edges == 2


def test_two_cycle_rejected_in_dag():
    with pytest.raises(CycleInDag):
        build_graph("DAG", ["A", "B"], [("A", "B"), ("B", "A")])


def test_two_cycle_allowed_in_directed_graph():
    g = build_graph("Directed", ["A", "B"], [("A", "B"), ("B", "A")])
    assert cycles(g, "exists")


def test_frontdoor_graph(g_front):
    assert g_front.kind is GraphKind.ADMG
    assert g_front.bidirected


@pytest.mark.parametrize(
    "args, error",
    [
        (("DAG", ["A", "B"], [("A", "A")]), SelfLoop),
        (("DAG", ["A", "B"], [("A", "B"), ("A", "B")]), DuplicateEdge),
        (("DAG", ["A", "B"], [("A", "C")]), UnknownEndpoint),
        (("DAG", ["A", "B"], [], [("A", "B")]), EdgeKindMismatch),
        (("Undirected", ["A", "B"], [("A", "B")]), EdgeKindMismatch),
    ],
)
def test_build_errors(args, error):
    with pytest.raises(error):
        build_graph(*args)


def test_text_round_trip(g_front):
    text = g_front.to_text()
    assert text == "nodes: X, M, Y; directed edges: X->M, M->Y; bi-directed edges: X<->Y"
    assert parse_graph_text(text, GraphKind.ADMG) == g_front


@given(sampled_graphs(kinds=tuple(GraphKind)))
def test_dict_round_trip(g):
    assert MixedGraph.from_dict(g.to_dict()) == g


# element queries


def test_query_elements(g_chain, g_front):
    assert query_elements(g_chain, "count_nodes") == 3
    assert query_elements(g_chain, "has_edge", "A->C") is False
    assert query_elements(g_chain, "has_edge", "A->B") is True
    assert query_elements(g_chain, "has_node", "Q") is False
    assert set(query_elements(g_front, "list_edges")) == {
        Edge("X", "M", "->"),
        Edge("M", "Y", "->"),
        Edge("X", "Y", "<->"),
    }


@given(sampled_graphs(kinds=tuple(GraphKind)))
def test_counts_match_listings(g):
    assert query_elements(g, "count_nodes") == len(query_elements(g, "list_nodes"))
    assert query_elements(g, "count_edges") == len(query_elements(g, "list_edges"))


# relatives


def test_relatives(g_chain, g_conf):
    assert relatives(g_chain, "C", "ancestors") == {"A", "B"}
    assert relatives(g_chain, "A", "parents") == frozenset()
    assert relatives(g_conf, "Z", "descendants") == {"X", "Y"}
    with pytest.raises(UnknownNode):
        relatives(g_chain, "Q", "parents")


@given(sampled_graphs())
def test_ancestry_is_irreflexive_and_dual(g):
    for v in g.nodes:
        assert v not in relatives(g, v, "ancestors")
    for x, y in itertools.permutations(g.nodes, 2):
        assert (y in relatives(g, x, "descendants")) == (x in relatives(g, y, "ancestors"))


# triples


def test_triples(g_chain, g_vs, g_conf):
    assert classify_triples(g_chain, "enumerate", TripleKind.CHAIN) == [("A", "B", "C")]
    assert enumerate_triples(g_vs, TripleKind.VSTRUCTURE) == [("A", "B", "C")]
    assert enumerate_triples(g_conf, TripleKind.FORK) == [("X", "Z", "Y")]
    assert classify_triples(g_vs, "classify", "A", "B", "C") is TripleKind.VSTRUCTURE


def test_shielded_collider_is_not_a_v_structure():
    g = build_graph("DAG", ["A", "B", "C"], [("A", "B"), ("C", "B"), ("A", "C")])
    assert enumerate_triples(g, TripleKind.VSTRUCTURE) == []


@given(sampled_graphs(kinds=(GraphKind.DAG,)))
def test_triple_classification_exhaustive(g):
    for a, m, b in itertools.permutations(g.nodes, 3):
        sides = [g.has_directed(a, m) or g.has_directed(m, a), g.has_directed(b, m) or g.has_directed(m, b)]
        kind = classify_triple(g, a, m, b)
        if not all(sides):
            assert kind is None
            continue
        into_m = g.has_directed(a, m) + g.has_directed(b, m)
        if into_m == 2:
            assert kind is (None if g.is_adjacent(a, b) else TripleKind.VSTRUCTURE)
        elif into_m == 1:
            assert kind is TripleKind.CHAIN
        else:
            assert kind is TripleKind.FORK


# paths


def test_paths(g_conf, g_chain):
    assert enumerate_paths(g_conf, "X", "Y", "count") == 2
    assert str(enumerate_paths(g_chain, "A", "C", "shortest")) == "A->B->C"
    (back,) = enumerate_paths(g_chain, "C", "A", "all")
    assert back.nodes == ("C", "B", "A")
    assert back.steps == (Step.BACKWARD, Step.BACKWARD)


def test_no_path():
    g = build_graph("DAG", ["A", "B", "C"], [("A", "B")])
    with pytest.raises(NoPathExists):
        enumerate_paths(g, "A", "C", "shortest")


def test_path_ties_break_lexicographically():
    g = build_graph("Undirected", ["A", "B", "C", "D"], undirected=[("A", "C"), ("C", "D"), ("A", "B"), ("B", "D")])
    assert enumerate_paths(g, "A", "D", "shortest").nodes == ("A", "B", "D")


@given(sampled_graphs(kinds=tuple(GraphKind)))
def test_path_count_matches_brute_force(g):
    x, y = g.nodes[0], g.nodes[-1]
    paths = enumerate_paths(g, x, y, "all")
    assert len(paths) == enumerate_paths(g, x, y, "count")
    assert len(paths) == len(bf.all_paths(g, x, y))
    for p in paths:
        assert len(set(p.nodes)) == len(p.nodes)
        assert all(g.is_adjacent(a, b) for a, b in zip(p.nodes, p.nodes[1:]))


def test_path_from_nodes(g_chain):
    (p,) = path_from_nodes(g_chain, ["A", "B", "C"])
    assert p.steps == (Step.FORWARD, Step.FORWARD)
    assert path_from_nodes(g_chain, ["A", "C"]) == []


# cycles and orderings


def test_cycles(g_chain):
    g_cyc = build_graph("Directed", ["A", "B", "C"], [("A", "B"), ("B", "C"), ("C", "A")])
    assert cycles(g_cyc, "exists")
    assert not cycles(g_chain, "exists")
    assert cycles(g_cyc, "verify", ["A", "B", "C", "A"])
    assert not cycles(g_cyc, "verify", ["A", "C", "B", "A"])
    with pytest.raises(NoCycleExists):
        cycles(g_chain, "find_one")


def test_topological(g_chain, g_conf):
    assert topological(g_chain, "find_one") == ["A", "B", "C"]
    assert not topological(g_chain, "verify", ["B", "A", "C"])
    assert topological(g_conf, "verify", ["Z", "X", "Y"])
    g_cyc = build_graph("Directed", ["A", "B"], [("A", "B"), ("B", "A")])
    with pytest.raises(CyclicGraph):
        topological(g_cyc, "find_one")


@given(small_dags())
def test_dag_has_no_cycle_and_orders_verify(g):
    assert not cycles(g, "exists")
    assert topological(g, "verify", topological(g, "find_one"))


@given(sampled_graphs(kinds=(GraphKind.DIRECTED,)))
def test_found_cycles_verify(g):
    if cycles(g, "exists"):
        assert cycles(g, "verify", cycles(g, "find_one"))
    else:
        assert topological(g, "verify", topological(g, "find_one"))
