from __future__ import annotations

import itertools

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from clearbench import bruteforce as bf
from clearbench.causal import (
    AdjustmentQuery,
    Criterion,
    adjustment_set,
    backdoor_paths,
    blocking_sets,
    c_components,
    d_separated,
    d_separation,
    directed_paths,
    identify_effect,
    is_c_tree,
    is_path_blocked,
    markov_blanket,
    markov_equivalence,
    maximal_root_set,
    valid_adjustment_sets,
)
from clearbench.errors import (
    EndpointInZ,
    NoOtherMember,
    NoSeparator,
    NodeSetMismatch,
    Unblockable,
    UnknownNode,
    WrongGraphKind,
)
from clearbench.graph import GraphKind, Step, build_graph, enumerate_paths, path_from_nodes
from strategies import sampled_graphs, small_admgs, small_dags


def path(g, *nodes):
    (p,) = path_from_nodes(g, nodes)
    return p


# blocking


def test_blocking(g_chain, g_vs):
    v = is_path_blocked(g_chain, path(g_chain, "A", "B", "C"), {"B"})
    assert v.blocked and v.witness == "B" and v.rule == 1
    v = is_path_blocked(g_vs, path(g_vs, "A", "B", "C"), set())
    assert v.blocked and v.witness == "B" and v.rule == 2
    assert not is_path_blocked(g_vs, path(g_vs, "A", "B", "C"), {"B"})


def test_descendant_of_collider_opens_path():
    g = build_graph("DAG", ["A", "B", "C", "D"], [("A", "B"), ("C", "B"), ("B", "D")])
    assert not is_path_blocked(g, path(g, "A", "B", "C"), {"D"})


def test_endpoint_in_z(g_chain):
    with pytest.raises(EndpointInZ):
        is_path_blocked(g_chain, path(g_chain, "A", "B", "C"), {"A"})


def test_blocking_sets(g_chain, g_vs, g_conf):
    assert blocking_sets(g_chain, path(g_chain, "A", "B", "C"), "find_minimal") == {"B"}
    assert blocking_sets(g_vs, path(g_vs, "A", "B", "C"), "find_minimal") == frozenset()
    assert blocking_sets(g_conf, path(g_conf, "X", "Z", "Y"), "find_valid") == {"Z"}
    with pytest.raises(Unblockable):
        blocking_sets(g_chain, path(g_chain, "A", "B"), "find_valid")


@given(sampled_graphs())
def test_found_blocking_sets_block(g):
    x, y = g.nodes[0], g.nodes[-1]
    for p in enumerate_paths(g, x, y, "all")[:5]:
        if len(p.nodes) < 3:
            continue
        for mode in ("find_valid", "find_minimal"):
            try:
                Z = blocking_sets(g, p, mode)
            except Unblockable:
                continue
            assert is_path_blocked(g, p, Z)


# d-separation


def test_d_separation(g_chain, g_conf):
    assert d_separation(g_chain, "A", "C", "verify", {"B"})
    with pytest.raises(NoSeparator):
        d_separation(g_conf, "X", "Y", "find_valid")
    g_dsep = build_graph("DAG", ["A", "B", "C", "D"], [("A", "B"), ("C", "B"), ("C", "D")])
    assert d_separation(g_dsep, "A", "D", "verify", set())
    assert d_separation(g_dsep, "A", "D", "find_minimal") == frozenset()


@given(sampled_graphs(), st.data())
def test_d_separation_matches_brute_force(g, data):
    x, y = data.draw(st.permutations(g.nodes))[:2]
    rest = sorted(g.node_set - {x, y})
    Z = frozenset(data.draw(st.lists(st.sampled_from(rest), unique=True)) if rest else [])
    fast = d_separated(g, x, y, Z)
    assert fast == bf.d_separated(g, x, y, Z)
    assert fast == d_separated(g, y, x, Z)


@given(small_dags(min_nodes=3))
def test_minimal_separator_is_smallest(g):
    x, y = g.nodes[0], g.nodes[-1]
    assume(not g.is_adjacent(x, y))
    Z = d_separation(g, x, y, "find_minimal")
    assert d_separated(g, x, y, Z)
    rest = sorted(g.node_set - {x, y})
    smaller = [c for k in range(len(Z)) for c in itertools.combinations(rest, k)]
    assert not any(bf.d_separated(g, x, y, c) for c in smaller)


# Markov equivalence and blankets


def test_markov_equivalence(g_vs):
    nodes = ["A", "B", "C"]
    chain = build_graph("DAG", nodes, [("A", "B"), ("B", "C")])
    fork = build_graph("DAG", nodes, [("B", "A"), ("B", "C")])
    assert markov_equivalence("equivalent", chain, fork)
    assert not markov_equivalence("equivalent", chain, g_vs)
    with pytest.raises(NoOtherMember):
        markov_equivalence("find_member", g_vs)
    with pytest.raises(NodeSetMismatch):
        markov_equivalence("equivalent", chain, build_graph("DAG", ["A", "B"], [("A", "B")]))


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(small_dags(n, n), small_dags(n, n))))
def test_equivalence_matches_definition(pair):
    g1, g2 = pair
    assert g1.node_set == g2.node_set
    assert markov_equivalence("equivalent", g1, g2) == bf.equivalent(g1, g2)


@given(small_dags(min_nodes=3, max_nodes=6))
def test_find_member(g):
    try:
        other = markov_equivalence("find_member", g)
    except NoOtherMember:
        assert len(bf.equivalence_class(g)) == 1
    else:
        assert other != g
        assert markov_equivalence("equivalent", g, other)


def test_markov_blanket(g_conf):
    assert markov_blanket(g_conf, "Z") == {"X", "Y"}
    assert markov_blanket(g_conf, "X") == {"Z", "Y"}
    g = build_graph("DAG", ["A", "B", "V"], [("A", "B")])
    assert markov_blanket(g, "V") == frozenset()
    with pytest.raises(UnknownNode):
        markov_blanket(g, "Q")


@given(sampled_graphs(kinds=(GraphKind.DAG,)))
def test_markov_blanket_symmetric(g):
    for v in g.nodes:
        assert v not in markov_blanket(g, v)
    for a, b in itertools.combinations(g.nodes, 2):
        assert (a in markov_blanket(g, b)) == (b in markov_blanket(g, a))


# directed and backdoor paths


def test_directed_paths(g_chain, g_conf):
    (p,) = directed_paths(g_chain, "A", "C", "all")
    assert p.nodes == ("A", "B", "C")
    assert not directed_paths(g_chain, "C", "A", "exists")
    assert directed_paths(g_conf, "Z", "Y", "count") == 2


def test_backdoor_paths(g_conf, g_chain, g_front):
    (p,) = backdoor_paths(g_conf, "X", "Y", "all")
    assert p.nodes == ("X", "Z", "Y")
    assert backdoor_paths(g_chain, "B", "C", "count") == 0
    (p,) = backdoor_paths(g_front, "X", "Y", "all")
    assert p.steps == (Step.BIDIRECTED,)


@given(sampled_graphs())
def test_backdoor_paths_partition_paths(g):
    x, y = g.nodes[0], g.nodes[1]
    every = enumerate_paths(g, x, y, "all")
    back = backdoor_paths(g, x, y, "all")
    assert all(p.steps[0] in (Step.BACKWARD, Step.BIDIRECTED) for p in back)
    tail = [p for p in every if p.steps[0] is Step.FORWARD]
    assert sorted(map(str, back + tail)) == sorted(map(str, every))


# C-structures and root sets


def test_c_components(g_front):
    assert c_components(g_front, "partition") == [frozenset({"X", "Y"}), frozenset({"M"})]
    assert not c_components(g_front, "is_c_component")
    g_cc = build_graph("ADMG", ["A", "B", "C"], [("A", "C")], [("A", "B"), ("B", "C")])
    assert c_components(g_cc, "is_c_component")
    with pytest.raises(WrongGraphKind):
        c_components(build_graph("Undirected", ["A", "B"], undirected=[("A", "B")]), "count")


@given(sampled_graphs(kinds=(GraphKind.ADMG,)))
def test_c_components_partition(g):
    blocks = c_components(g, "partition")
    assert sorted(v for b in blocks for v in b) == sorted(g.nodes)
    for a, b in g.bidirected:
        assert any({a, b} <= blk for blk in blocks)


def test_c_trees(g_bow, g_front):
    assert is_c_tree(g_bow, "c_tree")
    assert not is_c_tree(g_front, "c_forest")
    assert not is_c_tree(build_graph("ADMG", ["X", "Y"], bidirected=[("X", "Y")]), "c_tree")
    assert is_c_tree(build_graph("ADMG", ["X", "Y"], bidirected=[("X", "Y")]), "c_forest")


def test_maximal_root_set(g_conf):
    assert maximal_root_set(g_conf, "find") == {"Y"}
    g = build_graph("DAG", ["A", "B", "C"], [("A", "B"), ("A", "C")])
    assert maximal_root_set(g, "find") == {"B", "C"}
    assert not maximal_root_set(g_conf, "verify", {"X", "Y"})


# adjustment sets


def test_adjustment_canonical(g_conf, g_front, g_bow):
    assert adjustment_set(g_conf, AdjustmentQuery("X", "Y", criterion="backdoor"), "find_minimal") == {"Z"}
    assert adjustment_set(g_front, AdjustmentQuery("X", "Y", {"M"}, "frontdoor"), "verify")
    assert not adjustment_set(g_bow, AdjustmentQuery("X", "Y", criterion="backdoor"), "exists")
    assert adjustment_set(g_bow, AdjustmentQuery("X", "Y", criterion="backdoor"), "find_valid") is None


def test_query_rejects_endpoint_in_z():
    with pytest.raises(EndpointInZ):
        AdjustmentQuery("X", "Y", {"X"})


@given(small_admgs(min_nodes=3, max_nodes=6), st.sampled_from(list(Criterion)))
def test_adjustment_selections(g, crit):
    x, y = g.nodes[0], g.nodes[1]
    q = AdjustmentQuery(x, y, criterion=crit)
    slow = bf.backdoor_valid if crit is Criterion.BACKDOOR else bf.frontdoor_valid
    rest = sorted(g.node_set - {x, y})
    valid = {frozenset(c) for k in range(len(rest) + 1) for c in itertools.combinations(rest, k) if slow(g, x, y, c)}
    assert set(valid_adjustment_sets(g, x, y, crit)) == valid
    assert adjustment_set(g, q, "exists") == bool(valid)
    lo = adjustment_set(g, q, "find_minimal")
    hi = adjustment_set(g, q, "find_maximal")
    if not valid:
        assert lo is None and hi is None
        return
    assert lo in valid and not any(v < lo for v in valid)
    assert hi in valid and not any(v > hi for v in valid)
    assert adjustment_set(g, q, "find_valid") in valid


# identification


def test_identification_canonical(g_bow, g_front, g_conf):
    assert not identify_effect(g_bow, "X", "Y")
    assert identify_effect(g_front, "X", "Y")
    markovian = build_graph("ADMG", list(g_conf.nodes), sorted(g_conf.directed))
    assert identify_effect(markovian, "X", "Y")


def test_bow_extended_not_identifiable():
    g = build_graph("ADMG", ["X", "Z", "Y"], [("X", "Z"), ("Z", "Y")], [("X", "Z")])
    assert not identify_effect(g, "X", "Y")


@given(small_admgs(min_nodes=2, max_nodes=6))
def test_identification_matches_hedges(g):
    x, y = g.nodes[0], g.nodes[-1]
    assert identify_effect(g, x, y) == bf.identifiable(g, x, y)


@given(small_dags(min_nodes=2, max_nodes=6))
def test_markovian_always_identifiable(g):
    admg = build_graph("ADMG", list(g.nodes), sorted(g.directed))
    for x, y in itertools.permutations(g.nodes, 2):
        assert identify_effect(admg, x, y)
