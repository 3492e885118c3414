"""Constructors for ADMGs with or without a C-structure.

Uniform sampling almost never yields C-trees or C-forests, so balanced
YesNo questions on those tasks draw from these constructors instead. All
graphs have the requested node and edge counts; the bidirected ratio cap
does not apply to them.
"""

from __future__ import annotations

import random
from math import comb

from clearbench import causal
from clearbench.bench.sampling import LETTERS, GraphSpec, sample_graph
from clearbench.errors import ClearError, InfeasibleSpec
from clearbench.graph import GraphKind, MixedGraph, build_graph, topological


def _pairs(labels):
    return [(a, b) for i, a in enumerate(labels) for b in labels[i + 1 :]]


def _bi_tree(labels, rng):
    order = rng.sample(labels, len(labels))
    return [frozenset((order[i], order[rng.randrange(i)])) for i in range(1, len(order))]


def _finish(labels, directed, bidirected, rng) -> MixedGraph:
    directed = list(directed)
    bidirected = [tuple(rng.sample(sorted(p), 2)) for p in bidirected]
    rng.shuffle(directed)
    rng.shuffle(bidirected)
    return build_graph(GraphKind.ADMG, labels, directed=directed, bidirected=bidirected)


def c_component(n_v, n_e, rng: random.Random) -> MixedGraph:
    """Bidirected spanning tree plus random extra edges."""
    labels = rng.sample(LETTERS, n_v)
    tree = _bi_tree(labels, rng)
    rank = {v: i for i, v in enumerate(rng.sample(labels, n_v))}
    free_bi = [frozenset(p) for p in _pairs(labels) if frozenset(p) not in tree]
    free_dir = _pairs(labels)
    extra = n_e - len(tree)
    if extra > len(free_bi) + len(free_dir):
        raise InfeasibleSpec("too many edges for a planted C-component")
    slots = [("b", p) for p in free_bi] + [("d", p) for p in free_dir]
    picks = rng.sample(slots, extra)
    bidirected = tree + [p for t, p in picks if t == "b"]
    directed = [tuple(sorted(p, key=rank.__getitem__)) for t, p in picks if t == "d"]
    return _finish(labels, directed, bidirected, rng)


def c_forest(n_v, n_e, rng: random.Random, roots: int | None = None) -> MixedGraph:
    """C-component whose directed part gives every node at most one child.

    ``roots`` fixes the number of childless nodes (1 gives a C-tree).
    """
    labels = rng.sample(LETTERS, n_v)
    lo_d = max(0, n_e - comb(n_v, 2))
    hi_d = min(n_v - 1, n_e - (n_v - 1))
    if roots is not None:
        lo_d = hi_d = n_v - roots if lo_d <= n_v - roots <= hi_d else -1
    if hi_d < lo_d or hi_d < 0:
        raise InfeasibleSpec(f"no C-forest with {n_v} nodes and {n_e} edges")
    d = rng.randint(lo_d, hi_d)
    order = rng.sample(labels, n_v)
    # the last node in the hidden order is always a root
    root_set = {order[-1]} | set(rng.sample(order[:-1], n_v - 1 - d))
    directed = []
    for i, v in enumerate(order[:-1]):
        if v not in root_set:
            directed.append((v, rng.choice(order[i + 1 :])))
    tree = _bi_tree(labels, rng)
    free = [frozenset(p) for p in _pairs(labels) if frozenset(p) not in tree]
    bidirected = tree + rng.sample(free, n_e - d - len(tree))
    return _finish(labels, directed, bidirected, rng)


def _two_children(g: MixedGraph, rng) -> MixedGraph | None:
    """Reverse one directed edge a->b whose head has a child, giving b two children."""
    options = [(a, b) for a, b in sorted(g.directed) if g.children[b]]
    if not options:
        return None
    a, b = rng.choice(options)
    directed = [(b, a) if e == (a, b) else e for e in g.directed]
    try:
        return build_graph(GraphKind.ADMG, g.nodes, directed, g.bidirected)
    except ClearError:
        return None


def _split_bidirected(g: MixedGraph, rng) -> MixedGraph | None:
    """Turn one bidirected edge into a directed one, keeping the edge count."""
    if not g.bidirected:
        return None
    order = {v: i for i, v in enumerate(g.nodes)}
    e = rng.choice(sorted(g.bidirected))
    bidirected = [f for f in g.bidirected if f != e]
    if g.has_directed(*e) or g.has_directed(e[1], e[0]):
        return None
    # orient along an existing topological order to stay acyclic
    topo = {v: i for i, v in enumerate(topological(g))}
    a, b = sorted(e, key=lambda v: (topo[v], order[v]))
    try:
        return build_graph(GraphKind.ADMG, g.nodes, list(g.directed) + [(a, b)], bidirected)
    except ClearError:
        return None


def _check(task):
    return {
        "CC": lambda g: causal.c_components(g, "is_c_component"),
        "CT": lambda g: causal.is_c_tree(g, "c_tree"),
        "CF": lambda g: causal.is_c_tree(g, "c_forest"),
    }[task]


def planted(task: str, truth: bool, n_v: int, n_e: int, rng: random.Random) -> MixedGraph | None:
    """An ADMG whose answer to the C-structure question of ``task`` equals ``truth``.

    Returns None when this draw missed; raises InfeasibleSpec when the
    counts cannot host the requested structure.
    """
    check = _check(task)
    if truth:
        if task == "CC":
            g = c_component(n_v, n_e, rng)
        elif task == "CT":
            g = c_forest(n_v, n_e, rng, roots=1)
        else:
            g = c_forest(n_v, n_e, rng)
    else:
        style = rng.randrange(3)
        g = None
        try:
            if style == 0:
                base = c_component(n_v, n_e, rng) if task == "CC" else c_forest(n_v, n_e, rng)
                g = _split_bidirected(base, rng)
            elif style == 1 and task != "CC":
                g = _two_children(c_forest(n_v, n_e, rng), rng)
                if g is None and task == "CT":
                    g = c_forest(n_v, n_e, rng)
        except InfeasibleSpec:
            g = None
        if g is None:
            g = sample_graph(GraphSpec(n_v, n_e, GraphKind.ADMG, None), rng)
    return g if check(g) == truth else None
