"""Slow reference oracles built straight from the textbook definitions.

Nothing here reuses the traversal code in :mod:`clearbench.graph` or
:mod:`clearbench.causal`; these functions read only the raw edge lists so
they can serve as independent checks of the fast implementations.
"""

from __future__ import annotations

import itertools

from clearbench.graph import MixedGraph


def _incidence(g: MixedGraph):
    """node -> list of (neighbor, head_at_node, head_at_neighbor)."""
    inc = {v: [] for v in g.nodes}
    for a, b in g.directed:
        inc[a].append((b, False, True))
        inc[b].append((a, True, False))
    for a, b in g.bidirected:
        inc[a].append((b, True, True))
        inc[b].append((a, True, True))
    for a, b in g.undirected:
        inc[a].append((b, False, False))
        inc[b].append((a, False, False))
    return inc


def _descendants(g: MixedGraph, v):
    out = set()
    frontier = [v]
    while frontier:
        u = frontier.pop()
        for a, b in g.directed:
            if a == u and b not in out:
                out.add(b)
                frontier.append(b)
    return out


def all_paths(g: MixedGraph, x, y):
    """Every simple path as a list of (node, head_at_node_from_prev, head_at_node_toward_next) edges.

    Each path is returned as ``(nodes, marks)`` where ``marks[i]`` is the
    pair ``(head at nodes[i], head at nodes[i+1])`` for step i.
    """
    inc = _incidence(g)
    out = []

    def dfs(nodes, marks):
        v = nodes[-1]
        if v == y:
            out.append((tuple(nodes), tuple(marks)))
            return
        for w, h_here, h_there in inc[v]:
            if w in nodes:
                continue
            dfs(nodes + [w], marks + [(h_here, h_there)])

    if x != y:
        dfs([x], [])
    return out


def path_blocked(g: MixedGraph, nodes, marks, Z) -> bool:
    Z = set(Z)
    for i in range(1, len(nodes) - 1):
        m = nodes[i]
        collider = marks[i - 1][1] and marks[i][0]
        if collider:
            if m not in Z and not (_descendants(g, m) & Z):
                return True
        elif m in Z:
            return True
    return False


def d_separated(g: MixedGraph, x, y, Z) -> bool:
    return all(path_blocked(g, n, m, Z) for n, m in all_paths(g, x, y))


# Markov equivalence


def skeleton_and_vstructures(g: MixedGraph):
    skel = set()
    for a, b in g.directed:
        skel.add(frozenset((a, b)))
    vs = set()
    for m in g.nodes:
        pa = sorted(a for a, b in g.directed if b == m)
        for a, b in itertools.combinations(pa, 2):
            if frozenset((a, b)) not in skel:
                vs.add((a, m, b))
    return frozenset(skel), frozenset(vs)


def equivalent(g1: MixedGraph, g2: MixedGraph) -> bool:
    return skeleton_and_vstructures(g1) == skeleton_and_vstructures(g2)


def _acyclic(nodes, edges) -> bool:
    remaining = set(nodes)
    edges = set(edges)
    while remaining:
        sources = [v for v in remaining if not any(b == v and a in remaining for a, b in edges)]
        if not sources:
            return False
        remaining -= set(sources)
    return True


def all_dags(nodes):
    """Every labelled DAG over ``nodes`` as a tuple of directed edges."""
    pairs = list(itertools.combinations(nodes, 2))
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = []
        for (a, b), c in zip(pairs, choice):
            if c == 1:
                edges.append((a, b))
            elif c == 2:
                edges.append((b, a))
        if _acyclic(nodes, edges):
            yield tuple(edges)


def equivalence_class(g: MixedGraph) -> list:
    """All DAGs (as edge frozensets) sharing g's skeleton and v-structures."""
    from clearbench.graph import build_graph

    target = skeleton_and_vstructures(g)
    pairs = sorted(tuple(sorted(e)) for e in target[0])
    members = []
    for flips in itertools.product((False, True), repeat=len(pairs)):
        edges = [(b, a) if f else (a, b) for (a, b), f in zip(pairs, flips)]
        if not _acyclic(g.nodes, edges):
            continue
        cand = build_graph("DAG", g.nodes, edges)
        if skeleton_and_vstructures(cand) == target:
            members.append(frozenset(edges))
    return members


# adjustment criteria


def backdoor_valid(g: MixedGraph, x, y, Z) -> bool:
    Z = set(Z)
    if _descendants(g, x) & Z:
        return False
    for nodes, marks in all_paths(g, x, y):
        if marks[0][0] and not path_blocked(g, nodes, marks, Z):
            return False
    return True


def frontdoor_valid(g: MixedGraph, x, y, Z) -> bool:
    Z = set(Z)
    for nodes, marks in all_paths(g, x, y):
        directed = all(not h0 and h1 for h0, h1 in marks)
        if directed and not (set(nodes[1:-1]) & Z):
            return False
    for z in Z:
        for nodes, marks in all_paths(g, x, z):
            if marks[0][0] and not path_blocked(g, nodes, marks, set()):
                return False
        for nodes, marks in all_paths(g, z, y):
            if marks[0][0] and not path_blocked(g, nodes, marks, {x}):
                return False
    return True


# hedges


def _reach_all(F, R, pa):
    """True when every node of F has a directed path inside F to some node of R."""
    ok = R & F
    changed = True
    while changed:
        changed = False
        for v in F - ok:
            # v reaches R if one of its children inside F already does
            if any(v in pa[c] for c in ok):
                ok.add(v)
                changed = True
    return ok == F


def _bi_connected(F, bi):
    if not F:
        return False
    start = next(iter(F))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in bi[v]:
            if w in F and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == F


def _largest_forest(V, R, core, pa, bi):
    """Greatest node set containing ``core`` that is an R-rooted C-forest, or None."""
    U = set(V)
    while True:
        if not R <= U:
            return None
        reach = set(R)
        changed = True
        while changed:
            changed = False
            for v in U - reach:
                if any(v in pa[c] for c in reach):
                    reach.add(v)
                    changed = True
        if not core <= reach:
            return None
        start = next(iter(core))
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in bi[v]:
                if w in reach and w not in comp:
                    comp.add(w)
                    stack.append(w)
        if not core <= comp:
            return None
        if comp == U:
            return U
        U = comp


def hedge_exists(nodes, parents, spouses, x, y) -> bool:
    """Search for a hedge witnessing that P(y | do(x)) is not identifiable.

    ``parents`` and ``spouses`` map each node to a set of nodes. A hedge is a
    pair of R-rooted C-forests F' within F, with x in F but not in F', and R
    inside the ancestors of y once edges into x are removed. For a fixed F',
    valid supersets F are closed under union, so it suffices to test the
    largest one.
    """
    V = set(nodes)
    anc = {y}
    stack = [y]
    while stack:
        v = stack.pop()
        if v == x:
            continue
        for p in parents[v]:
            if p not in anc:
                anc.add(p)
                stack.append(p)
    others = sorted(V - {x})
    for k in range(1, len(others) + 1):
        for combo in itertools.combinations(others, k):
            Fp = set(combo)
            R = Fp & anc
            if not R or not _bi_connected(Fp, spouses) or not _reach_all(Fp, set(R), parents):
                continue
            F = _largest_forest(V, R, Fp | {x}, parents, spouses)
            if F is not None and x in F:
                return True
    return False


def identifiable(g: MixedGraph, x, y) -> bool:
    parents = {v: {a for a, b in g.directed if b == v} for v in g.nodes}
    spouses = {v: set() for v in g.nodes}
    for a, b in g.bidirected:
        spouses[a].add(b)
        spouses[b].add(a)
    return not hedge_exists(g.nodes, parents, spouses, x, y)
