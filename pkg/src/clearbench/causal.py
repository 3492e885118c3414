"""Causal graph oracles: blocking, d-separation, equivalence, adjustment, identification.

Every function here is pure. Set searches enumerate subsets exhaustively,
which is cheap at benchmark scale (at most 2**7 candidate sets for nine
nodes) and keeps the tie-breaking rules exact: smallest cardinality first,
then lexicographic order of the sorted labels.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from clearbench.errors import (
    EndpointInZ,
    InvalidPath,
    NoBackdoorPath,
    NodeSetMismatch,
    NoOtherMember,
    NoPathExists,
    NoSeparator,
    Unblockable,
    WrongGraphKind,
)
from clearbench.graph import (
    GraphKind,
    MixedGraph,
    NodePath,
    Step,
    _select_path,
    build_graph,
    iter_paths,
    path_from_nodes,
)

__all__ = [
    "BlockingVerdict",
    "Criterion",
    "AdjustmentQuery",
    "is_path_blocked",
    "blocking_sets",
    "d_separated",
    "d_separation",
    "skeleton",
    "v_structures",
    "cpdag",
    "markov_equivalence",
    "markov_blanket",
    "directed_paths",
    "backdoor_paths",
    "c_components",
    "is_c_tree",
    "maximal_root_set",
    "adjustment_set",
    "identify_effect",
]


def _require_causal(g: MixedGraph, what: str):
    if g.kind not in (GraphKind.DAG, GraphKind.ADMG):
        raise WrongGraphKind(f"{what} needs a DAG or ADMG, got {g.kind.value}")


def _subsets(candidates, sizes) -> Iterable[frozenset]:
    for k in sizes:
        for combo in itertools.combinations(candidates, k):
            yield frozenset(combo)


# blocking


@dataclass(frozen=True)
class BlockingVerdict:
    blocked: bool
    witness: str | None = None
    rule: int | None = None  # 1: non-collider in Z, 2: collider with nothing of itself/descendants in Z

    def __bool__(self):
        return self.blocked


def _is_collider(path: NodePath, i: int) -> bool:
    return Step(path.steps[i - 1]).head_at_end and Step(path.steps[i]).head_at_start


def _check_path(g: MixedGraph, p: NodePath):
    for v in p.nodes:
        if v not in g.node_set:
            raise InvalidPath(f"{v!r} is not a node of the graph")
    for a, step, b in zip(p.nodes, p.steps, p.nodes[1:]):
        if not g.has_step(a, step, b):
            raise InvalidPath(f"step {a}{Step(step).value}{b} is not an edge of the graph")


def is_path_blocked(g: MixedGraph, p: NodePath, Z=frozenset()) -> BlockingVerdict:
    """Decide whether ``Z`` blocks the path ``p``.

    Bidirected steps put arrowheads on both of their endpoints.
    """
    Z = frozenset(Z)
    _check_path(g, p)
    if p.nodes[0] in Z or p.nodes[-1] in Z:
        raise EndpointInZ("path endpoints may not be conditioned on")
    for i in range(1, len(p.nodes) - 1):
        m = p.nodes[i]
        if _is_collider(p, i):
            if m not in Z and not (g.descendants(m) & Z):
                return BlockingVerdict(True, m, 2)
        elif m in Z:
            return BlockingVerdict(True, m, 1)
    return BlockingVerdict(False)


def blocking_sets(g: MixedGraph, p: NodePath, select: str = "find_minimal") -> frozenset:
    _check_path(g, p)
    if len(p.nodes) < 3:
        raise Unblockable("a single-edge path cannot be blocked")
    if select == "find_valid":
        guess = frozenset(
            p.nodes[i] for i in range(1, len(p.nodes) - 1) if not _is_collider(p, i)
        )
        if is_path_blocked(g, p, guess):
            return guess
        select = "find_minimal"
    if select == "find_minimal":
        candidates = sorted(g.node_set - {p.nodes[0], p.nodes[-1]})
        for Z in _subsets(candidates, range(len(candidates) + 1)):
            if is_path_blocked(g, p, Z):
                return Z
        raise Unblockable(f"no set blocks {p}")
    raise ValueError(f"unknown selection {select!r}")


# d-separation by reachability


def _d_connected(g: MixedGraph, x, targets, Z, cut_out=frozenset()) -> bool:
    """True when some active walk links ``x`` to a node of ``targets`` given ``Z``.

    Directed edges leaving nodes in ``cut_out`` are deleted first; ancestor
    sets are computed in the resulting graph.
    """
    Z = frozenset(Z)
    targets = frozenset(targets)

    def parents(v):
        return [p for p in g.parents[v] if p not in cut_out]

    anz = set(Z)
    stack = list(Z)
    while stack:
        v = stack.pop()
        for p in parents(v):
            if p not in anz:
                anz.add(p)
                stack.append(p)

    def steps(v):
        for w, step in g.steps_from[v]:
            if step is Step.FORWARD and v in cut_out:
                continue
            if step is Step.BACKWARD and w in cut_out:
                continue
            yield w, step

    seen = set()
    queue = deque()
    for w, step in steps(x):
        queue.append((w, step.head_at_end))
    while queue:
        state = queue.popleft()
        if state in seen:
            continue
        seen.add(state)
        v, head = state
        if v in targets:
            return True
        for w, step in steps(v):
            if head and step.head_at_start:
                if v not in anz:
                    continue
            elif v in Z:
                continue
            queue.append((w, step.head_at_end))
    return False


def d_separated(g: MixedGraph, x, y, Z=frozenset()) -> bool:
    Z = frozenset(Z)
    g.check_node(x)
    g.check_node(y)
    if x == y:
        raise ValueError("d-separation needs two distinct nodes")
    if x in Z or y in Z:
        raise EndpointInZ("the conditioning set must exclude both endpoints")
    return not _d_connected(g, x, {y}, Z)


def d_separation(g: MixedGraph, x, y, mode: str = "verify", Z=None):
    """``verify`` a separating set ``Z`` or ``find_valid`` / ``find_minimal`` one."""
    _require_causal(g, "d-separation")
    if mode == "verify":
        return d_separated(g, x, y, Z or frozenset())
    g.check_node(x)
    g.check_node(y)
    if g.is_adjacent(x, y):
        raise NoSeparator(f"{x} and {y} are adjacent")
    candidates = sorted(g.node_set - {x, y})
    if mode == "find_valid":
        guess = (g.ancestors(x) | g.ancestors(y)) - {x, y}
        if d_separated(g, x, y, guess):
            return frozenset(guess)
        mode = "find_minimal"
    if mode == "find_minimal":
        for S in _subsets(candidates, range(len(candidates) + 1)):
            if d_separated(g, x, y, S):
                return S
        raise NoSeparator(f"no set d-separates {x} and {y}")
    raise ValueError(f"unknown mode {mode!r}")


# Markov equivalence


def skeleton(g: MixedGraph) -> frozenset:
    return frozenset(frozenset(e) for e in g.directed)


def v_structures(g: MixedGraph) -> frozenset:
    out = set()
    for m in g.nodes:
        for a, b in itertools.combinations(sorted(g.parents[m]), 2):
            if not g.is_adjacent(a, b):
                out.add((a, m, b))
    return frozenset(out)


def cpdag(g: MixedGraph):
    """Essential graph of a DAG as ``(directed, undirected)`` frozensets.

    Edges of v-structures are oriented, then Meek's rules 1-3 propagate
    compelled orientations until nothing changes.
    """
    if g.kind is not GraphKind.DAG:
        raise WrongGraphKind("CPDAGs are defined here for DAGs only")
    adj = {v: set(g.adjacency[v]) for v in g.nodes}
    directed = set()
    for a, m, b in v_structures(g):
        directed.add((a, m))
        directed.add((b, m))
    undirected = {frozenset(e) for e in g.directed} - {frozenset(e) for e in directed}

    def is_dir(a, b):
        return (a, b) in directed

    def is_und(a, b):
        return frozenset((a, b)) in undirected

    changed = True
    while changed:
        changed = False
        for e in sorted(undirected, key=sorted):
            a, b = sorted(e)
            for u, v in ((a, b), (b, a)):
                orient = False
                # R1: w -> u - v with w, v non-adjacent
                if any(is_dir(w, u) and w not in adj[v] and w != v for w in adj[u]):
                    orient = True
                # R2: u -> w -> v
                elif any(is_dir(u, w) and is_dir(w, v) for w in adj[u] & adj[v]):
                    orient = True
                # R3: u - c -> v, u - d -> v, c and d non-adjacent
                else:
                    mids = [w for w in adj[u] & adj[v] if is_und(u, w) and is_dir(w, v)]
                    orient = any(
                        d not in adj[c] for c, d in itertools.combinations(mids, 2)
                    )
                if orient:
                    undirected.discard(e)
                    directed.add((u, v))
                    changed = True
                    break
            if changed:
                break
    return frozenset(directed), frozenset(undirected)


def _covered_edges(g: MixedGraph):
    for a, b in sorted(g.directed):
        if g.parents[b] == g.parents[a] | {a}:
            yield a, b


def markov_equivalence(mode: str, g1: MixedGraph, g2: MixedGraph | None = None):
    """``markov_equivalence("equivalent", g1, g2)`` or ``markov_equivalence("find_member", g)``.

    ``find_member`` reverses the first covered edge, which always yields a
    different DAG in the same class; a DAG without covered edges is alone in
    its class and NoOtherMember is raised.
    """
    if mode == "equivalent":
        if g1.node_set != g2.node_set:
            raise NodeSetMismatch("graphs are over different node sets")
        return cpdag(g1) == cpdag(g2)
    if mode == "find_member":
        if g1.kind is not GraphKind.DAG:
            raise WrongGraphKind("equivalence classes are defined here for DAGs only")
        for a, b in _covered_edges(g1):
            edges = [(b, a) if e == (a, b) else e for e in g1.directed]
            return build_graph(GraphKind.DAG, g1.nodes, edges)
        raise NoOtherMember("the Markov equivalence class has a single member")
    raise ValueError(f"unknown mode {mode!r}")


def markov_blanket(g: MixedGraph, v) -> frozenset:
    g.check_node(v)
    if g.kind is not GraphKind.DAG:
        raise WrongGraphKind("Markov blankets are defined here for DAGs only")
    blanket = set(g.parents[v]) | set(g.children[v])
    for c in g.children[v]:
        blanket |= g.parents[c]
    blanket.discard(v)
    return frozenset(blanket)


# directed and backdoor paths


def _is_directed_path(g, seq, x, y):
    seq = tuple(seq)
    return (
        len(seq) >= 2
        and seq[0] == x
        and seq[-1] == y
        and len(set(seq)) == len(seq)
        and all(g.has_directed(a, b) for a, b in zip(seq, seq[1:]))
    )


def directed_paths(g: MixedGraph, x, y, select: str = "all", seq=None):
    """Directed paths x -> ... -> y: ``all``, ``count``, ``exists`` or ``verify``."""
    if x == y:
        raise ValueError("path endpoints must differ")
    g.check_node(x)
    g.check_node(y)
    if select == "verify":
        return _is_directed_path(g, seq, x, y)
    if select == "exists":
        return y in g.descendants(x)
    paths = list(iter_paths(g, x, y, allowed=lambda i, s: s is Step.FORWARD))
    if select in ("all", "count"):
        return _select_path(paths, select)
    try:
        return _select_path(paths, select, "directed path")
    except NoPathExists as exc:
        raise NoPathExists(str(exc)) from None


def _into_start(i, step):
    return i > 0 or step.head_at_start


def is_backdoor_path(g: MixedGraph, seq, x, y) -> bool:
    seq = tuple(seq)
    if not seq or seq[0] != x or seq[-1] != y:
        return False
    return any(Step(p.steps[0]).head_at_start for p in path_from_nodes(g, seq))


def backdoor_paths(g: MixedGraph, x, y, select: str = "all", seq=None):
    """Paths from x to y whose first step carries an arrowhead at x.

    ``select`` is ``all``, ``count``, ``shortest``, ``longest`` or ``verify``.
    """
    if x == y:
        raise ValueError("path endpoints must differ")
    g.check_node(x)
    g.check_node(y)
    if select == "verify":
        return is_backdoor_path(g, seq, x, y)
    paths = list(iter_paths(g, x, y, allowed=_into_start))
    if select in ("all", "count"):
        return _select_path(paths, select)
    if not paths:
        raise NoBackdoorPath(f"no backdoor path from {x} to {y}")
    return _select_path(paths, select)


# C-components and friends


def _components(g: MixedGraph, nodes=None) -> list:
    nodes = list(g.nodes if nodes is None else nodes)
    keep = set(nodes)
    seen = set()
    blocks = []
    for v in nodes:
        if v in seen:
            continue
        block = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in g.spouses[u]:
                if w in keep and w not in block:
                    block.add(w)
                    stack.append(w)
        seen |= block
        blocks.append(frozenset(block))
    return blocks


def c_components(g: MixedGraph, mode: str = "partition"):
    """``partition`` (blocks ordered by first node), ``count`` or ``is_c_component``."""
    _require_causal(g, "C-components")
    blocks = _components(g)
    if mode == "partition":
        return blocks
    if mode == "count":
        return len(blocks)
    if mode == "is_c_component":
        return len(blocks) == 1
    raise ValueError(f"unknown mode {mode!r}")


def maximal_root_set(g: MixedGraph, mode: str = "find", S=None):
    """Nodes without children: ``find``, ``count`` or ``verify`` a proposed set."""
    if g.kind is GraphKind.UNDIRECTED:
        raise WrongGraphKind("root sets need a directed part")
    roots = frozenset(v for v in g.nodes if not g.children[v])
    if mode == "find":
        return roots
    if mode == "count":
        return len(roots)
    if mode == "verify":
        return frozenset(S) == roots
    raise ValueError(f"unknown mode {mode!r}")


def is_c_tree(g: MixedGraph, mode: str = "c_tree") -> bool:
    """C-forest: a C-component where every node has at most one child.

    A C-tree is a C-forest with a single root.
    """
    _require_causal(g, "C-tree checks")
    forest = len(_components(g)) == 1 and all(len(g.children[v]) <= 1 for v in g.nodes)
    if mode == "c_forest":
        return forest
    if mode == "c_tree":
        return forest and len(maximal_root_set(g)) == 1
    raise ValueError(f"unknown mode {mode!r}")


# adjustment sets


class Criterion(str, enum.Enum):
    BACKDOOR = "backdoor"
    FRONTDOOR = "frontdoor"


@dataclass(frozen=True)
class AdjustmentQuery:
    x: str
    y: str
    Z: frozenset = frozenset()
    criterion: Criterion = Criterion.BACKDOOR

    def __post_init__(self):
        object.__setattr__(self, "Z", frozenset(self.Z))
        object.__setattr__(self, "criterion", Criterion(self.criterion))
        if self.x == self.y:
            raise ValueError("treatment and outcome must differ")
        if self.x in self.Z or self.y in self.Z:
            raise EndpointInZ("the adjustment set must exclude treatment and outcome")


def _backdoor_valid(g, x, y, Z) -> bool:
    if g.descendants(x) & Z:
        return False
    return not _d_connected(g, x, {y}, Z, cut_out={x})


def _intercepts(g, x, y, Z) -> bool:
    seen = {x}
    stack = [x]
    while stack:
        v = stack.pop()
        for w in g.children[v]:
            if w == y:
                return False
            if w not in Z and w not in seen:
                seen.add(w)
                stack.append(w)
    return True


def _frontdoor_valid(g, x, y, Z) -> bool:
    if not _intercepts(g, x, y, Z):
        return False
    for z in Z:
        if _d_connected(g, x, {z}, frozenset(), cut_out={x}):
            return False
        if _d_connected(g, z, {y}, {x}, cut_out={z}):
            return False
    return True


def _adjustment_valid(g, q: AdjustmentQuery, Z) -> bool:
    if q.criterion is Criterion.BACKDOOR:
        return _backdoor_valid(g, q.x, q.y, Z)
    return _frontdoor_valid(g, q.x, q.y, Z)


def adjustment_set(g: MixedGraph, q: AdjustmentQuery, select: str = "verify"):
    """Backdoor / frontdoor adjustment queries.

    ``verify`` checks ``q.Z``; ``exists`` reports whether any valid set
    exists; ``find_valid``, ``find_minimal`` and ``find_maximal`` return a
    set or None when no valid set exists.
    """
    _require_causal(g, "adjustment sets")
    g.check_node(q.x)
    g.check_node(q.y)
    for z in q.Z:
        g.check_node(z)
    if select == "verify":
        return _adjustment_valid(g, q, q.Z)
    candidates = sorted(g.node_set - {q.x, q.y})
    upward = range(len(candidates) + 1)
    if select == "find_valid" and q.criterion is Criterion.BACKDOOR:
        guess = g.parents[q.x] - {q.y}
        if _adjustment_valid(g, q, guess):
            return frozenset(guess)
    if select in ("find_valid", "find_minimal", "exists"):
        for Z in _subsets(candidates, upward):
            if _adjustment_valid(g, q, Z):
                return True if select == "exists" else Z
        return False if select == "exists" else None
    if select == "find_maximal":
        for Z in _subsets(candidates, reversed(upward)):
            if _adjustment_valid(g, q, Z):
                return Z
        return None
    raise ValueError(f"unknown selection {select!r}")


def valid_adjustment_sets(g: MixedGraph, x, y, criterion) -> list:
    """Every valid set, smallest first; used to build answer options."""
    q = AdjustmentQuery(x, y, frozenset(), criterion)
    candidates = sorted(g.node_set - {x, y})
    return [
        Z for Z in _subsets(candidates, range(len(candidates) + 1)) if _adjustment_valid(g, q, Z)
    ]


# identification


class _Masks:
    """Bitmask view of an ADMG: parents and bidirected neighbours per node index."""

    def __init__(self, g: MixedGraph):
        self.labels = list(g.nodes)
        self.index = {v: i for i, v in enumerate(self.labels)}
        n = len(self.labels)
        self.pa = [0] * n
        self.bi = [0] * n
        for a, b in g.directed:
            self.pa[self.index[b]] |= 1 << self.index[a]
        for a, b in g.bidirected:
            ia, ib = self.index[a], self.index[b]
            self.bi[ia] |= 1 << ib
            self.bi[ib] |= 1 << ia
        self.full = (1 << n) - 1


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _ancestral(y, V, pa, cut=0):
    """Reflexive ancestors of ``y`` inside ``V``; parents of ``cut`` nodes are ignored."""
    result = y
    frontier = y
    while frontier:
        low = frontier & -frontier
        i = low.bit_length() - 1
        frontier ^= low
        if low & cut:
            continue
        new = pa[i] & V & ~result
        result |= new
        frontier |= new
    return result


def _bi_components(S, bi):
    comps = []
    rest = S
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            f = frontier & -frontier
            frontier ^= f
            new = bi[f.bit_length() - 1] & S & ~comp
            comp |= new
            frontier |= new
        comps.append(comp)
        rest &= ~comp
    return comps


def _id(y, x, V, pa, bi) -> bool:
    # Decision version of the ID recursion; the distribution terms do not
    # affect identifiability and are dropped.
    if not x:
        return True
    anc = _ancestral(y, V, pa)
    if anc != V:
        return _id(y, x & anc, anc, pa, bi)
    w = V & ~x & ~_ancestral(y, V, pa, cut=x)
    if w:
        return _id(y, x | w, V, pa, bi)
    comps = _bi_components(V & ~x, bi)
    if len(comps) > 1:
        return all(_id(s, V & ~s, V, pa, bi) for s in comps)
    (s,) = comps
    comps_g = _bi_components(V, bi)
    if len(comps_g) == 1:
        return False
    for c in comps_g:
        if c == s:
            return True
        if s & c == s:
            return _id(y, x & c, c, pa, bi)
    raise AssertionError("C-component of G[V\\X] not contained in a C-component of G")


def identify_effect_masks(n, pa, bi, x, y) -> bool:
    """Identifiability of P(y | do(x)) on a bitmask ADMG over ``n`` nodes."""
    return _id(y, x, (1 << n) - 1, pa, bi)


def identify_effect(g: MixedGraph, x, y) -> bool:
    """True iff P(y | do(x)) is identifiable from the observational distribution."""
    _require_causal(g, "identification")
    g.check_node(x)
    g.check_node(y)
    if x == y:
        raise ValueError("treatment and outcome must differ")
    m = _Masks(g)
    return _id(1 << m.index[y], 1 << m.index[x], m.full, m.pa, m.bi)
