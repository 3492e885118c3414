"""Mixed graphs and the basic (level one) graph queries.

A :class:`MixedGraph` holds directed, bidirected and undirected edges over
single-letter node labels. Graphs are immutable once built; derived
structures such as parent maps and ancestor closures are computed lazily and
cached on the instance.
"""

from __future__ import annotations

import enum
import heapq
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

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
    WrongGraphKind,
)

__all__ = [
    "GraphKind",
    "Step",
    "Edge",
    "NodePath",
    "TripleKind",
    "MixedGraph",
    "build_graph",
    "parse_graph_text",
    "query_elements",
    "relatives",
    "classify_triples",
    "enumerate_paths",
    "cycles",
    "topological",
]


class GraphKind(str, enum.Enum):
    UNDIRECTED = "Undirected"
    DIRECTED = "Directed"
    DAG = "DAG"
    ADMG = "ADMG"


class Step(str, enum.Enum):
    """Orientation of one path step, read from the earlier node to the later."""

    FORWARD = "->"
    BACKWARD = "<-"
    BIDIRECTED = "<->"
    UNDIRECTED = "-"

    @property
    def head_at_start(self) -> bool:
        return self in (Step.BACKWARD, Step.BIDIRECTED)

    @property
    def head_at_end(self) -> bool:
        return self in (Step.FORWARD, Step.BIDIRECTED)


class Edge(NamedTuple):
    u: str
    v: str
    mark: str  # "->", "<->" or "-"

    def __str__(self):
        return f"{self.u}{self.mark}{self.v}"

    def key(self):
        if self.mark == "->":
            return (self.u, self.v, self.mark)
        a, b = sorted((self.u, self.v))
        return (a, b, self.mark)


@dataclass(frozen=True)
class NodePath:
    """A sequence of distinct nodes together with the orientation of each step."""

    nodes: tuple
    steps: tuple

    def __post_init__(self):
        if len(self.nodes) < 2:
            raise ValueError("a path needs at least two nodes")
        if len(self.steps) != len(self.nodes) - 1:
            raise ValueError("a path needs one step per consecutive node pair")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError(f"path nodes must be distinct: {self.nodes}")

    def __str__(self):
        out = [self.nodes[0]]
        for step, node in zip(self.steps, self.nodes[1:]):
            out.append(Step(step).value)
            out.append(node)
        return "".join(out)

    def __len__(self):
        return len(self.nodes)

    @property
    def interior(self):
        return self.nodes[1:-1]

    def plain(self) -> str:
        return "-".join(self.nodes)

    def reversed(self) -> "NodePath":
        flip = {
            Step.FORWARD: Step.BACKWARD,
            Step.BACKWARD: Step.FORWARD,
            Step.BIDIRECTED: Step.BIDIRECTED,
            Step.UNDIRECTED: Step.UNDIRECTED,
        }
        return NodePath(
            tuple(reversed(self.nodes)),
            tuple(flip[Step(s)] for s in reversed(self.steps)),
        )

    def sort_key(self):
        return (self.nodes, tuple(Step(s).value for s in self.steps))


class TripleKind(str, enum.Enum):
    CHAIN = "chain"
    FORK = "fork"
    VSTRUCTURE = "v-structure"


@dataclass(frozen=True, eq=False)
class MixedGraph:
    """Immutable graph with directed, bidirected and undirected edge sets.

    Use :func:`build_graph` to construct validated instances.
    """

    kind: GraphKind
    nodes: tuple
    directed: tuple = ()
    bidirected: tuple = ()
    undirected: tuple = ()

    def __eq__(self, other):
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return self._identity == other._identity

    def __hash__(self):
        return hash(self._identity)

    def __repr__(self):
        return f"MixedGraph({self.kind.value}: {self.to_text()})"

    @cached_property
    def _identity(self):
        return (
            self.kind,
            frozenset(self.nodes),
            frozenset(self.directed),
            frozenset(frozenset(e) for e in self.bidirected),
            frozenset(frozenset(e) for e in self.undirected),
        )

    @cached_property
    def node_set(self) -> frozenset:
        return frozenset(self.nodes)

    @cached_property
    def parents(self) -> dict:
        out = {v: set() for v in self.nodes}
        for a, b in self.directed:
            out[b].add(a)
        return {v: frozenset(s) for v, s in out.items()}

    @cached_property
    def children(self) -> dict:
        out = {v: set() for v in self.nodes}
        for a, b in self.directed:
            out[a].add(b)
        return {v: frozenset(s) for v, s in out.items()}

    @cached_property
    def spouses(self) -> dict:
        out = {v: set() for v in self.nodes}
        for a, b in self.bidirected:
            out[a].add(b)
            out[b].add(a)
        return {v: frozenset(s) for v, s in out.items()}

    @cached_property
    def neighbors(self) -> dict:
        out = {v: set() for v in self.nodes}
        for a, b in self.undirected:
            out[a].add(b)
            out[b].add(a)
        return {v: frozenset(s) for v, s in out.items()}

    @cached_property
    def adjacency(self) -> dict:
        return {
            v: self.parents[v] | self.children[v] | self.spouses[v] | self.neighbors[v]
            for v in self.nodes
        }

    @cached_property
    def steps_from(self) -> dict:
        """Orientation-blind incidence: node -> sorted list of (neighbor, Step)."""
        out = {}
        for v in self.nodes:
            items = [(c, Step.FORWARD) for c in self.children[v]]
            items += [(p, Step.BACKWARD) for p in self.parents[v]]
            items += [(s, Step.BIDIRECTED) for s in self.spouses[v]]
            items += [(u, Step.UNDIRECTED) for u in self.neighbors[v]]
            out[v] = sorted(items, key=lambda t: (t[0], t[1].value))
        return out

    @cached_property
    def _ancestor_cache(self) -> dict:
        return {}

    @cached_property
    def _descendant_cache(self) -> dict:
        return {}

    @property
    def n_edges(self) -> int:
        return len(self.directed) + len(self.bidirected) + len(self.undirected)

    def check_node(self, v):
        if v not in self.node_set:
            raise UnknownNode(f"unknown node {v!r}")

    def ancestors(self, v) -> frozenset:
        """Proper ancestors of ``v`` (``v`` itself excluded)."""
        self.check_node(v)
        cache = self._ancestor_cache
        if v not in cache:
            cache[v] = _closure(v, self.parents)
        return cache[v]

    def descendants(self, v) -> frozenset:
        """Proper descendants of ``v`` (``v`` itself excluded)."""
        self.check_node(v)
        cache = self._descendant_cache
        if v not in cache:
            cache[v] = _closure(v, self.children)
        return cache[v]

    def has_directed(self, a, b) -> bool:
        return b in self.children.get(a, ())

    def has_bidirected(self, a, b) -> bool:
        return b in self.spouses.get(a, ())

    def has_undirected(self, a, b) -> bool:
        return b in self.neighbors.get(a, ())

    def is_adjacent(self, a, b) -> bool:
        return b in self.adjacency.get(a, ())

    def has_step(self, a, step, b) -> bool:
        step = Step(step)
        if step is Step.FORWARD:
            return self.has_directed(a, b)
        if step is Step.BACKWARD:
            return self.has_directed(b, a)
        if step is Step.BIDIRECTED:
            return self.has_bidirected(a, b)
        return self.has_undirected(a, b)

    def edges(self) -> list:
        out = [Edge(a, b, "->") for a, b in self.directed]
        out += [Edge(a, b, "<->") for a, b in self.bidirected]
        out += [Edge(a, b, "-") for a, b in self.undirected]
        return out

    def has_edge(self, edge) -> bool:
        if isinstance(edge, str):
            edge = parse_edge(edge)
        u, v, mark = edge
        if mark == "->":
            return self.has_directed(u, v)
        if mark == "<-":
            return self.has_directed(v, u)
        if mark == "<->":
            return self.has_bidirected(u, v)
        if mark == "-":
            return self.has_undirected(u, v)
        raise ValueError(f"unknown edge mark {mark!r}")

    def is_acyclic(self) -> bool:
        return _topo_order(self.nodes, self.directed) is not None

    def subgraph(self, keep) -> "MixedGraph":
        keep = set(keep)
        return MixedGraph(
            self.kind,
            tuple(v for v in self.nodes if v in keep),
            tuple(e for e in self.directed if e[0] in keep and e[1] in keep),
            tuple(e for e in self.bidirected if e[0] in keep and e[1] in keep),
            tuple(e for e in self.undirected if e[0] in keep and e[1] in keep),
        )

    def to_text(self) -> str:
        parts = [f"nodes: {', '.join(self.nodes)}"]
        if self.directed:
            parts.append("directed edges: " + ", ".join(f"{a}->{b}" for a, b in self.directed))
        if self.bidirected:
            parts.append("bi-directed edges: " + ", ".join(f"{a}<->{b}" for a, b in self.bidirected))
        if self.undirected:
            parts.append("undirected edges: " + ", ".join(f"{a}-{b}" for a, b in self.undirected))
        return "; ".join(parts)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "nodes": list(self.nodes),
            "directed": [list(e) for e in self.directed],
            "bidirected": [list(e) for e in self.bidirected],
            "undirected": [list(e) for e in self.undirected],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MixedGraph":
        return build_graph(
            data["kind"],
            data["nodes"],
            [tuple(e) for e in data.get("directed", ())],
            [tuple(e) for e in data.get("bidirected", ())],
            [tuple(e) for e in data.get("undirected", ())],
        )


def _closure(v, step_map) -> frozenset:
    seen = set()
    stack = list(step_map[v])
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(step_map[u])
    seen.discard(v)
    return frozenset(seen)


def _topo_order(nodes, directed, smallest_first=True):
    """Kahn's algorithm; returns None when the directed part has a cycle."""
    indeg = {v: 0 for v in nodes}
    succ = {v: [] for v in nodes}
    for a, b in directed:
        indeg[b] += 1
        succ[a].append(b)
    heap = [v for v in nodes if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(order) != len(nodes):
        return None
    return order


def build_graph(kind, nodes, directed=(), bidirected=(), undirected=()) -> MixedGraph:
    """Validate the inputs and return an immutable :class:`MixedGraph`.

    Raises CycleInDag, EdgeKindMismatch, DuplicateEdge, SelfLoop or
    UnknownEndpoint when the edge lists violate the graph invariants.
    """
    kind = GraphKind(kind)
    nodes = tuple(nodes)
    if len(set(nodes)) != len(nodes):
        raise DuplicateEdge(f"duplicate node labels in {nodes}")
    node_set = set(nodes)
    directed = tuple(tuple(e) for e in directed)
    bidirected = tuple(tuple(e) for e in bidirected)
    undirected = tuple(tuple(e) for e in undirected)

    if kind is GraphKind.UNDIRECTED and (directed or bidirected):
        raise EdgeKindMismatch("undirected graphs carry only undirected edges")
    if kind in (GraphKind.DIRECTED, GraphKind.DAG) and (undirected or bidirected):
        raise EdgeKindMismatch(f"{kind.value} graphs carry only directed edges")
    if kind is GraphKind.ADMG and undirected:
        raise EdgeKindMismatch("ADMGs carry no undirected edges")

    for label, edges, ordered in (
        ("directed", directed, True),
        ("bidirected", bidirected, False),
        ("undirected", undirected, False),
    ):
        seen = set()
        for e in edges:
            if len(e) != 2:
                raise ValueError(f"malformed edge {e!r}")
            a, b = e
            for end in e:
                if end not in node_set:
                    raise UnknownEndpoint(f"edge {a}{b}: {end!r} is not a node")
            if a == b:
                raise SelfLoop(f"self loop on {a!r}")
            key = (a, b) if ordered else frozenset(e)
            if key in seen:
                raise DuplicateEdge(f"duplicate {label} edge {a},{b}")
            seen.add(key)

    if kind in (GraphKind.DAG, GraphKind.ADMG) and _topo_order(nodes, directed) is None:
        raise CycleInDag(f"the directed part of this {kind.value} has a cycle")
    return MixedGraph(kind, nodes, directed, bidirected, undirected)


def parse_edge(text: str) -> Edge:
    text = text.strip().replace(" ", "")
    for mark in ("<->", "->", "<-", "-"):
        if mark in text:
            u, v = text.split(mark, 1)
            if mark == "<-":
                return Edge(v, u, "->")
            return Edge(u, v, mark)
    raise ValueError(f"cannot parse edge {text!r}")


def parse_graph_text(text: str, kind=None) -> MixedGraph:
    """Inverse of :meth:`MixedGraph.to_text`."""
    fields = {}
    for part in text.split(";"):
        if ":" not in part:
            continue
        name, _, value = part.partition(":")
        fields[name.strip().lower()] = [t.strip() for t in value.split(",") if t.strip()]
    nodes = fields.get("nodes", [])
    directed = [tuple(parse_edge(e)[:2]) for e in fields.get("directed edges", [])]
    bidirected = [tuple(parse_edge(e)[:2]) for e in fields.get("bi-directed edges", [])]
    undirected = [tuple(parse_edge(e)[:2]) for e in fields.get("undirected edges", [])]
    if kind is None:
        if undirected:
            kind = GraphKind.UNDIRECTED
        elif bidirected:
            kind = GraphKind.ADMG
        else:
            kind = GraphKind.DAG if _topo_order(nodes, directed) else GraphKind.DIRECTED
    return build_graph(kind, nodes, directed, bidirected, undirected)


# element queries


def query_elements(g: MixedGraph, query: str, arg=None):
    """Answer one of the single-node / single-edge queries.

    ``query`` is one of ``list_nodes``, ``list_edges``, ``count_nodes``,
    ``count_edges``, ``has_node`` (``arg`` a label) or ``has_edge`` (``arg``
    an :class:`Edge`, a ``(u, v, mark)`` tuple or text such as ``"A->B"``).
    """
    if query == "list_nodes":
        return list(g.nodes)
    if query == "list_edges":
        return g.edges()
    if query == "count_nodes":
        return len(g.nodes)
    if query == "count_edges":
        return g.n_edges
    if query == "has_node":
        return arg in g.node_set
    if query == "has_edge":
        try:
            return g.has_edge(arg)
        except ValueError:
            return False
    raise ValueError(f"unknown element query {query!r}")


RELATIONS = ("parents", "children", "ancestors", "descendants")


def relatives(g: MixedGraph, v, relation: str) -> frozenset:
    g.check_node(v)
    if g.kind is GraphKind.UNDIRECTED:
        raise WrongGraphKind("kinship queries need a directed part")
    if relation == "parents":
        return g.parents[v]
    if relation == "children":
        return g.children[v]
    if relation == "ancestors":
        return g.ancestors(v)
    if relation == "descendants":
        return g.descendants(v)
    raise ValueError(f"unknown relation {relation!r}")


# triples


def _triple_pattern(g, a, m, b):
    """'chain', 'fork', 'collider' or None for outer nodes a, b around m."""
    pa, ch = g.parents[m], g.children[m]
    if a in pa and b in ch or b in pa and a in ch:
        return "chain"
    if a in ch and b in ch:
        return "fork"
    if a in pa and b in pa:
        return "collider"
    return None


def _canonical_triple(g, a, m, b, kind):
    if kind is TripleKind.CHAIN:
        return (a, m, b) if a in g.parents[m] else (b, m, a)
    return (min(a, b), m, max(a, b))


def classify_triple(g: MixedGraph, a, m, b):
    """Return the TripleKind of the triple with middle node ``m``, or None."""
    for v in (a, m, b):
        g.check_node(v)
    if len({a, m, b}) != 3:
        return None
    pattern = _triple_pattern(g, a, m, b)
    if pattern == "chain":
        return TripleKind.CHAIN
    if pattern == "fork":
        return TripleKind.FORK
    if pattern == "collider" and not g.is_adjacent(a, b):
        return TripleKind.VSTRUCTURE
    return None


def enumerate_triples(g: MixedGraph, kind) -> list:
    kind = TripleKind(kind)
    if g.kind is GraphKind.UNDIRECTED:
        raise WrongGraphKind("triples need directed edges")
    found = set()
    for m in g.nodes:
        around = sorted(g.parents[m] | g.children[m])
        for a, b in itertools.combinations(around, 2):
            if classify_triple(g, a, m, b) is kind:
                found.add(_canonical_triple(g, a, m, b, kind))
    return sorted(found)


def classify_triples(g: MixedGraph, mode: str, *args):
    """``classify_triples(g, "enumerate", kind)`` or ``classify_triples(g, "classify", a, m, b)``."""
    if mode == "enumerate":
        return enumerate_triples(g, *args)
    if mode == "classify":
        return classify_triple(g, *args)
    raise ValueError(f"unknown mode {mode!r}")


# paths


def iter_paths(g: MixedGraph, x, y, allowed=None):
    """Yield every orientation-blind simple path from x to y.

    ``allowed`` optionally restricts the steps that may be taken:
    it is called as ``allowed(position, step)`` with position 0 for the
    first step.
    """
    g.check_node(x)
    g.check_node(y)
    if x == y:
        return
    nodes = [x]
    steps = []
    on_path = {x}

    def walk(v):
        for w, step in g.steps_from[v]:
            if w in on_path:
                continue
            if allowed is not None and not allowed(len(steps), step):
                continue
            nodes.append(w)
            steps.append(step)
            if w == y:
                yield NodePath(tuple(nodes), tuple(steps))
            else:
                on_path.add(w)
                yield from walk(w)
                on_path.discard(w)
            nodes.pop()
            steps.pop()

    yield from walk(x)


def _select_path(paths, select, what="path"):
    if select == "all":
        return sorted(paths, key=NodePath.sort_key)
    if select == "count":
        return len(paths)
    if not paths:
        raise NoPathExists(f"no {what} exists")
    if select in ("one", "shortest"):
        return min(paths, key=lambda p: (len(p), p.sort_key()))
    if select == "longest":
        return min(paths, key=lambda p: (-len(p), p.sort_key()))
    raise ValueError(f"unknown selection {select!r}")


def enumerate_paths(g: MixedGraph, x, y, select: str = "all"):
    """Orientation-blind paths from x to y.

    ``select`` is ``all`` (sorted list), ``count``, ``one``, ``shortest`` or
    ``longest``. Ties between equally long paths go to the lexicographically
    smallest node sequence.
    """
    if x == y:
        raise ValueError("path endpoints must differ")
    return _select_path(list(iter_paths(g, x, y)), select)


def path_from_nodes(g: MixedGraph, seq: Sequence, prefer=None):
    """Resolve a node sequence into the NodePath(s) it traces in ``g``.

    Returns a list of every orientation assignment that is realised by edges
    of the graph (more than one only when parallel edges exist). An empty
    list means the sequence is not a path.
    """
    seq = tuple(seq)
    if len(seq) < 2 or len(set(seq)) != len(seq):
        return []
    if any(v not in g.node_set for v in seq):
        return []
    options = []
    for a, b in zip(seq, seq[1:]):
        here = [s for w, s in g.steps_from[a] if w == b]
        if not here:
            return []
        options.append(here)
    return [NodePath(seq, tuple(combo)) for combo in itertools.product(*options)]


def is_path(g: MixedGraph, seq, x=None, y=None) -> bool:
    seq = tuple(seq)
    if x is not None and (not seq or seq[0] != x):
        return False
    if y is not None and (not seq or seq[-1] != y):
        return False
    return bool(path_from_nodes(g, seq))


# cycles


def _directed_cycles(g: MixedGraph):
    """Yield each simple directed cycle once, rotated to start at its smallest label."""
    order = sorted(g.nodes)
    for start in order:
        stack = [start]
        on = {start}

        def walk(v):
            for w in sorted(g.children[v]):
                if w == start:
                    yield tuple(stack)
                elif w > start and w not in on:
                    stack.append(w)
                    on.add(w)
                    yield from walk(w)
                    on.discard(w)
                    stack.pop()

        yield from walk(start)


def is_directed_cycle(g: MixedGraph, seq) -> bool:
    seq = list(seq)
    if len(seq) >= 2 and seq[0] == seq[-1]:
        seq = seq[:-1]
    if len(seq) < 2 or len(set(seq)) != len(seq):
        return False
    if any(v not in g.node_set for v in seq):
        return False
    return all(g.has_directed(a, b) for a, b in zip(seq, seq[1:] + seq[:1]))


def cycles(g: MixedGraph, mode: str = "exists", seq=None):
    """Directed-cycle queries: ``exists``, ``find_one``, ``all`` or ``verify``.

    ``find_one`` returns the cycle as a closed label tuple such as
    ``("A", "B", "C", "A")``.
    """
    if g.kind is GraphKind.UNDIRECTED:
        raise WrongGraphKind("cycle queries need a directed part")
    if mode == "exists":
        return not g.is_acyclic()
    if mode == "verify":
        return is_directed_cycle(g, seq)
    if mode == "all":
        return [c + c[:1] for c in _directed_cycles(g)]
    if mode == "find_one":
        best = min(_directed_cycles(g), key=lambda c: (len(c), c), default=None)
        if best is None:
            raise NoCycleExists("the graph is acyclic")
        return best + best[:1]
    raise ValueError(f"unknown mode {mode!r}")


# topological orderings


def is_topological_order(g: MixedGraph, seq) -> bool:
    seq = list(seq)
    if len(seq) != len(g.nodes) or set(seq) != g.node_set:
        return False
    pos = {v: i for i, v in enumerate(seq)}
    return all(pos[a] < pos[b] for a, b in g.directed)


def topological(g: MixedGraph, mode: str = "find_one", seq=None):
    if g.kind is GraphKind.UNDIRECTED:
        raise WrongGraphKind("topological orderings need a directed graph")
    if mode == "find_one":
        order = _topo_order(g.nodes, g.directed)
        if order is None:
            raise CyclicGraph("no topological ordering exists for a cyclic graph")
        return order
    if mode == "verify":
        return is_topological_order(g, seq)
    raise ValueError(f"unknown mode {mode!r}")


def all_topological_orders(g: MixedGraph, limit: int | None = None) -> Iterable[list]:
    """Enumerate orderings (lexicographic); used to build answer candidates."""
    indeg = {v: len(g.parents[v]) for v in g.nodes}
    order = []
    count = 0

    def rec():
        nonlocal count
        if limit is not None and count >= limit:
            return
        if len(order) == len(g.nodes):
            count += 1
            yield list(order)
            return
        for v in sorted(g.nodes):
            if indeg[v] == 0 and v not in placed:
                placed.add(v)
                order.append(v)
                for c in g.children[v]:
                    indeg[c] -= 1
                yield from rec()
                for c in g.children[v]:
                    indeg[c] += 1
                order.pop()
                placed.discard(v)

    placed = set()
    yield from rec()
