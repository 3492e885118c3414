"""Seeded random graphs with exact node and edge counts."""

from __future__ import annotations

import random
import string
from dataclasses import dataclass
from fractions import Fraction
from math import comb, floor

from clearbench.errors import InfeasibleSpec
from clearbench.graph import GraphKind, MixedGraph, build_graph

MIN_NODES, MAX_NODES = 4, 9
MAX_EDGES = 10
DEFAULT_CAP = Fraction(1, 2)
LETTERS = string.ascii_uppercase


def _cap_limit(cap, n_directed: int) -> int:
    """Largest bidirected count allowed alongside ``n_directed`` directed edges."""
    if cap is None:
        return 10**9
    return floor(cap * n_directed)


def structural_max(kind: GraphKind, n_v: int, cap=DEFAULT_CAP) -> int:
    pairs = comb(n_v, 2)
    if kind is not GraphKind.ADMG:
        return pairs
    return pairs + min(pairs, _cap_limit(cap, pairs))


def edge_range(kind, n_v: int, cap=DEFAULT_CAP) -> range:
    kind = GraphKind(kind)
    return range(n_v - 1, min(MAX_EDGES, structural_max(kind, n_v, cap)) + 1)


@dataclass(frozen=True)
class GraphSpec:
    n_v: int
    n_e: int
    kind: GraphKind
    bi_ratio_cap: Fraction | None = DEFAULT_CAP
    n_bi: int | None = None  # fixes the bidirected count for ADMGs when given

    def __post_init__(self):
        object.__setattr__(self, "kind", GraphKind(self.kind))
        if self.bi_ratio_cap is not None:
            object.__setattr__(self, "bi_ratio_cap", Fraction(self.bi_ratio_cap))
        if not MIN_NODES <= self.n_v <= MAX_NODES:
            raise InfeasibleSpec(f"n_v={self.n_v} outside {MIN_NODES}..{MAX_NODES}")
        if self.n_e not in edge_range(self.kind, self.n_v, self.bi_ratio_cap):
            raise InfeasibleSpec(
                f"n_e={self.n_e} infeasible for a {self.kind.value} on {self.n_v} nodes"
            )
        if self.n_bi is not None:
            if self.kind is not GraphKind.ADMG and self.n_bi:
                raise InfeasibleSpec("only ADMGs carry bidirected edges")
            if self.kind is GraphKind.ADMG and self.n_bi not in self.bidirected_range():
                raise InfeasibleSpec(f"n_bi={self.n_bi} violates the bidirected ratio cap")

    def bidirected_range(self) -> range:
        if self.kind is not GraphKind.ADMG:
            return range(0, 1)
        pairs = comb(self.n_v, 2)
        lo = max(0, self.n_e - pairs)
        hi = min(pairs, self.n_e)
        while hi > lo and hi > _cap_limit(self.bi_ratio_cap, self.n_e - hi):
            hi -= 1
        return range(lo, hi + 1)


def _spanning_tree(labels, rng):
    """Random tree over ``labels`` as a list of unordered pairs."""
    order = list(labels)
    rng.shuffle(order)
    return [frozenset((order[i], order[rng.randrange(i)])) for i in range(1, len(order))]


def _extra_pairs(labels, used, k, rng):
    free = [frozenset((a, b)) for i, a in enumerate(labels) for b in labels[i + 1 :]]
    free = [p for p in free if p not in used]
    return rng.sample(free, k)


def _orient(pair, rank):
    a, b = sorted(pair, key=rank.__getitem__)
    return a, b


def sample_graph(spec: GraphSpec, seed) -> MixedGraph:
    """Random connected graph meeting ``spec`` exactly.

    Labels are a random subset of capital letters in random order. Directed
    edges of DAGs and ADMGs follow a hidden random order so the listing
    order does not reveal the causal order.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    labels = rng.sample(LETTERS, spec.n_v)
    tree = _spanning_tree(labels, rng)
    kind = spec.kind

    if kind is not GraphKind.ADMG:
        pairs = tree + _extra_pairs(labels, set(tree), spec.n_e - len(tree), rng)
        rng.shuffle(pairs)
        if kind is GraphKind.UNDIRECTED:
            edges = [tuple(rng.sample(sorted(p), 2)) for p in pairs]
            return build_graph(kind, labels, undirected=edges)
        if kind is GraphKind.DIRECTED:
            edges = [tuple(rng.sample(sorted(p), 2)) for p in pairs]
        else:
            rank = {v: i for i, v in enumerate(rng.sample(labels, len(labels)))}
            edges = [_orient(p, rank) for p in pairs]
        return build_graph(kind, labels, directed=edges)

    if spec.n_bi is not None:
        n_bi = spec.n_bi
    else:
        span = spec.bidirected_range()
        lo = max(span.start, 1) if span.stop > 1 else 0
        n_bi = rng.randint(min(lo, span.stop - 1), span.stop - 1)
    n_dir = spec.n_e - n_bi
    k_lo = max(0, len(tree) - n_dir)
    k = rng.randint(k_lo, min(n_bi, len(tree)))
    rng.shuffle(tree)
    bi_pairs = tree[:k]
    dir_pairs = tree[k:]
    dir_pairs += _extra_pairs(labels, set(dir_pairs), n_dir - len(dir_pairs), rng)
    bi_pairs += _extra_pairs(labels, set(bi_pairs), n_bi - len(bi_pairs), rng)
    rank = {v: i for i, v in enumerate(rng.sample(labels, len(labels)))}
    directed = [_orient(p, rank) for p in dir_pairs]
    bidirected = [tuple(rng.sample(sorted(p), 2)) for p in bi_pairs]
    rng.shuffle(directed)
    rng.shuffle(bidirected)
    return build_graph(kind, labels, directed=directed, bidirected=bidirected)


def random_spec(kind, rng: random.Random, cap=DEFAULT_CAP, nodes=None) -> GraphSpec:
    kind = GraphKind(kind)
    n_v = rng.choice(list(nodes or range(MIN_NODES, MAX_NODES + 1)))
    n_e = rng.choice(list(edge_range(kind, n_v, cap)))
    return GraphSpec(n_v, n_e, kind, cap)
