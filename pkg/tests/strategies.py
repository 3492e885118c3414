"""Hypothesis strategies for random graphs."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from clearbench.bench.sampling import DEFAULT_CAP, LETTERS, random_spec, sample_graph
from clearbench.graph import GraphKind, build_graph

seeds = st.integers(min_value=0, max_value=2**64 - 1)


@st.composite
def sampled_graphs(draw, kinds=(GraphKind.DAG, GraphKind.ADMG), nodes=None):
    """Graphs from the benchmark sampler (connected, 4-9 nodes)."""
    kind = draw(st.sampled_from(kinds))
    rng = random.Random(draw(seeds))
    spec = random_spec(kind, rng, DEFAULT_CAP, nodes)
    return sample_graph(spec, draw(seeds))


@st.composite
def small_dags(draw, min_nodes=2, max_nodes=7):
    """Arbitrary DAGs, not necessarily connected: edges go forward in a shuffled order."""
    n = draw(st.integers(min_nodes, max_nodes))
    labels = draw(st.permutations(LETTERS[:n]))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [(labels[i], labels[j]) for (i, j), k in zip(pairs, keep) if k]
    return build_graph(GraphKind.DAG, sorted(labels), edges)


@st.composite
def small_admgs(draw, min_nodes=2, max_nodes=6):
    dag = draw(small_dags(min_nodes, max_nodes))
    nodes = sorted(dag.nodes)
    pairs = [(a, b) for i, a in enumerate(nodes) for b in nodes[i + 1 :]]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    bi = [p for p, k in zip(pairs, keep) if k]
    return build_graph(GraphKind.ADMG, nodes, sorted(dag.directed), bi)
