"""Causal-graph oracles, benchmark generation and model evaluation."""

from clearbench.causal import (
    AdjustmentQuery,
    Criterion,
    adjustment_set,
    backdoor_paths,
    blocking_sets,
    c_components,
    cpdag,
    d_separated,
    d_separation,
    directed_paths,
    identify_effect,
    is_c_tree,
    is_path_blocked,
    markov_blanket,
    markov_equivalence,
    maximal_root_set,
    skeleton,
    v_structures,
)
from clearbench.graph import (
    Edge,
    GraphKind,
    MixedGraph,
    NodePath,
    Step,
    TripleKind,
    build_graph,
    classify_triple,
    cycles,
    enumerate_paths,
    enumerate_triples,
    parse_graph_text,
    query_elements,
    relatives,
    topological,
)

__version__ = "0.1.0"
