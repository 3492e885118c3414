"""Per-task oracle checks shared by question generation and grading.

``judge`` decides the statement behind a YesNo question or a single
ChoiceSelection option. ``verify_find_one`` accepts any valid witness for a
FindOne question, not only the stored one.
"""

from __future__ import annotations

from clearbench import causal
from clearbench.causal import AdjustmentQuery, Criterion
from clearbench.errors import ClearError
from clearbench.graph import (
    GraphKind,
    MixedGraph,
    NodePath,
    Step,
    build_graph,
    classify_triple,
    cycles,
    enumerate_paths,
    is_directed_cycle,
    is_path,
    is_topological_order,
    query_elements,
    relatives,
)


def path_param(p: NodePath) -> dict:
    return {"nodes": list(p.nodes), "steps": [Step(s).value for s in p.steps]}


def path_from_param(d: dict) -> NodePath:
    return NodePath(tuple(d["nodes"]), tuple(Step(s) for s in d["steps"]))


def _node_set(g: MixedGraph, value, exclude=()):
    """Validated frozenset of labels, or None when it names unknown or excluded nodes."""
    try:
        labels = list(value)
    except TypeError:
        return None
    if any(not isinstance(v, str) or v not in g.node_set or v in exclude for v in labels):
        return None
    return frozenset(labels)


def _seq(g: MixedGraph, value):
    try:
        seq = tuple(value)
    except TypeError:
        return None
    if any(not isinstance(v, str) for v in seq):
        return None
    return seq


def dag_from_edges(nodes, edges):
    """Build a DAG from ``"A->B"`` strings or pairs; None when that is impossible."""
    pairs = []
    for e in edges:
        if isinstance(e, str):
            if "->" not in e or "<->" in e:
                return None
            a, b = e.split("->", 1)
        else:
            a, b = e
        pairs.append((a.strip(), b.strip()))
    try:
        return build_graph(GraphKind.DAG, nodes, pairs)
    except (ClearError, ValueError):
        return None


def _adjust(g, p, value, criterion):
    Z = _node_set(g, value, exclude=(p["x"], p["y"]))
    if Z is None:
        return False
    return causal.adjustment_set(g, AdjustmentQuery(p["x"], p["y"], Z, criterion), "verify")


def _mec_other(g, value):
    other = dag_from_edges(g.nodes, value["directed"] if isinstance(value, dict) else value)
    if other is None or other == g:
        return False
    return causal.markov_equivalence("equivalent", g, other)


def judge(g: MixedGraph, task: str, p: dict, value=None) -> bool:
    """Truth of the task's statement about ``value`` (None for graph-level tasks)."""
    if task == "SN":
        return query_elements(g, "has_node", value)
    if task == "SE":
        return query_elements(g, "has_edge", value)
    if task == "2NR":
        return value in relatives(g, p["v"], p["relation"])
    if task == "3NR":
        seq = _seq(g, value)
        if seq is None or len(seq) != 3 or any(v not in g.node_set for v in seq):
            return False
        kind = classify_triple(g, *seq)
        return kind is not None and kind.value == p["kind"]
    if task == "PT":
        return is_path(g, value, p["x"], p["y"])
    if task == "CL":
        return is_directed_cycle(g, value)
    if task == "TO":
        return is_topological_order(g, value)
    if task == "BLP":
        path = path_from_param(p["path"])
        Z = _node_set(g, value, exclude=(path.nodes[0], path.nodes[-1]))
        return Z is not None and bool(causal.is_path_blocked(g, path, Z))
    if task == "DS":
        Z = _node_set(g, value, exclude=(p["x"], p["y"]))
        return Z is not None and causal.d_separated(g, p["x"], p["y"], Z)
    if task == "MEC":
        return _mec_other(g, value)
    if task == "MB":
        S = _node_set(g, value)
        return S is not None and S == causal.markov_blanket(g, p["v"])
    if task == "DP":
        return causal.directed_paths(g, p["x"], p["y"], "verify", seq=value)
    if task == "BKP":
        return causal.backdoor_paths(g, p["x"], p["y"], "verify", seq=value)
    if task == "MRS":
        S = _node_set(g, value)
        return S is not None and causal.maximal_root_set(g, "verify", S)
    if task == "BAS":
        return _adjust(g, p, value, Criterion.BACKDOOR)
    if task == "FAS":
        return _adjust(g, p, value, Criterion.FRONTDOOR)
    if task == "CC":
        return causal.c_components(g, "is_c_component")
    if task == "CT":
        return causal.is_c_tree(g, "c_tree")
    if task == "CF":
        return causal.is_c_tree(g, "c_forest")
    if task == "CEI":
        return causal.identify_effect(g, p["x"], p["y"])
    raise ValueError(f"no judge for task {task!r}")


def _orient_path(seq, x, y):
    """Read an orientation-blind path given back to front in the right direction."""
    if seq and seq[0] == y and seq[-1] == x:
        return tuple(reversed(seq))
    return seq


def _minimal_size(g, task, p):
    if task == "BLP":
        return len(causal.blocking_sets(g, path_from_param(p["path"]), "find_minimal"))
    return len(causal.d_separation(g, p["x"], p["y"], "find_minimal"))


def _inclusion_extreme(g, task, p, Z, variant):
    criterion = Criterion.BACKDOOR if task == "BAS" else Criterion.FRONTDOOR
    x, y = p["x"], p["y"]

    def ok(S):
        return causal.adjustment_set(g, AdjustmentQuery(x, y, S, criterion), "verify")

    if variant == "minimal":
        return not any(ok(Z - {z}) for z in Z)
    others = g.node_set - Z - {x, y}
    return not any(ok(Z | {w}) for w in others)


def verify_find_one(g: MixedGraph, task: str, p: dict, value) -> bool:
    """Accept ``value`` iff it is a correct answer to the FindOne question."""
    variant = p.get("variant")
    if task == "PT":
        seq = _seq(g, value)
        if seq is None:
            return False
        seq = _orient_path(seq, p["x"], p["y"])
        if not is_path(g, seq, p["x"], p["y"]):
            return False
        if variant in ("shortest", "longest"):
            return len(seq) == len(enumerate_paths(g, p["x"], p["y"], variant))
        return True
    if task == "CL":
        seq = _seq(g, value)
        return seq is not None and cycles(g, "verify", seq)
    if task == "TO":
        seq = _seq(g, value)
        return seq is not None and is_topological_order(g, seq)
    if task in ("BLP", "DS"):
        if not judge(g, task, p, value):
            return False
        return variant != "minimal" or len(set(value)) == _minimal_size(g, task, p)
    if task == "MEC":
        return _mec_other(g, value)
    if task == "MB":
        return judge(g, task, p, value)
    if task == "BKP":
        seq = _seq(g, value)
        if seq is None or not causal.backdoor_paths(g, p["x"], p["y"], "verify", seq=seq):
            return False
        best = causal.backdoor_paths(g, p["x"], p["y"], variant)
        return len(seq) == len(best)
    if task in ("BAS", "FAS"):
        if not judge(g, task, p, value):
            return False
        if variant in ("minimal", "maximal"):
            return _inclusion_extreme(g, task, p, frozenset(value), variant)
        return True
    raise ValueError(f"no FindOne verifier for task {task!r}")


def fo_supported(task: str) -> bool:
    return task in ("PT", "CL", "TO", "BLP", "DS", "MEC", "MB", "BKP", "BAS", "FAS")

