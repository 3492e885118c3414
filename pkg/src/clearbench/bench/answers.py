"""Answer shapes, the declared answer format and canonical answer text."""

from __future__ import annotations

import enum
import re

from clearbench.bench.tasks import QType
from clearbench.graph import GraphKind


class Shape(str, enum.Enum):
    BOOL = "bool"
    COUNT = "count"
    CHOICE = "choice"
    NODES = "nodes"
    EDGES = "edges"
    TRIPLES = "triples"
    PATHS = "paths"
    PARTITION = "partition"
    SEQUENCE = "sequence"
    GRAPH = "graph"


_SUBJECTIVE_SHAPES = {
    ("SN", QType.FA): Shape.NODES,
    ("SE", QType.FA): Shape.EDGES,
    ("2NR", QType.FA): Shape.NODES,
    ("3NR", QType.FA): Shape.TRIPLES,
    ("PT", QType.FA): Shape.PATHS,
    ("PT", QType.FO): Shape.SEQUENCE,
    ("CL", QType.FO): Shape.SEQUENCE,
    ("TO", QType.FO): Shape.SEQUENCE,
    ("BLP", QType.FO): Shape.NODES,
    ("DS", QType.FO): Shape.NODES,
    ("MEC", QType.FO): Shape.GRAPH,
    ("MB", QType.FO): Shape.NODES,
    ("DP", QType.FA): Shape.PATHS,
    ("BKP", QType.FA): Shape.PATHS,
    ("BKP", QType.FO): Shape.SEQUENCE,
    ("CC", QType.FA): Shape.PARTITION,
    ("MRS", QType.FA): Shape.NODES,
    ("BAS", QType.FO): Shape.NODES,
    ("FAS", QType.FO): Shape.NODES,
}


def answer_shape(task: str, qtype) -> Shape:
    qtype = QType(qtype)
    if qtype in (QType.YN, QType.EX):
        return Shape.BOOL
    if qtype is QType.HM:
        return Shape.COUNT
    if qtype is QType.CS:
        return Shape.CHOICE
    return _SUBJECTIVE_SHAPES[(task, qtype)]


def set_text(nodes) -> str:
    return "{" + ", ".join(sorted(nodes)) + "}"


def seq_text(nodes, sep="->") -> str:
    return sep.join(nodes)


def order_text(nodes) -> str:
    return "[" + ", ".join(nodes) + "]"


def triple_text(t) -> str:
    return "(" + ", ".join(t) + ")"


_CONNECTOR = re.compile(r"<->|->|<-|-")


def path_nodes(marker: str) -> list:
    """Node labels of a path written with step markers, e.g. ``A->B<-C``."""
    return [t for t in _CONNECTOR.split(marker.replace(" ", "")) if t]


def format_instruction(task: str, qtype, kind=None) -> str:
    shape = answer_shape(task, qtype)
    arrow = "-" if kind is not None and GraphKind(kind) is GraphKind.UNDIRECTED else "->"
    if shape is Shape.BOOL:
        fmt = "'Answer: Yes' or 'Answer: No'"
        return f"End your response with {fmt}."
    if shape is Shape.COUNT:
        return "End your response with 'Answer: <number>'."
    if shape is Shape.CHOICE:
        return "End your response with 'Answer: <option letter>'."
    if shape is Shape.NODES:
        return (
            "End your response with 'Answer: {<nodes separated by commas>}', "
            "writing {} for an empty set."
        )
    if shape is Shape.EDGES:
        return (
            f"End your response with 'Answer: <edges separated by commas>', "
            f"writing each edge like A{arrow}B."
        )
    if shape is Shape.TRIPLES:
        return (
            "End your response with 'Answer: <triples separated by commas>', writing each "
            "triple as (X, Y, Z) with the middle node in the middle, or 'Answer: none'."
        )
    if shape is Shape.PATHS:
        return (
            "End your response with 'Answer: <paths separated by commas>', writing each "
            "path as a node sequence such as A->B<-C, or 'Answer: none'."
        )
    if shape is Shape.PARTITION:
        return "End your response with 'Answer: {A, B}, {C}', listing every subgraph's nodes."
    if shape is Shape.GRAPH:
        return "End your response with 'Answer: <directed edges separated by commas>' like A->B."
    if task == "TO":
        return "End your response with 'Answer: [<nodes in order separated by commas>]'."
    if task == "CL":
        return "End your response with 'Answer: <cycle>' written like A->B->C->A."
    return "End your response with 'Answer: <path>' written as a node sequence such as A->B<-C."


def answer_text(task: str, qtype, truth) -> str:
    """Render a ground-truth payload in the declared answer format."""
    shape = answer_shape(task, qtype)
    if shape is Shape.BOOL:
        body = "Yes" if truth else "No"
    elif shape in (Shape.COUNT, Shape.CHOICE):
        body = str(truth)
    elif shape is Shape.NODES:
        body = set_text(truth)
    elif shape in (Shape.EDGES, Shape.GRAPH):
        body = ", ".join(truth) if truth else "none"
    elif shape is Shape.TRIPLES:
        body = ", ".join(triple_text(t) for t in truth) if truth else "none"
    elif shape is Shape.PATHS:
        body = ", ".join(truth) if truth else "none"
    elif shape is Shape.PARTITION:
        body = ", ".join(set_text(b) for b in truth)
    elif task == "TO":
        body = order_text(truth)
    elif task == "CL":
        body = seq_text(truth)
    else:
        body = truth
    return f"Answer: {body}"
