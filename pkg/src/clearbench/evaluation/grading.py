"""Compare extracted answers with ground truth or run the task verifier."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

from clearbench.bench.answers import Shape, answer_shape, path_nodes
from clearbench.bench.instance import QuestionInstance
from clearbench.bench.tasks import QType
from clearbench.bench.verify import verify_find_one
from clearbench.errors import ClearError
from clearbench.evaluation.extract import UNGRADABLE, extract_answer
from clearbench.graph import GraphKind


class Verdict(str, enum.Enum):
    CORRECT = "Correct"
    INCORRECT = "Incorrect"
    UNGRADABLE = "Ungradable"


@dataclass
class GradeRecord:
    question_id: str
    model: str
    style: str
    response_text: str
    extracted: object  # None when ungradable
    verdict: Verdict
    ground_truth: object

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "model": self.model,
            "style": self.style,
            "response_text": self.response_text,
            "extracted": self.extracted,
            "verdict": self.verdict.value,
            "ground_truth": self.ground_truth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GradeRecord":
        return cls(
            d["question_id"],
            d["model"],
            d.get("style", "basic"),
            d.get("response_text", ""),
            d.get("extracted"),
            Verdict(d["verdict"]),
            d.get("ground_truth"),
        )


def _labels(elem: str):
    return path_nodes(elem)


def _elements(extracted):
    return [e for grp in extracted["groups"] for e in grp]


def _edge_key(elem: str, undirected: bool):
    nodes = _labels(elem)
    if len(nodes) != 2:
        return None
    a, b = nodes
    mark = elem[len(a) : len(elem) - len(b)]
    if undirected:
        return (frozenset((a, b)), "-") if mark in ("-", "->", "<-", "<->") else None
    if mark == "->":
        return (a, b, "->")
    if mark == "<-":
        return (b, a, "->")
    if mark == "<->":
        return (frozenset((a, b)), "<->")
    if mark == "-":
        return (frozenset((a, b)), "-")
    return None


def _triple_key(nodes):
    if len(nodes) != 3:
        return None
    a, m, b = nodes
    return (m, frozenset((a, b)))


def _triples(extracted):
    out = []
    for grp in extracted["groups"]:
        if len(grp) == 3 and all(len(_labels(e)) == 1 for e in grp):
            out.append([_labels(e)[0] for e in grp])
        else:
            out.extend(_labels(e) for e in grp)
    return out


def _sequences(extracted, x=None, y=None, flip=False):
    out = set()
    for e in _elements(extracted):
        seq = tuple(_labels(e))
        if flip and seq and seq[0] == y and seq[-1] == x:
            seq = tuple(reversed(seq))
        out.add(seq)
    return out


def _flat(extracted):
    return [v for e in _elements(extracted) for v in _labels(e)]


def _check_find_all(inst: QuestionInstance, shape: Shape, extracted) -> bool:
    gt = inst.ground_truth
    p = inst.params
    if shape is Shape.NODES:
        return set(_flat(extracted)) == set(gt)
    if shape is Shape.EDGES:
        undirected = inst.graph.kind is GraphKind.UNDIRECTED
        got = [_edge_key(e, undirected) for e in _elements(extracted)]
        if None in got:
            return False
        return set(got) == {_edge_key(e, undirected) for e in gt}
    if shape is Shape.TRIPLES:
        got = [_triple_key(t) for t in _triples(extracted)]
        if None in got:
            return False
        return set(got) == {_triple_key(t) for t in gt}
    if shape is Shape.PATHS:
        flip = inst.task == "PT"
        got = _sequences(extracted, p.get("x"), p.get("y"), flip)
        return got == {tuple(path_nodes(s)) for s in gt}
    if shape is Shape.PARTITION:
        got = {frozenset(v for e in grp for v in _labels(e)) for grp in extracted["groups"]}
        return got == {frozenset(b) for b in gt}
    raise ValueError(f"unexpected FindAll shape {shape}")


def _find_one_value(shape: Shape, extracted):
    if shape is Shape.NODES:
        return sorted(set(_flat(extracted)))
    if shape is Shape.GRAPH:
        edges = []
        for e in _elements(extracted):
            key = _edge_key(e, False)
            if key is None or key[-1] != "->":
                return None
            edges.append(f"{key[0]}->{key[1]}")
        return edges
    return _flat(extracted)


def is_correct(inst: QuestionInstance, extracted) -> bool:
    """Decide a gradable extracted answer against the question."""
    qtype = inst.qtype
    if qtype in (QType.YN, QType.EX):
        return extracted == ("yes" if inst.ground_truth else "no")
    if qtype in (QType.HM, QType.CS):
        return extracted == inst.ground_truth
    shape = answer_shape(inst.task, qtype)
    if qtype is QType.FA:
        return _check_find_all(inst, shape, extracted)
    value = _find_one_value(shape, extracted)
    if value is None:
        return False
    try:
        return bool(verify_find_one(inst.graph, inst.task, inst.params, value))
    except (ClearError, ValueError, KeyError):
        return False


def grade(inst: QuestionInstance, extracted, *, model="", style="basic", response_text="") -> GradeRecord:
    if extracted is UNGRADABLE or extracted is None:
        verdict = Verdict.UNGRADABLE
        extracted = None
    else:
        verdict = Verdict.CORRECT if is_correct(inst, extracted) else Verdict.INCORRECT
    return GradeRecord(inst.id, model, style, response_text, extracted, verdict, inst.ground_truth)


def grade_response(inst: QuestionInstance, response_text: str, *, model="", style="basic") -> GradeRecord:
    extracted = extract_answer(response_text, inst.qtype)
    return grade(inst, extracted, model=model, style=style, response_text=response_text)


def load_overrides(path) -> dict:
    """{(question_id, model): verdict} from an overrides JSONL file."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                out[(d["question_id"], d["model"])] = Verdict(d["verdict"])
    return out


def apply_overrides(records, overrides: dict) -> list:
    out = []
    for r in records:
        v = overrides.get((r.question_id, r.model))
        if v is not None:
            r = GradeRecord(r.question_id, r.model, r.style, r.response_text, r.extracted, v, r.ground_truth)
        out.append(r)
    return out
