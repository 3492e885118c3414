"""Accuracy tables over graded responses."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass

from clearbench.bench.prompts import parse_style
from clearbench.bench.tasks import DEFAULT_COUNTS, TASKS, QType, supported
from clearbench.errors import UnknownQuestionId, UnsupportedPair
from clearbench.evaluation.grading import Verdict


def random_baseline(task: str, qtype) -> float:
    qtype = QType(qtype)
    if not supported(task, qtype):
        raise UnsupportedPair(f"{task} has no {qtype.value} questions")
    if qtype in (QType.YN, QType.EX):
        return 0.5
    if qtype is QType.CS:
        return 0.25
    return 0.0


def weighted_baseline(task: str, mix: dict | None = None) -> float:
    """Count-weighted random baseline for a task over its question-type mix."""
    mix = mix or {q.value: n for q, n in DEFAULT_COUNTS[task].items()}
    total = sum(mix.values())
    if not total:
        return 0.0
    return sum(n * random_baseline(task, q) for q, n in mix.items()) / total


@dataclass
class Cell:
    correct: int = 0
    incorrect: int = 0
    ungradable: int = 0

    @property
    def graded(self) -> int:
        return self.correct + self.incorrect

    @property
    def total(self) -> int:
        return self.graded + self.ungradable

    @property
    def accuracy(self):
        return self.correct / self.graded if self.graded else None

    def add(self, other: "Cell"):
        self.correct += other.correct
        self.incorrect += other.incorrect
        self.ungradable += other.ungradable

    def to_dict(self) -> dict:
        return {
            "correct": self.correct,
            "incorrect": self.incorrect,
            "ungradable": self.ungradable,
            "accuracy": self.accuracy,
        }


class AccuracyTables:
    """Counts per (model, style, task, qtype) with roll-ups.

    Task-level accuracies can also be supplied directly (for published
    numbers without per-question records); they take precedence over counts.
    """

    def __init__(self):
        self.cells = defaultdict(Cell)
        self.direct = {}

    @classmethod
    def from_accuracies(cls, rows) -> "AccuracyTables":
        """``rows`` maps (model, style, task) or (model, style, task, qtype) to an accuracy."""
        t = cls()
        for key, acc in rows.items():
            if not 0.0 <= acc <= 1.0:
                raise ValueError(f"accuracy {acc} for {key} outside [0, 1]")
            t.direct[tuple(key)] = acc
        return t

    def models(self):
        keys = {k[0] for k in self.cells} | {k[0] for k in self.direct}
        return sorted(keys)

    def styles(self, model=None):
        keys = [k for k in list(self.cells) + list(self.direct) if model is None or k[0] == model]
        return sorted({k[1] for k in keys})

    def tasks(self, model=None, style=None):
        keys = [
            k
            for k in list(self.cells) + list(self.direct)
            if (model is None or k[0] == model) and (style is None or k[1] == style)
        ]
        return [t for t in TASKS if t in {k[2] for k in keys}]

    def _rollup(self, model, style, pred) -> Cell:
        out = Cell()
        for (m, s, task, q), cell in self.cells.items():
            if m == model and s == style and pred(task, q):
                out.add(cell)
        return out

    def cell(self, model, style, task=None, qtype=None) -> Cell:
        return self._rollup(
            model,
            style,
            lambda t, q: (task is None or t == task) and (qtype is None or q == QType(qtype).value),
        )

    def task_accuracy(self, model, style, task, qtype=None):
        key = (model, style, task) if qtype is None else (model, style, task, QType(qtype).value)
        if key in self.direct:
            return self.direct[key]
        return self.cell(model, style, task, qtype).accuracy

    def level_accuracy(self, model, style, level):
        return self._rollup(model, style, lambda t, q: TASKS[t].level.value == level).accuracy

    def qtype_accuracy(self, model, style, qtype):
        return self.cell(model, style, qtype=qtype).accuracy

    def qtype_mix(self, model, style, task) -> dict:
        mix = {}
        for (m, s, t, q), cell in self.cells.items():
            if m == model and s == style and t == task and cell.graded:
                mix[q] = mix.get(q, 0) + cell.graded
        return mix

    def to_dict(self) -> dict:
        rows = []
        for (m, s, t, q), cell in sorted(self.cells.items()):
            rows.append({"model": m, "style": s, "task": t, "qtype": q, **cell.to_dict()})
        return {"cells": rows}


def aggregate(grades, instances) -> AccuracyTables:
    """Tally grade records into tables; ``instances`` maps or lists known questions."""
    if not isinstance(instances, dict):
        instances = {i.id: i for i in instances}
    tables = AccuracyTables()
    for g in grades:
        inst = instances.get(g.question_id)
        if inst is None:
            raise UnknownQuestionId(f"grade references unknown question {g.question_id!r}")
        cell = tables.cells[(g.model, g.style, inst.task, inst.qtype.value)]
        if g.verdict is Verdict.CORRECT:
            cell.correct += 1
        elif g.verdict is Verdict.INCORRECT:
            cell.incorrect += 1
        else:
            cell.ungradable += 1
    return tables


def load_accuracies(path) -> AccuracyTables:
    """Tables from published accuracies.

    The file holds ``{"unit": "percent" | "fraction", "rows": [...]}`` where
    each row has model, style, task, an optional qtype and accuracy.
    """
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    rows = data["rows"] if isinstance(data, dict) else data
    scale = 100.0 if isinstance(data, dict) and data.get("unit") == "percent" else 1.0
    out = {}
    for r in rows:
        key = (r["model"], parse_style(r["style"]).value, r["task"])
        if r.get("qtype"):
            key += (QType(r["qtype"]).value,)
        out[key] = r["accuracy"] / scale
    return AccuracyTables.from_accuracies(out)
