"""Understanding-criteria reports over accuracy tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from clearbench.bench.prompts import Style, parse_style
from clearbench.bench.tasks import DEFAULT_CHAINS, DEFINITION_TASKS, TASKS, Level, QType
from clearbench.errors import MissingStyleRun
from clearbench.evaluation.aggregate import AccuracyTables, weighted_baseline

COMPARED_STYLES = (Style.DEF, Style.ICL1, Style.ICL3)


def chain_verdict(accs) -> bool:
    """True when accuracies never rise along the dependency direction."""
    return all(a >= b for a, b in zip(accs, accs[1:]))


def qtype_spread(accs: dict):
    vals = [v for v in accs.values() if v is not None]
    return max(vals) - min(vals) if vals else None


def _points(a, b):
    return round((a - b) * 100, 6)


@dataclass
class EvalReport:
    accuracy: dict = field(default_factory=dict)
    levels: dict = field(default_factory=dict)
    qtypes: dict = field(default_factory=dict)
    ungradable: dict = field(default_factory=dict)
    baselines: dict = field(default_factory=dict)
    b1: dict = field(default_factory=dict)
    b2: dict = field(default_factory=dict)
    b3: dict = field(default_factory=dict)
    b4: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "levels": self.levels,
            "qtypes": self.qtypes,
            "ungradable": self.ungradable,
            "baselines": self.baselines,
            "b1": self.b1,
            "b2": self.b2,
            "b3": self.b3,
            "b4": self.b4,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        return render_text(self)


def _b3(tables, models, styles):
    out = {}
    for model in models:
        per_task = {}
        missing = []
        for task in DEFINITION_TASKS:
            base = tables.task_accuracy(model, Style.BASIC.value, task)
            if base is None:
                missing.append(f"{model} {task} basic")
                continue
            row = {}
            for style in styles:
                acc = tables.task_accuracy(model, style.value, task)
                if acc is None:
                    missing.append(f"{model} {task} {style.value}")
                    continue
                row[style.value] = _points(acc, base)
            per_task[task] = row
        if missing:
            raise MissingStyleRun("no accuracy for: " + ", ".join(missing))
        means = {
            s.value: sum(per_task[t][s.value] for t in DEFINITION_TASKS) / len(DEFINITION_TASKS)
            for s in styles
        }
        out[model] = {"deltas": per_task, "mean": means}
    return out


def criteria_report(tables: AccuracyTables, chains=DEFAULT_CHAINS, style_runs=None) -> EvalReport:
    """Build the B1-B4 report.

    ``style_runs`` names the prompt styles B3 compares against Basic. When
    omitted, B3 covers whichever of them the tables contain; when given, every
    model must have runs for Basic and each listed style.
    """
    rep = EvalReport()
    models = tables.models()
    for model in models:
        for style in tables.styles(model):
            key = f"{model}|{style}"
            rep.accuracy[key] = {t: tables.task_accuracy(model, style, t) for t in tables.tasks(model, style)}
            rep.levels[key] = {lv.value: tables.level_accuracy(model, style, lv.value) for lv in Level}
            rep.qtypes[key] = {q.value: tables.qtype_accuracy(model, style, q) for q in QType}
            rep.ungradable[key] = tables.cell(model, style).ungradable

            flags = {}
            for task, acc in rep.accuracy[key].items():
                base = weighted_baseline(task, tables.qtype_mix(model, style, task) or None)
                rep.baselines.setdefault(key, {})[task] = base
                flags[task] = None if acc is None else acc > base
            rep.b1[key] = flags
            rep.b2[key] = {"qtypes": rep.qtypes[key], "spread": qtype_spread(rep.qtypes[key])}

            verdicts = []
            for chain in chains:
                accs = [tables.task_accuracy(model, style, t, QType.YN) for t in chain]
                ok = None if None in accs else chain_verdict(accs)
                verdicts.append({"chain": list(chain), "accuracies": accs, "non_increasing": ok})
            rep.b4[key] = verdicts

    if style_runs is None:
        present = {s for m in models for s in tables.styles(m)}
        styles = [s for s in COMPARED_STYLES if s.value in present]
        if styles and Style.BASIC.value in present:
            rep.b3 = _b3(tables, [m for m in models if Style.BASIC.value in tables.styles(m)], styles)
    else:
        styles = [parse_style(s) for s in style_runs if parse_style(s) is not Style.BASIC]
        if not models:
            raise MissingStyleRun("no runs to compare")
        rep.b3 = _b3(tables, models, styles)
    return rep


def _fmt(v, pct=True):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return f"{v * 100:.1f}" if pct else f"{v:+.1f}"


def _grid(header, rows) -> str:
    cells = [header] + rows
    widths = [max(len(str(r[i])) for r in cells) for i in range(len(header))]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def render_text(rep: EvalReport) -> str:
    keys = sorted(rep.accuracy)
    out = []
    tasks = [t for t in TASKS if any(t in rep.accuracy[k] for k in keys)]
    if keys:
        out.append("== Accuracy (%) by task ==")
        rows = [[t] + [_fmt(rep.accuracy[k].get(t)) for k in keys] for t in tasks]
        out.append(_grid(["task"] + keys, rows))
        out.append("")
        out.append("== Accuracy (%) by level ==")
        rows = [[lv.value] + [_fmt(rep.levels[k].get(lv.value)) for k in keys] for lv in Level]
        out.append(_grid(["level"] + keys, rows))
        out.append("")
        out.append("== Ungradable responses ==")
        out.append(_grid(["run", "count"], [[k, str(rep.ungradable[k])] for k in keys]))
        out.append("")
        out.append("== B1: accuracy above random baseline ==")
        rows = [
            [t] + [f"{_fmt(rep.b1[k].get(t))} ({_fmt(rep.baselines[k].get(t))})" for k in keys]
            for t in tasks
        ]
        out.append(_grid(["task"] + keys, rows))
        out.append("")
        out.append("== B2: accuracy (%) by question type ==")
        rows = [[q.value] + [_fmt(rep.b2[k]["qtypes"].get(q.value)) for k in keys] for q in QType]
        rows.append(["spread"] + [_fmt(rep.b2[k]["spread"]) for k in keys])
        out.append(_grid(["qtype"] + keys, rows))
        out.append("")
    if rep.b3:
        out.append("== B3: delta vs Basic (points) ==")
        for model, body in sorted(rep.b3.items()):
            styles = list(body["mean"])
            rows = [[t] + [_fmt(body["deltas"][t].get(s), pct=False) for s in styles] for t in body["deltas"]]
            rows.append(["mean"] + [_fmt(body["mean"][s], pct=False) for s in styles])
            out.append(f"[{model}]")
            out.append(_grid(["task"] + styles, rows))
            out.append("")
    if rep.b4:
        out.append("== B4: YesNo accuracy along dependency chains ==")
        rows = []
        for k in sorted(rep.b4):
            for v in rep.b4[k]:
                accs = " / ".join(_fmt(a) for a in v["accuracies"])
                rows.append([k, "->".join(v["chain"]), accs, _fmt(v["non_increasing"])])
        out.append(_grid(["run", "chain", "accuracy", "non-increasing"], rows))
        out.append("")
    return "\n".join(out)


def accuracy_csv(tables: AccuracyTables) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "style", "task", "qtype", "correct", "incorrect", "ungradable", "accuracy"])
    for row in tables.to_dict()["cells"]:
        acc = row["accuracy"]
        w.writerow(
            [row["model"], row["style"], row["task"], row["qtype"], row["correct"], row["incorrect"],
             row["ungradable"], "" if acc is None else f"{acc:.6f}"]
        )
    return buf.getvalue()
