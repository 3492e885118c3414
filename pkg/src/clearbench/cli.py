"""Command-line entry point: generate, render, ask, grade, report, selftest."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from clearbench.bench.generate import atomic_write, generate_benchmark, load_questions, serialize_jsonl, write_benchmark
from clearbench.bench.prompts import load_definitions, render_prompt
from clearbench.config import RunConfig, as_paths, parse_config
from clearbench.errors import ClearError, ConfigInvalid, IoError, UnknownQuestionId
from clearbench.evaluation.aggregate import aggregate, load_accuracies
from clearbench.evaluation.endpoints import ask, resolve_endpoint
from clearbench.evaluation.grading import GradeRecord, apply_overrides, grade_response, load_overrides
from clearbench.evaluation.report import accuracy_csv, criteria_report
from clearbench.selftest import run_selftest


def _read_jsonl(path) -> list:
    try:
        with open(path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path}: malformed JSON on line {exc.lineno}") from None


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


def _write(path, data):
    try:
        atomic_write(path, data)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror}") from None
    return path


def _questions(cfg):
    try:
        insts = load_questions(cfg.questions)
    except OSError as exc:
        raise IoError(f"cannot read {cfg.questions}: {exc.strerror}") from None
    if cfg.tasks:
        insts = [i for i in insts if i.task in cfg.tasks]
    return insts


def cmd_generate(cfg: RunConfig):
    records, manifest = generate_benchmark(cfg.counts, cfg.master_seed, cfg.workers)
    out = _out_dir(cfg)
    try:
        write_benchmark(out, records, manifest)
    except OSError as exc:
        raise IoError(f"cannot write benchmark to {out}: {exc.strerror}") from None
    print(f"wrote {manifest['total']} questions to {out / 'questions.jsonl'}")
    print(f"digest {manifest['digest']}")


def cmd_render(cfg: RunConfig):
    insts = _questions(cfg)
    defs = load_definitions(cfg.definitions)
    rows = [
        {"question_id": i.id, "style": cfg.style, "prompt": render_prompt(i, cfg.style, insts, defs)}
        for i in sorted(insts, key=lambda i: i.id)
    ]
    path = _write(_out_dir(cfg) / "prompts.jsonl", serialize_jsonl(rows))
    print(f"wrote {len(rows)} prompts to {path}")


def cmd_ask(cfg: RunConfig):
    insts = _questions(cfg)
    ep = resolve_endpoint(cfg.endpoint, cfg.endpoints)
    defs = load_definitions(cfg.definitions)
    rows = ask(ep, insts, cfg.style, insts, cfg.concurrency, defs)
    path = _write(_out_dir(cfg) / "responses.jsonl", serialize_jsonl(rows))
    print(f"wrote {len(rows)} responses from {ep.name} to {path}")


def cmd_grade(cfg: RunConfig):
    insts = {i.id: i for i in _questions(cfg)}
    records = []
    for path in as_paths(cfg.responses):
        for r in _read_jsonl(path):
            inst = insts.get(r["question_id"])
            if inst is None:
                raise UnknownQuestionId(f"response references unknown question {r['question_id']!r}")
            records.append(grade_response(inst, r["response_text"], model=r["model"], style=r.get("style", "basic")))
    if cfg.overrides:
        records = apply_overrides(records, load_overrides(cfg.overrides))
    records.sort(key=lambda g: (g.model, g.style, g.question_id))
    path = _write(_out_dir(cfg) / "grades.jsonl", serialize_jsonl([g.to_dict() for g in records]))
    print(f"wrote {len(records)} grades to {path}")


def cmd_report(cfg: RunConfig):
    from clearbench.evaluation.plotting import render_figures  # matplotlib is slow to import

    if cfg.accuracies:
        tables = load_accuracies(cfg.accuracies)
    else:
        insts = {i.id: i for i in _questions(cfg)}
        grades = [GradeRecord.from_dict(d) for p in as_paths(cfg.grades) for d in _read_jsonl(p)]
        tables = aggregate(grades, insts)
    rep = criteria_report(tables)
    out = _out_dir(cfg)
    _write(out / "report.json", rep.to_json())
    text = rep.to_text()
    _write(out / "report.txt", text)
    _write(out / "accuracy.csv", accuracy_csv(tables))
    try:
        figures = render_figures(rep, out / "figures")
    except OSError as exc:
        raise IoError(f"cannot write figures: {exc.strerror}") from None
    print(text)
    print(f"wrote report.json, report.txt, accuracy.csv and {len(figures)} figures to {out}")


def cmd_selftest(cfg: RunConfig):
    results = run_selftest(seed=cfg.master_seed or 0)
    failed = [r for r in results if not r.passed]
    print("selftest " + ("FAILED" if failed else "passed"))
    return 1 if failed else 0


COMMANDS = {
    "generate": cmd_generate,
    "render": cmd_render,
    "ask": cmd_ask,
    "grade": cmd_grade,
    "report": cmd_report,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clearbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, dest="master_seed", help="master seed (64-bit unsigned)")

    p = sub.add_parser("generate", parents=[common], help="sample graphs and write questions.jsonl")
    p.add_argument("--workers", type=int)

    for name, help_text in (("render", "write prompts.jsonl"), ("ask", "query an endpoint")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--questions")
        p.add_argument("--style", help="basic, def, icl1 or icl3")
        p.add_argument("--definitions", help="JSON file overriding task definitions")
        p.add_argument("--tasks", help="comma-separated task codes to keep")
        if name == "ask":
            p.add_argument("--endpoint", help="oracle_mock, random_mock[:seed] or a name from --endpoints")
            p.add_argument("--endpoints", help="JSON endpoint list")
            p.add_argument("--concurrency", type=int)

    p = sub.add_parser("grade", parents=[common], help="grade responses")
    p.add_argument("--questions")
    p.add_argument("--responses", action="append", help="responses.jsonl (repeatable)")
    p.add_argument("--overrides", help="manual verdicts JSONL")

    p = sub.add_parser("report", parents=[common], help="accuracy tables, B1-B4 and figures")
    p.add_argument("--questions")
    p.add_argument("--grades", action="append", help="grades.jsonl (repeatable)")
    p.add_argument("--accuracies", help="published accuracies JSON instead of grades")

    sub.add_parser("selftest", parents=[common], help="check fast oracles against brute force")
    return parser


def resolve_config(args) -> RunConfig:
    base = RunConfig()
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot read config {args.config}: {exc.strerror}") from None
        base = parse_config(text)
    overrides = {k: v for k, v in vars(args).items() if k != "config"}
    return base.merged(**overrides).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg) or 0
    except ClearError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
