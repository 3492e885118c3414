"""Turn a question into model input under one of the prompt styles."""

from __future__ import annotations

import enum
import json
import random
from functools import lru_cache
from importlib import resources

from clearbench.bench.answers import answer_text, format_instruction
from clearbench.bench.instance import QuestionInstance
from clearbench.errors import InsufficientShots, MissingDefinition
from clearbench.graph import GraphKind


class Style(str, enum.Enum):
    BASIC = "basic"
    DEF = "def"
    ICL1 = "icl1"
    ICL3 = "icl3"

    @property
    def shots(self) -> int:
        return {Style.ICL1: 1, Style.ICL3: 3}.get(self, 0)

    @property
    def label(self) -> str:
        return {
            Style.BASIC: "Basic",
            Style.DEF: "DefinitionGuided",
            Style.ICL1: "IcL(1)",
            Style.ICL3: "IcL(3)",
        }[self]


_ALIASES = {
    "basic": Style.BASIC,
    "def": Style.DEF,
    "definitionguided": Style.DEF,
    "definition": Style.DEF,
    "icl1": Style.ICL1,
    "icl(1)": Style.ICL1,
    "icl3": Style.ICL3,
    "icl(3)": Style.ICL3,
}


def parse_style(text) -> Style:
    if isinstance(text, Style):
        return text
    key = str(text).strip().lower().replace("-", "").replace("_", "").replace(" ", "")
    try:
        return _ALIASES[key]
    except KeyError:
        raise ValueError(f"unknown prompt style {text!r}") from None


@lru_cache(maxsize=None)
def builtin_definitions() -> dict:
    data = resources.files("clearbench.bench").joinpath("data/definitions.json").read_text("utf-8")
    return json.loads(data)


def load_definitions(path=None) -> dict:
    """Built-in definitions, optionally extended or overridden by a JSON file."""
    defs = dict(builtin_definitions())
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            defs.update(json.load(fh))
    return defs


_KIND_PHRASE = {
    GraphKind.UNDIRECTED: "an undirected graph",
    GraphKind.DIRECTED: "a directed graph",
    GraphKind.DAG: "a directed acyclic graph (DAG)",
    GraphKind.ADMG: "an acyclic directed mixed graph (ADMG)",
}


def basic_prompt(inst: QuestionInstance) -> str:
    g = inst.graph
    lines = [f"Given {_KIND_PHRASE[g.kind]} with {g.to_text()}.", inst.prompt_core]
    for choice in inst.choices or ():
        lines.append(f"{choice['label']}. {choice['text']}")
    lines.append(format_instruction(inst.task, inst.qtype, g.kind))
    return "\n".join(lines)


def select_shots(inst: QuestionInstance, shot_source, k: int) -> list:
    """k solved questions of the same task and type on graphs other than inst's."""
    pool = [
        s
        for s in shot_source or ()
        if s.task == inst.task and s.qtype == inst.qtype and s.id != inst.id and s.graph != inst.graph
    ]
    if len(pool) < k:
        raise InsufficientShots(
            f"{inst.task} {inst.qtype.value} needs {k} exemplars, {len(pool)} available"
        )
    pool.sort(key=lambda s: s.id)
    rng = random.Random(f"{inst.id}|{inst.seed}")
    return rng.sample(pool, k)


def render_prompt(inst: QuestionInstance, style="basic", shot_source=None, definitions=None) -> str:
    style = parse_style(style)
    body = basic_prompt(inst)
    if style is Style.BASIC:
        return body
    if style is Style.DEF:
        defs = builtin_definitions() if definitions is None else definitions
        if inst.task not in defs:
            raise MissingDefinition(f"no definition available for task {inst.task}")
        return (
            "Use the following definition to answer the question.\n"
            f"Definition: {defs[inst.task]}\n\n"
            f"Question: {body}"
        )
    parts = ["Here are some solved examples."]
    for i, shot in enumerate(select_shots(inst, shot_source, style.shots), 1):
        parts.append(
            f"Example {i}:\n{basic_prompt(shot)}\n"
            f"{answer_text(shot.task, shot.qtype, shot.ground_truth)}"
        )
    parts.append(f"Now answer this question.\n{body}")
    return "\n\n".join(parts)
