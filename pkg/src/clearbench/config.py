"""Run configuration: a JSON file merged with command-line overrides."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from clearbench.bench.generate import default_counts, validate_counts
from clearbench.bench.prompts import parse_style
from clearbench.bench.tasks import TASKS
from clearbench.errors import ConfigInvalid, ParseError

COMMANDS = ("generate", "render", "ask", "grade", "report", "selftest")
SEED_MAX = 2**64 - 1

# inputs each command reads
READS = {
    "render": ("questions",),
    "ask": ("questions",),
    "grade": ("questions", "responses"),
    "report": ("questions", "grades"),
}
# published task-level accuracies can stand in for graded runs
ALTERNATIVES = {"report": {"grades": "accuracies", "questions": "accuracies"}}


@dataclass
class RunConfig:
    command: str | None = None
    master_seed: int | None = None
    out: str = "."
    style: str = "basic"
    endpoint: str | None = None
    endpoints: str | None = None
    concurrency: int | None = None
    workers: int = 1
    questions: str | None = None
    responses: str | list | None = None  # several files may be combined
    grades: str | list | None = None
    overrides: str | None = None
    definitions: str | None = None
    accuracies: str | None = None
    tasks: list | None = None  # restrict render / ask to these tasks
    counts: dict = field(default_factory=default_counts)

    def merged(self, **overrides) -> "RunConfig":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(**data)

    def validate(self, check_paths=True) -> "RunConfig":
        if self.command is not None and self.command not in COMMANDS:
            raise ConfigInvalid(f"field 'command': unknown command {self.command!r}")
        if self.master_seed is not None:
            if isinstance(self.master_seed, bool) or not isinstance(self.master_seed, int):
                raise ConfigInvalid("field 'master_seed' must be an integer")
            if not 0 <= self.master_seed <= SEED_MAX:
                raise ConfigInvalid("field 'master_seed' must be a 64-bit unsigned integer")
        if self.command == "generate" and self.master_seed is None:
            raise ConfigInvalid("field 'master_seed' is required for generate")
        try:
            self.style = parse_style(self.style).value
        except ValueError as exc:
            raise ConfigInvalid(f"field 'style': {exc}") from None
        if self.concurrency is not None and self.concurrency < 1:
            raise ConfigInvalid("field 'concurrency' must be at least 1")
        if self.workers < 1:
            raise ConfigInvalid("field 'workers' must be at least 1")
        if self.command == "ask" and not self.endpoint:
            raise ConfigInvalid("field 'endpoint' is required for ask")
        self.counts = validate_counts(self.counts)
        if isinstance(self.tasks, str):
            self.tasks = [t.strip() for t in self.tasks.split(",") if t.strip()]
        unknown = [t for t in self.tasks or () if t not in TASKS]
        if unknown:
            raise ConfigInvalid(f"field 'tasks': unknown task {unknown[0]!r}")
        if check_paths:
            for name in READS.get(self.command, ()):
                value = getattr(self, name)
                alt = ALTERNATIVES.get(self.command, {}).get(name)
                if value is None and alt and getattr(self, alt) is not None:
                    continue
                if value is None:
                    raise ConfigInvalid(f"field {name!r} is required for {self.command}")
                for p in as_paths(value):
                    if not Path(p).is_file():
                        raise ConfigInvalid(f"field {name!r}: no such file {p}")
            for name in ("overrides", "endpoints", "definitions", "accuracies"):
                value = getattr(self, name)
                if value is not None and not Path(value).is_file():
                    raise ConfigInvalid(f"field {name!r}: no such file {value}")
        return self


def as_paths(value) -> list:
    if value is None:
        return []
    return [value] if isinstance(value, (str, Path)) else list(value)


def parse_config(text: str) -> RunConfig:
    if not text.strip():
        raise ParseError("empty configuration", line=1)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(data, dict):
        raise ParseError("configuration must be a JSON object", line=1)
    known = {f.name for f in fields(RunConfig)}
    for key in data:
        if key not in known:
            raise ParseError("unknown field", line=_line_of(text, key), field=key)
    if "counts" in data and not isinstance(data["counts"], dict):
        raise ParseError("counts must be an object", line=_line_of(text, "counts"), field="counts")
    return RunConfig(**data)


def _line_of(text, key):
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def load_config(path) -> RunConfig:
    """Parse and validate a JSON configuration file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text).validate(check_paths=False)
