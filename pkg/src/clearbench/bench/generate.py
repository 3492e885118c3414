"""Deterministic benchmark generation and serialisation.

Each question's randomness derives only from (master seed, task, question
type, index), so output is identical whatever the worker count.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from clearbench.bench.instance import QuestionInstance
from clearbench.bench.planted import planted
from clearbench.bench.questions import make_question
from clearbench.bench.sampling import DEFAULT_CAP, MAX_NODES, MIN_NODES, GraphSpec, edge_range, sample_graph
from clearbench.bench.tasks import DEFAULT_COUNTS, POLARITY_TASKS, TASK_ORDER, QType, supported, variants_for
from clearbench.errors import ConfigInvalid, ExhaustedRetries, InfeasibleSpec
from clearbench.graph import GraphKind

U, D, DAG, ADMG = GraphKind.UNDIRECTED, GraphKind.DIRECTED, GraphKind.DAG, GraphKind.ADMG

GEN_KINDS = {
    "SN": (U, D),
    "SE": (U, D),
    "PT": (U, D),
    "2NR": (DAG,),
    "3NR": (DAG,),
    "TO": (DAG,),
    "CL": (D,),
    "BLP": (DAG,),
    "DS": (DAG,),
    "MEC": (DAG,),
    "MB": (DAG,),
    "DP": (DAG,),
    "BKP": (DAG, ADMG),
    "MRS": (DAG, ADMG),
    "BAS": (DAG, ADMG),
    "FAS": (DAG, ADMG),
    "CC": (ADMG,),
    "CT": (ADMG,),
    "CF": (ADMG,),
    "CEI": (ADMG,),
}

# C-structure tasks need dense bidirected parts that the ratio cap forbids
UNCAPPED = {"CC", "CT", "CF"}
SMALL = {"CT": range(4, 7), "CF": range(4, 7)}
PLANTED = {"CC", "CT", "CF"}

PREFERRED_ATTEMPTS = 6
MAX_ATTEMPTS = 400


def derive_seed(master_seed: int, *parts) -> int:
    text = "|".join(str(p) for p in (master_seed, *parts))
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


def default_counts() -> dict:
    return {t: {q.value: n for q, n in row.items()} for t, row in DEFAULT_COUNTS.items()}


def validate_counts(counts: dict) -> dict:
    """Normalise a {task: {qtype: n}} mapping, rejecting unknown cells."""
    out = {}
    if not isinstance(counts, dict):
        raise ConfigInvalid("counts must map tasks to question-type counts")
    for task, row in counts.items():
        if task not in DEFAULT_COUNTS:
            raise ConfigInvalid(f"unknown task {task!r}")
        if not isinstance(row, dict):
            raise ConfigInvalid(f"counts for {task} must map question types to integers")
        for q, n in row.items():
            try:
                qtype = QType(q)
            except ValueError:
                raise ConfigInvalid(f"unknown question type {q!r} for {task}") from None
            if not supported(task, qtype):
                raise ConfigInvalid(f"{task} has no {qtype.value} questions")
            if not isinstance(n, int) or isinstance(n, bool) or n < 0:
                raise ConfigInvalid(f"count for {task}.{qtype.value} must be a non-negative integer")
            if n:
                out.setdefault(task, {})[qtype.value] = n
    return out


def _cap(task):
    return None if task in UNCAPPED else DEFAULT_CAP


def _edge_choices(task, kind, n_v):
    choices = list(edge_range(kind, n_v, _cap(task)))
    if task == "CT":
        # a C-tree has n_v - 1 directed and at least n_v - 1 bidirected edges
        choices = [n for n in choices if n >= 2 * (n_v - 1)]
    return choices


def _nodes(task):
    return list(SMALL.get(task, range(MIN_NODES, MAX_NODES + 1)))


def preferred_spec(task: str, index: int) -> GraphSpec:
    """Round-robin over node counts, then kinds, then evenly spread edge counts."""
    nodes = _nodes(task)
    kinds = GEN_KINDS[task]
    n_v = nodes[index % len(nodes)]
    k = index // len(nodes)
    kind = kinds[k % len(kinds)]
    choices = _edge_choices(task, kind, n_v)
    while not choices:
        n_v -= 1
        choices = _edge_choices(task, kind, n_v)
    n_e = choices[(k // len(kinds)) % len(choices)]
    return GraphSpec(n_v, n_e, kind, _cap(task))


def random_task_spec(task: str, rng: random.Random) -> GraphSpec:
    kind = rng.choice(GEN_KINDS[task])
    options = [(n_v, n_e) for n_v in _nodes(task) for n_e in _edge_choices(task, kind, n_v)]
    n_v, n_e = rng.choice(options)
    return GraphSpec(n_v, n_e, kind, _cap(task))


@dataclass(frozen=True)
class Job:
    task: str
    qtype: str
    index: int
    seed: int
    variant: str | None
    target: bool | None
    polarity: str | None


def _balanced(n, a, b, rng):
    items = [a] * (n // 2) + [b] * (n - n // 2)
    rng.shuffle(items)
    return items


def plan_cell(task: str, qtype, n: int, master_seed: int) -> list:
    qtype = QType(qtype)
    cell_rng = random.Random(derive_seed(master_seed, task, qtype.value, "cell"))
    targets = [None] * n
    polarities = [None] * n
    if qtype in (QType.YN, QType.EX):
        targets = _balanced(n, True, False, cell_rng)
    if (task, qtype) in POLARITY_TASKS:
        polarities = _balanced(n, "is", "is NOT", cell_rng)
    variants = variants_for(task, qtype)
    if task == "3NR" and qtype is QType.EX:
        variants = ()
    jobs = []
    for i in range(n):
        jobs.append(
            Job(
                task,
                qtype.value,
                i,
                derive_seed(master_seed, task, qtype.value, i),
                variants[i % len(variants)] if variants else None,
                targets[i],
                polarities[i],
            )
        )
    return jobs


def _draw(task, qtype, spec, target, rng):
    if task in PLANTED and qtype is QType.YN:
        return planted(task, target, spec.n_v, spec.n_e, rng)
    return sample_graph(spec, rng)


def build_one(job: Job) -> QuestionInstance:
    qtype = QType(job.qtype)
    rng = random.Random(job.seed)
    for attempt in range(MAX_ATTEMPTS):
        if attempt < PREFERRED_ATTEMPTS:
            spec = preferred_spec(job.task, job.index)
        else:
            spec = random_task_spec(job.task, rng)
        try:
            g = _draw(job.task, qtype, spec, job.target, rng)
        except InfeasibleSpec:
            continue
        if g is None:
            continue
        try:
            inst = make_question(
                g,
                job.task,
                qtype,
                rng.getrandbits(64),
                variant=job.variant,
                target=job.target,
                polarity=job.polarity,
            )
        except ExhaustedRetries:
            continue
        inst.id = f"{job.task}-{qtype.value}-{job.index:04d}"
        inst.seed = job.seed
        return inst
    raise ExhaustedRetries(f"gave up on {job.task} {qtype.value} #{job.index}")


def _build_dict(job: Job) -> dict:
    return build_one(job).to_dict()


def plan(counts: dict, master_seed: int) -> list:
    jobs = []
    for task in TASK_ORDER:
        row = counts.get(task, {})
        for q in QType:
            n = row.get(q.value, 0)
            if n:
                jobs.extend(plan_cell(task, q, n, master_seed))
    return jobs


def generate_benchmark(counts: dict | None = None, master_seed: int = 0, workers: int = 1):
    """Return (instances as dicts, manifest) for the given per-cell counts."""
    counts = validate_counts(default_counts() if counts is None else counts)
    jobs = plan(counts, master_seed)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_build_dict, jobs, chunksize=max(1, len(jobs) // (workers * 8))))
    else:
        records = [_build_dict(j) for j in jobs]
    payload = serialize_jsonl(records)
    manifest = {
        "config": {"counts": counts},
        "master_seed": master_seed,
        "counts": tally(records),
        "total": len(records),
        "digest": hashlib.sha256(payload).hexdigest(),
    }
    return records, manifest


def tally(records) -> dict:
    out = {}
    for r in records:
        row = out.setdefault(r["task"], {})
        row[r["qtype"]] = row.get(r["qtype"], 0) + 1
    return out


def serialize_jsonl(records) -> bytes:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records).encode()


def atomic_write(path, data: bytes | str):
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    if isinstance(data, str):
        data = data.encode()
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_benchmark(out_dir, records, manifest):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    atomic_write(out_dir / "questions.jsonl", serialize_jsonl(records))
    atomic_write(out_dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")


def load_questions(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [QuestionInstance.from_dict(json.loads(line)) for line in fh if line.strip()]
