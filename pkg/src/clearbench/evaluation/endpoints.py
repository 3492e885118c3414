"""Model endpoints: two offline mocks and a chat-completions style HTTP client."""

from __future__ import annotations

import asyncio
import copy
import hashlib
import json
import os
import random
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

import httpx

from clearbench.bench.answers import Shape, answer_shape, answer_text, order_text, seq_text, set_text
from clearbench.bench.instance import CHOICE_LABELS, QuestionInstance
from clearbench.bench.prompts import parse_style, render_prompt
from clearbench.errors import AuthMissing, ConfigInvalid, HttpError, RateLimited, Timeout

BUILTINS = ("oracle_mock", "random_mock")


def _default_template():
    return {"model": "", "messages": [{"role": "user", "content": "{prompt}"}], "temperature": 0}


@dataclass
class ModelEndpoint:
    name: str
    base_url: str = ""
    auth_env_var: str = ""
    request_template: dict = field(default_factory=_default_template)
    max_concurrency: int = 4
    timeout: float = 60.0
    retries: int = 3
    backoff: tuple = (1.0, 2.0, 4.0)
    builtin: str | None = None
    seed: int = 0
    response_path: tuple = ("choices", 0, "message", "content")

    def __post_init__(self):
        if self.max_concurrency < 1:
            raise ConfigInvalid("max_concurrency must be at least 1")
        if self.builtin is not None and self.builtin not in BUILTINS:
            raise ConfigInvalid(f"unknown builtin endpoint {self.builtin!r}")
        if self.builtin is None and not self.base_url:
            raise ConfigInvalid(f"endpoint {self.name!r} needs a base_url or a builtin")
        self.backoff = tuple(self.backoff)
        self.response_path = tuple(self.response_path)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelEndpoint":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigInvalid(f"unknown endpoint fields: {', '.join(sorted(unknown))}")
        if "name" not in d:
            raise ConfigInvalid("endpoint entry is missing 'name'")
        return cls(**d)


def builtin_endpoint(name: str) -> ModelEndpoint:
    """``oracle_mock``, ``random_mock`` or ``random_mock:<seed>``."""
    base, _, seed = name.partition(":")
    if base not in BUILTINS:
        raise ConfigInvalid(f"unknown builtin endpoint {name!r}")
    return ModelEndpoint(name=name, builtin=base, seed=int(seed or 0))


def load_endpoints(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    entries = data.get("endpoints", data) if isinstance(data, dict) else data
    if not isinstance(entries, list):
        raise ConfigInvalid("endpoint file must hold a list of endpoints")
    eps = [ModelEndpoint.from_dict(e) for e in entries]
    return {ep.name: ep for ep in eps}


def resolve_endpoint(name: str, path=None) -> ModelEndpoint:
    if name.partition(":")[0] in BUILTINS:
        return builtin_endpoint(name)
    if path is None:
        raise ConfigInvalid(f"endpoint {name!r} is not builtin and no endpoint file was given")
    eps = load_endpoints(path)
    if name not in eps:
        raise ConfigInvalid(f"endpoint {name!r} not found in {path}")
    return eps[name]


# mocks


def oracle_answer(inst: QuestionInstance) -> str:
    return "Working from the graph.\n" + answer_text(inst.task, inst.qtype, inst.ground_truth)


def _random_seq(rng, nodes, lo=2):
    k = rng.randint(min(lo, len(nodes)), len(nodes))
    return rng.sample(nodes, k)


def random_answer(inst: QuestionInstance, seed: int) -> str:
    """A uniformly random answer from the question's answer space."""
    digest = hashlib.blake2b(f"{seed}|{inst.id}".encode(), digest_size=8).digest()
    rng = random.Random(int.from_bytes(digest, "big"))
    shape = answer_shape(inst.task, inst.qtype)
    nodes = sorted(inst.graph.nodes)
    if shape is Shape.BOOL:
        body = rng.choice(("Yes", "No"))
    elif shape is Shape.CHOICE:
        body = rng.choice(CHOICE_LABELS)
    elif shape is Shape.COUNT:
        body = str(rng.randint(0, len(nodes) + inst.graph.n_edges))
    elif shape is Shape.NODES:
        body = set_text(rng.sample(nodes, rng.randint(0, len(nodes))))
    elif shape in (Shape.EDGES, Shape.GRAPH):
        body = ", ".join(seq_text(rng.sample(nodes, 2)) for _ in range(rng.randint(1, len(nodes))))
    elif shape is Shape.TRIPLES:
        body = ", ".join("(" + ", ".join(rng.sample(nodes, 3)) + ")" for _ in range(rng.randint(1, 3)))
    elif shape is Shape.PATHS:
        body = ", ".join(seq_text(_random_seq(rng, nodes)) for _ in range(rng.randint(1, 3)))
    elif shape is Shape.PARTITION:
        shuffled = rng.sample(nodes, len(nodes))
        cut = rng.randint(1, len(nodes))
        body = ", ".join(set_text(part) for part in (shuffled[:cut], shuffled[cut:]) if part)
    elif inst.task == "TO":
        body = order_text(rng.sample(nodes, len(nodes)))
    else:
        body = seq_text(_random_seq(rng, nodes))
    return f"Answer: {body}"


# network calls


def _dig(data, path):
    for key in path:
        data = data[key]
    return data


def _fill(template, prompt):
    body = copy.deepcopy(template)

    def walk(node):
        if isinstance(node, dict):
            return {k: walk(v) for k, v in node.items()}
        if isinstance(node, list):
            return [walk(v) for v in node]
        if isinstance(node, str):
            return node.replace("{prompt}", prompt)
        return node

    return walk(body)


async def acall_model(ep: ModelEndpoint, prompt: str, inst=None, client: httpx.AsyncClient | None = None) -> str:
    if ep.builtin == "oracle_mock":
        return oracle_answer(inst)
    if ep.builtin == "random_mock":
        return random_answer(inst, ep.seed)
    key = os.environ.get(ep.auth_env_var, "") if ep.auth_env_var else ""
    if ep.auth_env_var and not key:
        raise AuthMissing(f"environment variable {ep.auth_env_var} is not set")
    headers = {"Authorization": f"Bearer {key}"} if key else {}
    body = _fill(ep.request_template, prompt)
    own = client is None
    client = client or httpx.AsyncClient(timeout=ep.timeout)
    try:
        attempt = 0
        while True:
            try:
                resp = await client.post(ep.base_url, json=body, headers=headers, timeout=ep.timeout)
            except httpx.TimeoutException as exc:
                err = Timeout(f"{ep.name}: request timed out after {ep.timeout}s")
                err.__cause__ = exc
            else:
                if resp.status_code == 429:
                    err = RateLimited(resp.text)
                elif resp.status_code >= 500:
                    err = HttpError(resp.status_code, resp.text)
                elif resp.status_code >= 400:
                    raise HttpError(resp.status_code, resp.text)
                else:
                    return str(_dig(resp.json(), ep.response_path))
            if attempt >= ep.retries:
                raise err
            delay = ep.backoff[min(attempt, len(ep.backoff) - 1)] if ep.backoff else 0
            attempt += 1
            await asyncio.sleep(delay)
    finally:
        if own:
            await client.aclose()


def call_model(ep: ModelEndpoint, prompt: str, inst=None) -> str:
    """Synchronous wrapper; the mocks need ``inst`` to answer."""
    return asyncio.run(acall_model(ep, prompt, inst))


async def _ask_all(ep, items, concurrency):
    sem = asyncio.Semaphore(concurrency)
    results = [None] * len(items)

    async with httpx.AsyncClient(timeout=ep.timeout) as client:

        async def one(i, inst, prompt):
            async with sem:
                t0 = time.perf_counter()
                text = await acall_model(ep, prompt, inst, client)
                results[i] = (text, round((time.perf_counter() - t0) * 1000, 3))

        await asyncio.gather(*(one(i, inst, p) for i, (inst, p) in enumerate(items)))
    return results


def ask(ep: ModelEndpoint, instances, style="basic", shot_source=None, concurrency=None, definitions=None):
    """Query ``ep`` for every instance; responses come back sorted by question id."""
    instances = sorted(instances, key=lambda i: i.id)
    shots = instances if shot_source is None else shot_source
    items = [(inst, render_prompt(inst, style, shots, definitions)) for inst in instances]
    limit = max(1, concurrency or ep.max_concurrency)
    results = asyncio.run(_ask_all(ep, items, limit))
    stamp = datetime.now(timezone.utc).isoformat()
    style_name = parse_style(style).value
    return [
        {
            "question_id": inst.id,
            "model": ep.name,
            "style": style_name,
            "response_text": text,
            "latency_ms": latency,
            "timestamp": stamp,
        }
        for (inst, _), (text, latency) in zip(items, results)
    ]
