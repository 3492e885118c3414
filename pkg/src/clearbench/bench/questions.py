"""Instantiate task templates on a graph with oracle-computed ground truth.

Every builder works on the graph it is given. Random choices (which node,
which pair, which candidate) come from a seeded generator and are retried a
bounded number of times when they cannot satisfy the request, for example a
YesNo question whose truth must come out "no".
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

from clearbench import causal
from clearbench.bench.answers import order_text, seq_text, set_text, triple_text
from clearbench.bench.instance import CHOICE_LABELS, QuestionInstance
from clearbench.bench.sampling import LETTERS
from clearbench.bench.tasks import QType, fill_template, supported, variants_for
from clearbench.bench.verify import dag_from_edges, judge, path_param
from clearbench.causal import AdjustmentQuery, Criterion
from clearbench.errors import ExhaustedRetries, NoOtherMember, UnsupportedPair, WrongGraphKind
from clearbench.graph import (
    GraphKind,
    MixedGraph,
    build_graph,
    classify_triple,
    cycles,
    enumerate_paths,
    enumerate_triples,
    is_directed_cycle,
    is_path,
    is_topological_order,
    relatives,
    topological,
)

U, D, DAG, ADMG = GraphKind.UNDIRECTED, GraphKind.DIRECTED, GraphKind.DAG, GraphKind.ADMG

ALLOWED_KINDS = {
    "SN": (U, D, DAG, ADMG),
    "SE": (U, D, DAG, ADMG),
    "PT": (U, D, DAG, ADMG),
    "2NR": (D, DAG, ADMG),
    "3NR": (D, DAG, ADMG),
    "CL": (D, DAG, ADMG),
    "TO": (D, DAG, ADMG),
    "MRS": (D, DAG, ADMG),
    "MB": (DAG,),
    "MEC": (DAG,),
    "BLP": (DAG, ADMG),
    "DS": (DAG, ADMG),
    "DP": (DAG, ADMG),
    "BKP": (DAG, ADMG),
    "BAS": (DAG, ADMG),
    "FAS": (DAG, ADMG),
    "CC": (DAG, ADMG),
    "CT": (DAG, ADMG),
    "CF": (DAG, ADMG),
    "CEI": (DAG, ADMG),
}

DEFAULT_RETRIES = 40


class _Retry(Exception):
    """This random instantiation failed; draw again."""


class _Impossible(Exception):
    """No instantiation on this graph can satisfy the request."""


def _key(v):
    if isinstance(v, (set, frozenset)):
        return (0, tuple(sorted(v)))
    if isinstance(v, (list, tuple)):
        return (1, tuple(_key(x) for x in v))
    return (2, v)


def _jsonable(v):
    if isinstance(v, (set, frozenset)):
        return sorted(v)
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    return v


def _uniq(items):
    seen = set()
    out = []
    for v in items:
        k = _key(v)
        if k not in seen:
            seen.add(k)
            out.append(v)
    return out


@dataclass
class _Ctx:
    g: MixedGraph
    task: str
    qtype: QType
    rng: random.Random
    variant: str | None
    target: bool | None
    polarity: str | None

    def pick(self, items):
        items = sorted(_uniq(items), key=_key)
        if not items:
            raise _Retry
        return self.rng.choice(items)

    def side(self, pos, neg):
        """Pick a statement value with the wanted truth; returns (value, truth)."""
        want = self.target if self.target is not None else self.rng.random() < 0.5
        pool = pos if want else neg
        if not pool and self.target is None:
            want = not want
            pool = pos if want else neg
        return self.pick(pool), want

    def need(self, truth: bool):
        if self.target is not None and truth != self.target:
            raise _Retry

    def nodes(self):
        return sorted(self.g.nodes)

    def pair(self, cond=None):
        pairs = [(a, b) for a in self.nodes() for b in self.nodes() if a != b]
        if cond is not None:
            pairs = [p for p in pairs if cond(*p)]
        return self.pick(pairs)


@dataclass
class Statement:
    """Candidate values for a YesNo / ChoiceSelection question."""

    fields: dict
    params: dict
    pos: list
    neg: list
    render: Callable
    put: Callable  # value -> template fields


@dataclass
class Draft:
    fields: dict
    truth: object = None
    params: dict = field(default_factory=dict)
    choices: list | None = None


# helpers


def _subsets(items):
    items = sorted(items)
    for k in range(len(items) + 1):
        yield from itertools.combinations(items, k)


def _set_perturbations(S, universe):
    S = tuple(sorted(S))
    rest = sorted(set(universe) - set(S))
    out = [tuple(sorted(set(S) - {v})) for v in S]
    out += [tuple(sorted(set(S) | {w})) for w in rest]
    out += [tuple(sorted((set(S) - {v}) | {w})) for v in S for w in rest]
    return [t for t in _uniq(out) if t != S]


def _fake_seqs(ctx, x, y, real, is_valid, count=16):
    """Node sequences from x to y that fail ``is_valid``; near misses of ``real`` first."""
    rng = ctx.rng
    others = [v for v in ctx.nodes() if v not in (x, y)]
    out = []
    for seq in real[:6]:
        inner = list(seq[1:-1])
        for i in range(len(inner)):
            out.append((x, *inner[:i], *inner[i + 1 :], y))
            for w in others:
                if w not in inner:
                    out.append((x, *inner[:i], w, *inner[i + 1 :], y))
        if len(inner) >= 2:
            out.append((x, *reversed(inner), y))
    for _ in range(count):
        k = rng.randint(0, min(3, len(others)))
        out.append((x, *rng.sample(others, k), y))
    return [s for s in _uniq(out) if not is_valid(s)]


# YesNo / ChoiceSelection statements


def _st_sn(ctx):
    nodes = ctx.nodes()
    absent = [c for c in LETTERS if c not in ctx.g.node_set]
    return Statement({}, {}, nodes, absent, str, lambda v: {"v": v})


def _st_se(ctx):
    g = ctx.g
    pos = [str(e) for e in g.edges()]
    nodes = ctx.nodes()
    if g.kind is U:
        neg = [
            f"{a}-{b}" if ctx.rng.random() < 0.5 else f"{b}-{a}"
            for a, b in itertools.combinations(nodes, 2)
            if not g.is_adjacent(a, b)
        ]
    else:
        neg = [f"{a}->{b}" for a in nodes for b in nodes if a != b and not g.has_directed(a, b)]
    return Statement({}, {}, pos, neg, str, lambda v: {"e": v})


def _st_2nr(ctx):
    v = ctx.pick(ctx.nodes())
    rel = ctx.variant
    members = relatives(ctx.g, v, rel)
    pos = sorted(members)
    neg = sorted(ctx.g.node_set - members - {v})
    p = {"v": v, "relation": rel}
    return Statement({"v": v, "relation": rel}, p, pos, neg, str, lambda u: {"u": u})


def _oriented(ctx, t):
    return tuple(reversed(t)) if ctx.rng.random() < 0.5 else tuple(t)


def _st_3nr(ctx):
    g, kind = ctx.g, ctx.variant
    pos = [_oriented(ctx, t) for t in enumerate_triples(g, kind)]
    neg = []
    for m in ctx.nodes():
        around = sorted(g.parents[m] | g.children[m] | g.spouses[m])
        for a, b in itertools.combinations(around, 2):
            k = classify_triple(g, a, m, b)
            if k is None or k.value != kind:
                neg.append(_oriented(ctx, (a, m, b)))
    for _ in range(4):
        t = tuple(ctx.rng.sample(ctx.nodes(), 3))
        if not judge(g, "3NR", {"kind": kind}, t):
            neg.append(t)
    p = {"kind": kind}
    return Statement({"kind": kind}, p, pos, neg, triple_text, lambda t: {"triple": triple_text(t)})


def _st_pt(ctx):
    x, y = ctx.pair()
    real = [p.nodes for p in enumerate_paths(ctx.g, x, y)]
    fakes = _fake_seqs(ctx, x, y, real, lambda s: is_path(ctx.g, s, x, y))
    render = lambda s: seq_text(s, "-")  # noqa: E731
    return Statement({"x": x, "y": y}, {"x": x, "y": y}, real, fakes, render,
                     lambda s: {"path": render(s)})


def _rotate(ctx, cyc):
    body = list(cyc[:-1])
    i = ctx.rng.randrange(len(body))
    body = body[i:] + body[:i]
    return tuple(body + body[:1])


def _st_cl(ctx):
    g = ctx.g
    pos = [_rotate(ctx, c) for c in cycles(g, "all")]
    neg = [tuple(reversed(c)) for c in pos]
    nodes = ctx.nodes()
    for _ in range(12):
        k = ctx.rng.randint(2, min(5, len(nodes)))
        body = ctx.rng.sample(nodes, k)
        neg.append(tuple(body + body[:1]))
    for c in pos:
        body = list(c[:-1])
        for w in nodes:
            if w not in body:
                alt = body[:-1] + [w]
                neg.append(tuple(alt + alt[:1]))
    neg = [s for s in neg if not is_directed_cycle(g, s)]
    return Statement({}, {}, pos, neg, seq_text, lambda s: {"cycle": seq_text(s)})


def _random_topo(ctx):
    g = ctx.g
    indeg = {v: len(g.parents[v]) for v in g.nodes}
    ready = sorted(v for v in g.nodes if indeg[v] == 0)
    order = []
    while ready:
        v = ready.pop(ctx.rng.randrange(len(ready)))
        order.append(v)
        for c in sorted(g.children[v]):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
        ready.sort()
    if len(order) != len(g.nodes):
        raise _Impossible
    return tuple(order)


def _st_to(ctx):
    g = ctx.g
    pos = [_random_topo(ctx) for _ in range(6)]
    neg = []
    for order in pos:
        for _ in range(4):
            i, j = sorted(ctx.rng.sample(range(len(order)), 2))
            s = list(order)
            s[i], s[j] = s[j], s[i]
            neg.append(tuple(s))
        neg.append(tuple(reversed(order)))
    neg = [s for s in neg if not is_topological_order(g, s)]
    return Statement({}, {}, pos, neg, order_text, lambda s: {"order": order_text(s)})


def _blp_path(ctx):
    x, y = ctx.pair()
    paths = [p for p in enumerate_paths(ctx.g, x, y) if len(p) >= 3]
    if not paths:
        raise _Retry
    return paths[ctx.rng.randrange(len(paths))]


def _st_blp(ctx):
    path = _blp_path(ctx)
    p = {"path": path_param(path)}
    x, y = path.nodes[0], path.nodes[-1]
    pos, neg = [], []
    for Z in _subsets(ctx.g.node_set - {x, y}):
        (pos if causal.is_path_blocked(ctx.g, path, Z) else neg).append(Z)
    return Statement({"path": str(path)}, p, pos, neg, set_text, lambda Z: {"Z": set_text(Z)})


def _st_ds(ctx):
    g = ctx.g
    x, y = ctx.pair(lambda a, b: a < b and not g.is_adjacent(a, b))
    pos, neg = [], []
    for Z in _subsets(g.node_set - {x, y}):
        (pos if causal.d_separated(g, x, y, Z) else neg).append(Z)
    p = {"x": x, "y": y}
    return Statement({"x": x, "y": y}, p, pos, neg, set_text, lambda Z: {"Z": set_text(Z)})


def _edge_strs(g):
    return [f"{a}->{b}" for a, b in g.directed]


def _mec_members(ctx, count=4):
    g = ctx.g
    out = []
    for _ in range(count):
        cur = g
        for _ in range(ctx.rng.randint(1, 3)):
            cov = list(causal._covered_edges(cur))
            if not cov:
                break
            a, b = cov[ctx.rng.randrange(len(cov))]
            edges = [(b, a) if e == (a, b) else e for e in cur.directed]
            cur = build_graph(DAG, cur.nodes, edges)
        if cur != g:
            out.append(tuple(sorted(_edge_strs(cur))))
    return out


def _mec_nonmembers(ctx):
    g = ctx.g
    out = []
    for a, b in g.directed:
        edges = [(b, a) if e == (a, b) else e for e in g.directed]
        other = dag_from_edges(g.nodes, edges)
        if other is not None and not causal.markov_equivalence("equivalent", g, other):
            out.append(tuple(sorted(_edge_strs(other))))
    if not out:
        for a, b in g.directed:
            for u, v in itertools.permutations(ctx.nodes(), 2):
                if g.is_adjacent(u, v) or (u, v) == (a, b):
                    continue
                edges = [e for e in g.directed if e != (a, b)] + [(u, v)]
                other = dag_from_edges(g.nodes, edges)
                if other is not None:
                    out.append(tuple(sorted(_edge_strs(other))))
    return out


def _st_mec(ctx):
    g = ctx.g
    nodes = ", ".join(g.nodes)

    def put(edges):
        shuffled = list(edges)
        ctx.rng.shuffle(shuffled)
        return {"other_nodes": nodes, "other_edges": ", ".join(shuffled)}

    render = lambda e: ", ".join(e)  # noqa: E731
    return Statement({}, {}, _mec_members(ctx), _mec_nonmembers(ctx), render, put)


def _st_mb(ctx):
    g = ctx.g
    v = ctx.pick([u for u in ctx.nodes() if causal.markov_blanket(g, u)])
    mb = tuple(sorted(causal.markov_blanket(g, v)))
    neg = _set_perturbations(mb, g.node_set - {v})
    near = tuple(sorted(g.parents[v] | g.children[v]))
    if near != mb:
        neg.insert(0, near)
    p = {"v": v}
    return Statement({"v": v}, p, [mb], neg, set_text, lambda S: {"S": set_text(S)})


def _st_dp(ctx):
    g = ctx.g
    x, y = ctx.pair()
    real = [p.nodes for p in causal.directed_paths(g, x, y, "all")]
    blind = [p.nodes for p in enumerate_paths(g, x, y) if p.nodes not in real]
    fakes = _fake_seqs(ctx, x, y, real + blind, lambda s: causal.directed_paths(g, x, y, "verify", seq=s))
    render = seq_text
    return Statement({"x": x, "y": y}, {"x": x, "y": y}, real, blind + fakes, render,
                     lambda s: {"path": render(s)})


def _st_bkp(ctx):
    g = ctx.g
    x, y = ctx.pair()
    real = [p.nodes for p in causal.backdoor_paths(g, x, y, "all")]
    front = [p.nodes for p in enumerate_paths(g, x, y) if p.nodes not in real]
    fakes = _fake_seqs(ctx, x, y, real + front, lambda s: causal.backdoor_paths(g, x, y, "verify", seq=s))
    render = lambda s: seq_text(s, "-")  # noqa: E731
    return Statement({"x": x, "y": y}, {"x": x, "y": y}, real, front + fakes, render,
                     lambda s: {"path": render(s)})


def _st_mrs(ctx):
    g = ctx.g
    roots = tuple(sorted(causal.maximal_root_set(g)))
    sources = tuple(sorted(v for v in g.nodes if not g.parents[v]))
    neg = _set_perturbations(roots, g.node_set)
    if sources != roots:
        neg.insert(0, sources)
    return Statement({}, {}, [roots], neg, set_text, lambda S: {"S": set_text(S)})


def _causal_pair(ctx, frontdoor=False):
    g = ctx.g

    def ok(a, b):
        if b not in g.descendants(a):
            return False
        return not (frontdoor and g.has_directed(a, b))

    return ctx.pair(ok)


def _st_adjust(ctx, criterion):
    g = ctx.g
    x, y = _causal_pair(ctx, criterion is Criterion.FRONTDOOR)
    pos, neg = [], []
    for Z in _subsets(g.node_set - {x, y}):
        q = AdjustmentQuery(x, y, frozenset(Z), criterion)
        (pos if causal.adjustment_set(g, q, "verify") else neg).append(Z)
    p = {"x": x, "y": y}
    return Statement({"x": x, "y": y}, p, pos, neg, set_text, lambda Z: {"Z": set_text(Z)})


STATEMENTS = {
    "SN": _st_sn,
    "SE": _st_se,
    "2NR": _st_2nr,
    "3NR": _st_3nr,
    "PT": _st_pt,
    "CL": _st_cl,
    "TO": _st_to,
    "BLP": _st_blp,
    "DS": _st_ds,
    "MEC": _st_mec,
    "MB": _st_mb,
    "DP": _st_dp,
    "BKP": _st_bkp,
    "MRS": _st_mrs,
    "BAS": lambda ctx: _st_adjust(ctx, Criterion.BACKDOOR),
    "FAS": lambda ctx: _st_adjust(ctx, Criterion.FRONTDOOR),
}

GRAPH_LEVEL = {
    "CC": lambda g: causal.c_components(g, "is_c_component"),
    "CT": lambda g: causal.is_c_tree(g, "c_tree"),
    "CF": lambda g: causal.is_c_tree(g, "c_forest"),
}


# FindAll / FindOne / HowMany / Existence


def _marker_list(paths):
    return [str(p) for p in paths]


def _draft_sn(ctx):
    if ctx.qtype is QType.FA:
        return Draft({}, sorted(ctx.g.nodes))
    return Draft({}, len(ctx.g.nodes))


def _draft_se(ctx):
    g = ctx.g
    if ctx.qtype is QType.FA:
        edges = sorted(g.edges(), key=lambda e: e.key())
        return Draft({}, [str(e) for e in edges])
    return Draft({}, g.n_edges)


def _draft_2nr(ctx):
    g, rel = ctx.g, ctx.variant
    p = {"relation": rel}
    if ctx.qtype is QType.EX:
        pos = [v for v in ctx.nodes() if relatives(g, v, rel)]
        neg = [v for v in ctx.nodes() if not relatives(g, v, rel)]
        v, truth = ctx.side(pos, neg)
        return Draft({"v": v, "relation": rel}, truth, {**p, "v": v})
    v = ctx.pick(ctx.nodes())
    members = sorted(relatives(g, v, rel))
    if ctx.qtype is QType.FA:
        if not members:
            raise _Retry
        return Draft({"v": v, "relation": rel}, members, {**p, "v": v})
    return Draft({"v": v, "relation": rel}, len(members), {**p, "v": v})


def _draft_3nr(ctx):
    g = ctx.g
    if ctx.qtype is QType.EX:
        kinds = [ctx.variant] if ctx.variant else ["chain", "fork", "v-structure"]
        found = {k: bool(enumerate_triples(g, k)) for k in kinds}
        pos = [k for k in kinds if found[k]]
        neg = [k for k in kinds if not found[k]]
        kind, truth = ctx.side(pos, neg)
        return Draft({"kind": kind}, truth, {"kind": kind, "variant": kind})
    triples = [list(t) for t in enumerate_triples(g, ctx.variant)]
    p = {"kind": ctx.variant}
    if ctx.qtype is QType.FA:
        if not triples:
            raise _Impossible
        return Draft({"kind": ctx.variant}, triples, p)
    return Draft({"kind": ctx.variant}, len(triples), p)


def _draft_pt(ctx):
    x, y = ctx.pair()
    p = {"x": x, "y": y}
    if ctx.qtype is QType.FA:
        return Draft({"x": x, "y": y}, _marker_list(enumerate_paths(ctx.g, x, y)), p)
    if ctx.qtype is QType.HM:
        return Draft({"x": x, "y": y}, enumerate_paths(ctx.g, x, y, "count"), p)
    best = enumerate_paths(ctx.g, x, y, ctx.variant)
    return Draft({"x": x, "y": y, "select": ctx.variant}, str(best), p)


def _draft_cl(ctx):
    g = ctx.g
    exists = cycles(g, "exists")
    if ctx.qtype is QType.EX:
        if ctx.target is not None and exists != ctx.target:
            raise _Impossible
        return Draft({}, exists)
    if not exists:
        raise _Impossible
    return Draft({}, list(cycles(g, "find_one")))


def _draft_to(ctx):
    if not ctx.g.is_acyclic():
        raise _Impossible
    return Draft({}, topological(ctx.g, "find_one"))


def _draft_blp(ctx):
    path = _blp_path(ctx)
    select = "find_valid" if ctx.variant == "valid" else "find_minimal"
    Z = causal.blocking_sets(ctx.g, path, select)
    return Draft({"path": str(path), "select": ctx.variant}, sorted(Z), {"path": path_param(path)})


def _draft_ds(ctx):
    g = ctx.g
    x, y = ctx.pair(lambda a, b: a < b and not g.is_adjacent(a, b))
    select = "find_valid" if ctx.variant == "valid" else "find_minimal"
    Z = causal.d_separation(g, x, y, select)
    return Draft({"x": x, "y": y, "select": ctx.variant}, sorted(Z), {"x": x, "y": y})


def _draft_mec(ctx):
    try:
        other = causal.markov_equivalence("find_member", ctx.g)
    except NoOtherMember:
        raise _Impossible from None
    return Draft({}, _edge_strs(other))


def _draft_mb(ctx):
    v = ctx.pick(ctx.nodes())
    return Draft({"v": v}, sorted(causal.markov_blanket(ctx.g, v)), {"v": v})


def _draft_dp(ctx):
    g = ctx.g
    if ctx.qtype is QType.EX:
        pos = [(a, b) for a in ctx.nodes() for b in ctx.nodes() if a != b and b in g.descendants(a)]
        neg = [(a, b) for a in ctx.nodes() for b in ctx.nodes() if a != b and b not in g.descendants(a)]
        (x, y), truth = ctx.side(pos, neg)
        return Draft({"x": x, "y": y}, truth, {"x": x, "y": y})
    if ctx.qtype is QType.FA:
        x, y = ctx.pair(lambda a, b: b in g.descendants(a))
        return Draft({"x": x, "y": y}, _marker_list(causal.directed_paths(g, x, y)), {"x": x, "y": y})
    x, y = ctx.pair()
    return Draft({"x": x, "y": y}, causal.directed_paths(g, x, y, "count"), {"x": x, "y": y})


def _draft_bkp(ctx):
    g = ctx.g
    if ctx.qtype is QType.HM:
        x, y = ctx.pair()
        return Draft({"x": x, "y": y}, causal.backdoor_paths(g, x, y, "count"), {"x": x, "y": y})
    x, y = ctx.pair(lambda a, b: causal.backdoor_paths(g, a, b, "count") > 0)
    p = {"x": x, "y": y}
    if ctx.qtype is QType.FA:
        return Draft({"x": x, "y": y}, _marker_list(causal.backdoor_paths(g, x, y)), p)
    best = causal.backdoor_paths(g, x, y, ctx.variant)
    return Draft({"x": x, "y": y, "select": ctx.variant}, str(best), p)


def _draft_cc(ctx):
    blocks = sorted(sorted(b) for b in causal.c_components(ctx.g))
    if ctx.qtype is QType.FA:
        return Draft({}, blocks)
    if ctx.qtype is QType.HM:
        return Draft({}, len(blocks))
    return _graph_level(ctx)


def _graph_level(ctx):
    truth = GRAPH_LEVEL[ctx.task](ctx.g)
    if ctx.target is not None and truth != ctx.target:
        raise _Impossible
    return Draft({}, truth)


def _draft_mrs(ctx):
    roots = sorted(causal.maximal_root_set(ctx.g))
    return Draft({}, roots if ctx.qtype is QType.FA else len(roots))


def _draft_adjust(ctx, criterion):
    g = ctx.g
    frontdoor = criterion is Criterion.FRONTDOOR
    if ctx.qtype is QType.EX:
        pos, neg = [], []
        for a in ctx.nodes():
            for b in ctx.nodes():
                if a == b or b not in g.descendants(a) or (frontdoor and g.has_directed(a, b)):
                    continue
                q = AdjustmentQuery(a, b, frozenset(), criterion)
                (pos if causal.adjustment_set(g, q, "exists") else neg).append((a, b))
        (x, y), truth = ctx.side(pos, neg)
        return Draft({"x": x, "y": y}, truth, {"x": x, "y": y})
    x, y = _causal_pair(ctx, frontdoor)
    q = AdjustmentQuery(x, y, frozenset(), criterion)
    Z = causal.adjustment_set(g, q, "find_" + ctx.variant)
    if Z is None:
        raise _Retry
    return Draft({"x": x, "y": y, "select": ctx.variant}, sorted(Z), {"x": x, "y": y})


def _draft_cei(ctx):
    g = ctx.g
    pos, neg = [], []
    for a in ctx.nodes():
        for b in ctx.nodes():
            if a != b and b in g.descendants(a):
                (pos if causal.identify_effect(g, a, b) else neg).append((a, b))
    if not pos and not neg:
        raise _Impossible
    (x, y), truth = ctx.side(pos, neg)
    return Draft({"x": x, "y": y}, truth, {"x": x, "y": y})


DRAFTS = {
    "SN": _draft_sn,
    "SE": _draft_se,
    "2NR": _draft_2nr,
    "3NR": _draft_3nr,
    "PT": _draft_pt,
    "CL": _draft_cl,
    "TO": _draft_to,
    "BLP": _draft_blp,
    "DS": _draft_ds,
    "MEC": _draft_mec,
    "MB": _draft_mb,
    "DP": _draft_dp,
    "BKP": _draft_bkp,
    "CC": _draft_cc,
    "CT": _graph_level,
    "CF": _graph_level,
    "MRS": _draft_mrs,
    "BAS": lambda ctx: _draft_adjust(ctx, Criterion.BACKDOOR),
    "FAS": lambda ctx: _draft_adjust(ctx, Criterion.FRONTDOOR),
    "CEI": _draft_cei,
}


def _statement_draft(ctx):
    st = STATEMENTS[ctx.task](ctx)
    value, truth = ctx.side(st.pos, st.neg)
    fields = {**st.fields, **st.put(value)}
    return Draft(fields, truth, {**st.params, "value": _jsonable(value)})


def _choice_draft(ctx):
    st = STATEMENTS[ctx.task](ctx)
    polarity = ctx.polarity
    good, bad = st.pos, st.neg
    if polarity == "is NOT":
        good, bad = bad, good
    bad = sorted(_uniq(bad), key=_key)
    if len(bad) < 3:
        raise _Retry
    correct = ctx.pick(good)
    options = [correct] + ctx.rng.sample(bad, 3)
    ctx.rng.shuffle(options)
    fields = dict(st.fields)
    if polarity is not None:
        fields["polarity"] = polarity
    choices = [{"label": lab, "text": st.render(v)} for lab, v in zip(CHOICE_LABELS, options)]
    params = {**st.params, "options": [_jsonable(v) for v in options]}
    return Draft(fields, CHOICE_LABELS[options.index(correct)], params, choices)


def make_question(
    g: MixedGraph,
    task: str,
    qtype,
    seed: int,
    *,
    variant: str | None = None,
    target: bool | None = None,
    polarity: str | None = None,
    retries: int = DEFAULT_RETRIES,
    qid: str = "",
) -> QuestionInstance:
    """Instantiate one (task, question type) template on ``g``.

    ``variant`` fixes a template sub-variant (relation, triple kind, path
    selection, set selection), ``target`` forces the truth of a YesNo or
    Existence question and ``polarity`` ("is" / "is NOT") picks the
    ChoiceSelection polarity where the template has one.
    """
    qtype = QType(qtype)
    if not supported(task, qtype):
        raise UnsupportedPair(f"{task} has no {qtype.long_name} questions")
    if g.kind not in ALLOWED_KINDS[task]:
        raise WrongGraphKind(f"{task} questions are not posed on {g.kind.value} graphs")
    rng = random.Random(seed)
    choices = variants_for(task, qtype)
    if variant is None and choices and not (task == "3NR" and qtype is QType.EX):
        variant = rng.choice(choices)
    if variant is not None and variant not in choices:
        raise ValueError(f"unknown variant {variant!r} for {task} {qtype.value}")
    if (task, qtype) in (("SN", QType.CS), ("SE", QType.CS)):
        polarity = polarity or rng.choice(("is", "is NOT"))
    else:
        polarity = None
    ctx = _Ctx(g, task, qtype, rng, variant, target, polarity)

    for _ in range(retries):
        try:
            if qtype is QType.CS:
                draft = _choice_draft(ctx)
            elif qtype is QType.YN and task in STATEMENTS:
                draft = _statement_draft(ctx)
            else:
                draft = DRAFTS[task](ctx)
            if qtype in (QType.YN, QType.EX):
                ctx.need(draft.truth)
        except _Retry:
            continue
        except _Impossible:
            break
        params = dict(draft.params)
        if variant is not None:
            params.setdefault("variant", variant)
        if "kind" in params and task == "3NR":
            params["variant"] = params["kind"]
        prompt = fill_template(task, qtype, **draft.fields)
        return QuestionInstance(
            id=qid,
            task=task,
            qtype=qtype,
            graph=g,
            prompt_core=prompt,
            ground_truth=draft.truth,
            seed=seed,
            choices=draft.choices,
            polarity=polarity,
            params=params,
        )
    raise ExhaustedRetries(f"could not instantiate {task} {qtype.value} on this graph")
