"""Fast oracles checked against the brute-force reference implementations."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

import numpy as np

from clearbench import bruteforce as bf
from clearbench.bench.sampling import DEFAULT_CAP, random_spec, sample_graph
from clearbench.causal import (
    AdjustmentQuery,
    Criterion,
    adjustment_set,
    d_separated,
    identify_effect_masks,
    markov_equivalence,
)
from clearbench.errors import NoOtherMember
from clearbench.graph import GraphKind, MixedGraph, build_graph

MAX_EDGES = 10


@dataclass
class CheckResult:
    name: str
    cases: int = 0
    disagreements: int = 0
    seconds: float = 0.0
    examples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.cases > 0 and self.disagreements == 0

    def miss(self, detail):
        self.disagreements += 1
        if len(self.examples) < 5:
            self.examples.append(detail)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict}  {self.name}: {self.cases} cases, {self.disagreements} disagreements ({self.seconds:.1f}s)"


def _random_graph(rng: random.Random) -> MixedGraph:
    kind = rng.choice((GraphKind.DAG, GraphKind.ADMG))
    spec = random_spec(kind, rng, cap=None if rng.random() < 0.3 else DEFAULT_CAP)
    return sample_graph(spec, rng.getrandbits(64))


def check_d_separation(n_cases=5000, seed=0) -> CheckResult:
    res = CheckResult("d-separation vs path blocking")
    rng = random.Random(f"dsep|{seed}")
    t0 = time.perf_counter()
    while res.cases < n_cases:
        g = _random_graph(rng)
        for _ in range(5):
            x, y = rng.sample(sorted(g.nodes), 2)
            rest = sorted(g.node_set - {x, y})
            Z = frozenset(rng.sample(rest, rng.randint(0, len(rest))))
            fast = d_separated(g, x, y, Z)
            slow = bf.d_separated(g, x, y, Z)
            res.cases += 1
            if fast != slow:
                res.miss({"graph": g.to_text(), "x": x, "y": y, "Z": sorted(Z), "fast": fast})
    res.seconds = time.perf_counter() - t0
    return res


def check_markov_equivalence(sizes=(3, 4)) -> CheckResult:
    """Every ordered pair of DAGs on 3 and on 4 nodes, plus find_member on each."""
    res = CheckResult("Markov equivalence vs skeleton/v-structures")
    t0 = time.perf_counter()
    for n in sizes:
        nodes = [chr(ord("A") + i) for i in range(n)]
        dags = [build_graph(GraphKind.DAG, nodes, edges) for edges in bf.all_dags(nodes)]
        keys = [bf.skeleton_and_vstructures(g) for g in dags]
        for i, g1 in enumerate(dags):
            for j, g2 in enumerate(dags):
                res.cases += 1
                if markov_equivalence("equivalent", g1, g2) != (keys[i] == keys[j]):
                    res.miss({"g1": g1.to_text(), "g2": g2.to_text()})
            class_size = sum(k == keys[i] for k in keys)
            res.cases += 1
            try:
                other = markov_equivalence("find_member", g1)
            except NoOtherMember:
                if class_size != 1:
                    res.miss({"find_member": g1.to_text(), "class_size": class_size})
            else:
                if other == g1 or not bf.equivalent(other, g1):
                    res.miss({"find_member": g1.to_text(), "got": other.to_text()})
    res.seconds = time.perf_counter() - t0
    return res


def check_adjustment(n_queries=1000, seed=0) -> CheckResult:
    """verify on random sets, plus exists and find_minimal against subset search on small graphs."""
    res = CheckResult("adjustment sets vs subset brute force")
    rng = random.Random(f"adjust|{seed}")
    t0 = time.perf_counter()
    while res.cases < n_queries:
        g = _random_graph(rng)
        x, y = rng.sample(sorted(g.nodes), 2)
        rest = sorted(g.node_set - {x, y})
        crit = rng.choice((Criterion.BACKDOOR, Criterion.FRONTDOOR))
        slow_valid = bf.backdoor_valid if crit is Criterion.BACKDOOR else bf.frontdoor_valid
        Z = frozenset(rng.sample(rest, rng.randint(0, len(rest))))
        q = AdjustmentQuery(x, y, Z, crit)
        res.cases += 1
        fast = adjustment_set(g, q, "verify")
        if fast != slow_valid(g, x, y, Z):
            res.miss({"graph": g.to_text(), "query": (x, y, sorted(Z), crit.value), "fast": fast})
        if len(rest) <= 6:
            valid = [frozenset(c) for k in range(len(rest) + 1) for c in itertools.combinations(rest, k)
                     if slow_valid(g, x, y, c)]
            exists = adjustment_set(g, q, "exists")
            found = adjustment_set(g, q, "find_minimal")
            ok = exists == bool(valid)
            if valid:
                ok = ok and found in valid and not any(v < found for v in valid)
            else:
                ok = ok and found is None
            if not ok:
                res.miss({"graph": g.to_text(), "query": (x, y, crit.value), "exists": exists, "found": found})
    res.seconds = time.perf_counter() - t0
    return res


# exhaustive identification check


def _pairs(n):
    return list(itertools.combinations(range(n), 2))


def _acyclic_masks(n):
    """Directed adjacency codes (bit i*n+j for i->j) of every labeled DAG on n nodes."""
    pairs = _pairs(n)
    out = []
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        pa = [0] * n
        code = 0
        for (a, b), c in zip(pairs, choice):
            if c == 1:
                pa[b] |= 1 << a
                code |= 1 << (a * n + b)
            elif c == 2:
                pa[a] |= 1 << b
                code |= 1 << (b * n + a)
        left = (1 << n) - 1
        while left:
            free = [v for v in range(n) if left >> v & 1 and not pa[v] & left]
            if not free:
                break
            for v in free:
                left &= ~(1 << v)
        if not left:
            out.append((code, sum(1 for c in choice if c)))
    return out


def _permute_codes(codes, n, perm):
    """Relabel node v as perm[v] in packed (directed | bidirected << n*n) codes."""
    pairs = _pairs(n)
    pair_index = {p: k for k, p in enumerate(pairs)}
    out = np.zeros_like(codes)
    one = np.uint64(1)
    for i in range(n):
        for j in range(n):
            if i != j:
                src = np.uint64(i * n + j)
                dst = np.uint64(perm[i] * n + perm[j])
                out |= ((codes >> src) & one) << dst
    shift = n * n
    for k, (a, b) in enumerate(pairs):
        pa, pb = sorted((perm[a], perm[b]))
        src = np.uint64(shift + k)
        dst = np.uint64(shift + pair_index[(pa, pb)])
        out |= ((codes >> src) & one) << dst
    return out


def admg_codes(n, max_edges=MAX_EDGES, ratio_cap=True, connected_floor=True):
    """Packed codes of all labeled ADMGs on n nodes meeting the edge constraints.

    Constraints: n-1 <= directed + bidirected <= max_edges and, with
    ``ratio_cap``, 2 * bidirected <= directed.
    """
    pairs = _pairs(n)
    by_size = {}
    for k in range(len(pairs) + 1):
        masks = [sum(1 << i for i in c) for c in itertools.combinations(range(len(pairs)), k)]
        by_size[k] = np.array(masks, dtype=np.uint64) << np.uint64(n * n)
    chunks = []
    for code, n_d in _acyclic_masks(n):
        for n_b in range(len(pairs) + 1):
            total = n_d + n_b
            if total > max_edges or (connected_floor and total < n - 1):
                continue
            if ratio_cap and 2 * n_b > n_d:
                continue
            chunks.append(by_size[n_b] | np.uint64(code))
    return np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.uint64)


def canonical_codes(codes, n):
    """Smallest code under relabelings fixing nodes 0 (treatment) and 1 (outcome)."""
    best = codes.copy()
    for rest in itertools.permutations(range(2, n)):
        perm = (0, 1) + rest
        if perm == tuple(range(n)):
            continue
        best = np.minimum(best, _permute_codes(codes, n, perm))
    return np.unique(best)


def decode(code, n):
    code = int(code)
    pa = [0] * n
    bi = [0] * n
    for i in range(n):
        for j in range(n):
            if i != j and code >> (i * n + j) & 1:
                pa[j] |= 1 << i
    for k, (a, b) in enumerate(_pairs(n)):
        if code >> (n * n + k) & 1:
            bi[a] |= 1 << b
            bi[b] |= 1 << a
    return pa, bi


def _sets(masks, n):
    return {v: {u for u in range(n) if masks[v] >> u & 1} for v in range(n)}


def check_identification(sizes=(3, 4, 5)) -> CheckResult:
    """identify_effect against hedge search on every ADMG up to isomorphism.

    Treatment and outcome are pinned to nodes 0 and 1, which loses nothing
    since any labeled (graph, x, y) is a relabeling of such a case.
    """
    res = CheckResult("identification vs hedge search")
    t0 = time.perf_counter()
    for n in sizes:
        reps = canonical_codes(admg_codes(n), n)
        nodes = list(range(n))
        for code in reps:
            pa, bi = decode(code, n)
            fast = identify_effect_masks(n, pa, bi, 1, 2)
            slow = not bf.hedge_exists(nodes, _sets(pa, n), _sets(bi, n), 0, 1)
            res.cases += 1
            if fast != slow:
                res.miss({"n": n, "code": int(code), "fast": fast})
    res.seconds = time.perf_counter() - t0
    return res


def run_selftest(seed=0, echo=print) -> list:
    results = []
    for check in (
        lambda: check_d_separation(seed=seed),
        check_markov_equivalence,
        lambda: check_adjustment(seed=seed),
        check_identification,
    ):
        r = check()
        results.append(r)
        if echo:
            echo(r.line())
            for ex in r.examples:
                echo(f"      {ex}")
    return results
