from __future__ import annotations

import collections
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clearbench.bench.generate import (
    GEN_KINDS,
    derive_seed,
    generate_benchmark,
    load_questions,
    serialize_jsonl,
    write_benchmark,
)
from clearbench.bench.instance import QuestionInstance
from clearbench.bench.prompts import Style, builtin_definitions, render_prompt, select_shots
from clearbench.bench.questions import STATEMENTS, make_question
from clearbench.bench.sampling import LETTERS, GraphSpec, random_spec, sample_graph
from clearbench.bench.tasks import DEFAULT_COUNTS, DEFINITION_TASKS, TASKS, Level, QType, supported
from clearbench.bench.verify import judge
from clearbench.causal import identify_effect
from clearbench.errors import (
    ConfigInvalid,
    ExhaustedRetries,
    InfeasibleSpec,
    InsufficientShots,
    MissingDefinition,
    UnsupportedPair,
    WrongGraphKind,
)
from clearbench.graph import GraphKind, build_graph, cycles
from strategies import seeds

# sampling


def test_infeasible_edge_count():
    with pytest.raises(InfeasibleSpec):
        GraphSpec(4, 11, GraphKind.DAG)


def test_sampling_is_deterministic():
    spec = GraphSpec(4, 3, GraphKind.DAG)
    assert sample_graph(spec, 123) == sample_graph(spec, 123)


def test_ratio_cap_boundary():
    spec = GraphSpec(6, 9, GraphKind.ADMG, n_bi=3)
    g = sample_graph(spec, 5)
    assert len(g.bidirected) == 3 and len(g.directed) == 6
    with pytest.raises(InfeasibleSpec):
        GraphSpec(6, 9, GraphKind.ADMG, n_bi=4)


@given(st.sampled_from(list(GraphKind)), seeds, seeds)
def test_sampled_graphs_meet_spec(kind, spec_seed, seed):
    spec = random_spec(kind, random.Random(spec_seed))
    g = sample_graph(spec, seed)
    assert len(g.nodes) == spec.n_v
    assert g.n_edges == spec.n_e
    assert spec.n_v - 1 <= g.n_edges <= 10
    assert g.kind is kind
    assert set(g.nodes) <= set(LETTERS)
    if kind is GraphKind.ADMG:
        assert len(g.bidirected) >= 1
        assert Fraction(len(g.bidirected), len(g.directed)) <= Fraction(1, 2)
    if kind in (GraphKind.DAG, GraphKind.ADMG):
        assert not cycles(g, "exists")


# tasks


def test_task_table():
    assert len(TASKS) == 20
    levels = collections.Counter(t.level for t in TASKS.values())
    assert levels[Level.BASIC] > 0 and levels[Level.ADVANCED] > 0
    assert sum(sum(row.values()) for row in DEFAULT_COUNTS.values()) == 2808
    assert DEFINITION_TASKS == ("3NR", "PT", "BLP", "BKP", "CC", "MRS", "FAS")
    assert not supported("CEI", QType.FA)


# questions


def test_sn_find_all(g_chain):
    q = make_question(g_chain, "SN", QType.FA, 1)
    assert "List all nodes of this graph." in q.prompt_core
    assert sorted(q.ground_truth) == ["A", "B", "C"]


def test_cei_yes_no():
    g = build_graph("ADMG", ["X", "Z", "Y", "W"], [("X", "Z"), ("Z", "Y"), ("W", "Y")], [("X", "Z")])
    q = make_question(g, "CEI", QType.YN, 3)
    assert "be identified or not?" in q.prompt_core
    assert q.ground_truth == identify_effect(g, q.params["x"], q.params["y"])


def test_mec_find_one_on_singleton_class(g_vs):
    with pytest.raises(ExhaustedRetries):
        make_question(g_vs, "MEC", QType.FO, 0)


def test_unsupported_pair(g_chain):
    with pytest.raises(UnsupportedPair):
        make_question(g_chain, "CEI", QType.FA, 0)


def test_wrong_graph_kind():
    g = build_graph("Undirected", ["A", "B", "C"], undirected=[("A", "B"), ("B", "C")])
    with pytest.raises(WrongGraphKind):
        make_question(g, "MB", QType.YN, 0)


def _soundness(inst: QuestionInstance):
    """Re-derive the stored truth of a YesNo or ChoiceSelection question."""
    g, p = inst.graph, inst.params
    if inst.qtype is QType.YN:
        value = judge(g, inst.task, p, p["value"]) if inst.task in STATEMENTS else judge(g, inst.task, p)
        return value == inst.ground_truth
    want = inst.polarity != "is NOT"
    hits = [c["label"] for c, o in zip(inst.choices, p["options"]) if judge(g, inst.task, p, o) == want]
    return hits == [inst.ground_truth]


@given(st.sampled_from(sorted(t for t in TASKS if supported(t, QType.CS) or supported(t, QType.YN))), seeds)
def test_generated_questions_are_sound(task, seed):
    rng = random.Random(seed)
    qtype = rng.choice([q for q in (QType.YN, QType.CS) if supported(task, q)])
    for _ in range(20):
        kind = rng.choice(GEN_KINDS[task])
        g = sample_graph(random_spec(kind, rng, None if task in ("CC", "CT", "CF") else Fraction(1, 2)), rng.getrandbits(64))
        try:
            inst = make_question(g, task, qtype, rng.getrandbits(64))
        except ExhaustedRetries:
            continue
        assert _soundness(inst)
        if qtype is QType.CS:
            assert [c["label"] for c in inst.choices] == ["A", "B", "C", "D"]
        return


def test_default_benchmark_is_sound(default_instances):
    checked = [i for i in default_instances if i.qtype in (QType.YN, QType.CS)]
    assert checked and all(_soundness(i) for i in checked)


def test_round_trip(default_instances):
    for inst in default_instances[:200]:
        assert QuestionInstance.from_dict(json.loads(json.dumps(inst.to_dict()))).to_dict() == inst.to_dict()


# generation


def test_small_config():
    records, manifest = generate_benchmark({"SN": {"FA": 2}}, master_seed=1)
    assert len(records) == 2 and manifest["total"] == 2
    assert {(r["task"], r["qtype"]) for r in records} == {("SN", "FA")}


def test_bad_config():
    with pytest.raises(ConfigInvalid):
        generate_benchmark({"XX": {"FA": 1}}, master_seed=1)
    with pytest.raises(ConfigInvalid):
        generate_benchmark({"CEI": {"FA": 1}}, master_seed=1)


def test_seed_derivation_differs_by_cell():
    assert derive_seed(1, "SN", "FA", 0) != derive_seed(1, "SN", "HM", 0)
    assert derive_seed(1, "SN", "FA", 0) == derive_seed(1, "SN", "FA", 0)


def test_counts_match_table(default_bench):
    records, manifest = default_bench
    assert manifest["total"] == 2808
    got = collections.Counter((r["task"], r["qtype"]) for r in records)
    want = {(t, q.value): n for t, row in DEFAULT_COUNTS.items() for q, n in row.items()}
    assert dict(got) == want


def test_ids_unique(default_bench):
    ids = [r["id"] for r in default_bench[0]]
    assert len(ids) == len(set(ids))


@pytest.mark.parametrize(
    "task, qtype",
    [("CL", "EX"), ("DP", "EX"), ("BAS", "EX"), ("FAS", "EX"), ("CEI", "YN"), ("CT", "YN"), ("CF", "YN")],
)
def test_existence_balance(default_bench, task, qtype):
    truths = [r["ground_truth"] for r in default_bench[0] if r["task"] == task and r["qtype"] == qtype]
    assert 0.4 <= sum(truths) / len(truths) <= 0.6


def test_write_and_load(tmp_path):
    records, manifest = generate_benchmark({"SN": {"HM": 3}, "CEI": {"YN": 2}}, master_seed=9)
    write_benchmark(tmp_path, records, manifest)
    assert (tmp_path / "questions.jsonl").read_bytes() == serialize_jsonl(records)
    loaded = load_questions(tmp_path / "questions.jsonl")
    assert [i.to_dict() for i in loaded] == records
    assert json.loads((tmp_path / "manifest.json").read_text())["digest"] == manifest["digest"]


# prompts


def test_definition_prompt(default_instances):
    bkp = next(i for i in default_instances if i.task == "BKP")
    text = render_prompt(bkp, Style.DEF)
    assert "starts with an arrow pointing into X" in text
    assert text.startswith("Use the following definition")
    sn = next(i for i in default_instances if i.task == "SN")
    with pytest.raises(MissingDefinition):
        render_prompt(sn, Style.DEF)


def test_basic_prompt(default_instances):
    sn = next(i for i in default_instances if i.task == "SN" and i.qtype is QType.FA)
    text = render_prompt(sn, "basic")
    assert sn.graph.to_text() in text
    assert "List all nodes of this graph." in text
    assert "Answer:" in text


def test_icl_shots(default_instances):
    inst = default_instances[0]
    pool = [i for i in default_instances if (i.task, i.qtype) == (inst.task, inst.qtype)]
    shots = select_shots(inst, pool, 3)
    assert len(shots) == 3 and all(s.graph != inst.graph and s.id != inst.id for s in shots)
    assert render_prompt(inst, Style.ICL3, pool).count("Example ") == 3
    with pytest.raises(InsufficientShots):
        render_prompt(inst, Style.ICL3, pool[:3])


def test_definitions_cover_study_tasks():
    assert set(builtin_definitions()) == set(DEFINITION_TASKS)
