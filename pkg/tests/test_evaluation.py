from __future__ import annotations

import asyncio
import json

import httpx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from clearbench.bench.questions import make_question
from clearbench.bench.tasks import DEFAULT_CHAINS, DEFINITION_TASKS, QType
from clearbench.errors import AuthMissing, HttpError, MissingStyleRun, RateLimited, UnknownQuestionId, UnsupportedPair
from clearbench.evaluation.aggregate import AccuracyTables, aggregate, load_accuracies, random_baseline, weighted_baseline
from clearbench.evaluation.endpoints import ModelEndpoint, acall_model, ask, builtin_endpoint, call_model, resolve_endpoint
from clearbench.evaluation.extract import UNGRADABLE, extract_answer
from clearbench.evaluation.grading import GradeRecord, Verdict, apply_overrides, grade, grade_response, load_overrides
from clearbench.evaluation.report import chain_verdict, criteria_report, render_text

# extraction


@pytest.mark.parametrize(
    "text, qtype, want",
    [
        ("Let me think.\nAnswer: Yes", "YN", "yes"),
        ("**Answer:** no, it is not.", "EX", "no"),
        ("I believe it is false", "YN", "no"),
        ("Answer: 4 nodes", "HM", 4),
        ("The graph has three nodes.", "HM", 3),
        ("Answer: (C)", "CS", "C"),
        ("Answer: Option b", "CS", "B"),
        ("Answer: {A, B, C}", "FA", {"groups": [["A", "B", "C"]]}),
        ("Answer: A->B->C", "FO", {"groups": [["A->B->C"]]}),
        ("Answer: [A → B, B ← C]", "FA", {"groups": [["A->B", "B<-C"]]}),
        ("Answer: {}", "FA", {"groups": []}),
        ("Answer: none", "FA", {"groups": []}),
    ],
)
def test_extract(text, qtype, want):
    assert extract_answer(text, qtype) == want


@pytest.mark.parametrize("text, qtype", [("", "YN"), ("Answer:", "HM"), ("maybe", "YN"), ("lots", "HM")])
def test_extract_ungradable(text, qtype):
    assert extract_answer(text, qtype) is UNGRADABLE


# grading


def test_grade_find_one_uses_verifier(g_conf):
    inst = make_question(g_conf, "TO", QType.FO, 0)
    assert grade_response(inst, "Answer: Z, X, Y").verdict is Verdict.CORRECT
    assert grade_response(inst, "Answer: X, Z, Y").verdict is Verdict.INCORRECT


def test_grade_find_all_needs_every_element(g_conf):
    inst = make_question(g_conf, "PT", QType.FA, 0)
    assert len(inst.ground_truth) == 2
    one = inst.ground_truth[0]
    assert grade_response(inst, f"Answer: {{{one}}}").verdict is Verdict.INCORRECT
    both = ", ".join(inst.ground_truth)
    assert grade_response(inst, f"Answer: {{{both}}}").verdict is Verdict.CORRECT


def test_grade_how_many(g_conf):
    inst = make_question(g_conf, "SN", QType.HM, 0)
    assert grade_response(inst, "Answer: 3").verdict is Verdict.CORRECT
    assert grade_response(inst, "I cannot tell.").verdict is Verdict.UNGRADABLE


def test_grade_record_round_trip(g_conf):
    inst = make_question(g_conf, "SN", QType.HM, 0)
    rec = grade_response(inst, "Answer: 2", model="m", style="def")
    assert GradeRecord.from_dict(json.loads(json.dumps(rec.to_dict()))) == rec


def test_overrides(tmp_path, g_conf):
    inst = make_question(g_conf, "SN", QType.HM, 0)
    rec = grade(inst, UNGRADABLE, model="m")
    path = tmp_path / "overrides.jsonl"
    path.write_text(json.dumps({"question_id": inst.id, "model": "m", "verdict": "Correct"}) + "\n")
    (fixed,) = apply_overrides([rec], load_overrides(path))
    assert fixed.verdict is Verdict.CORRECT


@given(st.data())
def test_grading_is_idempotent(default_instances, data):
    inst = data.draw(st.sampled_from(default_instances))
    text = data.draw(st.sampled_from(["Answer: yes", "Answer: 3", "Answer: B", "Answer: {A, B}", "??"]))
    assert grade_response(inst, text) == grade_response(inst, text)


# aggregation


def _rec(qid, verdict, model="m", style="basic"):
    return GradeRecord(qid, model, style, "", None, Verdict(verdict), None)


def test_aggregate_excludes_ungradable(default_instances):
    sn = [i for i in default_instances if i.task == "SN" and i.qtype is QType.HM][:5]
    grades = [_rec(sn[0].id, "Correct"), _rec(sn[1].id, "Correct"), _rec(sn[2].id, "Correct")]
    grades += [_rec(sn[3].id, "Incorrect"), _rec(sn[4].id, "Ungradable")]
    cell = aggregate(grades, default_instances).cell("m", "basic", "SN")
    assert (cell.accuracy, cell.total, cell.ungradable) == (0.75, 5, 1)


def test_aggregate_empty_cell(default_instances):
    inst = default_instances[0]
    t = aggregate([_rec(inst.id, "Ungradable")], default_instances)
    assert t.cell("m", "basic").accuracy is None
    assert criteria_report(t).ungradable == {"m|basic": 1}


def test_aggregate_unknown_id(default_instances):
    with pytest.raises(UnknownQuestionId):
        aggregate([_rec("nope", "Correct")], default_instances)


def test_random_baselines():
    assert random_baseline("CEI", "YN") == 0.5
    assert random_baseline("DP", "EX") == 0.5
    assert random_baseline("SN", "CS") == 0.25
    assert random_baseline("SN", "FA") == 0.0
    with pytest.raises(UnsupportedPair):
        random_baseline("CEI", "FA")
    assert weighted_baseline("SN", {"YN": 1, "CS": 1}) == pytest.approx(0.375)


def test_load_accuracies(tmp_path):
    path = tmp_path / "acc.json"
    path.write_text(json.dumps({"unit": "percent", "rows": [{"model": "m", "style": "basic", "task": "PT", "accuracy": 40}]}))
    assert load_accuracies(path).task_accuracy("m", "basic", "PT") == pytest.approx(0.4)
    with pytest.raises(ValueError):
        AccuracyTables.from_accuracies({("m", "basic", "PT"): 1.5})


# criteria


def test_qtype_spread():
    rows = {("m", "basic", "SN", q): a for q, a in [("FA", 0.5), ("YN", 0.8), ("HM", 0.6)]}
    t = AccuracyTables()
    for (m, s, task, q), acc in rows.items():
        cell = t.cells[(m, s, task, q)]
        cell.correct, cell.incorrect = int(acc * 10), 10 - int(acc * 10)
    assert criteria_report(t).b2["m|basic"]["spread"] == pytest.approx(0.30)


def test_style_deltas():
    rows = {}
    for task in DEFINITION_TASKS:
        rows[("m", "basic", task)] = 0.4
        rows[("m", "def", task)] = 0.5
    rep = criteria_report(AccuracyTables.from_accuracies(rows), style_runs=["def"])
    assert rep.b3["m"]["deltas"]["BKP"]["def"] == pytest.approx(10.0)
    assert rep.b3["m"]["mean"]["def"] == pytest.approx(10.0)
    del rows[("m", "def", "PT")]
    with pytest.raises(MissingStyleRun, match="PT def"):
        criteria_report(AccuracyTables.from_accuracies(rows), style_runs=["def"])


def test_chain_verdict():
    assert chain_verdict([0.8, 0.6, 0.6])
    assert not chain_verdict([0.6, 0.7, 0.5])
    rows = {("m", "basic", t, "YN"): 0.5 for chain in DEFAULT_CHAINS for t in chain}
    rep = criteria_report(AccuracyTables.from_accuracies(rows))
    assert all(v["non_increasing"] for v in rep.b4["m|basic"])
    assert "m" in render_text(rep)


# endpoints


def test_oracle_mock(g_conf):
    inst = make_question(g_conf, "SN", QType.HM, 0)
    assert call_model(builtin_endpoint("oracle_mock"), "", inst).endswith("Answer: 3")


def test_random_mock_is_deterministic(default_instances):
    ep = resolve_endpoint("random_mock:4")
    picks = default_instances[:50]
    first = [call_model(ep, "", i) for i in picks]
    assert first == [call_model(ep, "", i) for i in picks]
    assert all(extract_answer(t, i.qtype) is not UNGRADABLE for t, i in zip(first, picks))


def test_ask_sorts_by_id(default_instances):
    picks = list(reversed(default_instances[:20]))
    out = ask(builtin_endpoint("oracle_mock"), picks)
    assert [r["question_id"] for r in out] == sorted(i.id for i in picks)


def _http(handler, **kw):
    ep = ModelEndpoint(name="remote", base_url="http://model.test/v1/chat", backoff=(0,), **kw)
    return ep, httpx.AsyncClient(transport=httpx.MockTransport(handler))


def _run(ep, client):
    async def go():
        async with client:
            return await acall_model(ep, "hello", None, client)

    return asyncio.run(go())


def test_http_success_and_retry():
    calls = []

    def handler(request):
        calls.append(json.loads(request.content))
        if len(calls) < 3:
            return httpx.Response(500 if len(calls) == 1 else 429, text="busy")
        return httpx.Response(200, json={"choices": [{"message": {"content": "Answer: yes"}}]})

    assert _run(*_http(handler)) == "Answer: yes"
    assert len(calls) == 3
    assert calls[0]["messages"][0]["content"] == "hello"


def test_http_gives_up():
    ep, client = _http(lambda r: httpx.Response(429, text="slow down"), retries=1)
    with pytest.raises(RateLimited):
        _run(ep, client)


def test_http_client_error_is_not_retried():
    calls = []

    def handler(request):
        calls.append(request)
        return httpx.Response(400, text="bad")

    with pytest.raises(HttpError):
        _run(*_http(handler))
    assert len(calls) == 1


def test_missing_credentials(monkeypatch):
    monkeypatch.setenv("BENCH_TEST_KEY", "")
    ep, client = _http(lambda r: httpx.Response(200), auth_env_var="BENCH_TEST_KEY")
    with pytest.raises(AuthMissing):
        _run(ep, client)
