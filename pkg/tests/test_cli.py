from __future__ import annotations

import json

import pytest

from clearbench.bench.generate import default_counts
from clearbench.cli import main
from clearbench.config import RunConfig, load_config, parse_config
from clearbench.errors import ConfigInvalid, ParseError

SMALL = {"SN": {"HM": 3, "FA": 2}, "CEI": {"YN": 4}, "TO": {"FO": 3}, "BKP": {"CS": 4}}


def _config(tmp_path, **fields):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(fields))
    return path


# configuration


def test_missing_seed_names_field(tmp_path):
    with pytest.raises(ConfigInvalid, match="master_seed"):
        load_config(_config(tmp_path, command="generate"))


def test_empty_file(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("")
    with pytest.raises(ParseError) as info:
        load_config(path)
    assert info.value.line == 1


def test_unknown_field_reports_line():
    with pytest.raises(ParseError, match="colour") as info:
        parse_config('{\n  "master_seed": 1,\n  "colour": "red"\n}')
    assert info.value.line == 3


def test_minimal_config_uses_default_counts(tmp_path):
    cfg = load_config(_config(tmp_path, command="generate", master_seed=3))
    assert cfg.counts == default_counts()
    assert sum(sum(r.values()) for r in cfg.counts.values()) == 2808


def test_counts_replace_defaults(tmp_path):
    cfg = load_config(_config(tmp_path, command="generate", master_seed=3, counts={"SN": {"FA": 2}}))
    assert sum(sum(r.values()) for r in cfg.counts.values()) == 2


@pytest.mark.parametrize(
    "fields",
    [
        {"command": "generate", "master_seed": -1},
        {"command": "generate", "master_seed": True},
        {"command": "ask", "master_seed": 1},
        {"style": "fancy"},
        {"workers": 0},
        {"tasks": ["SN", "QQ"]},
        {"counts": {"CEI": {"FA": 1}}},
    ],
)
def test_invalid_fields(tmp_path, fields):
    with pytest.raises(ConfigInvalid):
        load_config(_config(tmp_path, **fields))


def test_command_line_overrides_file():
    cfg = RunConfig(master_seed=1, style="def").merged(master_seed=5, style=None)
    assert (cfg.master_seed, cfg.style) == (5, "def")


# commands


def test_pipeline(tmp_path, capsys):
    conf = _config(tmp_path, master_seed=11, counts=SMALL)
    out = tmp_path / "run"
    assert main(["generate", "--config", str(conf), "--out", str(out)]) == 0
    assert "wrote 16 questions" in capsys.readouterr().out
    q = str(out / "questions.jsonl")
    assert main(["render", "--questions", q, "--out", str(out), "--style", "icl1"]) == 0
    prompts = [json.loads(line) for line in (out / "prompts.jsonl").read_text().splitlines()]
    assert len(prompts) == 16 and all("Example 1" in p["prompt"] for p in prompts)
    for name in ("oracle_mock", "random_mock:2"):
        sub = out / name.replace(":", "_")
        assert main(["ask", "--questions", q, "--endpoint", name, "--out", str(sub)]) == 0
    responses = [str(out / n / "responses.jsonl") for n in ("oracle_mock", "random_mock_2")]
    argv = ["grade", "--questions", q, "--out", str(out)]
    for r in responses:
        argv += ["--responses", r]
    assert main(argv) == 0
    grades = [json.loads(line) for line in (out / "grades.jsonl").read_text().splitlines()]
    assert len(grades) == 32
    assert all(g["verdict"] == "Correct" for g in grades if g["model"] == "oracle_mock")
    capsys.readouterr()
    assert main(["report", "--questions", q, "--grades", str(out / "grades.jsonl"), "--out", str(out)]) == 0
    assert "oracle_mock" in capsys.readouterr().out
    report = json.loads((out / "report.json").read_text())
    assert set(report["accuracy"]["oracle_mock|basic"].values()) == {1.0}
    for fig in ("accuracy_by_task.png", "accuracy_by_qtype.png", "chains.png"):
        assert (out / "figures" / fig).stat().st_size > 0
    # style deltas need runs in more than one prompt style
    assert not (out / "figures" / "style_deltas.png").exists()
    assert (out / "accuracy.csv").read_text().startswith("model,")


def test_generate_is_reproducible(tmp_path):
    conf = _config(tmp_path, master_seed=11, counts=SMALL)
    for name in ("a", "b"):
        assert main(["generate", "--config", str(conf), "--out", str(tmp_path / name)]) == 0
    a = json.loads((tmp_path / "a" / "manifest.json").read_text())
    b = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert a["digest"] == b["digest"]


def test_errors_exit_2(tmp_path, capsys):
    assert main(["generate", "--out", str(tmp_path)]) == 2
    assert "ConfigInvalid" in capsys.readouterr().err
    assert main(["grade", "--questions", str(tmp_path / "none.jsonl"), "--responses", "x"]) == 2
    conf = _config(tmp_path, master_seed=1, counts={"SN": {"HM": 1}})
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["generate", "--config", str(conf), "--out", str(blocker / "sub")]) == 2
    assert "IoError" in capsys.readouterr().err
