from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

from clearbench.bench.generate import generate_benchmark
from clearbench.bench.instance import QuestionInstance
from clearbench.graph import build_graph

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

BENCH_SEED = 7

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def g_chain():
    return build_graph("DAG", ["A", "B", "C"], [("A", "B"), ("B", "C")])


@pytest.fixture(scope="session")
def g_conf():
    return build_graph("DAG", ["X", "Y", "Z"], [("Z", "X"), ("Z", "Y"), ("X", "Y")])


@pytest.fixture(scope="session")
def g_vs():
    return build_graph("DAG", ["A", "B", "C"], [("A", "B"), ("C", "B")])


@pytest.fixture(scope="session")
def g_front():
    return build_graph("ADMG", ["X", "M", "Y"], [("X", "M"), ("M", "Y")], [("X", "Y")])


@pytest.fixture(scope="session")
def g_bow():
    return build_graph("ADMG", ["X", "Y"], [("X", "Y")], [("X", "Y")])


@pytest.fixture(scope="session")
def default_bench():
    """(records, manifest) of the default benchmark, generated once per session."""
    return generate_benchmark(master_seed=BENCH_SEED)


@pytest.fixture(scope="session")
def default_instances(default_bench):
    return [QuestionInstance.from_dict(r) for r in default_bench[0]]
