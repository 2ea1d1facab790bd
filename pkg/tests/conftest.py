import os

import pytest

from stabgraph import graphs as gr
from stabgraph.enumeration import load_states


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    """Shared state cache; STABGRAPH_CACHE reuses a warm one across runs."""
    env = os.environ.get("STABGRAPH_CACHE")
    return env if env else str(tmp_path_factory.mktemp("stbs"))


@pytest.fixture(scope="session")
def states(cache_dir):
    memo = {}

    def get(n: int):
        if n not in memo:
            memo[n] = load_states(n, cache_dir)
        return memo[n]

    return get


@pytest.fixture(scope="session")
def restricted(states):
    """Graphs under {H1, H2, CX12, CX21}, built once per qubit count."""
    memo = {}

    def get(n: int):
        if n not in memo:
            memo[n] = gr.build_graph(states(n), gr.GateSet.restricted())
        return memo[n]

    return get


@pytest.fixture(scope="session")
def full(states):
    memo = {}

    def get(n: int):
        if n not in memo:
            memo[n] = gr.build_graph(states(n), gr.GateSet.full(n))
        return memo[n]

    return get


_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or report.failed:
        name = report.nodeid.split("::")[-1][len("test_criterion_"):]
        detail = dict(report.user_properties).get("detail", "")
        if report.failed and not detail:
            detail = str(report.longrepr).strip().splitlines()[-1][:160]
        _CRITERIA[name] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        verdict, detail = _CRITERIA[name]
        num, _, label = name.partition("_")
        terminalreporter.write_line(f"criterion {int(num):2d} {verdict}  {label.replace('_', ' ')}: {detail}")
