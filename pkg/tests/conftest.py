import numpy as np
import pytest

from infocapture.graph import Graph, generate_scale_free


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def path3():
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture(scope="session")
def ba100():
    return generate_scale_free(100, 2, seed=7)


def assert_graph_invariants(g: Graph):
    e = g.edges
    assert e.shape == (g.edge_count, 2)
    if g.edge_count:
        assert e.min() >= 0 and e.max() < g.vertex_count
        assert np.all(e[:, 0] < e[:, 1])
        assert len({(int(u), int(v)) for u, v in e}) == g.edge_count
    assert int(g.degrees.sum()) == 2 * g.edge_count
    assert len(g.degrees) == g.vertex_count


# one pass/fail line per acceptance criterion at the end of the run
_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and (report.when == "call" or report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        prev = _acceptance.get(name)
        if prev != "FAIL":
            _acceptance[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance.items()):
        terminalreporter.write_line(f"{outcome}  {name}")
