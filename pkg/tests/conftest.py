import pytest

from xrorch import load_scenario, reference_scenario_path
from xrorch.model import ScoreTable


@pytest.fixture(scope="session")
def reference():
    return load_scenario(reference_scenario_path())


@pytest.fixture
def table():
    return ScoreTable(
        role_scores={"Producer": 0.7, "Participant": 1.0, "Audience": 0.3},
        interaction_scores={"NtoM": 1.0, "OneToN": 0.8, "None": 0.5},
        quality_scores={"QP1": 1.0, "QP2": 0.7, "QP3": 0.5},
        perception_scores={"PointCloud": 1.0, "Avatar3D": 0.7, "None": 0.3},
    )


_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    n, title = mark.args
    ok, _ = _criteria.get(n, (True, title))
    if rep.failed or (rep.when == "call" and not rep.passed):
        ok = False
    _criteria[n] = (ok, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok, title = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
