import copy

import pytest

from symcartan.golden import CRITERIA, corpus, fixture_names, load_fixture
from symcartan.tasks import EXIT_ASSERT, EXIT_OK, Options, load_problem, run, strip_timings

NAMES = fixture_names()


def corrupt(value):
    if isinstance(value, bool):
        return not value
    if isinstance(value, (int, float)):
        return value + 1
    if isinstance(value, list):
        return [corrupt(value[0])] + value[1:]
    if isinstance(value, dict):
        return {"lt": -1}
    return value + "x"


def test_fixture_set():
    assert len(NAMES) == 18
    for name in NAMES:
        assert any(t["expect"] for t in load_fixture(name)["tasks"]), name


@pytest.mark.parametrize("name", NAMES)
def test_fixture_passes(name):
    report, code = run(load_problem(load_fixture(name)))
    assert code == EXIT_OK, [t for t in report["tasks"] if t["status"] != "ok"]


@pytest.mark.parametrize("name", NAMES)
def test_fixture_detects_corruption(name):
    data = copy.deepcopy(load_fixture(name))
    task = next(t for t in data["tasks"] if t["expect"])
    key = sorted(task["expect"])[0]
    task["expect"][key] = corrupt(task["expect"][key])
    report, code = run(load_problem(data))
    assert code == EXIT_ASSERT
    failed = [t for t in report["tasks"] if t["status"] == "failed"]
    assert failed and failed[0]["mismatches"][0]["path"] == key


@pytest.mark.parametrize("name", ["euclidean_r1.json", "circle_sin.json", "lie_trivial_3.json"])
def test_fixture_runs_are_deterministic(name):
    a, _ = run(load_problem(load_fixture(name)), Options(seed=3))
    b, _ = run(load_problem(load_fixture(name)), Options(seed=3))
    assert strip_timings(a) == strip_timings(b)


def test_corpus_filter_without_acceptance():
    report, code = corpus("liealg", acceptance=False)
    assert code == EXIT_OK
    assert {c["file"] for c in report["cases"]} == {"lie_line.json", "lie_su2_half.json", "lie_trivial_3.json"}
    assert report["criteria"] == []


def test_criteria_are_numbered_once():
    assert [c.number for c in CRITERIA] == list(range(1, 12))
