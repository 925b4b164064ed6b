import json

import pytest

from symcartan.cli import main
from symcartan.golden import load_fixture
from symcartan.tasks import strip_timings


def write(tmp_path, data, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(path)


def invoke(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main([*argv, "--out", str(out)])
    return code, json.loads(out.read_text())


def test_run_fixture(tmp_path):
    code, report = invoke(tmp_path, "run", write(tmp_path, load_fixture("euclidean_r2.json")))
    assert code == 0 and report["status"] == "ok" and len(report["tasks"]) == 4


def test_subcommand_uses_declared_task(tmp_path):
    path = write(tmp_path, load_fixture("euclidean_r2.json"))
    code, report = invoke(tmp_path, "cohomology", path)
    (task,) = report["tasks"]
    assert code == 0 and task["result"]["dim_H"] == 1 and task["expect"]
    code, report = invoke(tmp_path, "cohomology", path, "--r", "1", "--no-escalate", "--degree", "3")
    (task,) = report["tasks"]
    assert code == 0 and task["result"]["dim_H"] == 1 and "expect" not in task


def test_subcommand_without_declared_task(tmp_path):
    data = load_fixture("euclidean_r1.json")
    data["tasks"] = []
    code, report = invoke(tmp_path, "affine", write(tmp_path, data))
    assert code == 0 and report["tasks"][0]["task"] == "affine"


def test_lieadm_bare_algebra(tmp_path):
    path = write(tmp_path, {"dim": 1, "product": {"0,0": [1]}})
    code, report = invoke(tmp_path, "lieadm", path, "--rmax", "2")
    assert code == 0
    assert [row["dim_H"] for row in report["tasks"][0]["result"]["table"]] == [1, 0, 0]


def test_circle_subcommand(tmp_path):
    code, report = invoke(tmp_path, "circle", write(tmp_path, load_fixture("circle_sin.json")))
    assert code == 0 and report["tasks"][0]["result"]["is_levi_civita"] is True


def test_geodesic_csv(tmp_path):
    csv = tmp_path / "run.csv"
    path = write(tmp_path, load_fixture("geodesic_line.json"))
    code, _ = invoke(tmp_path, "geodesic", path, "--h", "0.01", "--T", "1", "--start", "0",
                     "--velocity", "0.5", "--csv", str(csv))
    assert code == 0
    assert len(csv.read_text().splitlines()) == 102


def test_expect_mismatch_exits_1(tmp_path):
    data = load_fixture("euclidean_r2.json")
    data["tasks"][0]["expect"]["dim_H"] = 2
    code, report = invoke(tmp_path, "run", write(tmp_path, data))
    assert code == 1 and report["status"] == "failed"
    assert report["tasks"][0]["mismatches"][0]["got"] == 1


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(extra=1),
    lambda d: d["manifold"].update(dim=3),
    lambda d: d["connection"]["gamma"].update({"0,0,0": "x +"}),
    lambda d: d["connection"]["gamma"].update({"0,0,5": "1"}),
    lambda d: d["tasks"].append({"task": "nonsense"}),
    lambda d: d["tasks"][0]["params"].update(r=-1),
])
def test_schema_errors_exit_2(tmp_path, mutate):
    data = load_fixture("euclidean_r2.json")
    mutate(data)
    code, report = invoke(tmp_path, "run", write(tmp_path, data))
    assert code == 2
    err = report.get("error") or next(t["error"] for t in report["tasks"] if t["status"] == "error")
    assert err["type"] == "schema" and err["message"]


def test_unreadable_input_exits_2(tmp_path):
    code, report = invoke(tmp_path, "run", write(tmp_path, "{not json"))
    assert code == 2 and report["status"] == "error"
    code, _ = invoke(tmp_path, "run", str(tmp_path / "missing.json"))
    assert code == 2


def test_computation_error_exits_3(tmp_path):
    data = load_fixture("euclidean_r2.json")
    data["connection"]["gamma"] = {"0,0,1": "1"}
    data["tasks"] = [{"task": "affine"}]
    code, report = invoke(tmp_path, "run", write(tmp_path, data))
    assert code == 3
    assert report["tasks"][0]["error"]["exception"] == "TorsionError"


def test_report_round_trip_and_determinism(tmp_path):
    path = write(tmp_path, load_fixture("example_polynomial_r2.json"))
    _, first = invoke(tmp_path, "run", path, "--seed", "5")
    _, second = invoke(tmp_path, "run", path, "--seed", "5")
    assert json.loads(json.dumps(first)) == first
    assert strip_timings(first) == strip_timings(second)


def test_stdout_output(tmp_path, capsys):
    assert main(["circle", write(tmp_path, load_fixture("circle_f0.json"))]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "ok"


def test_corpus_filter(tmp_path):
    code, report = invoke(tmp_path, "corpus", "--filter", "circle", "--no-acceptance")
    assert code == 0 and len(report["cases"]) == 3
