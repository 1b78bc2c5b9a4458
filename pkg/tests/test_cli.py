import csv
import io
import json
import subprocess
import sys

import pytest

from fusegraph import generate
from fusegraph.cli import SWEEP_FIELDS, main
from fusegraph.io import dumps, file_sha256, graph_to_dict


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_optimize_star6(capsys):
    code, out, _ = run(capsys, "optimize", "star:6", "--p-succ", "0.5", "--fixed", "100", "--seed", "1")
    assert code == 0
    assert "Q_opt=16\n" in out
    assert "expected_fusions=10\n" in out


def test_optimize_repeater3(capsys):
    code, out, _ = run(capsys, "optimize", "repeater:3", "--p-succ", "0.5", "--adaptive", "200")
    assert code == 0
    q = float(out.split("Q_opt=")[1].split()[0])
    assert abs(q - 120) <= 0.10 * 120


def test_optimize_loss_flag(capsys):
    # p = (1 - 0.134)^2 / 2 is about 0.375
    code, out, _ = run(capsys, "optimize", "star:4", "--loss", "0.134", "--fixed", "3")
    assert code == 0
    q = float(out.split("Q_opt=")[1].split()[0])
    assert q == pytest.approx(2 / ((1 - 0.134) ** 2 / 2))


@pytest.mark.parametrize(
    "argv",
    [
        ["optimize", "star:6", "--p-succ", "1.5"],
        ["optimize", "star:2"],
        ["optimize", "nothing.json"],
        ["optimize", "er:6,1", "--fixed", "1"],
        ["gen", "blob:3"],
    ],
)
def test_input_errors_exit_3(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 3
    assert err.startswith("error:")


@pytest.mark.parametrize(
    "argv",
    [[], ["frobnicate"], ["optimize"], ["optimize", "star:6", "--fixed", "0"],
     ["optimize", "star:6", "--fixed", "3", "--adaptive", "3"], ["sweep", "--ratios", "a,b"]],
)
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_gen_writes_json_and_dot(capsys, tmp_path):
    code, out, err = run(capsys, "gen", "rhg:1,1,1", "--dot", str(tmp_path / "g.dot"))
    assert code == 0
    assert out == dumps(graph_to_dict(generate("rhg:1,1,1")))
    assert "|V|=18 |E|=24" in err
    assert (tmp_path / "g.dot").read_text().startswith("graph")


def test_optimize_from_json_file(capsys, tmp_path):
    p = tmp_path / "g.json"
    p.write_text(dumps(graph_to_dict(generate("star:6"))))
    code, out, _ = run(capsys, "optimize", str(p), "--fixed", "5")
    assert code == 0 and "Q_opt=16\n" in out


def test_optimize_outputs_and_manifest_reproduce(capsys, tmp_path):
    argv = ["optimize", "lattice:3,3", "--fixed", "30", "--seed", "4", "--dot"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, *argv, "--out", str(a))[0] == 0
    names = {"graph.json", "outcome.json", "schedule.json", "original.dot", "unraveled.dot", "network.dot"}
    assert names <= {p.name for p in a.iterdir()}
    manifest = json.loads((a / "manifest.json").read_text())
    assert set(manifest["outputs"]) == names
    for name, digest in manifest["outputs"].items():
        assert file_sha256(a / name) == digest
    # re-run from the recorded command line
    assert run(capsys, *manifest["command"], "--out", str(b))[0] == 0
    again = json.loads((b / "manifest.json").read_text())
    assert again["outputs"] == manifest["outputs"]
    assert again["master_seed"] == 4


def test_succprob_two_node_demo(capsys, tmp_path):
    code, out, err = run(capsys, "succprob", "star:4", "--cmax", "20", "--target", "0.9", "--fixed", "5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["c"] == "2" and float(rows[0]["cmf"]) == 0.5
    assert int(rows[-1]["c"]) == 20
    assert err.strip().splitlines()[-1] == "8"


def test_succprob_target_with_out(capsys, tmp_path):
    code, out, _ = run(capsys, "succprob", "star:4", "--cmax", "20", "--target", "0.9",
                       "--fixed", "5", "--out", str(tmp_path / "d.csv"),
                       "--json", str(tmp_path / "s.json"), "--coefficients")
    assert code == 0 and out.strip() == "8"
    s = json.loads((tmp_path / "s.json").read_text())
    assert s["L"] == 2 and s["coefficients"] == [-1.0, 0.0, 2.0]


def test_succprob_cmax_below_L(capsys):
    code, _, err = run(capsys, "succprob", "star:4", "--cmax", "1", "--fixed", "5")
    assert code == 3
    assert "L=2" in err


def test_succprob_from_outcome(capsys, tmp_path):
    assert run(capsys, "optimize", "star:6", "--fixed", "5", "--out", str(tmp_path))[0] == 0
    code, out, err = run(capsys, "succprob", str(tmp_path / "outcome.json"))
    assert code == 0
    assert "mean=16" in err
    assert run(capsys, "succprob", str(tmp_path / "schedule.json"))[0] == 3


def test_succprob_rejects_fusion_measure(capsys, tmp_path):
    run(capsys, "optimize", "star:6", "--fixed", "5", "--measure", "fusions", "--out", str(tmp_path))
    assert run(capsys, "succprob", str(tmp_path / "outcome.json"))[0] == 3


def test_sweep_rows(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--vertices", "12", "--ratios", "0.6", "--p-succ", "0.5",
                     "--samples", "10", "--strategies", "full,s1,s2", "--fixed", "3", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 30
    assert list(rows[0]) == SWEEP_FIELDS
    assert {r["strategy"] for r in rows} == {"full", "s1", "s2"}
    # each sample uses one graph for all strategies
    assert len({(r["sample"], r["num_edges"]) for r in rows}) == 10


def test_sweep_skips_infeasible(capsys, caplog):
    code, out, _ = run(capsys, "sweep", "--vertices", "4", "--ratios", "0.05,1.0",
                         "--samples", "1", "--strategies", "full", "--fixed", "2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["ratio"] for r in rows] == ["1.0"]
    assert "infeasible" in caplog.text


def test_sweep_bad_strategy(capsys):
    assert run(capsys, "sweep", "--strategies", "full,s9", "--fixed", "1")[0] == 3


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "fusegraph", "optimize", "star:6", "--fixed", "2"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and "Q_opt=16" in r.stdout
