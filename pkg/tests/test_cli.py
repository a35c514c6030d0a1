import json
import shutil
import subprocess

import pytest

from soficlab.cli import main
from soficlab.core import parse_presentation
from soficlab.corpus import fixture_path, graph
from soficlab.presentation import isomorphic


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_period_of_ex_5_4(capsys):
    code, rep = run_json(capsys, "period", "examples/ex_5_4.json")
    assert code == 0 and rep["per"] == 2 and rep["command"] == ["period"]
    assert rep["schema_version"] == 1 and "examples/ex_5_4.json" in rep["inputs"]


def test_report_is_deterministic(capsys):
    _, a = run(capsys, "census", "even", "--nmax", "5")
    _, b = run(capsys, "census", "even", "--nmax", "5")
    assert a == b and "runtime_ms" not in a


def test_timing_flag(capsys):
    _, rep = run_json(capsys, "census", "even", "--nmax", "3", "--timing")
    assert rep["runtime_ms"] >= 0


def test_census_counts(capsys):
    code, rep = run_json(capsys, "census", "even", "--nmax", "5")
    assert code == 0
    assert [rep["table"][str(n)]["q"] for n in range(1, 6)] == [2, 0, 3, 4, 10]


def test_fischer_writes_graph(capsys, tmp_path):
    out = tmp_path / "F.json"
    code, rep = run_json(capsys, "fischer", "g1", "--out", str(out))
    assert code == 0
    assert isomorphic(parse_presentation(out.read_text()), graph("g1_target"))


def test_fischer_dot(capsys):
    code, out = run(capsys, "fischer", "even", "--format", "dot")
    assert code == 0 and out.startswith("digraph") and "->" in out


def test_receptive(capsys):
    _, rep = run_json(capsys, "receptive", "even", "--word", "1")
    assert rep["receptive"] is True
    _, rep = run_json(capsys, "receptive", "even", "--word", "0")
    assert rep["receptive"] is False


@pytest.mark.parametrize("p,code", [(2, 2), (3, 1)])
def test_p_periodic_exit_codes(capsys, p, code):
    c, rep = run_json(capsys, "p-periodic", "ex_5_4", "-p", str(p))
    assert c == code and rep["verdict"] == ["YES", "NO", "UNKNOWN"][code]


def test_components(capsys):
    code, rep = run_json(capsys, "components", "even")
    assert code == 0 and rep["depth"] == 1


@pytest.mark.parametrize("kind,z,y,code", [
    ("s-fact", "point0", "golden_even", 1),
    ("factorizable", "point0", "golden_even", 0),
    ("sft-embed", "golden_sft", "full2", 0),
])
def test_decide_exit_codes(capsys, kind, z, y, code):
    c, rep = run_json(capsys, "decide", kind, z, y, "--audit")
    assert c == code and rep["audit"]["ok"]


@pytest.mark.parametrize("kind,extra", [
    ("receptive-cover", ["--word", "1"]),
    ("ai-sft-cover", ["--word", "1"]),
    ("injective-sub", ["--eps", "0.3"]),
    ("grow", ["--eps", "0.3", "--M", "2"]),
])
def test_forge_commands(capsys, tmp_path, kind, extra):
    out = tmp_path / "cover.json"
    code, rep = run_json(capsys, "forge", kind, "even", *extra, "--out", str(out))
    assert code == 0
    assert parse_presentation(out.read_text()).edges


@pytest.mark.parametrize("kind,graphs,key,value", [
    ("equal", ["even", "even"], "equal", True),
    ("equal", ["even", "golden"], "equal", False),
    ("injective", ["golden_sft"], "injective", True),
    ("f2one", ["even"], "finite_to_one", True),
    ("degree", ["even"], "degree", 1),
])
def test_verify_commands(capsys, kind, graphs, key, value):
    code, rep = run_json(capsys, "verify", kind, *graphs)
    assert code == 0 and rep[key] == value


def test_missing_file_is_error(capsys):
    code, rep = run_json(capsys, "period", "no_such_graph.json")
    assert code == 3 and "error" in rep


def test_bad_json_is_error(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _ = run(capsys, "period", str(p))
    assert code == 3


def test_usage_errors(capsys):
    assert main(["frobnicate"]) == 64
    assert main(["p-periodic", "even"]) == 64
    capsys.readouterr()


def test_forge_missing_word_is_usage(capsys):
    assert main(["forge", "receptive-cover", "even"]) == 64
    capsys.readouterr()


def test_precondition_is_error(capsys):
    code, rep = run_json(capsys, "decide", "sft-embed", "point0", "even")
    assert code == 3


def test_reads_real_file(capsys):
    code, rep = run_json(capsys, "period", str(fixture_path("golden_even")))
    assert code == 0 and rep["per"] == 1


@pytest.mark.skipif(shutil.which("soficlab") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["soficlab", "period", "even"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["per"] == 1
