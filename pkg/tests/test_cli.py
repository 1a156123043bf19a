import json
import math

import pytest

from flamedamp.cli import main
from flamedamp.spectral import DuplicateEigenvalueWarning

RING10 = "".join(f"{i},{(i + 1) % 10},100\n" for i in range(10))


@pytest.fixture
def ring(tmp_path):
    path = tmp_path / "ring.csv"
    path.write_text(RING10)
    return str(path)


@pytest.fixture
def pair(tmp_path):
    path = tmp_path / "pair.csv"
    path.write_text("source,target,weight\n0,1,1\n1,0,1\n")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_safe_pair(capsys, pair):
    code, out, _ = run(capsys, "analyze", pair, "--header", "--gamma0", "2")
    assert code == 0
    data = json.loads(out)
    assert data["safe"] is True
    assert data["d_max"] == 1.0
    assert len(data["modes"]) == 2
    assert [m["mu"] for m in data["modes"]] == [0, 1]


def test_analyze_at_threshold_is_safe(capsys, ring):
    code, out, _ = run(capsys, "analyze", ring, "--gamma0", repr(math.sqrt(200)))
    assert code == 0
    assert json.loads(out)["safe"] is True


def test_analyze_below_threshold_unsafe(capsys, ring):
    code, out, _ = run(capsys, "analyze", ring, "--gamma0", repr(math.sqrt(200) - 5))
    assert code == 3
    data = json.loads(out)
    assert data["safe"] is False and data["worst_margin"] < 0


def test_analyze_csv(capsys, ring, tmp_path):
    dest = tmp_path / "modes.csv"
    code, out, _ = run(capsys, "analyze", ring, "--gamma0", "20", "--format", "csv",
                       "-o", str(dest))
    assert code == 0 and out == ""
    lines = dest.read_text().splitlines()
    assert lines[0] == "mu,re_lambda,im_lambda,r,theta,max_re_exponent,margin,divergent"
    assert len(lines) == 11


def test_analyze_stdin(capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("0,1,1\n1,0,1\n"))
    code, out, _ = run(capsys, "analyze", "-", "--gamma0", "2")
    assert code == 0 and json.loads(out)["safe"]


@pytest.mark.parametrize("gamma1,expected,case", [
    (0.1, math.sqrt(300) - 10, "B"),
    (0.0, math.sqrt(200), "B"),
    (-0.1, math.sqrt(300) + 10, "B"),
])
def test_design(capsys, gamma1, expected, case):
    code, out, _ = run(capsys, "design", "--dmax", "100", "--gamma1", str(gamma1))
    assert code == 0
    data = json.loads(out)
    assert data["gamma0_min"] == pytest.approx(expected, rel=1e-12)
    assert data["case"] == case
    assert data["contained_at_min"] is True


def test_design_from_graph(capsys, ring):
    code, out, _ = run(capsys, "design", ring)
    assert json.loads(out)["gamma0_min"] == pytest.approx(math.sqrt(200))


def test_check_unsafe(capsys):
    code, out, _ = run(capsys, "check", "--dmax", "100", "--gamma0", "9.14")
    assert code == 3
    data = json.loads(out)
    assert data["contained"] is False
    assert data["worst_margin"] < 0
    assert len(data["worst_point"]) == 2


def test_check_safe(capsys):
    code, out, _ = run(capsys, "check", "--dmax", "100", "--gamma0", "7.33", "--gamma1", "0.1")
    assert code == 0 and json.loads(out)["contained"] is True


def test_region_svg(capsys, tmp_path):
    dest = tmp_path / "r.svg"
    code, out, err = run(capsys, "region", "--dmax", "100", "--gamma0", "7.3206",
                         "--gamma1", "0.1", "--format", "svg", "-o", str(dest))
    assert code == 0
    assert json.loads(err)["contained"] is True
    text = dest.read_text()
    assert text.startswith("<svg") or text.startswith("<?xml")
    assert 'class="region"' in text and 'class="disk"' in text


def test_region_rounded_gamma0_below_exact_threshold(capsys):
    # 27.3205 is just under the exact threshold 27.32050808, so the disk test fails.
    code, out, err = run(capsys, "region", "--dmax", "100", "--gamma0", "27.3205",
                         "--gamma1", "-0.1")
    assert code == 3
    assert json.loads(err)["contained"] is False
    assert out.startswith("re,im_bound,in_disk\n")
    assert len(out.splitlines()) == 513


def test_region_csv_deterministic(capsys):
    argv = ["region", "--dmax", "100", "--gamma0", "14.2", "--points", "64"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


@pytest.mark.parametrize("method", ["direct", "modal"])
def test_simulate_safe(capsys, tmp_path, method):
    graph = tmp_path / "g.csv"
    graph.write_text("0,1,1\n1,2,1\n2,0,1\n")
    dest = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "simulate", str(graph), "--gamma0", "3", "--t-end", "5",
                       "--method", method, "-o", str(dest))
    assert code == 0
    data = json.loads(out)
    assert data["divergent"] is False and data["classified_safe"] is True
    header = dest.read_text().splitlines()[0]
    assert header == "t,x_0,x_1,x_2,energy"


def test_simulate_unsafe(capsys, tmp_path):
    graph = tmp_path / "g.csv"
    graph.write_text("0,1,1\n1,2,1\n2,0,1\n")
    code, out, _ = run(capsys, "simulate", str(graph), "--gamma0", "0.1", "--t-end", "40")
    assert code == 3
    data = json.loads(out)
    assert data["divergent"] is True and data["growth_rate"] > 0


def test_simulate_reproducible(capsys, tmp_path):
    graph = tmp_path / "g.csv"
    graph.write_text("0,1,2\n1,0,1\n")
    outputs = []
    for name in ("a.csv", "b.csv"):
        run(capsys, "simulate", str(graph), "--gamma0", "2", "--t-end", "1",
            "--seed", "7", "-o", str(tmp_path / name))
        outputs.append((tmp_path / name).read_bytes())
    assert outputs[0] == outputs[1]


def test_simulate_step_too_large(capsys, ring):
    code, _, err = run(capsys, "simulate", ring, "--gamma0", "20", "--dt", "0.1")
    assert code == 1 and "too large" in err


@pytest.mark.parametrize("content,fragment", [
    ("0,1,-1\n", "line 1"),
    ("0,1,1\nfoo\n", "line 2"),
    ("0,0,1\n", "line 1"),
])
def test_bad_graph(capsys, tmp_path, content, fragment):
    graph = tmp_path / "bad.csv"
    graph.write_text(content)
    code, _, err = run(capsys, "analyze", str(graph), "--gamma0", "1")
    assert code == 1 and fragment in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", str(tmp_path / "nope.csv"), "--gamma0", "1")
    assert code == 1 and "cannot read" in err


@pytest.mark.parametrize("argv", [
    ["check", "--dmax", "100"],
    ["check", "--dmax", "-1", "--gamma0", "1"],
    ["check", "--dmax", "100", "--gamma0", "-1"],
    ["design"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err.startswith("error:")


def test_ill_conditioned_basis(capsys, tmp_path):
    # A directed path is defective: its Laplacian has no eigenbasis.
    graph = tmp_path / "path.csv"
    graph.write_text("0,1,1\n1,2,1\n")
    with pytest.warns(DuplicateEigenvalueWarning):
        code, _, err = run(capsys, "simulate", str(graph), "--gamma0", "2", "--method", "modal",
                           "--t-end", "1")
    assert code == 2 and "condition" in err


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "flamedamp", "design", "--dmax", "100"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["gamma0_min"] == pytest.approx(math.sqrt(200))
