import json
import subprocess
import sys

import pytest

from chaodelone import io
from chaodelone.cli import main
from chaodelone.delone import Box, WindowedPointSet


def run(*argv):
    try:
        return main(list(argv))
    except SystemExit as e:
        return e.code


def load(path):
    return json.loads(open(path).read())


def test_surface_validate(tmp_path):
    out = tmp_path / "v.json"
    assert run("surface", "validate", "--out", str(out)) == 0
    doc = load(out)
    assert doc["verdict"] == "pass"
    assert max(doc["data"]["vertex_cycle_residuals"]) < 1e-8
    assert doc["data"]["orbit_sizes"] == [3, 3, 6]


def test_surface_solve_round_trip(tmp_path):
    out = tmp_path / "g.json"
    assert run("surface", "solve", "--out", str(out)) == 0
    g = io.load_surface(out)
    assert abs(g.mu - 1.6283069774000263) < 1e-12


def test_unknown_subcommand():
    assert run("frobnicate") == 1
    assert run("surface", "explode") == 1


def test_rubber_identical(tmp_path):
    p = tmp_path / "z.json"
    io.save_pointset(p, WindowedPointSet.lattice(Box.cube(30), 1.0))
    out = tmp_path / "r.json"
    assert run("analyze", "rubber", str(p), str(p), "--r-max", "20", "--out", str(out)) == 0
    assert load(out)["data"]["proximity"] == 20.0


def test_cutproject_then_delone(tmp_path):
    ps = tmp_path / "ps.json"
    assert run("cutproject", "run", "--seed", "1", "--window", "-20,20", "--out", str(ps)) == 0
    rep = tmp_path / "rep.json"
    code = run("analyze", "delone", str(ps), "--eps", "10", "--delta", "0.16", "--out", str(rep))
    doc = load(rep)
    assert code == 0 and doc["data"]["report"]["separated_ok"]


def test_deterministic_output(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run("cutproject", "run", "--seed", "3", "--window", "-10,10", "--out", str(p)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_condition_violation_exit_code(tmp_path):
    assert run("chaos", "conditions", "--rho", "1.8", "--out", str(tmp_path / "c.json")) == 2
    assert load(tmp_path / "c.json")["verdict"] == "fail_A"


def test_budget_exit_code(tmp_path):
    assert run("orbit", "ball", "--radius", "8", "--budget-elements", "100",
               "--out", str(tmp_path / "o.json")) == 3


def test_bad_policy_env(monkeypatch, tmp_path):
    monkeypatch.setenv("CHAODELONE_NUMERIC", '{"nonsense": 1}')
    assert run("surface", "validate", "--out", str(tmp_path / "v.json")) == 1


def test_malformed_input_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"schema": "pointset"}')
    assert run("analyze", "delone", str(p), "--eps", "1", "--delta", "1") == 1


def test_vq_and_chaotify(tmp_path):
    out = tmp_path / "vq.json"
    assert run("euclid", "vq", "--q", "2", "--alpha", "0.2", "--out", str(out)) == 0
    z = tmp_path / "z.json"
    io.save_pointset(z, WindowedPointSet.lattice(Box.cube(40), 1.0, params=(1.0, 1.0)))
    ch = tmp_path / "ch.json"
    assert run("euclid", "chaotify", str(z), "--m", "2", "--m-prime", "1", "--l", "1",
               "--eps", "1", "--delta", "1", "--out", str(ch)) == 0
    S = io.load_pointset(ch)
    assert len(S) > 0


def test_render_command(tmp_path):
    out = tmp_path / "fig.svg"
    assert run("render", "--seed", "0", "--out", str(out)) == 0
    assert out.read_text().startswith("<svg")


def test_console_entry_point(tmp_path):
    out = tmp_path / "v.json"
    proc = subprocess.run([sys.executable, "-m", "chaodelone.cli", "surface", "validate", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert load(out)["verdict"] == "pass"
