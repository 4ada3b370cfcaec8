import csv
import json
import math

import numpy as np
import pytest

from bjjmix import Mode, ModelParams, critical_lambda, io
from bjjmix.cli import main
from bjjmix.equilibria import omega_squared
from bjjmix.modeparams import SpatialModes
from bjjmix.sweep import evaluate_node, grid_nodes, run_sweep


def run(*argv):
    return main([str(a) for a in argv])


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def write_config(path, d):
    path.write_text(json.dumps(d))
    return path


def test_simulate_josephson(tmp_path):
    assert run("simulate", "--lambda", 0.6, "--ratio", 2.13, "--set", "initial.Z_a=0.1",
               "--set", "initial.Z_b=0.1", "-o", tmp_path) == 0
    with open(tmp_path / "run_trajectory.csv") as fh:
        assert fh.readline() == "t,Z_a,Z_b,phi_a,phi_b,H\n"
        first = fh.readline().split(",")
    assert all(len(v.split("e")[0].replace("-", "").replace(".", "")) >= 15 for v in first)
    summary = json.loads((tmp_path / "run_summary.json").read_text())
    assert summary["phase_class"] == "ZeroPhase"
    assert summary["trapping"] == "Oscillatory"
    assert summary["label"]["trapping"] == "Oscillatory"


def test_simulate_fixed_point(tmp_path):
    assert run("simulate", "--lambda", 1.0, "--ratio", 2.13, "-o", tmp_path) == 0
    for r in rows(tmp_path / "run_trajectory.csv"):
        assert abs(float(r["Z_a"])) < 1e-12 and abs(float(r["Z_b"])) < 1e-12


def test_simulate_pi_mqst(tmp_path):
    cfg = write_config(tmp_path / "c.json", {
        "model": {"Lambda": 0.8, "ratio": 2.13},
        "initial": {"Z_a": 0.1, "Z_b": 0.1, "phi_a": math.pi, "phi_b": math.pi},
        "output": {"dir": str(tmp_path / "out")}})
    assert run("simulate", "-c", cfg) == 0
    summary = json.loads((tmp_path / "out" / "run_summary.json").read_text())
    assert summary["trapping"] == "MQST_Coexisting"
    assert summary["phase_class"] == "PiPhase"


def test_classify_existing_file(tmp_path):
    run("simulate", "--lambda", 1.8, "--ratio", 2.13, "--set", "initial.Z_a=0.1", "--set", "initial.Z_b=0.09",
        "-o", tmp_path)
    out = tmp_path / "label.json"
    assert run("classify", "--lambda", 1.8, "--ratio", 2.13, tmp_path / "run_trajectory.csv", "--output", out) == 0
    from_file = json.loads(out.read_text())
    direct = json.loads((tmp_path / "run_summary.json").read_text())
    assert from_file["trapping"] == direct["trapping"] == "MQST_Separated"
    assert from_file["label"] == direct["label"]


def test_flags_override_config(tmp_path):
    cfg = write_config(tmp_path / "c.json", {"model": {"Lambda": 0.6, "ratio": 2.13},
                                             "integrator": {"t_end": 100.0}})
    assert run("simulate", "-c", cfg, "--t-end", 5, "-o", tmp_path) == 0
    assert float(rows(tmp_path / "run_trajectory.csv")[-1]["t"]) == 5.0


def test_exit_codes(tmp_path, capsys):
    assert run("simulate", "--set", "model.f_a=0.7", "-o", tmp_path) == 2
    assert run("simulate", "-c", tmp_path / "missing.json") == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("simulate", "-c", bad) == 2
    assert run("simulate", "--set", "initial.Z_a=0.5", "--set", "integrator.pole_margin=0.6", "-o", tmp_path) == 3
    assert "pole" in capsys.readouterr().err


def test_fixed_points_symmetric(tmp_path):
    assert run("fixed-points", "--lambda", 2.0, "--ratio", 2.13, "-o", tmp_path) == 0
    recs = json.loads((tmp_path / "run_fixed_points.json").read_text())
    nontrivial = [r for r in recs if r["branch"] != "trivial"]
    assert len(nontrivial) == 4
    assert {r["mode"] for r in nontrivial} == {"zero", "pi"}
    assert sorted(r["branch"] for r in recs if r["mode"] == "zero") == ["minus_plus", "plus_minus", "trivial"]
    assert all(r["residual"] < 1e-10 for r in recs)
    assert all(r["frequencies"] == "unstable" for r in recs if r["branch"] == "trivial")


def test_fixed_points_subcritical(tmp_path):
    assert run("fixed-points", "--lambda", 0.5, "--ratio", 2.13, "--mode", "zero", "-o", tmp_path) == 0
    recs = json.loads((tmp_path / "run_fixed_points.json").read_text())
    assert len(recs) == 1 and recs[0]["branch"] == "trivial" and recs[0]["stable"]


def test_fixed_points_asymmetric(tmp_path):
    assert run("fixed-points", "--lambda", 3.0, "--ratio", 2.13, "--set", "model.K_a=2.0", "-o", tmp_path) == 0
    recs = json.loads((tmp_path / "run_fixed_points.json").read_text())
    nontrivial = [r for r in recs if r["branch"] != "trivial"]
    assert len(nontrivial) == 4 and all(r["asymmetric"] for r in nontrivial)


def stability_grid_config(tmp_path, n=101, lab=1.0):
    return {"model": {"Lambda_ab": lab},
            "sweep": {"axes": [{"name": "Lambda_a", "start": -2, "stop": 4, "count": n},
                               {"name": "Lambda_b", "start": -2, "stop": 4, "count": n}], "R": 1.0},
            "output": {"dir": str(tmp_path)}}


def test_phase_diagram_boundaries(tmp_path):
    cfg = write_config(tmp_path / "pd.json", stability_grid_config(tmp_path))
    assert run("phase-diagram", "-c", cfg) == 0
    table = rows(tmp_path / "run_phase_diagram.csv")
    assert len(table) == 101 * 101
    La = np.array([float(r["axis1"]) for r in table]).reshape(101, 101)
    Lb = np.array([float(r["axis2"]) for r in table]).reshape(101, 101)
    assert np.all(La[:, 0] == np.linspace(-2, 4, 101)) and np.all(Lb[0] == np.linspace(-2, 4, 101))
    h = 6 / 100
    for col, mode in (("zero_stable", Mode.ZERO), ("pi_stable", Mode.PI)):
        grid = np.array([int(r[col]) for r in table]).reshape(101, 101)
        # every change between neighbouring nodes must straddle a zero of omega^2
        for axis in (0, 1):
            flips = np.argwhere(np.diff(grid, axis=axis) != 0)
            assert len(flips) > 0
            for i, j in flips:
                a0, b0 = La[i, j], Lb[i, j]
                ts = np.linspace(0, h, 41)
                pa, pb = (a0 + ts, b0 + 0 * ts) if axis == 0 else (a0 + 0 * ts, b0 + ts)
                wp, wm = omega_squared(1, 1, 0.5, 0.5, pa, pb, 1.0, mode)
                assert np.any(np.diff(np.sign(wm)) != 0) or np.any(np.diff(np.sign(wp)) != 0)


def test_phase_diagram_single_node(tmp_path):
    d = stability_grid_config(tmp_path, n=1)
    cfg = write_config(tmp_path / "pd.json", d)
    assert run("phase-diagram", "-c", cfg) == 0
    assert len((tmp_path / "run_phase_diagram.csv").read_text().splitlines()) == 2


def test_phase_diagram_lambda_sweep_flip(tmp_path):
    d = {"sweep": {"axes": [{"name": "Lambda", "start": 1.5, "stop": 2.0, "count": 51}], "ratio": 2.13},
         "output": {"dir": str(tmp_path)}}
    assert run("phase-diagram", "-c", write_config(tmp_path / "pd.json", d)) == 0
    table = rows(tmp_path / "run_phase_diagram.csv")
    z = [int(r["zero_stable"]) for r in table]
    k = z.index(0)
    assert all(z[:k]) and not any(z[k:])
    Lc = critical_lambda(ModelParams(), Mode.ZERO, 2.13)
    assert float(table[k - 1]["axis1"]) < Lc < float(table[k]["axis1"])
    assert abs(float(table[k]["axis1"]) - 1.76991) <= 0.01


def test_phase_diagram_deterministic(tmp_path, monkeypatch):
    d = stability_grid_config(tmp_path, n=21)
    cfg = write_config(tmp_path / "pd.json", d)
    run("phase-diagram", "-c", cfg, "-o", tmp_path / "one", "--workers", 1)
    monkeypatch.setenv("BJJMIX_THREADS", "2")
    run("phase-diagram", "-c", cfg, "-o", tmp_path / "two")
    a = (tmp_path / "one" / "run_phase_diagram.csv").read_bytes()
    assert a == (tmp_path / "two" / "run_phase_diagram.csv").read_bytes()


def test_sweep_isolation():
    cfg = io.config_from_dict({
        "model": {"Lambda": 2.0, "ratio": 2.13}, "integrator": {"t_end": 100.0},
        "sweep": {"axes": [{"name": "Lambda", "start": 1.6, "stop": 2.4, "count": 3},
                           {"name": "Z_a", "start": 0.05, "stop": 0.15, "count": 2}],
                  "ratio": 2.13, "classify": True}})
    full = run_sweep(cfg, workers=1)
    assert [r.values for r in full] == grid_nodes(cfg)
    for r in full[::2]:
        assert evaluate_node(cfg, r.values) == r


def test_sweep_axis_must_exist():
    with pytest.raises(io.ConfigError):
        io.config_from_dict({"sweep": {"axes": [{"name": "nope", "start": 0, "stop": 1, "count": 2}]}})
    with pytest.raises(io.ConfigError):
        io.config_from_dict({"sweep": {"axes": [{"name": "K_a", "start": 0, "stop": 1, "count": 0}]}})


def test_config_round_trip(tmp_path):
    d = {"model": {"Lambda_a": 0.1, "Lambda_b": 0.7, "Lambda_ab": 1 / 3, "C_a": 1e-3, "tunneling": "variable"},
         "initial": {"Z_a": 0.1, "phi_b": math.pi},
         "sweep": {"axes": [{"name": "K_a", "start": 0.5, "stop": 1.5, "count": 3}], "R": None}}
    cfg = io.config_from_dict(d)
    again = io.config_from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
    io.dump_json(cfg.to_dict(), tmp_path / "a.json")
    io.dump_json(io.load_config(tmp_path / "a.json").to_dict(), tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_trajectory_file_round_trip(tmp_path):
    from bjjmix import IntegratorConfig, State, integrate
    p = ModelParams.symmetric(0.6)
    tr = integrate(p, State(0.1, 0.05, 0.2, 0.0), IntegratorConfig(t_end=5.0))
    io.write_trajectory(tr, tmp_path / "t.csv")
    back = io.read_trajectory(tmp_path / "t.csv", p)
    assert np.array_equal(back.states, tr.states) and np.array_equal(back.times, tr.times)


X = np.linspace(0.0, 1.0, 2001)
STEP = np.where(X < 0.5, 1.0, -1.0)
MODE_EXAMPLES = {
    "box": SpatialModes(X, np.ones_like(X), STEP, np.zeros_like(X), np.zeros_like(X)),
    "identical": SpatialModes(X, np.ones_like(X), np.ones_like(X), np.ones_like(X), STEP, gbar_ab=0.3),
    "absent_b": SpatialModes(X, np.ones_like(X), STEP, np.zeros_like(X), np.zeros_like(X), gbar_a=1.7,
                             deltaE_a=0.25, f_a=0.4, f_b=0.6),
}


@pytest.mark.parametrize("name", sorted(MODE_EXAMPLES))
def test_mode_params_round_trip(tmp_path, name):
    m = MODE_EXAMPLES[name]
    io.write_modes(m, tmp_path / "m.txt")
    assert io.read_modes(tmp_path / "m.txt") == m
    io.write_modes(io.read_modes(tmp_path / "m.txt"), tmp_path / "m2.txt")
    assert (tmp_path / "m.txt").read_bytes() == (tmp_path / "m2.txt").read_bytes()
    assert run("mode-params", tmp_path / "m.txt", "-o", tmp_path) == 0
    model = json.loads((tmp_path / "modes_model.json").read_text())
    cfg = io.config_from_dict(model)
    io.dump_json({"model": cfg.model.to_dict()}, tmp_path / "again.json")
    assert (tmp_path / "again.json").read_bytes() == (tmp_path / "modes_model.json").read_bytes()
    two = json.loads((tmp_path / "modes_two_mode.json").read_text())["two_mode_params"]
    assert two["Lambda_a"] == model["model"]["Lambda_a"]


def test_mode_params_bad_norm(tmp_path, capsys):
    m = SpatialModes(X, 1.01 * np.ones_like(X), STEP, np.zeros_like(X), np.zeros_like(X))
    io.write_modes(m, tmp_path / "m.txt")
    assert run("mode-params", tmp_path / "m.txt") == 2
    assert "1.0201" in capsys.readouterr().err
