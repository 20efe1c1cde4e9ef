import json

import numpy as np
import pytest

from geps.cli import main
from geps.config import ConfigError, parse_config
from geps.integrate import Trajectory
from geps.runner import Model, Table, emit_trajectory, read_csv, simulate, tabulate

SLEIGH = {"model": "sleigh_reduced",
          "inertia": {"J": 1, "L1": 0, "L2": 0, "M": 1, "Z": 0, "N": 1},
          "circulation": {"rho": 1, "alpha": 1}}

COUPLED = {"model": "sleigh_reduced",
       "inertia": {"J": 2, "L1": 0.5, "L2": 0.2, "M": 1, "Z": 0.3, "N": 2},
       "circulation": {"rho": 1, "alpha": 1}}


def write(tmp_path, doc, name="c.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_minimal_config_valid():
    cfg = parse_config(json.dumps(SLEIGH))
    assert cfg.model == "sleigh_reduced" and cfg.inertia.J == 1 and cfg.circ.alpha == 1
    assert cfg.integrator.method == "rk4" and cfg.integrator.h == 1e-3


def test_config_errors():
    bad = dict(SLEIGH, inertia=dict(SLEIGH["inertia"], M=-1))
    with pytest.raises(ConfigError, match="inertia not positive definite"):
        parse_config(json.dumps(bad))
    with pytest.raises(ConfigError, match="gamma"):
        parse_config(json.dumps(dict(SLEIGH, gamma=1)))
    with pytest.raises(ConfigError, match=r"\$\.circulation: unknown key.*'gamma'"):
        parse_config(json.dumps(dict(SLEIGH, circulation={"rho": 1, "gamma": 2})))
    with pytest.raises(ConfigError, match=r"\$\.integrator\.h"):
        parse_config(json.dumps(dict(SLEIGH, integrator={"h": "big"})))
    with pytest.raises(ConfigError, match="requires 'inertia'"):
        parse_config(json.dumps({"model": "kirchhoff"}))
    with pytest.raises(ConfigError, match="heisenberg"):
        parse_config(json.dumps({"model": "heisenberg"}))
    with pytest.raises(ConfigError, match="expected 2 components"):
        parse_config(json.dumps(dict(SLEIGH, initial={"state": [1, 2, 3]})))
    with pytest.raises(ConfigError, match="invalid JSON"):
        parse_config("{")


def test_body_plus_added_config():
    doc = {"model": "kirchhoff", "body": {"m": 1, "I_cm": 1}, "added": np.diag([1.0, 2, 3]).tolist()}
    cfg = parse_config(json.dumps(doc))
    assert (cfg.inertia.J, cfg.inertia.M, cfg.inertia.N) == (2, 3, 4)


def test_velocity_initial_condition():
    doc = {"model": "sleigh_full", "inertia": COUPLED["inertia"], "circulation": COUPLED["circulation"],
           "initial": {"velocity": [0.3, 0.2, 0.0]}}
    cfg = parse_config(json.dumps(doc))
    assert np.allclose(np.linalg.solve(cfg.inertia.matrix, cfg.state0), (0.3, 0.2, 0))


def test_emit_csv_constant_trajectory():
    model = Model(lambda x: 0 * x, ("a",), {})
    traj = Trajectory(np.arange(3.0), np.full((3, 1), 1 / 3), {})
    text = emit_trajectory(tabulate(model, traj), "csv")
    lines = text.splitlines()
    assert len(lines) == 4 and lines[0] == "t,a"
    assert lines[1].split(",")[1] == format(1 / 3, ".17g")
    assert float(lines[1].split(",")[1]) == 1 / 3


def test_json_round_trip(rng):
    table = Table(["t", "x"], rng.uniform(-1, 1, (5, 2)))
    recs = json.loads(emit_trajectory(table, "json"))
    assert [[r["t"], r["x"]] for r in recs] == table.rows.tolist()
    back = read_csv(emit_trajectory(table, "csv"))
    assert np.array_equal(back.rows, table.rows)


def test_sleigh_full_columns():
    doc = {"model": "sleigh_full", "inertia": COUPLED["inertia"], "circulation": COUPLED["circulation"],
           "initial": {"velocity": [0.3, 0.2, 0.0]}, "integrator": {"t_final": 1.0}}
    table = simulate(parse_config(json.dumps(doc)))
    assert table.columns == ["t", "k", "p1", "p2", "omega", "v1", "H", "v2", "theta", "x", "y"]
    assert np.max(np.abs(table.rows[:, table.columns.index("v2")])) <= 1e-12


@pytest.mark.parametrize("model,cols", [
    ("kirchhoff", ["t", "k", "p1", "p2", "H"]),
    ("chaplygin_lamb", ["t", "k", "p1", "p2", "sigma0", "sigma1", "sigma2", "H", "Fbar"]),
    ("sleigh_reduced", ["t", "omega", "v1", "H", "theta", "x", "y"]),
])
def test_model_columns(model, cols):
    n = 2 if model == "sleigh_reduced" else 3
    doc = dict(COUPLED, model=model, initial={"state": [0.1] * n}, integrator={"t_final": 0.5})
    assert simulate(parse_config(json.dumps(doc))).columns == cols


def test_heisenberg_simulation():
    doc = {"model": "heisenberg", "heisenberg": {"mass": 1, "charge": 1, "field": 1},
           "initial": {"state": [1, 0]}, "integrator": {"t_final": 2 * np.pi}}
    table = simulate(parse_config(json.dumps(doc)))
    assert table.columns == ["t", "p1", "p2", "H"]
    assert np.allclose(table.rows[-1, 1:3], (1, 0), atol=1e-6)


def test_cli_simulate_and_determinism(tmp_path, capsys):
    cfg = write(tmp_path, dict(SLEIGH, initial={"state": [0, 1]}, integrator={"t_final": 1.0}))
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "-c", cfg, "-o", str(out1)]) == 0
    assert main(["simulate", "-c", cfg, "-o", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_text().splitlines()[0] == "t,omega,v1,H,theta,x,y"
    assert main(["simulate", "-c", cfg]) == 0
    assert capsys.readouterr().out.startswith("t,omega,v1")
    jpath = tmp_path / "a.json"
    assert main(["simulate", "-c", cfg, "-o", str(jpath)]) == 0
    assert json.loads(jpath.read_text())[0]["v1"] == 1.0


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["simulate", "-c", str(tmp_path / "missing.json")]) == 2
    assert main(["simulate", "-c", write(tmp_path, dict(SLEIGH, gamma=1))]) == 2
    assert "gamma" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    assert main(["portrait", "-c", write(tmp_path, SLEIGH), "-d", str(tmp_path / "o")]) == 2


def test_cli_verify(capsys):
    assert main(["verify", "--samples", "10"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "all" in out
    assert main(["verify", "--samples", "10", "--seed", "3", "--inject-corrupt"]) == 1
    out = capsys.readouterr().out
    assert "FAIL  jacobi.lp_extended" in out


def test_cli_measure(tmp_path, capsys):
    doc = dict(COUPLED, inertia={"J": 2, "L1": 0, "L2": 0.3, "M": 2, "Z": 0, "N": 2})
    assert main(["measure", "-c", write(tmp_path, doc), "--grid", "-1", "1", "-1", "1", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("Z,L1,exists_base,exists_extended,c,residual")
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 9
    for r in rows:
        assert r[2] == r[3]
        assert (r[2] == "true") == (float(r[0]) == 0 and float(r[1]) == 0)
    (hit,) = [r for r in rows if r[2] == "true"]
    assert float(hit[4]) == 0


def test_cli_measure_single_point(tmp_path, capsys):
    doc = dict(COUPLED, measure={"Z": [0], "L1": [0]})
    assert main(["measure", "-c", write(tmp_path, doc)]) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert row[2] == "true" and float(row[4]) == 0


def test_cli_equilibria(tmp_path, capsys):
    doc = {"model": "sleigh_reduced", "inertia": {"J": 1, "L1": 1, "L2": 0, "M": 1, "Z": 0, "N": 2},
           "circulation": {"rho": 1, "alpha": -1}, "equilibria": {"span": [-1, 1, 3]}}
    assert main(["equilibria", "-c", write(tmp_path, doc)]) == 0
    out = capsys.readouterr().out
    assert "# h0: 0.5" in out
    body = [line for line in out.splitlines() if not line.startswith("#")][1:]
    assert [line.split(",")[3] for line in body] == ["unstable", "degenerate", "stable"]


def test_cli_portrait_harmonic(tmp_path, capsys):
    doc = dict(SLEIGH, portrait={"grid": {"omega": [0.2, 0.6, 2], "v1": [0.0, 0.0, 1]}, "t_final": 10})
    out = tmp_path / "p"
    assert main(["portrait", "-c", write(tmp_path, doc), "-d", str(out)]) == 0
    assert sorted(f.name for f in out.iterdir()) == ["equilibria.csv", "orbit_000.csv", "orbit_001.csv",
                                                     "separatrix.txt", "summary.csv"]
    assert (out / "equilibria.csv").read_text().splitlines() == ["omega,v1,eigenvalue,class"]
    assert (out / "separatrix.txt").read_text().strip() == "none"
    kinds = [line.split(",")[4] for line in (out / "summary.csv").read_text().splitlines()[1:]]
    assert kinds == ["periodic", "periodic"]


def test_cli_portrait_mixed(tmp_path):
    doc = dict(COUPLED, portrait={"energies": [0.5, 2.0, 4.0], "t_final": 40})
    out = tmp_path / "p"
    assert main(["portrait", "-c", write(tmp_path, doc), "-d", str(out)]) == 0
    rows = [line.split(",") for line in (out / "summary.csv").read_text().splitlines()[1:]]
    kinds = [r[4] for r in rows]
    assert kinds[:2] == ["periodic", "periodic"]
    assert kinds[2:4] == ["separatrix", "separatrix"]
    assert kinds[4:] == ["heteroclinic", "heteroclinic"]
    assert float((out / "separatrix.txt").read_text()) == pytest.approx(2.0, rel=1e-12)
    classes = {line.split(",")[3] for line in (out / "equilibria.csv").read_text().splitlines()[1:]}
    assert {"stable", "unstable"} <= classes
