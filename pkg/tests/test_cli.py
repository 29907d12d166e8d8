import json
import math

import pytest

from suslov.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, main, worker_count


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def test_classify_identity(tmp_path, capsys):
    path = write(tmp_path, "t.json", {"I11": 1, "I22": 1, "I33": 1})
    code, out, _ = run(capsys, "classify", "--tensor", path)
    assert code == EXIT_OK
    assert json.loads(out)["verdict"]["case"] == "Degenerate_Axis"


def test_classify_case1(tmp_path, capsys):
    from suslov.model import inertia_from_p

    path = write(tmp_path, "t.json", inertia_from_p(3, 2.0, 1.0, 1.5).to_dict())
    code, out, _ = run(capsys, "classify", "--tensor", path)
    v = json.loads(out)["verdict"]
    assert code == EXIT_OK and v["case"] == "Case1_I13zero" and v["p"] == pytest.approx(3)


def test_malformed_json_exits_2(tmp_path, capsys):
    path = write(tmp_path, "bad.json", "{not json")
    code, _, err = run(capsys, "classify", "--tensor", path)
    assert code == EXIT_VALIDATION and "malformed" in err


def test_unknown_command_exits_2(capsys):
    assert run(capsys, "frobnicate")[0] == EXIT_VALIDATION


def test_angle_formula(capsys):
    code, out, _ = run(capsys, "angle", "--p", "1", "--d", "0.5")
    assert code == EXIT_OK and json.loads(out)["delta_psi_rad"] == math.pi


def test_angle_short_horizon_is_validation_error(capsys):
    assert run(capsys, "angle", "--p", "1", "--d", "0.5", "--numeric", "--T", "10")[0] == EXIT_VALIDATION


def test_angle_numerical_failure_exits_3(capsys):
    code, _, err = run(capsys, "angle", "--p", "0.3", "--d", "3", "--numeric", "--T", "20", "--tol", "1e-12")
    assert code == EXIT_NUMERICAL and "numerical failure" in err


def test_galois(capsys):
    code, out, _ = run(capsys, "galois", "--p", "2")
    data = json.loads(out)
    assert code == EXIT_OK and data["verdict"]["verdict"] == "NotLiouvillian_EvenP"
    assert data["degree_candidates"] == [-2, -4, -6]


def test_solutions_gram(capsys):
    code, out, _ = run(capsys, "solutions", "--p", "3", "--d", "0.5", "--gram")
    data = json.loads(out)
    assert code == EXIT_OK and data["max_deviation"] < 1e-12


def test_solutions_even_p_rejected(capsys):
    assert run(capsys, "solutions", "--p", "2", "--d", "0.5")[0] == EXIT_VALIDATION


def test_integrals_rational(capsys):
    code, out, _ = run(capsys, "integrals", "--p", "3", "--d", "1/2")
    data = json.loads(out)
    assert code == EXIT_OK and data["pde_residual_zero"] == [True, True, True]


def test_simulate_csv_backward(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code, _, _ = run(capsys, "simulate", "--p", "1", "--d", "1", "--t0", "0", "--t1", "-2", "--samples", "5", "--format", "csv", "--out", str(out))
    assert code == EXIT_OK
    raw = out.read_bytes()
    lines = raw.split(b"\r\n")
    assert lines[0].startswith(b"t,omega1,omega2")
    assert len(lines) == 7


def test_config_file_and_override(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"p": 2.0, "d": 1.0})
    a = json.loads(run(capsys, "angle", "--config", cfg)[1])
    b = json.loads(run(capsys, "angle", "--config", cfg, "--p", "1")[1])
    assert a["p"] == 2.0 and b["p"] == 1.0


def test_bad_tolerance(capsys):
    assert run(capsys, "simulate", "--p", "1", "--d", "1", "--rel-tol", "1")[0] == EXIT_VALIDATION


def test_deterministic_output(tmp_path, capsys):
    paths = [tmp_path / f"o{i}.json" for i in range(2)]
    for p in paths:
        run(capsys, "solutions", "--p", "5", "--d", "0.7", "--samples", "7", "--out", str(p))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_sweep_order_independent_of_workers(tmp_path, capsys, monkeypatch):
    outs = []
    for n in ("1", "2"):
        monkeypatch.setenv("SUSLOV_THREADS", n)
        path = tmp_path / f"s{n}.csv"
        code, _, _ = run(capsys, "sweep", "--p-list", "1,2,2.5,3", "--d-list", "0.5,1", "--format", "csv", "--out", str(path))
        assert code == EXIT_OK
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    rows = outs[0].decode().split("\r\n")
    assert rows[1].startswith("1,0.5,")


def test_worker_count(monkeypatch):
    monkeypatch.setenv("SUSLOV_THREADS", "1")
    assert worker_count() == 1
    monkeypatch.setenv("SUSLOV_THREADS", "x")
    from suslov.errors import ValidationError

    with pytest.raises(ValidationError):
        worker_count()
