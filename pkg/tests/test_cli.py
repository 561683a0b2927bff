import json

import pytest

from matsolve import cli
from matsolve.errors import NoConvergence, ParseError
from matsolve.instances import random_instance
from matsolve.syscount import word_spec
from matsolve.exactalg import RatMatrix


def run_cli(capsys, *argv):
    status = cli.main(list(argv))
    out = capsys.readouterr().out
    return status, out


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_unknown_command_rejected(capsys):
    status, out = run_cli(capsys, "frobnicate")
    assert status == 2
    assert json.loads(out)["error"]["type"] == "ParseError"
    with pytest.raises(ParseError):
        cli.RunConfig("frobnicate")


def test_random_instance_is_byte_identical(capsys, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for path in (a, b):
        status, _ = run_cli(capsys, "random-instance", "--shape", "unilateral", "--n", "2", "--k", "2", "--seed", "7", "--output", str(path))
        assert status == 0
    assert a.read_bytes() == b.read_bytes()


def test_count_bundled_riccati(capsys):
    status, out = run_cli(capsys, "count", "--input", "bundled:riccati_2x2")
    rep = json.loads(out)
    assert status == 0
    assert rep["count"]["nu"] == 6 and rep["method"] == "groebner"
    assert rep["digest"].startswith("sha256:")
    assert all(s["verified_residual"] <= 1e-8 for s in rep["solutions"])


@pytest.mark.parametrize("method", ["hamiltonian", "reduction"])
def test_solve_riccati(capsys, tmp_path, method):
    path = write(tmp_path, "r.json", random_instance("riccati", 2, seed=4).dumps())
    status, out = run_cli(capsys, "solve-riccati", "--input", path, "--method", method)
    rep = json.loads(out)
    assert status == 0 and len(rep["solutions"]) == 6
    for s in rep["solutions"]:
        assert s["residual"] <= 1e-8 and s["verified_residual"] <= 1e-8
        assert set(s["x"][0][0]) == {"re", "im"}


def test_solve_unilateral_from_coeffs(capsys, tmp_path):
    inst = random_instance("unilateral", 2, 3, seed=1)
    coeffs = [m.to_json() for m in inst.coefficient_list()]
    path = write(tmp_path, "u.json", {"coeffs": coeffs})
    status, out = run_cli(capsys, "solve-unilateral", "--input", path)
    rep = json.loads(out)
    assert status == 0 and len(rep["solutions"]) == 15


def test_solve_commuting_and_symmetric(capsys, tmp_path):
    path = write(tmp_path, "c.json", random_instance("commuting", 2, 3, seed=1).dumps())
    status, out = run_cli(capsys, "solve-commuting", "--input", path)
    assert status == 0 and len(json.loads(out)["solutions"]) == 9
    path = write(tmp_path, "s.json", random_instance("symmetric", 3, seed=1).dumps())
    status, out = run_cli(capsys, "solve-symmetric", "--input", path)
    assert status == 0 and len(json.loads(out)["solutions"]) == 8


def test_families(capsys, tmp_path):
    path = write(tmp_path, "t.json", random_instance("binome", 3, seed=0).dumps())
    status, out = run_cli(capsys, "families", "--input", path)
    rep = json.loads(out)
    assert status == 0
    assert rep["top_stratum"] == {"dimension": 2, "components": 6}


def test_jacobian_command(capsys, tmp_path):
    spec = word_spec(2, ["XX", "DX"], {"D": RatMatrix.diag([2, -1])})
    path = write(tmp_path, "j.json", {"equation": spec.to_json(), "point": [["-1", "1/3"], ["0", "2"]]})
    status, out = run_cli(capsys, "jacobian", "--input", path)
    rep = json.loads(out)
    assert status == 0 and rep["singular"] and rep["determinant"] == "0"
    assert rep["jacobian"][1] == ["1/3", "3", "0", "1/3"]


def test_fixtures_command(capsys, monkeypatch):
    monkeypatch.setenv("MATSOLVE_THREADS", "2")
    status, out = run_cli(capsys, "fixtures")
    rep = json.loads(out)
    assert status == 0 and rep["all_passed"]
    assert len(rep["fixtures"]) == 11


def test_parse_error_exit_code(capsys, tmp_path):
    path = write(tmp_path, "bad.json", "{not json")
    status, out = run_cli(capsys, "count", "--input", path)
    assert status == 2 and json.loads(out)["error"]["exit_code"] == 2


def test_not_generic_exit_code(capsys, tmp_path):
    # X^2 = I as a unilateral polynomial: phi has repeated roots
    path = write(tmp_path, "ng.json", {"coeffs": [[["-1", "0"], ["0", "-1"]], [["0", "0"], ["0", "0"]], [["1", "0"], ["0", "1"]]]})
    status, out = run_cli(capsys, "solve-unilateral", "--input", path)
    err = json.loads(out)["error"]
    assert status == 3 and err["type"] == "NotGeneric" and err["check"] == "repeated_roots"


def test_budget_exit_code(capsys):
    status, out = run_cli(capsys, "count", "--input", "bundled:riccati_2x2", "--pair-budget", "1")
    assert status == 4 and json.loads(out)["error"]["type"] == "BudgetExceeded"


def test_no_convergence_exit_code(capsys, monkeypatch):
    def boom(cfg, data):
        raise NoConvergence("stalled", residuals=[1.0])

    monkeypatch.setitem(cli.HANDLERS, "count", boom)
    status, out = run_cli(capsys, "count", "--input", "bundled:riccati_2x2")
    assert status == 5 and json.loads(out)["error"]["residuals"] == [1.0]


def test_bad_tolerance_and_threads(capsys, monkeypatch):
    status, _ = run_cli(capsys, "count", "--input", "bundled:riccati_2x2", "--tol-root", "-1")
    assert status == 2
    monkeypatch.setenv("MATSOLVE_THREADS", "many")
    status, _ = run_cli(capsys, "fixtures")
    assert status == 2


def test_report_is_deterministic_modulo_timings(capsys):
    reps = []
    for _ in range(2):
        _, out = run_cli(capsys, "count", "--input", "bundled:riccati_2x2")
        rep = json.loads(out)
        rep.pop("timings")
        reps.append(rep)
    assert reps[0] == reps[1]
