import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from tournament_powers.certificate import Certificate, verify_certificate
from tournament_powers.cli import (
    EXIT_INFEASIBLE,
    EXIT_NOT_FOUND,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY,
    analyze,
    main,
    parse_tournament,
    read_tournament,
    render_tournament,
)
from tournament_powers.construct import paley, random_tournament, transitive_tournament
from tournament_powers.core import InputError

from strategies import tournaments


def write(tmp_path, T, name="t.txt"):
    path = tmp_path / name
    path.write_text(render_tournament(T))
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


# --- file format ----------------------------------------------------------

def test_render_format(c3):
    assert render_tournament(c3) == "TOURNAMENT v1 n=3\n-10\n0-1\n10-\n"


@given(tournaments(1, 15))
def test_round_trip_bit_exact(T):
    assert np.array_equal(parse_tournament(render_tournament(T)).orient, T.orient)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "TOURNAMENT v2 n=1\n-\n",
        "TOURNAMENT v1 n=x\n-\n",
        "TOURNAMENT v1 n=2\n-1\n",
        "TOURNAMENT v1 n=2\n-1\n1-\n",
        "TOURNAMENT v1 n=2\n-1\n0-0\n",
        "TOURNAMENT v1 n=2\n-2\n0-\n",
        "TOURNAMENT v1 n=2\n11\n0-\n",
    ],
)
def test_parse_rejects(text):
    with pytest.raises(InputError):
        parse_tournament(text)


def test_read_missing_file(tmp_path):
    with pytest.raises(InputError):
        read_tournament(str(tmp_path / "missing.txt"))


# --- gen ------------------------------------------------------------------

def test_gen_transitive(tmp_path):
    out = tmp_path / "tt.txt"
    assert main(["gen", "--type", "transitive", "--n", "5", "-o", str(out)]) == EXIT_OK
    assert np.array_equal(read_tournament(str(out)).orient, transitive_tournament(5).orient)


def test_gen_reversal_reproducible(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        argv = ["gen", "--type", "reversal", "--n", "100", "--p", "0.2", "--seed", "7", "-o", str(path)]
        assert main(argv) == EXIT_OK
    assert a.read_text() == b.read_text()


def test_gen_blowup_paley(tmp_path):
    out = tmp_path / "b.txt"
    assert main(["gen", "--type", "blowup", "--blocks", "3x7", "--inner", "paley", "-o", str(out)]) == EXIT_OK
    T = read_tournament(str(out))
    assert T.n == 21
    assert np.array_equal(T.orient[:7, :7], paley(7).orient)


def test_gen_stdout(capsys):
    assert main(["gen", "--type", "paley", "--q", "3"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("TOURNAMENT v1 n=3")


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--type", "bogus", "--n", "3"],
        ["gen", "--type", "random"],
        ["gen", "--type", "reversal", "--n", "4"],
        ["gen", "--type", "blowup"],
        ["gen", "--type", "blowup", "--blocks", "3y7"],
        ["gen", "--type", "paley", "--q", "4"],
        ["frobnicate"],
    ],
)
def test_gen_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


# --- analyze --------------------------------------------------------------

def test_analyze_transitive():
    rep = analyze(transitive_tournament(5))
    assert rep["eps_exact"] == "0" and rep["max_transitive"] == 5


def test_analyze_c3(tmp_path, capsys):
    code, out = run_json(capsys, ["analyze", write(tmp_path, paley(3))])
    rep = json.loads(out)
    assert code == EXIT_OK and rep["eps_exact"] == "1/9" and rep["strong_components"] == 1


def test_analyze_large_marks_unavailable():
    rep = analyze(random_tournament(30, 1))
    assert rep["eps_exact"] == "unavailable" and rep["min_backward_exact"] == "unavailable"
    assert Fraction(rep["eps_upper"]) > 0


def test_analyze_upper_bounds_exact():
    for seed in range(10):
        rep = analyze(random_tournament(11, seed), seed)
        assert Fraction(rep["eps_upper"]) >= Fraction(rep["eps_exact"])


# --- run and verify -------------------------------------------------------

def test_run_partition_k1(tmp_path, capsys):
    T = random_tournament(40, 3)
    cert_path = tmp_path / "c.json"
    assert main(["run", "partition", write(tmp_path, T), "--k", "1", "-o", str(cert_path)]) == EXIT_OK
    stats = json.loads(capsys.readouterr().out)
    assert stats["verified"] and stats["parts"] == 1
    cert = Certificate.from_json(cert_path.read_text())
    assert len(cert.payload["parts"]) == 1 and verify_certificate(T, cert)


def test_run_cycle_power_on_c3(tmp_path, capsys):
    code, out = run_json(capsys, ["run", "cycle-power", write(tmp_path, paley(3)), "--k", "1", "--eps", "auto"])
    cert = Certificate.from_json(out)
    assert code == EXIT_OK and sorted(cert.payload["cycle"]) == [0, 1, 2]
    assert cert.provenance["eps"] == "1/9"


@pytest.mark.parametrize("task", ["path-power", "partition", "cycle-power"])
def test_run_then_verify(task, tmp_path, capsys):
    tfile = write(tmp_path, random_tournament(60, 5))
    cert_path = str(tmp_path / "c.json")
    assert main(["run", task, tfile, "--k", "2", "--eps", "1/20", "-o", cert_path]) == EXIT_OK
    capsys.readouterr()
    code, out = run_json(capsys, ["verify", tfile, cert_path])
    assert code == EXIT_OK and json.loads(out)["ok"]


def test_run_absorber(tmp_path, capsys):
    tfile = write(tmp_path, random_tournament(1000, 0))
    cert_path = str(tmp_path / "h.json")
    assert main(["run", "absorber", tfile, "--k", "1", "-o", cert_path]) == EXIT_OK
    assert main(["verify", tfile, cert_path, "--kind", "absorber"]) == EXIT_OK


def test_run_strict_infeasible(tmp_path, capsys):
    tfile = write(tmp_path, random_tournament(30, 0))
    assert main(["run", "partition", tfile, "--k", "2", "--mode", "strict"]) == EXIT_INFEASIBLE
    assert main(["run", "cycle-power", tfile, "--mode", "strict", "--eps", "1/10"]) == EXIT_INFEASIBLE


def test_run_not_found(tmp_path, capsys):
    tfile = write(tmp_path, transitive_tournament(6))
    assert main(["run", "cycle-power", tfile]) == EXIT_NOT_FOUND


def test_run_bad_eps(tmp_path, capsys):
    tfile = write(tmp_path, paley(3))
    assert main(["run", "cycle-power", tfile, "--eps", "lots"]) == EXIT_USAGE
    assert main(["run", "cycle-power", tfile, "--eps", "1/2"]) == EXIT_USAGE


def test_verify_tampered(tmp_path, capsys):
    T = transitive_tournament(5)
    tfile = write(tmp_path, T)
    cert = Certificate("path_power", 1, {"sequence": [0, 2, 1, 3, 4]})
    cpath = tmp_path / "c.json"
    cpath.write_text(cert.to_json())
    code, out = run_json(capsys, ["verify", tfile, str(cpath)])
    rep = json.loads(out)
    assert code == EXIT_VERIFY and not rep["ok"] and rep["witness"] == [2, 1]


def test_verify_kind_mismatch(tmp_path, capsys):
    tfile = write(tmp_path, transitive_tournament(3))
    cpath = tmp_path / "c.json"
    cpath.write_text(Certificate("path_power", 1, {"sequence": [0, 1, 2]}).to_json())
    assert main(["verify", tfile, str(cpath), "--kind", "cycle_power"]) == EXIT_USAGE
    assert main(["verify", tfile, str(tmp_path / "none.json")]) == EXIT_USAGE
    cpath.write_text("not json")
    assert main(["verify", tfile, str(cpath)]) == EXIT_USAGE


# --- sweep ----------------------------------------------------------------

def test_sweep(capsys):
    argv = ["sweep", "partition", "--type", "random", "--n", "30", "--k", "2", "--seeds", "3", "--seed", "4"]
    assert main(argv) == EXIT_OK
    lines = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [r["seed"] for r in lines[:3]] == [4, 5, 6]
    assert lines[3]["runs"] == 3 and lines[3]["ok"] == 3


def test_sweep_deterministic(capsys):
    argv = ["sweep", "cycle-power", "--type", "random", "--n", "40", "--k", "1", "--seeds", "2"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_sweep_not_found_rows(capsys):
    argv = ["sweep", "cycle-power", "--type", "transitive", "--n", "5", "--seeds", "2"]
    assert main(argv) == EXIT_OK
    lines = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert all(r["status"] == "not-found" for r in lines[:2]) and lines[2]["ok"] == 0
