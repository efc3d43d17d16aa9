import json
import subprocess
import sys

import pytest

from otbounds.cli import main
from otbounds.dist import load_table
from otbounds.primitives import parse_primitive


def run(capsys, *argv):
    code = main(["--format", "structured", *argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if code == 0 else None)


def test_entropy_all(capsys):
    code, rep = run(capsys, "entropy", "ot:1,2,1,1", "--all")
    assert code == 0
    r = rep["results"]
    assert r["H(U|V)"] == pytest.approx(1) and r["H(V|U)"] == pytest.approx(1)
    assert r["I(U;V)"] == pytest.approx(1) and r["I(U;V|C)"] == pytest.approx(1)
    assert set(rep) == {"command", "results", "seed", "version", "wall_time"}


def test_entropy_rabin_and_smooth(capsys):
    _, rep = run(capsys, "entropy", "rabin:1/2,1", "--shannon")
    assert list(rep["results"].values()) == [pytest.approx(0.5)]
    _, rep = run(capsys, "entropy", "ot:1,2,1,1", "--smooth", "--eps", "1/10")
    assert rep["results"]["Hmin^1/10(U|V)"] == pytest.approx(1.1520030934450498)


def test_dump_round_trip(capsys, tmp_path):
    path = tmp_path / "ot.json"
    code, first = run(capsys, "entropy", "olfe:3,1", "--all", "--dump", str(path))
    assert code == 0
    assert load_table(path).weights == parse_primitive("olfe:3,1").joint.weights
    _, again = run(capsys, "entropy", str(path), "--all")
    first["results"].pop("dumped_to")
    assert again["results"] == first["results"]


def test_exit_codes(capsys):
    assert main(["entropy", "nope:1"]) == 2
    assert main(["entropy", "ot:1,4,2,4"]) == 4
    assert main(["bound", "security", "--m", "256", "--kappa", "16", "--k", "8", "--eps", "2"]) == 3
    assert main(["entropy", "ot:1,2,1,1", "--smooth", "--eps", "1"]) == 3
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_check_reduction_examples(capsys):
    _, rep = run(capsys, "check-reduction", "ot:1,2,1,3", "ot:1,2,1,2", "--eps", "1/20")
    assert rep["results"]["overall"] == "violated"
    _, rep = run(capsys, "check-reduction", "ot:1,4,1,1", "ot:1,2,1,3")
    assert rep["results"]["overall"] == "satisfiable"
    for k in (2, 5, 8):
        _, rep = run(capsys, "check-reduction", "ot:1,2,2,1", f"rabin:1/2,{k}", "--eps", "1/5")
        assert rep["results"]["overall"] == "violated"


def test_simulate_and_bounds(capsys):
    _, rep = run(capsys, "simulate", "ip", "--n", "3")
    r = rep["results"]
    assert (r["correctness"], r["alice_distance"], r["bob_distance"]) == ("0", "0", "0")
    _, rep = run(capsys, "bound", "imposs1", "--kappa", "5")
    assert rep["results"]["bounds"][0]["extras"]["min_eps"] == "1/1152"
    _, rep = run(capsys, "bb84", "--trials", "100")
    assert rep["results"]["pass_frequency"] == 1.0 and rep["results"]["correct_frequency"] == 1.0
    _, rep = run(capsys, "simulate", "mcom", "--k", "4", "--kappa", "8", "--sender", "flip-one-bit")
    assert rep["results"]["soundness"]["acceptance"] == "1/256"


def test_reports_reproducible(capsys):
    argv = ["--seed", "9", "simulate", "eq-amplify", "--mode", "sampled", "--n", "6", "--k", "3", "--trials", "300",
            "--x", "000000", "--y", "000001"]
    _, a = run(capsys, *argv)
    _, b = run(capsys, *argv)
    a.pop("wall_time")
    b.pop("wall_time")
    assert a == b and a["seed"] == 9


def test_text_format(capsys):
    assert main(["bound", "imposs1", "--kappa", "5"]) == 0
    out = capsys.readouterr().out
    assert "results.bounds[0].name: imposs1" in out


def test_console_script():
    out = subprocess.run(
        [sys.executable, "-m", "otbounds.cli", "--format", "structured", "reverse-demo"],
        capture_output=True, text=True, check=True,
    ).stdout
    rep = json.loads(out)
    assert rep["results"]["verdict"] == "classical bound violated by quantum construction"
