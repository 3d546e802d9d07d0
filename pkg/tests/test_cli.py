import json
import subprocess
import sys

import pytest

from quasipareto.cli import main
from quasipareto.reports import REPORTS, expected_report


@pytest.fixture(autouse=True)
def out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("QUASIPARETO_OUT", str(tmp_path))
    return tmp_path


def test_check_solution_certified():
    assert main(["check-solution", "--problem", "ex31.json", "--point", "0,0", "--type", "t1q",
                 "--box", "-3,3", "--steps", "121"]) == 0


def test_check_solution_witness_writes_csv(out_dir):
    pts = ";".join(f"{1 / k!r},{k}" for k in range(1, 101))
    code = main(["check-solution", "--problem", "ex31.json", "--point", "1,1", "--type", "t2qw",
                 "--epsilon-zero", "--steps", "2", "--inject", pts])
    assert code == 1
    rows = (out_dir / "witness.csv").read_text().splitlines()
    assert rows[0].startswith("x1,x2,fL1") and len(rows) == 2


@pytest.mark.parametrize("argv", [
    ["check-solution", "--problem", "missing.json", "--point", "0"],
    ["check-solution", "--problem", "ex31", "--point", "0"],
    ["check-solution", "--problem", "ex31", "--point", "0,0", "--steps", "1"],
    ["check-solution", "--problem", "ex31"],
    ["kkt-certify", "--problem", "ex41", "--point", "-1"],
    ["reproduce", "nope"],
    ["no-such-command"],
])
def test_usage_errors(argv):
    assert main(argv) == 2


def test_kkt_certify_and_verify(out_dir):
    assert main(["kkt-certify", "--problem", "post32", "--point", "0"]) == 0
    cert = out_dir / "certificate.json"
    assert json.loads(cert.read_text())["status"] == "CERTIFIED"
    assert main(["kkt-certify", "--problem", "post32", "--point", "0", "--verify", str(cert)]) == 0
    data = json.loads(cert.read_text())
    data["lambdaL"] = [0.3]
    cert.write_text(json.dumps(data))
    assert main(["kkt-certify", "--problem", "post32", "--point", "0", "--verify", str(cert)]) == 1


def test_kkt_not_certified():
    assert main(["kkt-certify", "--problem", "ex41", "--point", "1"]) == 1


def test_scalarize(out_dir):
    assert main(["scalarize", "--problem", "ex41", "--point", "1", "--box", "-2,2", "--csv", "phi.csv"]) == 1
    assert (out_dir / "phi.csv").read_text().startswith("x1,phi,branch")
    assert main(["scalarize", "--problem", "ex31", "--point", "0,0", "--steps", "21"]) == 0


def test_convexity_commands():
    assert main(["convexity", "--problem", "post32", "--point", "0", "--class", "gc", "--sample", "1",
                 "--jobs", "1"]) == 1
    assert main(["convexity", "--problem", "ex32", "--point", "0", "--class", "sepq", "--jobs", "1"]) == 0


def test_dual_check_modes(capsys):
    base = ["--problem", "ex41", "--y", "1", "--lambda-l", "0.5", "--lambda-u", "0.5", "--mu", "1:1"]
    assert main(["dual-check", "feasible"] + base) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["clauses"]["complementarity"] is False
    assert main(["dual-check", "weak"] + base + ["--x", "0"]) == 1
    assert main(["dual-check", "converse"] + base) == 1
    assert main(["dual-check", "strong", "--problem", "post32", "--point", "0"]) == 0
    assert main(["dual-check", "weak", "--problem", "ex41"]) == 2


@pytest.mark.parametrize("name", sorted(REPORTS))
def test_reproduce_matches_stored_report(name, out_dir):
    assert main(["reproduce", name]) == 0
    assert (out_dir / f"{name}.txt").read_text() == expected_report(name)


def test_reproduce_is_byte_identical_across_processes(out_dir):
    runs = [subprocess.run([sys.executable, "-m", "quasipareto.cli", "reproduce", "ex32", "--out", str(out_dir / str(k))],
                           capture_output=True, text=True) for k in range(2)]
    assert runs[0].returncode == runs[1].returncode == 0
    assert (out_dir / "0" / "ex32.txt").read_bytes() == (out_dir / "1" / "ex32.txt").read_bytes()


def test_plot(out_dir):
    assert main(["plot", "--problem", "ex31", "--point", "1,1", "--epsilon-zero", "--steps", "21"]) == 0
    assert (out_dir / "ex31_f1.png").stat().st_size > 0
    assert (out_dir / "ex31_witnesses_t2qw.png").exists()
    assert main(["plot", "--problem", "ex32", "--format", "svg"]) == 0
    assert (out_dir / "ex32_f1.svg").exists()
