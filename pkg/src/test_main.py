import json
import math

import pytest

from src.main import main


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


# -------- BOUNDS --------

def test_bounds_report(capsys):
    assert main(["bounds", "--nbar", "1", "--tau", "0.25", "--copies", "1"]) == 0
    record = _json_out(capsys)
    assert record["p_coh"] == pytest.approx(0.264841, abs=1e-6)
    assert record["p_quant_qcb"] == pytest.approx(2.0 / 9.0, abs=1e-9)
    assert record["delta"] == pytest.approx(0.042619, abs=1e-6)
    assert record["rate_ratio"] == pytest.approx(3.243721, abs=1e-6)
    assert record["epr_bounds"]["qbb"] == pytest.approx(math.sqrt(7.0) / 9.0, abs=1e-9)


def test_bounds_with_hoeffding(capsys):
    assert main(["bounds", "--nbar", "1", "--tau", "0.25", "--r", "1.0"]) == 0
    record = _json_out(capsys)
    assert record["h_coh"] == pytest.approx(0.25)
    assert record["h_quant"] == pytest.approx(0.810930, abs=1e-6)
    assert record["qhb_ratio"] == pytest.approx(3.243721, abs=1e-6)


def test_bounds_infinite_hoeffding_is_a_string(capsys):
    assert main(["bounds", "--nbar", "1", "--tau", "0.25", "--r", "0.25"]) == 0
    record = _json_out(capsys)
    assert record["h_quant"] == "inf"
    assert record["h_quant_classification"] == "infinite"


def test_bounds_without_loss(capsys):
    assert main(["bounds", "--nbar", "2", "--tau", "1", "--copies", "3"]) == 0
    record = _json_out(capsys)
    assert record["delta"] == 0.0
    assert record["p_coh"] == 0.5


def test_bounds_total_energy(capsys):
    assert main(["bounds", "--total-nbar", "6", "--tau", "0.5", "--copies", "3"]) == 0
    record = _json_out(capsys)
    assert record["nbar"] == pytest.approx(2.0)
    assert record["total_nbar"] == pytest.approx(6.0)


def test_bounds_writes_file(tmp_path, capsys):
    out = tmp_path / "bounds.json"
    assert main(["bounds", "--nbar", "1", "--tau", "0.5", "--out", str(out)]) == 0
    assert "Report saved to" in capsys.readouterr().out
    assert json.loads(out.read_text())["tau"] == 0.5


def test_bad_flags_exit_with_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["bounds", "--tau", "0.5"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["bounds", "--nbar", "1", "--tau", "0.5", "--bogus"])
    assert e.value.code == 2


@pytest.mark.parametrize("argv", [
    ["bounds", "--nbar", "1", "--tau", "1.5"],
    ["bounds", "--nbar", "-1", "--tau", "0.5"],
    ["bounds", "--nbar", "1", "--tau", "0.5", "--copies", "0"],
])
def test_domain_errors_exit_with_one(argv, capsys):
    assert main(argv) == 1
    assert "❌" in capsys.readouterr().err


# -------- FIGURES --------

def test_figure_is_written_deterministically(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["figure", "--figure-id", "qcb-vs-copies", "--grid", "tau=0:0.9:10"]
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text().splitlines()[1] == "tau,m_copies,p_quant_qcb,p_quant_broadband,p_coh"


def test_figure_param_override(tmp_path):
    out = tmp_path / "gain.json"
    argv = ["figure", "--figure-id", "gain-m1", "--copies", "4", "--grid", "nbar=0.1:1:3", "--grid", "tau=0:0.9:4",
            "--format", "json", "--out", str(out)]
    assert main(argv) == 0
    document = json.loads(out.read_text())
    assert document["params"]["m_copies"] == 4
    assert len(document["rows"]) == 12


def test_figure_rejects_bad_grid(tmp_path):
    argv = ["figure", "--figure-id", "gain-m1", "--grid", "nbar=1:2", "--out", str(tmp_path / "x.csv")]
    assert main(argv) == 1


def test_growth_command(tmp_path):
    out = tmp_path / "growth.csv"
    assert main(["growth", "--degraded", "--total-nbar", "100", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert json.loads(lines[0][2:])["figure_id"] == "degrade-time"
    assert len(lines) == 2 + 201


# -------- MEMORY --------

def test_memory_single_point(capsys):
    assert main(["memory", "--panel", "a", "--total-nbar", "5000"]) == 0
    record = _json_out(capsys)
    assert record["i_quant_broadband"] >= 0.99
    assert record["i_coh"] <= 0.02


def test_memory_sweep(tmp_path):
    out = tmp_path / "memory.csv"
    assert main(["memory", "--panel", "c", "--grid", "total_nbar=1:1000:5", "--out", str(out)]) == 0
    header = json.loads(out.read_text().splitlines()[0][2:])
    assert header["params"]["panel"] == "c"
    assert header["params"]["theta1"] == 0.05


# -------- VALIDATE --------

def test_validate_default_grid(capsys):
    assert main(["validate"]) == 0
    assert "All oracle checks within tolerance" in capsys.readouterr().out


def test_validate_without_loss():
    assert main(["validate", "--nbar", "0.5", "--tau", "1", "--cutoff", "30"]) == 0


def test_validate_reports_truncation_breach(capsys):
    assert main(["validate", "--cutoff", "5", "--nbar", "2"]) == 1
    assert "Tolerance breached" in capsys.readouterr().out
