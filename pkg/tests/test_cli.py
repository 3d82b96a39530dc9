import csv
import json
import math
import subprocess
import sys

import pytest

from thermorecycle import cli, latency
from thermorecycle.errors import ConfigError


def run(tmp_path, command, config="", fmt="csv", extra=(), name="out"):
    cfg = tmp_path / f"{name}.cfg"
    cfg.write_text(config)
    out = tmp_path / f"{name}.{fmt}"
    code = cli.main([command, "--config", str(cfg), "--out", str(out), "--format", fmt, *extra])
    return code, out


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_config_defaults_and_values():
    cfg = cli.parse_config("px = 0.3\n# comment\n\ntheta_b_list = 0, pi/8, 3*pi/16\nnoise = off\n")
    assert cfg["px"] == 0.3 and cfg["noise"] is False
    assert cfg["theta_b_list"] == pytest.approx([0, math.pi / 8, 3 * math.pi / 16])
    assert cfg["bath_freq_ghz"] == 5.0 and cfg["trials"] == 5 and cfg["shots"] == 8000
    assert cfg["t1_us"] == 397.0 and cfg["latency_us"] == 3.3 and cfg["algo_us"] == 4.0


@pytest.mark.parametrize(
    "text, line, key",
    [
        ("fooo=1\n", 1, "fooo"),
        ("px=0.4\nnonsense\n", 2, None),
        ("px=0.4\n\nnoise=maybe\n", 3, "noise"),
        ("trials=0\n", 1, "trials"),
        ("px=0.1\npx=0.2\n", 2, "px"),
    ],
)
def test_config_errors(text, line, key):
    with pytest.raises(ConfigError) as exc:
        cli.parse_config(text)
    assert exc.value.line == line
    assert exc.value.key == key


def test_unknown_key_exit_code(tmp_path, capsys):
    code, _ = run(tmp_path, "bounds", "fooo=1\n")
    assert code == 2
    assert "fooo" in capsys.readouterr().err


def test_malformed_line_exit_code(tmp_path, capsys):
    code, _ = run(tmp_path, "bounds", "px = 0.4\n???\n")
    assert code == 2
    assert "line 2" in capsys.readouterr().err


def test_bounds_json(tmp_path):
    code, out = run(tmp_path, "bounds", "delta_s = 0.5\n", fmt="json")
    assert code == 0
    doc = json.loads(out.read_text())
    row = doc["rows"][0]
    assert row["qL_kBT0"] == pytest.approx(0.5)
    assert row["qtight_kBT0_or_INF"] == pytest.approx(1.20, abs=0.005)
    assert doc["version"] and doc["config"]["delta_s"] == [0.5]


def test_bounds_infeasible_exit(tmp_path):
    code, out = run(tmp_path, "bounds", "delta_s = 0.69\n")
    assert code == 3
    r = rows(out)[0]
    assert r["qtight_kBT0_or_INF"] == "INF" and r["qath_kBT0"] == "INF"


def test_bounds_athermal(tmp_path):
    code, out = run(tmp_path, "bounds", "delta_s = 0.6730116670092565\ne_ath = 0.5\ns_ath = 0\n")
    assert code == 0
    r = rows(out)[0]
    assert r["qtight_kBT0_or_INF"] == "INF" and r["gain_kBT0_or_INF"] == "INF"
    T0 = cli.protocol.default_bath().T0
    assert float(r["qath_kBT0"]) == pytest.approx(-0.1 / T0, rel=1e-8)


def test_sweep_theta_counts_and_columns(tmp_path):
    code, out = run(tmp_path, "sweep-theta", "theta_b_list = 0, pi/16, pi/8, 3*pi/16, pi/4\ntrials = 5\nshots = 200\n")
    assert code == 0
    data = rows(out)
    assert list(data[0].keys()) == list(cli.COLUMNS)
    assert len(data) == 30
    assert sum(r["trial"] == "median" for r in data) == 5
    assert [r["trial"] for r in data[:6]] == ["0", "1", "2", "3", "4", "median"]


def test_numeric_format(tmp_path):
    _, out = run(tmp_path, "sweep-px", "px_list = 0.3\ntrials = 1\nshots = 0\n")
    for r in rows(out):
        for col in ("p_fail", "dS_nats", "dQ_kBT0", "fidelity"):
            mantissa = r[col].lstrip("-").split("e")[0].replace(".", "").lstrip("0")
            assert len(mantissa) <= 9


def test_csv_json_roundtrip(tmp_path):
    text = "theta_b_list = 0.1, 0.3\ntrials = 2\nshots = 300\n"
    _, c = run(tmp_path, "sweep-theta", text, name="a")
    _, j = run(tmp_path, "sweep-theta", text, fmt="json", name="b")
    doc = json.loads(j.read_text())
    for r_csv, r_json in zip(rows(c), doc["rows"]):
        for col in cli.COLUMNS:
            v = r_json[col]
            assert cli.fmt(v) == r_csv[col] if v is not None else r_csv[col] == ""


def test_byte_identical_outputs(tmp_path):
    text = "theta_b_list = 0, 0.4\ntrials = 2\nshots = 500\n"
    _, a = run(tmp_path, "sweep-theta", text, extra=["--seed", "17"], name="a")
    _, b = run(tmp_path, "sweep-theta", text, extra=["--seed", "17", "--parallel", "2"], name="b")
    _, c = run(tmp_path, "sweep-theta", text, extra=["--seed", "18"], name="c")
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


def test_fidelity_command(tmp_path):
    code, out = run(tmp_path, "fidelity", "theta_b_list = 0, pi/4\nnoise = off\nangle_mode = exact\nshots = 0\ntrials = 1\n")
    assert code == 0
    for r in rows(out):
        assert float(r["fidelity"]) == pytest.approx(1, abs=1e-9)


def test_bath_sweep_column(tmp_path):
    code, out = run(tmp_path, "bath-sweep", "bath_freq_list = 3, 7\ntrials = 1\nshots = 0\n")
    assert code == 0
    data = rows(out)
    assert list(data[0].keys())[-1] == "bath_freq_ghz"
    assert [r["bath_freq_ghz"] for r in data] == ["3", "3", "7", "7"]


def test_zeptojoule_units(tmp_path):
    _, a = run(tmp_path, "bounds", "delta_s = 0.5\n", name="a")
    _, b = run(tmp_path, "bounds", "delta_s = 0.5\nunits = zJ\n", name="b")
    ra, rb = rows(a)[0], rows(b)[0]
    assert "qL_zJ" in rb
    T0 = cli.protocol.default_bath().T0
    gap_zj = 6.62607015e-34 * 5e9 * 1e21
    assert float(rb["qL_zJ"]) == pytest.approx(float(ra["qL_kBT0"]) * T0 * gap_zj, rel=1e-8)


def test_latency_fit_command(tmp_path):
    data = latency.synthesize_dataset(31.3e-9, 2.0, 0.0, range(500, 3001, 100))
    latency.write_csv(data, tmp_path / "jobs.csv")
    code, out = run(tmp_path, "latency-fit", "latency_csv = jobs.csv\n")
    assert code == 0
    r = rows(out)[0]
    assert float(r["per_op_s"]) == pytest.approx(31.3e-9, rel=1e-8)
    assert r["unphysical"] == "false"


def test_latency_fit_needs_file(tmp_path):
    code, _ = run(tmp_path, "latency-fit", "")
    assert code == 2


def test_module_entry_point(tmp_path):
    cfg = tmp_path / "b.cfg"
    cfg.write_text("delta_s = 0.1\n")
    proc = subprocess.run(
        [sys.executable, "-m", "thermorecycle", "bounds", "--config", str(cfg)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0].startswith("theta_b,p_x,trial")
