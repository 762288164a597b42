import csv
import json
import math
import os
import subprocess
import sys

import pytest

from sharray.cli import config_hash, main, parse_int_set, parse_sources, parse_targets


def read_csv(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    assert lines[0].startswith("# sharray ")
    return list(csv.DictReader(lines[1:]))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def run(tmp_path, *args):
    out = tmp_path / "out"
    code = main([*args, "--out", str(out)])
    return code, out


def test_parsers():
    assert parse_int_set("-2..2") == [-2, -1, 0, 1, 2]
    assert parse_int_set("0,1,5") == [0, 1, 5]
    assert parse_targets("0:0,1:30,2:-30") == [{"m": 0, "theta_deg": 0.0}, {"m": 1, "theta_deg": 30.0},
                                               {"m": 2, "theta_deg": -30.0}]
    src = parse_sources("10;-20:1e8:0.5")
    assert src[0]["theta_deg"] == 10.0 and src[1]["offset_hz"] == 1e8 and src[1]["amplitude"] == 0.5


def test_waveform_square(tmp_path):
    code, out = run(tmp_path, "waveform", "--kind", "square", "--duty", "0.25", "--m-max", "8")
    assert code == 0
    data = read_json(out / "waveform.json")
    c0 = next(c for c in data["coeffs"] if c["m"] == 0)
    assert c0["re"] == pytest.approx(0.25)
    assert data["total_power"] == pytest.approx(0.2374893, abs=1e-7)
    rows = read_csv(out / "waveform_time.csv")
    assert len(rows) == 256
    assert {"run_config.json", "run.meta.json"} <= set(os.listdir(out))


def test_waveform_comb(tmp_path):
    code, out = run(tmp_path, "waveform", "--kind", "comb", "--harmonics", "-2..2", "--power", "1")
    assert code == 0
    coeffs = read_json(out / "waveform.json")["coeffs"]
    nz = [c for c in coeffs if abs(complex(c["re"], c["im"])) > 0]
    assert len(nz) == 5
    for c in nz:
        assert abs(complex(c["re"], c["im"])) ** 2 == pytest.approx(0.2)


def test_waveform_explicit_asymmetric_real_rejected(tmp_path):
    path = tmp_path / "coeffs.json"
    path.write_text(json.dumps({"f_hm_hz": 1e9, "coeffs": [{"m": -1, "re": 1, "im": 0},
                                                           {"m": 1, "re": 2, "im": 0}]}))
    code, _ = run(tmp_path, "waveform", "--kind", "explicit", "--coeffs", str(path), "--real")
    assert code == 2
    code, _ = run(tmp_path, "waveform", "--kind", "explicit", "--coeffs", str(path))
    assert code == 0


def test_pattern(tmp_path):
    code, out = run(tmp_path, "pattern", "--arch", "hma", "--n", "8", "--waveform", "comb",
                    "--harmonics", "-2..2", "--d-tau", str(1 / 12e9), "--m", "1")
    assert code == 0
    peak = read_json(out / "pattern_m1.json")["peak_theta_refined_deg"]
    assert peak == pytest.approx(math.degrees(math.asin(1 / 6)), abs=0.01)
    assert len(read_csv(out / "pattern_m1.csv")) == 3601


def test_beams_tma(tmp_path):
    code, out = run(tmp_path, "beams", "--arch", "tma", "--n", "4", "--select", "-1..1",
                    "--f-bw", "4e8", "--f-tr", "1e8")
    assert code == 0
    rows = {int(r["m"]): r for r in read_csv(out / "beams.csv")}
    assert float(rows[1]["theta_deg"]) == pytest.approx(30.0)
    assert float(rows[-1]["theta_deg"]) == pytest.approx(-30.0)
    bw = read_json(out / "bandwidth.json")
    assert bw["passed"] is True and bw["margin_hz"] == pytest.approx(5e8)


def test_gains(tmp_path):
    code, out = run(tmp_path, "gains", "--arch", "hma", "--n", "16", "--waveform", "comb",
                    "--harmonics", "-2..2")
    assert code == 0
    for r in read_csv(out / "gains.csv"):
        assert float(r["ag_db"]) == pytest.approx(10 * math.log10(16))
        assert float(r["g_sig_db"]) == pytest.approx(10 * math.log10(51.2))


def test_steer_worked_example(tmp_path):
    code, out = run(tmp_path, "steer", "--arch", "hmjpta3", "--n", "16", "--waveform", "comb",
                    "--harmonics", "-2..2", "--targets", "0:0,1:30,2:-30")
    assert code == 0
    data = read_json(out / "steering.json")
    assert data["solution"]["d_tau_s"] == pytest.approx(-5e-10)
    assert data["solution"]["d_phi_lo_rad"] == pytest.approx(3 * math.pi / 2)
    assert data["rank"] == 3
    assert data["verification"]["passed"] is True


def test_steer_infeasible_exit_3(tmp_path, capsys):
    code, out = run(tmp_path, "steer", "--arch", "hma", "--n", "8", "--waveform", "comb",
                    "--harmonics", "-2..2", "--targets", "1:10,2:-40")
    assert code == 3
    err = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert err["error"] == "infeasible" and err["rank"] == 1
    assert read_json(out / "error.json")["rank"] == 1


def test_simulate(tmp_path):
    code, out = run(tmp_path, "simulate", "--arch", "hma", "--n", "4", "--waveform", "comb",
                    "--harmonics", "-2..2", "--sources", "0", "--f-bw", "2.5e8",
                    "--noise-psd", "1", "--trials", "50", "--seed", "5")
    assert code == 0
    rows = read_csv(out / "spectrum.csv")
    assert len(rows) == 5
    for r in rows:
        assert float(r["signal_power"]) == pytest.approx(16 * 0.2)
    assert len(read_csv(out / "gains_empirical.csv")) == 5
    meta = read_json(out / "spectrum.meta.json")
    assert meta["seed"] == 5 and meta["trials"] == 50


def test_simulate_no_sources(tmp_path):
    code, out = run(tmp_path, "simulate", "--arch", "hma", "--n", "4")
    assert code == 0
    assert all(float(r["signal_power"]) == 0 for r in read_csv(out / "spectrum.csv"))


def test_compare(tmp_path):
    code, out = run(tmp_path, "compare", "--n", "16", "--k-range", "2..20")
    assert code == 0
    rows = {int(r["K"]): r for r in read_csv(out / "compare.csv")}
    gap = {k: float(r["g_comb_db"]) - float(r["g_square_db"]) for k, r in rows.items()}
    assert all(gap[k] > 0 for k in range(2, 16))
    assert gap[16] == pytest.approx(0.0, abs=1e-9)
    assert gap[17] < 0


@pytest.mark.parametrize("args", [
    ["gains", "--arch", "tma", "--n", "4", "--d-tau", "1e-12"],
    ["gains", "--arch", "hma", "--n", "1"],
    ["waveform", "--kind", "square", "--duty", "2"],
    ["steer", "--arch", "hma", "--targets", "1:120"],
    ["gains", "--arch", "hma", "--d-phi-lo", "0.3"],
    ["beams", "--arch", "nope"],
])
def test_invalid_exit_2(tmp_path, args):
    code, _ = run(tmp_path, *args)
    assert code == 2


def test_bad_config_json_exit_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    code, _ = run(tmp_path, "gains", "--config", str(cfg))
    assert code == 2


def test_io_error_exit_4(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["gains", "--out", str(blocker / "sub")]) == 4
    assert main(["gains", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 4


def snapshot(out):
    return {name: (out / name).read_bytes() for name in sorted(os.listdir(out)) if name != "run.meta.json"}


@pytest.mark.parametrize("args", [
    ["simulate", "--arch", "hmjpta3", "--n", "4", "--sources", "10;-20", "--f-bw", "2.5e8",
     "--noise-psd", "0.5", "--trials", "20", "--d-tau", "3e-12", "--d-phi-lo", "0.4"],
    ["steer", "--arch", "hmjpta3", "--n", "16", "--targets", "0:0,1:30,2:-30"],
    ["compare", "--n", "8", "--k-range", "1..12"],
])
def test_reruns_byte_identical(tmp_path, args):
    code, out = run(tmp_path, *args)
    first = snapshot(out)
    code2, _ = run(tmp_path, *args)
    assert code == code2 == 0
    assert snapshot(out) == first


def test_config_round_trip(tmp_path):
    code, out = run(tmp_path, "gains", "--arch", "hmjpta2", "--n", "8", "--waveform", "comb",
                    "--harmonics", "0..3", "--d-phi-rf", "0.2")
    assert code == 0
    written = read_json(out / "run_config.json")
    first = (out / "gains.csv").read_bytes()
    assert read_json(out / "run.meta.json")["config_hash"] == config_hash(written)
    code = main(["gains", "--config", str(out / "run_config.json")])
    assert code == 0
    assert (out / "gains.csv").read_bytes() == first


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "sharray", "compare", "--n", "4", "--k-range", "1..6",
                          "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "o" / "compare.csv").exists()
