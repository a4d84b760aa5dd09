import json
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from elbowhaptic.cli import main
from elbowhaptic.telemetry import read_log

ROOT = Path(__file__).resolve().parents[1]
EXAMPLE = str(ROOT / "configs" / "example.cfg")


def test_simulate_example(tmp_path):
    out = tmp_path / "log.csv"
    rc = main(["simulate", "--config", EXAMPLE, "--trace", "sine:center=105,amplitude=75,freq=0.25",
               "--out", str(out)])
    assert rc == 0
    assert len(read_log(out)) == 1000
    assert (tmp_path / "log.csv.cfg").exists()
    assert sorted(p.name for p in tmp_path.iterdir()) == ["log.csv", "log.csv.cfg"]


def test_simulate_deterministic_bytes(tmp_path):
    args = ["simulate", "--config", EXAMPLE, "--trace", "sine:center=105,amplitude=75,freq=0.25",
            "--duration", "3"]
    main(args + ["--out", str(tmp_path / "a.csv")])
    main(args + ["--out", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_replay_round_trip_and_corruption(tmp_path, capsys):
    log = tmp_path / "log.csv"
    main(["simulate", "--config", EXAMPLE, "--trace", "ramp:from=180,to=30,duration=2",
          "--duration", "3", "--out", str(log)])
    rc = main(["replay", "--in", str(log), "--out", str(tmp_path / "rep.txt")])
    assert rc == 0
    assert (tmp_path / "rep.txt").read_text().endswith("status=ok\n")

    lines = log.read_text().splitlines()
    cols = lines[150].split(",")
    cols[4] = repr(float(cols[4]) + 1.0)
    lines[150] = ",".join(cols)
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    rc = main(["replay", "--in", str(bad), "--config", str(log) + ".cfg",
               "--out", str(tmp_path / "rep2.txt")])
    assert rc == 2
    assert "cmd_mm" in capsys.readouterr().err
    assert "max_abs_dev.cmd_mm=1.0" in (tmp_path / "rep2.txt").read_text()


def test_replay_empty_log(tmp_path):
    log = tmp_path / "empty.csv"
    log.write_text("tick,t_s,angle_raw_deg,angle_filt_deg,cmd_mm,pos_mm,force_n,stalled\n")
    assert main(["replay", "--in", str(log), "--out", str(tmp_path / "r.txt")]) == 0
    assert (tmp_path / "r.txt").read_text() == "status=ok\n"


def test_replay_without_config(tmp_path, capsys):
    log = tmp_path / "x.csv"
    main(["simulate", "--config", EXAMPLE, "--trace", "hold:angle=90", "--duration", "0.1",
          "--out", str(log)])
    (tmp_path / "x.csv.cfg").unlink()
    assert main(["replay", "--in", str(log), "--out", str(tmp_path / "r.txt")]) == 2
    assert "x.csv.cfg" in capsys.readouterr().err


def test_sweep_and_fit(tmp_path, capsys):
    out = tmp_path / "forearm.csv"
    assert main(["sweep", "--config", EXAMPLE, "--site", "forearm", "--out", str(out),
                 "--no-noise"]) == 0
    capsys.readouterr()
    assert main(["fit", "--in", str(out), "--json", str(tmp_path / "fit.json")]) == 0
    text = capsys.readouterr().out
    k = float(text.splitlines()[0].split("=")[1])
    assert k == pytest.approx(465.6, rel=1e-3)
    assert json.loads((tmp_path / "fit.json").read_text())["stiffness"] == pytest.approx(k)


@pytest.mark.parametrize("name, k", [("forearm_sweep.csv", 465.6), ("hand_sweep.csv", 8115.4)])
def test_fit_shipped_fixture(capsys, name, k):
    assert main(["fit", "--in", str(ROOT / "data" / name)]) == 0
    line = capsys.readouterr().out.splitlines()[0]
    assert line.startswith("stiffness_n_per_m=")
    assert float(line.split("=")[1]) == pytest.approx(k, rel=1e-3)


def test_fit_through_origin(capsys):
    assert main(["fit", "--in", str(ROOT / "data" / "forearm_sweep.csv"),
                 "--through-origin"]) == 0
    assert "contact_offset_mm=0\n" in capsys.readouterr().out


def test_plot(tmp_path):
    log = tmp_path / "log.csv"
    main(["simulate", "--config", EXAMPLE, "--trace", "sine:center=105,amplitude=75,freq=0.25",
          "--duration", "4", "--out", str(log)])
    svg = tmp_path / "log.svg"
    assert main(["plot", "--in", str(log), "--out", str(svg)]) == 0
    root = ET.parse(svg).getroot()
    assert len(root.findall("{http://www.w3.org/2000/svg}g")) == 3
    assert main(["plot", "--in", str(log), "--out", str(svg), "--panels", "force_n",
                 "--title", "force"]) == 0
    assert len(ET.parse(svg).getroot().findall("{http://www.w3.org/2000/svg}g")) == 1


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["simulate", "--config", EXAMPLE],
    ["fit"],
    ["simulate", "--config", EXAMPLE, "--trace", "hold:angle=90", "--out", "x", "--seed", "-1"],
    ["sweep", "--config", EXAMPLE, "--site", "knee", "--out", "x"],
    ["sweep", "--config", EXAMPLE, "--out", "x", "--x-max", "50"],
])
def test_usage_errors_exit_1(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 1
    assert list(tmp_path.iterdir()) == []


def test_data_errors_exit_2(tmp_path, capsys):
    bad_cfg = tmp_path / "bad.cfg"
    bad_cfg.write_text('mapping.type = "constant_gain"\nmapping.gain_mm_per_deg = -1\n')
    assert main(["simulate", "--config", str(bad_cfg), "--trace", "hold:angle=90",
                 "--out", str(tmp_path / "o.csv")]) == 2
    err = capsys.readouterr().err
    assert "bad.cfg" in err and "line 2" in err and "mapping.gain_mm_per_deg" in err
    assert main(["simulate", "--config", EXAMPLE, "--trace", "file:/nonexistent.csv",
                 "--out", str(tmp_path / "o.csv")]) == 2
    assert main(["fit", "--in", str(tmp_path / "missing.csv")]) == 2
    assert main(["plot", "--in", str(bad_cfg), "--out", str(tmp_path / "p.svg")]) == 2
    assert main(["plot", "--in", str(ROOT / "data" / "forearm_sweep.csv"),
                 "--out", str(tmp_path / "p.svg")]) == 2
    assert not (tmp_path / "o.csv").exists() and not (tmp_path / "p.svg").exists()
