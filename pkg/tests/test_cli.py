import subprocess
import sys

import numpy as np
import pytest

from ralp.cli import main

CFG_SMALL = """
channel.kind = bsc
channel.p = 0.05
code.k = 4
code.q = 4
interleaver.policy = random
interleaver.seed = 7
sim.trials = 30
sim.seed = 11
"""


@pytest.fixture
def cfg_file(tmp_path):
    path = tmp_path / "sim.cfg"
    path.write_text(CFG_SMALL)
    return path


def test_build_and_verify_girth(tmp_path, capsys):
    out = tmp_path / "il.txt"
    rc = main(["build-interleaver", "--q", "3", "--k", "27",
               "--policy", "paper_greedy", "--out", str(out)])
    assert rc == 0
    assert out.exists()
    rc = main(["verify-girth", "--interleaver", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "measured_girth=" in text
    meas = int(text.split("measured_girth=")[1].split()[0])
    floor = int(text.split("floor_bound=")[1].split()[0])
    assert meas >= floor


def test_build_random_irregular(tmp_path):
    out = tmp_path / "irr.txt"
    rc = main(["build-interleaver", "--degrees", "2,4,4,2",
               "--policy", "random", "--seed", "3", "--out", str(out)])
    assert rc == 0
    header = out.read_text().splitlines()[0]
    assert header.startswith("RA-IL v1 k=4 n=12")


def test_encode_decode_round_trip(tmp_path, cfg_file, capsys):
    rc = main(["encode", "--config", str(cfg_file), "--info", "1010"])
    assert rc == 0
    bits = capsys.readouterr().out.strip()
    assert len(bits) == 17 and set(bits) <= {"0", "1"}
    # noiseless rescaled LLRs: +1 for 0, -1 for 1
    llrs = tmp_path / "llrs.txt"
    llrs.write_text("\n".join("-1.0" if b == "1" else "1.0" for b in bits))
    rc = main(["decode", "--config", str(cfg_file), "--llrs", str(llrs)])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "1010"


def test_decode_reports_error_outcome(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(CFG_SMALL.replace("interleaver.policy = random",
                                     "interleaver.policy = random")
                   .replace("interleaver.seed = 7", "interleaver.seed = 1"))
    # consecutive-style fractional pattern: need a config whose interleaver
    # yields a fractional optimum; flip a whole group's worth of llrs
    from ralp.simulate import parse_config, resolve_interleaver
    c = parse_config(cfg)
    il, _ = resolve_interleaver(c)
    vals = np.ones(il.n)
    grp = il.groups[0]
    for i in grp[:2]:
        vals[i - 1] = -1.0
    llrs = tmp_path / "llrs.txt"
    llrs.write_text("\n".join(str(v) for v in vals))
    rc = main(["decode", "--config", str(cfg), "--llrs", str(llrs)])
    assert rc == 0
    out = capsys.readouterr().out.strip()
    assert out in {"error"} | {"".join(p) for p in ()} or set(out) <= {"0", "1"}


def test_bounds_table1_row(capsys):
    rc = main(["bounds", "--q", "4", "--n", "1024", "--channel", "bsc",
               "--param", "1e-5", "--epsilon", "0"])
    assert rc == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("q,n,")
    row = out[1].split(",")
    threshold = float(row[7])
    assert abs(threshold - 2e-5) / 2e-5 < 0.05


def test_bounds_plot_and_csv(tmp_path):
    csv = tmp_path / "bounds.csv"
    png = tmp_path / "bounds.png"
    rc = main(["bounds", "--q", "4", "--n-list", "1024,4096,16384",
               "--channel", "bsc", "--param", "1e-5", "--epsilon", "0.1",
               "--out", str(csv), "--plot", str(png)])
    assert rc == 0
    assert csv.exists() and len(csv.read_text().splitlines()) == 4
    assert png.exists() and png.stat().st_size > 1000


def test_simulate_writes_csv_and_plot(tmp_path, cfg_file, capsys):
    out = tmp_path / "results.csv"
    png = tmp_path / "wer.png"
    rc = main(["simulate", "--config", str(cfg_file), "--out", str(out),
               "--plot", str(png)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("channel,")
    assert len(lines) == 2
    assert png.exists() and png.stat().st_size > 1000


def test_simulate_malformed_config_exit1(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text(CFG_SMALL + "sim.velocity = 9\n")
    rc = main(["simulate", "--config", str(bad), "--out", str(tmp_path / "r.csv")])
    assert rc == 1
    err = capsys.readouterr().err
    assert "sim.velocity" in err


def test_unknown_flag_exits_2():
    proc = subprocess.run(
        [sys.executable, "-m", "ralp.cli", "bounds", "--nonsense", "1"],
        capture_output=True, text=True)
    assert proc.returncode == 2
    assert "usage" in proc.stderr.lower()


def test_extract_witness_cli(tmp_path, capsys):
    cfg = tmp_path / "w.cfg"
    cfg.write_text("""
channel.kind = bsc
channel.p = 0.4
code.k = 2
code.q = 4
interleaver.path = {path}
sim.trials = 1
sim.seed = 5
""".format(path=tmp_path / "il.txt"))
    # interleaver with adjacent members: girth 2, witnesses of one edge
    (tmp_path / "il.txt").write_text(
        "RA-IL v1 k=2 n=8 girth=2\n4 1 2 3 4\n4 5 6 7 8\n")
    psi = tmp_path / "psi.txt"
    psi.write_text("1 2\n1 2\n3 4\n3 4\n# comment line\n")
    out = tmp_path / "witness.txt"
    rc = main(["extract-witness", "--config", str(cfg), "--psi", str(psi),
               "--g", "2", "--out", str(out)])
    if rc == 0:
        text = out.read_text().splitlines()
        assert text[0].startswith("cost=")
        assert all(ln.split()[0] in ("H", "X") for ln in text[1:])
    else:
        # positive-cost multisets are a legitimate domain error at this seed
        err = capsys.readouterr().err
        assert "cost" in err


def test_report_from_results(tmp_path, cfg_file):
    out = tmp_path / "results.csv"
    rc = main(["simulate", "--config", str(cfg_file), "--out", str(out)])
    assert rc == 0
    fig = tmp_path / "fig.png"
    rc = main(["report", "--results", str(out), "--out", str(fig)])
    assert rc == 0
    assert fig.exists() and fig.stat().st_size > 1000
