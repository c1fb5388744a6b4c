from __future__ import annotations

import csv
import subprocess
import sys

from fountain_bfa import bounds
from fountain_bfa.cli import main, parse_args, read_config
from fountain_bfa.sim import CSV_HEADER


def test_bounds_command(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bounds", "--n", "4", "--l", "4", "--p0", "0.9,1", "--m", "4:6", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == bounds.BOUND_COLUMNS
    assert len(rows) == 1 + 2 * 3
    first = dict(zip(rows[0], rows[1]))
    assert float(first["p_E"]) == bounds.p_E(0.9, 4, 4, 4)
    assert first["p_E_hoeffding"] == ""


def test_fer_command(tmp_path):
    out = tmp_path / "f.csv"
    rc = main(["fer", "--n", "8", "--l", "6", "--p0", "0.9", "--overheads", "2,6", "--code", "random",
               "--decoder", "bfa-straight", "--min-frame-errors", "5", "--max-trials", "80",
               "--seed", "3", "--out", str(out)])
    assert rc == 0
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == CSV_HEADER
    assert [r[1] for r in rows[1:]] == ["2.0", "6.0"]


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nn = 12\nl = 5\np0 = 0.95\noverheads = 1,2\nmin-frame-errors = 9\ndecoder = bp\n")
    assert read_config(str(cfg))["min_frame_errors"] == "9"
    args = parse_args(["fer", "--config", str(cfg), "--decoder", "bfa-efficient", "--n", "7"])
    assert args.n == 7 and args.l == 5
    assert args.decoder == "bfa-efficient" and args.min_frame_errors == 9
    assert args.overheads == [1.0, 2.0]


def test_bad_input_exit_code(tmp_path, capsys):
    assert main(["bounds", "--n", "4", "--l", "4", "--p0", "1.5", "--m", "5"]) == 2
    assert "error" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "fountain_bfa", "bounds", "--n", "2", "--l", "2",
                          "--p0", "0.9", "--m", "3"], capture_output=True, text=True, check=True)
    lines = res.stdout.strip().splitlines()
    assert lines[0].startswith("p0,n,l,m,p_E")
    assert len(lines) == 2
