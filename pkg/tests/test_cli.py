import gzip
import io
import math
from contextlib import redirect_stdout

import numpy as np
import pytest

from parisian_qsd.cli import run

CONFIGS = "configs"


def _capture(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = run(argv)
    return code, buf.getvalue()


def _rows(text):
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    cols = lines[0].split(",")
    return cols, [dict(zip(cols, l.split(","))) for l in lines[1:]]


def test_transform_csv(tmp_path):
    out = tmp_path / "t.csv"
    code, _ = _capture(["transform", "--model", f"{CONFIGS}/bm_sn.cfg", "--x", "1",
                        "--theta", "1", "--alpha-max", "5", "--alpha-steps", "50",
                        "--output", str(out)])
    assert code == 0
    cols, rows = _rows(out.read_text())
    assert cols == ["alpha", "h", "normalized"]
    assert len(rows) == 51
    assert float(rows[0]["normalized"]) == pytest.approx(1.0, abs=1e-14)


def test_density_csv_mass(tmp_path):
    out = tmp_path / "d.csv"
    code, _ = _capture(["density", "--model", f"{CONFIGS}/mm1.cfg", "--x", "1",
                        "--theta", "2", "--y-min", "-8", "--y-max", "20",
                        "--y-steps", "1400", "--output", str(out)])
    assert code == 0
    cols, rows = _rows(out.read_text())
    ys = np.array([float(r["y"]) for r in rows])
    ds = np.array([float(r["density"]) for r in rows])
    assert ds.min() >= -1e-6
    neg, pos = ys < 0, ys > 0
    # the law jumps at zero, so the strip between the innermost grid points is
    # integrated one-sidedly from each limit
    mass = (np.trapezoid(ds[neg], ys[neg]) + np.trapezoid(ds[pos], ys[pos])
            + ds[neg][-1] * -ys[neg][-1] + ds[pos][0] * ys[pos][0])
    assert mass == pytest.approx(1.0, abs=1e-3)


def test_asymptote_ratio_column(tmp_path):
    out = tmp_path / "a.csv"
    code, _ = _capture(["asymptote", "--model", f"{CONFIGS}/mm1_heavy.cfg",
                        "--x", "1", "--theta", "1", "--t-min", "50", "--t-max", "60",
                        "--t-steps", "1", "--output", str(out)])
    assert code == 0
    _, rows = _rows(out.read_text())
    v50, v60 = float(rows[0]["value"]), float(rows[1]["value"])
    assert v60 / v50 == pytest.approx(math.exp(-0.1) * (50 / 60) ** 1.5, rel=1e-9)


def test_resolvent_grid_csv():
    code, text = _capture(["resolvent", "--model", f"{CONFIGS}/cl.cfg",
                           "--x", "0.5,1", "--alpha", "0,0.2", "--q", "1",
                           "--theta", "1"])
    assert code == 0
    cols, rows = _rows(text)
    assert cols == ["model", "x", "alpha", "q", "theta", "value", "branch"]
    assert len(rows) == 4
    assert all(r["branch"] == "bounded-variation" for r in rows)


def test_simulate_deterministic_and_paths_dump(tmp_path):
    args = ["simulate", "--model", f"{CONFIGS}/mm1.cfg", "--x0", "1", "--alpha",
            "0.5", "--q", "1", "--theta", "2", "--paths", "20000", "--seed", "42"]
    code1, text1 = _capture(args)
    code2, text2 = _capture(args)
    assert code1 == code2 == 0
    assert text1 == text2
    dump = tmp_path / "paths.csv.gz"
    code, _ = _capture(args + ["--paths", "500", "--emit-paths", str(dump)])
    assert code == 0
    with gzip.open(dump, "rt") as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "pathIndex,tauTheta,tauClassic,X_horizon"
    assert len(lines) == 501


def test_header_echoes_configuration():
    code, text = _capture(["simulate", "--model", f"{CONFIGS}/cl.cfg",
                           "--paths", "1000", "--q", "1"])
    assert code == 0
    header = {l.split("=")[0].strip("# "): l.split("=", 1)[1].strip()
              for l in text.splitlines() if l.startswith("#") and "=" in l}
    assert header["model"] == "cl-sn(c=1;lam=3;nu=2)"
    assert float(header["q"]) == 1.0


def test_usage_error_exit_code():
    assert run(["transform"]) == 2          # missing --model
    assert run(["no-such-command"]) == 2


def test_domain_error_exit_code():
    # theta at |xi*| for the mm1 catalog model: degenerate clock regime
    code = run(["transform", "--model", f"{CONFIGS}/mm1.cfg", "--theta", "1.0"])
    assert code == 3


def test_validate_subset():
    code, text = _capture(["validate", "--criteria", "1,3"])
    assert code == 0
    assert "[PASS] criterion 1" in text and "[PASS] criterion 3" in text
