import csv
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from beltrami_growth import cli
from beltrami_growth.plotting import emit_svg
from beltrami_growth.report import RunSummary, emit_csv, format_value

SVG_NS = "{http://www.w3.org/2000/svg}"


def _ids(path):
    return {el.get("id") for el in ET.parse(path).iter() if el.get("id")}


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_format_value():
    assert format_value(True) == "1" and format_value(False) == "0"
    assert format_value(math.pi) == "3.14159265359"
    assert format_value(-0.0) == "0"
    assert format_value(7) == "7"


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_formatted_values_reparse_to_finite_numbers(v):
    back = float(format_value(v))
    assert math.isfinite(back)
    assert back == pytest.approx(v, rel=1e-11, abs=0)


def test_emit_csv_layout(tmp_path):
    path = emit_csv(tmp_path / "sub" / "t.csv", ("a", "b"), [(i, i / 3) for i in range(24)])
    raw = open(path, "rb").read()
    assert b"\r" not in raw and raw.endswith(b"\n")
    assert len(raw.decode().splitlines()) == 25
    assert _read(path)[0] == ["a", "b"]


def test_emit_csv_rejects_empty_and_nonfinite(tmp_path):
    with pytest.raises(ValueError):
        emit_csv(tmp_path / "e.csv", ("a",), [])
    with pytest.raises(ValueError):
        emit_csv(tmp_path / "n.csv", ("a",), [(math.nan,)])
    with pytest.raises(ValueError):
        emit_csv(tmp_path / "w.csv", ("a", "b"), [(1.0,)])
    assert not list(tmp_path.iterdir())


def test_margin_plot_structure(tmp_path):
    path = emit_svg(tmp_path / "m.svg", [20, 40, 80], {"lhs": [1, 2, 3], "margin": [3, 1, -1]},
                    bounds={"bound": [4, 3, 2]}, logx=True, zero_line=True)
    ids = _ids(path)
    assert {"series-0", "series-1", "bound-0", "zero-line"} <= ids
    for gid in ("series-0", "series-1"):
        group = next(el for el in ET.parse(path).iter() if el.get("id") == gid)
        assert group.find(f".//{SVG_NS}path") is not None
    with pytest.raises(ValueError):
        emit_svg(tmp_path / "x.svg", [], {"a": []})


def test_svg_is_reproducible(tmp_path):
    args = ([1, 2, 3], {"a": [1, 4, 9]})
    a = emit_svg(tmp_path / "a.svg", *args, hline=(2.0, "ref"))
    b = emit_svg(tmp_path / "b.svg", *args, hline=(2.0, "ref"))
    assert open(a, "rb").read() == open(b, "rb").read()
    assert "reference-line" in _ids(a)


def test_run_summary_counts():
    s = RunSummary("x")
    s.record(True, "a")
    s.record(False, "(label) at R=1")
    t = RunSummary("y")
    t.record(True, "b")
    s.merge(t)
    assert s.checks_run == 3 and s.passes + len(s.failures) == s.checks_run
    assert not s.ok and s.line().startswith("FAIL x")


def test_cli_growth_example(tmp_path, capsys):
    code = cli.main(["growth", "--fixture", "log", "--grid", "2.82:30:24", "--out", str(tmp_path)])
    assert code == 0
    rows = _read(tmp_path / "log" / "growth.csv")
    assert len(rows) == 25
    ratio = np.array([float(r[rows[0].index("ratio")]) for r in rows[1:]])
    assert np.all(ratio >= 2)
    assert (tmp_path / "log" / "growth.svg").exists()
    assert capsys.readouterr().out.startswith("PASS log")


def test_cli_lemma2_constant_field(tmp_path):
    assert cli.main(["lemma2", "--field", "const:1", "--grid", "2.72:10:12", "--out", str(tmp_path)]) == 0
    rows = _read(tmp_path / "default" / "lemma2.csv")
    head, body = rows[0], rows[1:]
    assert len(body) == 12
    R = np.array([float(r[0]) for r in body])
    margin = np.array([float(r[head.index("margin")]) for r in body])
    assert np.all(margin >= math.pi ** 3 / 3 * np.log(np.log(R)) - 2 * math.pi - 1e-9)
    assert {"series-0", "series-1", "bound-0", "zero-line"} <= _ids(tmp_path / "default" / "lemma2.svg")


@pytest.mark.slow
def test_cli_capacity_example(tmp_path):
    assert cli.main(["capacity", "--ring", "1:2.71828", "--cells", "512", "--out", str(tmp_path), "--mask"]) == 0
    rows = _read(tmp_path / "default" / "capacity.csv")
    assert [int(r[2]) for r in rows[1:]] == [128, 256, 512]
    assert abs(float(rows[-1][3]) / (2 * math.pi) - 1) < 0.02
    assert (tmp_path / "default" / "capacity_mask.txt").exists()


def test_cli_dispersion_and_ringq(tmp_path):
    assert cli.main(["dispersion", "--field", "logplus", "--out", str(tmp_path)]) == 0
    assert len(_read(tmp_path / "default" / "dispersion.csv")) == 14
    assert cli.main(["ringq", "--fixture", "power:5", "--out", str(tmp_path)]) == 0
    rows = _read(tmp_path / "power5" / "ringq.csv")
    assert len(rows) == 5 and all(r[-1] == "1" for r in rows[1:])


def test_cli_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert cli.main(["ringq", "--fixture", "identity"]) == 0
    assert (tmp_path / "env" / "identity" / "ringq.csv").exists()


CONFIG = """\
[DEFAULT]
rings = 1:2.718281828459045; 2.718281828459045:20.085536923187668

[log]
fixture = log

[shifted]
fixture = power:2
center = 3,4
"""


def test_cli_config_and_parallel_agree(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(CONFIG)
    assert cli.main(["ringq", "--config", str(cfg), "--out", str(tmp_path / "seq")]) == 0
    assert cli.main(["ringq", "--config", str(cfg), "--parallel", "--out", str(tmp_path / "par")]) == 0
    for name in ("log", "shifted"):
        a = (tmp_path / "seq" / name / "ringq.csv").read_bytes()
        assert a == (tmp_path / "par" / name / "ringq.csv").read_bytes()
        assert len(a.splitlines()) == 5


@pytest.mark.parametrize("body, fragment", [
    ("[s]\ngrid = 2.0:10:5\n", "[s] grid"),
    ("[s]\nfixture = spiral\n", "[s]"),
    ("[s]\ncolour = red\n", "[s] colour: unknown key"),
    ("[s]\nring = 3:1\n", "[s] ring"),
    ("no sections here\n", "run.ini"),
])
def test_cli_config_errors_exit_2(tmp_path, capsys, body, fragment):
    cfg = tmp_path / "run.ini"
    cfg.write_text(body)
    assert cli.main(["growth", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert str(cfg) in err and fragment in err


def test_cli_flag_errors_exit_2(tmp_path, capsys):
    assert cli.main(["growth", "--grid", "1:10:24", "--out", str(tmp_path)]) == 2
    assert "--grid" in capsys.readouterr().err
    assert cli.main(["growth", "--fixture", "power:0.5", "--out", str(tmp_path)]) == 2
    assert cli.main(["growth", "--grid", "2.9:10:4", "--out", str(tmp_path)]) == 2


def test_cli_failure_sets_exit_1(tmp_path, monkeypatch, capsys):
    def failing(sc, out):
        s = RunSummary(sc.name)
        s.record(False, "growth-bound at R=42")
        return s

    monkeypatch.setitem(cli.RUNNERS, "ringq", failing)
    assert cli.main(["ringq", "--out", str(tmp_path)]) == 1
    assert "violated: growth-bound at R=42" in capsys.readouterr().out
