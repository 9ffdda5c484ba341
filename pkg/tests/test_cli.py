import csv
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chernscal import cli

FIG1 = ["solve-ruled", "--m", "4", "--p", "3", "--c", "3", "--lambda", "0.5", "--grid", "101"]


@pytest.fixture(scope="module")
def fig1_json(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig") / "fig1.json"
    assert cli.main(FIG1 + ["--out", str(out)]) == 0
    return out


def test_reference_solution_run(fig1_json):
    data = json.loads(fig1_json.read_text())
    assert data["status"] == "accepted"
    assert len(data["geometry"]["f_samples"]) == 101
    assert data["solution"]["positivity"]["mode"] == "proved-by-monotonicity"


@pytest.mark.parametrize("argv,code", [
    (["solve-ruled", "--m", "4", "--p", "3", "--c", "0.332816474254871", "--lambda", "0.5"], 3),
    (["solve-ruled", "--m", "4", "--p", "3", "--c", "1", "--lambda", "0.5"], 2),
    (["solve-ruled", "--m", "5", "--p", "3", "--c", "3", "--lambda", "0.5"], 1),
    (["solve-ruled", "--m", "4", "--p", "3", "--c", "3", "--lambda", "0.5", "--a", "1"], 1),
    (["solve-ruled", "--m", "4", "--p", "3", "--c", "3"], 1),
    (["solve-ruled", "--m", "4", "--p", "3", "--c", "x", "--lambda", "0.5"], 1),
    (["solve-ruled", "--m", "4", "--p", "3", "--c", "3", "--lambda", "0.5", "--grid", "5"], 1),
    (["solve-ruled", "--m", "4", "--p", "3", "--c", "3", "--a", "2", "--b", "1"], 0),
    (["no-such-command"], 1),
])
def test_solve_exit_codes(argv, code, capsys):
    assert cli.main(argv) == code


@given(st.sampled_from([4, 6]), st.fractions(-1, 4, max_denominator=4).filter(lambda p: p != 0),
       st.fractions(1, 40, max_denominator=8), st.fractions(1, 4, max_denominator=4))
def test_exit_code_is_total(m, p, c, lam):
    argv = ["solve-ruled", "--m", str(m), "--p", str(p), "--c", str(c), "--lambda", str(lam)]
    import contextlib
    import io
    with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
        assert cli.main(argv) in (0, 1, 2, 3, 4)


def test_json_round_trip_is_byte_identical(fig1_json, tmp_path):
    text = fig1_json.read_text()
    again = cli.dumps_json(json.loads(text))
    assert again == text


def test_csv_matches_json(fig1_json, tmp_path):
    out = tmp_path / "fig1.csv"
    assert cli.main(FIG1 + ["--format", "csv", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["x", "f", "ideal", "H"]
    geo = json.loads(fig1_json.read_text())["geometry"]
    for row, (x, f), (_, ideal) in zip(rows[1:], geo["f_samples"], geo["ideal_samples"]):
        assert row[:3] == [format(v, ".17g") for v in (x, f, ideal)]


def test_frame_check_models(tmp_path):
    out = tmp_path / "kt.json"
    assert cli.main(["frame-check", "--model", "kodaira-thurston", "--out", str(out)]) == 0
    gaps = json.loads(out.read_text())["gaps"]
    assert gaps["2s-sg"] == pytest.approx(gaps["N2"], abs=1e-10)
    out = tmp_path / "t.json"
    assert cli.main(["frame-check", "--model", "torus4", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["sC"] == d["s"] == d["sg"] == 0
    out = tmp_path / "nk.json"
    assert cli.main(["frame-check", "--model", "s3s3-nk", "--out", str(out)]) == 0
    g = json.loads(out.read_text())["gaps"]
    assert g["2s-sg"] == pytest.approx(-g["dcF2/6"], abs=1e-9)
    assert g["sH-2s"] == pytest.approx(-g["2dcF2/3"], abs=1e-9)


def test_frame_check_bad_model(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    import numpy as np
    rng = np.random.default_rng(5)
    entries = [[i, j, k, float(rng.standard_normal())]
               for i in range(4) for j in range(i + 1, 4) for k in range(4)]
    bad.write_text(json.dumps({"dim": 4, "structure_constants": entries, "metric": "identity",
                               "J": [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]}))
    assert cli.main(["frame-check", "--model", str(bad)]) == 1
    assert "jacobi" in capsys.readouterr().err
    assert cli.main(["frame-check", "--model", "nonexistent"]) == 1


def test_futaki_commands(tmp_path, capsys):
    out = tmp_path / "f.json"
    assert cli.main(["futaki", "--polytope", "interval.json", "--weight", "flat.json",
                     "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["futaki_values"]["z1"] == 0 and d["C_value"] == 4
    assert cli.main(["futaki", "--polytope", "square.json", "--weight", "flat.json",
                     "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert abs(d["futaki_values"]["z1"]) < 1e-12 and abs(d["futaki_values"]["z2"]) < 1e-12
    neg = tmp_path / "neg.json"
    neg.write_text(json.dumps({"a": ["-2"], "a_const": "1"}))
    assert cli.main(["futaki", "--polytope", "interval", "--weight", str(neg)]) == 1


def test_interval_solve(tmp_path):
    out = tmp_path / "i.json"
    assert cli.main(["interval-solve", "--a", "0", "--b", "1", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["kappa"] == pytest.approx(4) and d["compat"] <= 1e-14


def test_svg_deterministic_and_peak(fig1_json, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert cli.main(["plot", "--in", str(fig1_json), "--out", str(a)]) == 0
    assert cli.main(["plot", "--in", str(fig1_json), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.count("<polyline") == 2 and text.startswith("<?xml")
    samples = json.loads(fig1_json.read_text())["geometry"]["f_samples"]
    x, peak = max(samples, key=lambda s: s[1])
    # the printed expression peaks at x = 0.5796 with value 2.2612
    assert x == pytest.approx(0.58, abs=0.011) and peak == pytest.approx(2.2612, abs=1e-3)


def test_plot_rejects_bad_input(tmp_path):
    empty = tmp_path / "e.json"
    empty.write_text(json.dumps({"geometry": {"f_samples": [], "ideal_samples": []}}))
    assert cli.main(["plot", "--in", str(empty), "--out", str(tmp_path / "e.svg")]) == 1
    other = tmp_path / "o.json"
    other.write_text(json.dumps({"command": "futaki"}))
    assert cli.main(["plot", "--in", str(other), "--out", str(tmp_path / "o.svg")]) == 1


def test_scan_c(tmp_path):
    out = tmp_path / "s.json"
    assert cli.main(["scan-c", "--m", "4", "--p", "3", "--lambda", "0.5", "--c-min", "0.1",
                     "--c-max", "10", "--probes", "8", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["c_star"] <= 3


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "x.txt"
    cli.atomic_write(target, "hello\n")
    assert target.read_text() == "hello\n"
    assert [p.name for p in tmp_path.iterdir()] == ["x.txt"]
