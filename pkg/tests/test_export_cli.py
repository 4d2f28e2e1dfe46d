import csv
import io
import json

import numpy as np
import pytest

from adsmax import asymptotics as asy, cli, crowns, export, vortex as vx
from adsmax.acceptance import sample_crown


def run(argv, capsys):
    code = cli.run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dumps_json_handles_numpy_and_complex():
    text = export.dumps_json({"a": np.arange(3), "b": np.float64(0.5), "c": 1 + 2j, "d": np.int64(4)})
    assert json.loads(text) == {"a": [0, 1, 2], "b": 0.5, "c": [1.0, 2.0], "d": 4}


def test_write_csv(tmp_path):
    p = export.write_csv(tmp_path / "x" / "a.csv", ("u", "v"), [[0.1, 2], [np.float64(1 / 3), 5]])
    rows = list(csv.reader(p.open()))
    assert rows[0] == ["u", "v"] and rows[2] == ["0.333333333333", "5"]


def test_split_seams_breaks_wrapping_polyline():
    pts = np.array([[6.0, 1.0], [6.25, 1.0], [0.1, 1.0]])
    assert [len(line) for line in export._split_seams(pts)] == [2, 1]


def test_curve_svg_is_well_formed():
    data = sample_crown(2, np.random.default_rng(0))
    curve = crowns.curve_from_completion(crowns.build_completion(data))
    svg = export.curve_svg(curve)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert "<polyline" in svg and "<circle" in svg


def test_horo_csv_with_limit_row(capsys):
    code, out, _ = run(["horo", "--tmax", "10", "--theta", "0", "--samples", "11"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t", "re_w", "im_w", "s0", "s1", "s2", "s3"]
    assert len(rows) == 13
    assert rows[-1][0] == "limit" and [float(v) for v in rows[-1][3:]] == [1, 0, 1, 0]


def test_horo_rejects_bad_samples(capsys):
    code, _, err = run(["horo", "--samples", "1"], capsys)
    assert code == 1 and json.loads(err)["error"] == "validation"


def test_end_synthetic(capsys, tmp_path):
    code, out, _ = run(["end", "--n", "4", "--synthetic"], capsys)
    assert code == 0
    desc = json.loads(out)
    assert len(desc["vertices"]) == 4 and desc["equivariance_residual"] < 1e-9
    code, _, _ = run(["end", "--n", "5", "--synthetic", "--out", str(tmp_path)], capsys)
    assert code == 0 and (tmp_path / "end.json").exists() and (tmp_path / "end.svg").exists()


@pytest.mark.parametrize("argv", [["end", "--n", "2", "--synthetic"], ["end", "--n", "4"]])
def test_end_validation_exit(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1 and json.loads(err)["error"] == "validation"


def test_curve_output_and_shift(capsys):
    code, out, _ = run(["curve", "--k", "3", "--seed", "2"], capsys)
    assert code == 0
    base = json.loads(out)
    code, out, _ = run(["curve", "--k", "3", "--seed", "2", "--shift", "1"], capsys)
    assert code == 0
    shifted = json.loads(out)
    assert shifted["crown"]["label_offset"] == 1
    assert len(base["foliation"]) == len(base["vertices"]) - 1


def test_limits_zero_jet(capsys):
    code, out, _ = run(["limits", "--jet", "zero", "--theta", "0.2", "--theta", "1.5"], capsys)
    assert code == 0
    desc = json.loads(out)
    assert [lim["interval"] for lim in desc["limits"]] == ["J+", "J0"]
    assert desc["transitions"]["plus"]["residual"] < 1e-12


def test_limits_unstable_direction_rejected(capsys):
    code, _, _ = run(["limits", "--jet", "zero", "--theta", str(np.pi / 4)], capsys)
    assert code == 1


def test_nonconvergence_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise vx.ConvergenceError("no convergence", residual=0.5)

    monkeypatch.setattr(vx, "solve", boom)
    code, _, err = run(["solve", "--problem", "flat"], capsys)
    payload = json.loads(err)
    assert code == 2 and payload["error"] == "non-convergence" and payload["residual"] == 0.5


def test_limit_error_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise asy.LimitError("no Cauchy behaviour", gap=1e-3)

    monkeypatch.setattr(asy, "ray_limit", boom)
    code, _, _ = run(["limits", "--theta", "0.3"], capsys)
    assert code == 2


def test_bad_config_is_rejected(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"grid": [2, 5]}))
    code, _, err = run(["solve", "--config", str(cfg)], capsys)
    assert code == 1 and json.loads(err)["type"] == "ValidationError"
    code, _, _ = run(["solve", "--config", str(tmp_path / "missing.json")], capsys)
    assert code == 1


def test_config_crown_record(tmp_path, capsys):
    rec = {"length": 1.0, "offset": 0.0, "weights": [1, 2], "axis": 0.2}
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"crown": {"left": rec, "right": rec}}))
    code, out, _ = run(["curve", "--config", str(cfg)], capsys)
    assert code == 0 and len(json.loads(out)["crown"]["theta"]) == 2


def test_outputs_are_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert cli.run(["curve", "--k", "2", "--seed", "5", "--out", str(tmp_path / d)]) == 0
        assert cli.run(["end", "--n", "4", "--synthetic", "--seed", "5", "--out", str(tmp_path / d)]) == 0
    capsys.readouterr()
    for name in ("curve.json", "curve.svg", "end.json", "end.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_check_trivial_suite(capsys):
    code, out, _ = run(["check", "--suite", "trivial"], capsys)
    assert code == 0 and "FAIL" not in out
