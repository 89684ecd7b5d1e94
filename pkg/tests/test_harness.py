"""Tests for the CLI, its file outputs, and the format helpers."""

import io
import json
import math
import contextlib

import numpy as np
import pytest

from wallips import formats
from wallips.harness import run_cli
from wallips.walks import prob_in_A


def _run(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = run_cli(argv)
    return code, buf.getvalue()


def _report(text):
    out = {}
    for line in text.strip().splitlines():
        k, _, v = line.partition("=")
        out[k] = v
    return out


# ---------------------------------------------------------------------------
# format helpers
# ---------------------------------------------------------------------------


def test_csv_roundtrip(tmp_path):
    path = tmp_path / "t.csv"
    meta = {"alpha": 0.5, "label": "x", "flag": True, "count": 7}
    rows = [[1, 2.5, "a"], [2, 1e-9, "b"]]
    formats.write_csv(path, "cone", meta, ["i", "v", "s"], rows)
    schema, got_meta, header, got_rows = formats.read_csv(path)
    assert schema == "cone/1"
    assert got_meta["alpha"] == "0.5"
    assert got_meta["flag"] == "1"
    assert header == ["i", "v", "s"]
    assert got_rows == [["1", "2.5", "a"], ["2", "1e-09", "b"]]


def test_csv_unknown_schema_rejected(tmp_path):
    path = tmp_path / "t.csv"
    formats.write_csv(path, "cone", {}, ["a"], [[1]])
    text = path.read_text().replace("cone/1", "cone/9")
    path.write_text(text)
    with pytest.raises(ValueError):
        formats.read_csv(path)
    path.write_text("no schema line\n")
    with pytest.raises(ValueError):
        formats.read_csv(path)


def test_csv_uses_lf_and_twelve_digits(tmp_path):
    path = tmp_path / "t.csv"
    formats.write_csv(path, "cone", {"v": 1 / 3}, ["x"], [[2 / 3]])
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert b"0.333333333333" in raw
    assert b"0.666666666667" in raw


def test_pgm_roundtrip(tmp_path):
    path = tmp_path / "t.pgm"
    grid = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    formats.write_pgm(path, grid, ["note=1"])
    back, comments = formats.read_pgm(path)
    assert np.array_equal(back, grid)
    assert any("note=1" in c for c in comments)
    raw = path.read_bytes()
    assert raw.startswith(b"P5")


def test_state_to_gray_mapping():
    assert formats.state_to_gray(np.array([0, 1]), 2).tolist() == [255, 0]
    assert formats.state_to_gray(np.array([0, 1, 2]), 3).tolist() == [255, 127, 0]
    assert formats.state_to_gray(np.array([0, 1, 2, 3]), 4).tolist() \
        == [255, 170, 85, 0]


# ---------------------------------------------------------------------------
# criterion / classify commands
# ---------------------------------------------------------------------------


def test_criterion_exit_codes():
    code, out = _run(["criterion", "--p11", "0", "--p10", "0.9",
                      "--p01", "0.02", "--p00", "0.02", "--state", "0"])
    assert code == 0
    rep = _report(out)
    assert rep["eff_holds"] == "true"
    assert rep["raw_holds"] == "true"
    assert float(rep["beta"]) == pytest.approx(0.1)
    code, out = _run(["criterion", "--p11", "0", "--p10", "0.9",
                      "--p01", "0.02", "--p00", "0.02", "--state", "1"])
    assert code == 1
    assert _report(out)["degenerate"] == "true"


def test_criterion_usage_error():
    code, _ = _run(["criterion", "--p11", "0", "--p10", "0.9",
                    "--p01", "1.5", "--p00", "0.02", "--state", "0"])
    assert code == 2


def test_unknown_flag_is_usage_error():
    code, _ = _run(["criterion", "--p11", "0", "--p10", "0.9",
                    "--p01", "0.02", "--p00", "0.02", "--bogus", "1"])
    assert code == 2


def test_classify_output():
    code, out = _run(["classify", "--p11", "0", "--p10", "0.3",
                      "--p01", "0.6", "--p00", "0.7"])
    assert code == 0
    rep = _report(out)
    assert rep["region"] == "prior_covered"
    assert rep["clause"] == "p10<1/2"


# ---------------------------------------------------------------------------
# sweep command
# ---------------------------------------------------------------------------


def test_sweep_grid_two(tmp_path):
    path = tmp_path / "s.csv"
    code, _ = _run(["sweep", "--p00", "0", "--grid", "2", "--out", str(path)])
    assert code == 0
    schema, meta, header, rows = formats.read_csv(path)
    assert schema == "sweep/1"
    assert len(rows) == 4
    cols = dict(zip(header, zip(*rows)))
    assert set(cols["p10"]) == {"0", "1"}
    assert set(cols["p01"]) == {"0", "1"}
    assert all(r for r in cols["region"])


def test_sweep_p00_dominant_has_no_open(tmp_path):
    path = tmp_path / "s.csv"
    code, _ = _run(["sweep", "--p00", "0.6", "--grid", "21",
                    "--out", str(path)])
    assert code == 0
    _, _, header, rows = formats.read_csv(path)
    region_i = header.index("region")
    assert all(r[region_i] != "open" for r in rows)
    positive = [
        r for r in rows
        if r[header.index("p10")] != "1" and r[header.index("p01")] != "0"
    ]
    assert all(
        r[region_i] in ("prior_covered", "newly_covered") for r in positive
    )


def test_sweep_boundary_straddles_curve(tmp_path):
    path = tmp_path / "s.csv"
    code, _ = _run(["sweep", "--p00", "0", "--grid", "41", "--out", str(path)])
    assert code == 0
    _, _, header, rows = formats.read_csv(path)
    h = {name: i for i, name in enumerate(header)}
    by_row = {}
    for r in rows:
        by_row.setdefault(float(r[h["p10"]]), []).append(
            (float(r[h["p01"]]), r[h["region"]])
        )
    for p10, pts in by_row.items():
        if p10 == 1.0:
            continue
        curve = math.sqrt(2.0) * (1.0 - p10)
        news = [p for p, reg in pts if reg == "newly_covered"]
        opens = [p for p, reg in pts if reg == "open"]
        if news:
            assert max(news) < curve
        if opens:
            assert min(opens) >= curve


# ---------------------------------------------------------------------------
# raster command
# ---------------------------------------------------------------------------


def test_raster_structure_and_determinism(tmp_path):
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    argv = ["raster", "--p11", "0", "--p10", "0.9", "--p01", "0.02",
            "--p00", "0.02", "--window", "80", "--horizon", "60",
            "--dt", "1", "--seed", "5", "--init", "random"]
    assert _run(argv + ["--out", str(a)])[0] == 0
    assert _run(argv + ["--out", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()
    grid, comments = formats.read_pgm(a)
    assert grid.shape == (61, 80)
    assert set(np.unique(grid)).issubset({0, 255})
    assert any("schema=raster/1" in c for c in comments)
    # wall regime: the top third (latest times) is mostly white (state 0)
    top = grid[: grid.shape[0] // 3]
    assert float(np.mean(top == 255)) > 0.5


def test_raster_deterministic_rule_turns_black(tmp_path):
    path = tmp_path / "c.pgm"
    code, _ = _run(["raster", "--p11", "1", "--p10", "1", "--p01", "1",
                    "--p00", "1", "--window", "30", "--horizon", "30",
                    "--dt", "1", "--seed", "2", "--init", "zero",
                    "--out", str(path)])
    assert code == 0
    grid, _ = formats.read_pgm(path)
    # bottom row is the all-0 start, top row is late time: everything black
    assert np.all(grid[-1] == 255)
    assert np.all(grid[0] == 0)


# ---------------------------------------------------------------------------
# couple command
# ---------------------------------------------------------------------------


def test_couple_csv(tmp_path):
    path = tmp_path / "c.csv"
    argv = ["couple", "--p11", "0", "--p10", "0.9", "--p01", "0.02",
            "--p00", "0.02", "--state", "0", "--left", "-80", "--right", "10",
            "--horizon", "40", "--seed", "3", "--init", "random",
            "--out", str(path)]
    assert _run(argv)[0] == 0
    schema, meta, header, rows = formats.read_csv(path)
    assert schema == "couple/1"
    assert header == ["site", "start", "end", "censored"]
    assert "agreement_time" in meta
    sites = [int(r[0]) for r in rows]
    assert all(j <= 0 for j in sites)
    ends = [float(r[2]) for r in rows if r[3] == "0"]
    if ends and meta["censored"] == "0":
        assert float(meta["agreement_time"]) == pytest.approx(max(ends))


# ---------------------------------------------------------------------------
# tail command
# ---------------------------------------------------------------------------


def test_tail_blind_rule_tracks_exponential(tmp_path):
    path = tmp_path / "t.csv"
    argv = ["tail", "--p11", "0.4", "--p10", "0.4", "--p01", "0.4",
            "--p00", "0.4", "--state", "0", "--t-grid", "0.5,1,2,3",
            "--reps", "500", "--seed", "9", "--out", str(path)]
    assert _run(argv)[0] == 0
    schema, meta, header, rows = formats.read_csv(path)
    assert schema == "tail/1"
    assert "note" in meta
    h = {name: i for i, name in enumerate(header)}
    for r in rows:
        t = float(r[h["t"]])
        s = float(r[h["survival"]])
        se = math.sqrt(math.exp(-t) * (1 - math.exp(-t)) / 500)
        assert abs(s - math.exp(-t)) < 4 * se + 1e-9
        assert float(r[h["lo95"]]) <= s <= float(r[h["hi95"]])
        assert float(r[h["t_scaled"]]) == pytest.approx(t * s, abs=1e-9)


def test_tail_runtime_error_exit_code(tmp_path):
    # frozen site-0 dynamics censor every replica
    path = tmp_path / "t.csv"
    code, _ = _run(["tail", "--p11", "0.3", "--p10", "1", "--p01", "0.3",
                    "--p00", "0", "--state", "0", "--t-grid", "2,4",
                    "--reps", "40", "--seed", "1", "--out", str(path)])
    assert code == 3


# ---------------------------------------------------------------------------
# walks command
# ---------------------------------------------------------------------------


def test_walks_csv_layout(tmp_path):
    path = tmp_path / "w.csv"
    argv = ["walks", "--beta", "0.1", "--delta", "0.1", "--steps", "12",
            "--seed", "3", "--out", str(path)]
    assert _run(argv)[0] == 0
    schema, meta, header, rows = formats.read_csv(path)
    assert schema == "walks/1"
    assert int(meta["steps"]) == 12
    h = {name: i for i, name in enumerate(header)}
    steps = [r for r in rows if r[h["kind"]] == "step"]
    intervals = [r for r in rows if r[h["kind"]] == "interval"]
    assert len(steps) == 13
    assert steps[0][h["x_in_a"]] == ""
    assert all(r[h["x_in_a"]] in ("0", "1") for r in steps[1:])
    assert intervals, "agreement intervals expected alongside the path"
    tau = int(meta["tau"])
    xs = [float(r[h["x"]]) for r in steps]
    ys = [float(r[h["y"]]) for r in steps]
    assert xs[tau] <= ys[tau]
    assert float(meta["m"]) == pytest.approx(max(xs[: tau + 1]))


def test_walks_steps_zero_header_only(tmp_path):
    path = tmp_path / "w.csv"
    assert _run(["walks", "--beta", "0.1", "--delta", "0.1", "--steps", "0",
                 "--seed", "1", "--out", str(path)])[0] == 0
    _, _, header, rows = formats.read_csv(path)
    assert rows == []
    assert header[0] == "kind"


def test_walks_from_rule_parameters(tmp_path):
    path = tmp_path / "w.csv"
    argv = ["walks", "--p11", "0", "--p10", "0.9", "--p01", "0.02",
            "--p00", "0.02", "--state", "0", "--steps", "8", "--seed", "2",
            "--out", str(path)]
    assert _run(argv)[0] == 0
    _, meta, _, _ = formats.read_csv(path)
    assert float(meta["beta"]) == pytest.approx(0.1)
    assert float(meta["delta"]) == pytest.approx(0.02)


def test_walks_rejects_mixed_parameter_modes(tmp_path):
    path = tmp_path / "w.csv"
    code, _ = _run(["walks", "--beta", "0.1", "--delta", "0.1",
                    "--p11", "0", "--p10", "0.9", "--p01", "0.02",
                    "--p00", "0.02", "--steps", "5", "--seed", "1",
                    "--out", str(path)])
    assert code == 2


def test_walks_strong_drift_crosses_quickly(tmp_path):
    taus = []
    for seed in range(100):
        path = tmp_path / f"w{seed}.csv"
        assert _run(["walks", "--beta", "0.5", "--delta", "0.01",
                     "--steps", "40", "--seed", str(seed),
                     "--out", str(path)])[0] == 0
        _, meta, _, _ = formats.read_csv(path)
        if meta["tau"] != "":
            taus.append(int(meta["tau"]))
    assert len(taus) >= 90
    assert float(np.median(taus)) < 20.0


# ---------------------------------------------------------------------------
# drift command
# ---------------------------------------------------------------------------


def test_drift_csv(tmp_path):
    path = tmp_path / "d.csv"
    argv = ["drift", "--beta", "0.1", "--delta", "0.1", "--T", "200",
            "--reps", "4000", "--seed", "17", "--out", str(path)]
    assert _run(argv)[0] == 0
    schema, meta, header, rows = formats.read_csv(path)
    assert schema == "drift/1"
    h = {name: i for i, name in enumerate(header)}
    table = {r[h["quantity"]]: r for r in rows}
    for q, ref in (("y", 5.5), ("x_up", 5.0), ("x_down", -5.0), ("z", -5.5)):
        row = table[q]
        assert float(row[h["reference"]]) == pytest.approx(ref)
        mc = float(row[h["mc"]])
        se = float(row[h["se"]])
        assert abs(mc - ref) < 4 * se
    assert "x_down_check" in table
    assert float(table["y_else"][h["reference"]]) == 1.0


# ---------------------------------------------------------------------------
# cone command
# ---------------------------------------------------------------------------


def test_cone_csv(tmp_path):
    path = tmp_path / "c.csv"
    argv = ["cone", "--T", "10", "--reps", "2000", "--seed", "23",
            "--out", str(path)]
    assert _run(argv)[0] == 0
    schema, meta, header, rows = formats.read_csv(path)
    assert schema == "cone/1"
    assert len(rows) == 1
    h = {name: i for i, name in enumerate(header)}
    row = rows[0]
    mean = float(row[h["mean_sigma"]])
    se = float(row[h["se_sigma"]])
    assert abs(mean - 11.0) < 4 * se
    assert float(row[h["chernoff_4t"]]) == pytest.approx(
        math.exp(-2 * 10.0 * (3 * math.log(3.0) - 3.0))
    )


# ---------------------------------------------------------------------------
# config file handling
# ---------------------------------------------------------------------------


def test_config_file_supplies_flags(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "p11": 0.0, "p10": 0.9, "p01": 0.02, "p00": 0.02, "state": 0,
    }))
    code, out = _run(["criterion", "--config", str(cfg)])
    assert code == 0
    assert _report(out)["eff_holds"] == "true"


def test_cli_overrides_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "p11": 0.0, "p10": 0.9, "p01": 0.02, "p00": 0.02, "state": 0,
    }))
    code, out = _run(["criterion", "--config", str(cfg), "--state", "1"])
    assert code == 1
    assert _report(out)["state"] == "1"


def test_config_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "p11": 0.0, "p10": 0.9, "p01": 0.02, "p00": 0.02, "state": 0,
        "mystery": 1,
    }))
    code, _ = _run(["criterion", "--config", str(cfg)])
    assert code == 2


def test_config_missing_required_rejected(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"p11": 0.0, "p10": 0.9}))
    code, _ = _run(["criterion", "--config", str(cfg)])
    assert code == 2


# ---------------------------------------------------------------------------
# determinism across commands
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("argv", [
    ["sweep", "--p00", "0.25", "--grid", "11"],
    ["couple", "--p11", "0", "--p10", "0.9", "--p01", "0.02", "--p00", "0.02",
     "--state", "0", "--left", "-60", "--right", "10", "--horizon", "30",
     "--seed", "4", "--init", "random"],
    ["tail", "--p11", "0.4", "--p10", "0.4", "--p01", "0.4", "--p00", "0.4",
     "--state", "0", "--t-grid", "1,2", "--reps", "60", "--seed", "8"],
    ["walks", "--beta", "0.1", "--delta", "0.1", "--steps", "15",
     "--seed", "6"],
    ["drift", "--beta", "0.1", "--delta", "0.1", "--T", "200",
     "--reps", "500", "--seed", "3"],
    ["cone", "--T", "5", "--reps", "300", "--seed", "2"],
])
def test_rerun_is_byte_identical(tmp_path, argv):
    a, b = tmp_path / "a.out", tmp_path / "b.out"
    assert _run(argv + ["--out", str(a)])[0] == 0
    assert _run(argv + ["--out", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()
