import json
import math
import subprocess
import sys

import pytest

from nonthin import cli


def _run(tmp_path, command, cfg, *extra):
    path = tmp_path / "cfg.json"
    path.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg))
    out = tmp_path / "out"
    return cli.main([command, "--config", str(path), "--out", str(out), *extra]), out


def _csv(path):
    lines = path.read_text().splitlines()
    header = lines[0]
    cols = lines[1].split(",")
    return header, [dict(zip(cols, line.split(","))) for line in lines[2:]]


def test_green_disk(tmp_path):
    code, out = _run(tmp_path, "green", {"region": {"type": "disk", "radius": 1}, "points": [2], "degree": 8})
    assert code == 0
    header, rows = _csv(out / "green.csv")
    assert header.startswith("# nonthin-csv v1") and "natural" in header
    assert float(rows[0]["value_natlog"]) == pytest.approx(math.log(2), abs=0.01)
    assert json.loads((out / "summary.json").read_text())["converged"] is True


def test_profile_slab_thin(tmp_path):
    cfg = {"region": {"type": "slab", "form": [1, 0], "interval": [-2, 2]}, "z": [3, 0],
           "schedule": [4, 8, 16], "degree": 8}
    code, out = _run(tmp_path, "profile", cfg)
    assert code == 0
    assert json.loads((out / "summary.json").read_text())["verdict"] == "thin-evidence"
    _, rows = _csv(out / "profile.csv")
    assert [float(r["R"]) for r in rows] == [4.0, 8.0, 16.0]


@pytest.mark.parametrize("cfg", [
    "{not json",
    {"region": {"type": "blob"}, "points": [2]},
    {"region": {"type": "disk", "radius": 1}, "points": [2], "degree": 99},
    {"region": {"type": "disk", "radius": 1}},
    {"command": "robin", "region": {"type": "disk", "radius": 1}, "points": [2]},
])
def test_invalid_input_exits_2_without_files(tmp_path, cfg):
    code, out = _run(tmp_path, "green", cfg)
    assert code == 2
    assert not out.exists()


def test_slope_requires_cm(tmp_path):
    code, out = _run(tmp_path, "slope", {"region": {"type": "disk", "radius": 1}, "schedule": [2, 4, 8]})
    assert code == 2 and not out.exists()


def test_robin_and_seedless_rerun(tmp_path):
    code, out = _run(tmp_path, "robin", {"region": {"type": "disk", "radius": 0.5}, "degree": 6}, "--seedless")
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["capacity"] == pytest.approx(0.5, abs=0.03)


def test_rerun_is_byte_identical(tmp_path):
    cfg = {"family": {"constructor": "exponential-approximant"},
           "genus0": {"n_range": {"start": 10, "stop": 100, "step": 10}, "t": 5.5}}
    code1, out = _run(tmp_path, "genus0", cfg)
    first = {p.name: p.read_bytes() for p in out.iterdir()}
    code2, _ = _run(tmp_path, "genus0", cfg)
    assert code1 == code2 == 0
    assert {p.name: p.read_bytes() for p in out.iterdir()} == first
    assert {"conditions.csv", "counting.csv", "summary.json"} <= set(first)


def test_plot_profile_svg(tmp_path):
    cfg = {"region": {"type": "disk", "radius": 1}, "z": 3, "schedule": [1.5, 2, 4], "degree": 6}
    code, out = _run(tmp_path, "plot", cfg, "--seedless")
    assert code == 0
    svg = (out / "profile.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg


def test_plot_circle(tmp_path):
    cfg = {"plot": "circle", "family": {"constructor": "linear-form-product", "zeros": {"table": [0.5, 2]}},
           "genus0": {"n_range": [1, 2, 3]}}
    code, out = _run(tmp_path, "plot", cfg)
    assert code == 0
    _, rows = _csv(out / "circle.csv")
    assert float(rows[0]["average_natlog"]) == pytest.approx(math.log(2), abs=1e-6)


def test_verify_subset(tmp_path):
    code, out = _run(tmp_path, "verify", {"only": [9, 11]})
    assert code == 0
    _, rows = _csv(out / "verify.csv")
    assert [r["passed"] for r in rows] == ["1", "1"]


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "nonthin", "green", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 2 and "--config" in res.stderr


def test_schemas_are_valid():
    import jsonschema
    for name in ("region", "family", "config"):
        jsonschema.Draft202012Validator.check_schema(cli.load_schema(name))
