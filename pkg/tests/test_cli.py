import json
import math
import os
import time
from pathlib import Path

import pytest

from holoparabolic import catalog
from holoparabolic.cli import ANALYSES, SCENARIO_SCHEMA, Scenario, dumps, explain, format_float, main, run_scenario
from holoparabolic.errors import ScenarioError, UnknownAnalysis

ROOT = Path(__file__).resolve().parents[1]


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_catalog_contents():
    names = catalog.names()
    for required in ["euclidean-plane", "euclidean-3space", "hyperbolic-plane", "hyperbolic-3space",
                     "de-sitter-slice", "einstein-de-sitter", "fischler-susskind", "cor35-plane-violation"]:
        assert required in names
    assert len(set(names)) == len(names)
    for raw in catalog.catalog():
        Scenario(raw)  # every entry validates


def test_catalog_returns_copies():
    a = catalog.get("fischler-susskind")
    a["entropy"]["density"] = 99.0
    assert catalog.get("fischler-susskind")["entropy"]["density"] == 1.0
    with pytest.raises(KeyError):
        catalog.get("nope")


def test_catalog_command(capsys):
    code, out, _ = _run(["catalog"], capsys)
    assert code == 0 and "einstein-de-sitter" in out
    code, out, _ = _run(["catalog", "--json"], capsys)
    assert [s["name"] for s in json.loads(out)] == catalog.names()


def test_explain():
    text = explain("thm31")
    assert "Ricci >= 0" in text and "sigma0" in text and "ransien" in text
    text = explain("prop44")
    assert "H^2 <= (f'/f)^2" in text and "parabolic" in text
    for name in ANALYSES:
        assert explain(name).startswith(name)
    with pytest.raises(UnknownAnalysis):
        explain("bogus")


def test_explain_command(capsys):
    assert _run(["explain", "cor35"], capsys)[0] == 0
    code, _, err = _run(["explain", "bogus"], capsys)
    assert code == 2 and "unknown analysis" in err


def test_fischler_susskind_bundle(tmp_path, capsys):
    out = tmp_path / "fs.json"
    code, _, _ = _run(["run", "fischler-susskind", "--out", str(out)], capsys)
    assert code == 0
    bundle = json.loads(out.read_text())
    assert bundle["tool"] == "holoparabolic" and bundle["seed"] == 0
    bound = bundle["results"]["entropy"]["report"]["density"]["bound"]
    assert bound["first_violation"] == pytest.approx(0.75, rel=1e-12)
    thm31 = bundle["results"]["thm31"]["report"]
    assert thm31["conclusion"] == "ViolationDetected"
    assert set(bundle["results"]) == {"entropy", "thm31"}


def test_plane_recurrence_bundle():
    bundle, failed = run_scenario("euclidean-plane-recurrence")
    assert not failed
    res = bundle["results"]
    assert res["geometry"]["report"]["capacity"]["status"] == "Parabolic"
    trend = res["recurrence-trend"]["report"]["trend"]
    assert trend["verdict"] == "recurrent" and trend["agrees"]


def test_malformed_expression_is_config_error(tmp_path, capsys):
    sc = {"name": "bad", "manifold": {"n": 3, "sigma": "exp("}, "analyses": ["geometry"]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(sc))
    code, out, err = _run(["run", str(path)], capsys)
    assert code == 2 and "manifold" in err and out == ""


def test_schema_errors_name_the_field(tmp_path, capsys):
    sc = {"name": "bad", "manifold": {"n": 1, "sigma": "r"}, "analyses": ["geometry", "teleport"]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(sc))
    code, _, err = _run(["run", str(path)], capsys)
    assert code == 2 and "manifold/n" in err and "analyses/1" in err


def test_invalid_json_reports_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "name": "x",\n  "analyses": [\n}\n')
    code, _, err = _run(["run", str(path)], capsys)
    assert code == 2 and "line 4" in err


def test_missing_inputs_and_files(capsys):
    with pytest.raises(ScenarioError, match="thm31 needs density"):
        Scenario({"name": "x", "manifold": {"n": 2, "sigma": "r"}, "analyses": ["thm31"]})
    code, _, err = _run(["run", "/nonexistent/scenario.json"], capsys)
    assert code == 2 and "cannot read" in err
    assert _run(["run", "fischler-susskind", "--seed", "-3"], capsys)[0] == 2


def test_numeric_failure_exit_code(tmp_path, capsys):
    sc = {"name": "starved", "manifold": {"n": 3, "sigma": "r"},
          "simulation": {"r0": 2, "inner": 1, "outer": 3, "paths": 200, "max_steps": 10},
          "analyses": ["geometry", "simulate"]}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(sc))
    out = tmp_path / "o.json"
    code, _, _ = _run(["run", str(path), "--out", str(out)], capsys)
    assert code == 1
    res = json.loads(out.read_text())["results"]
    assert res["geometry"]["status"] == "ok"
    assert res["simulate"]["status"] == "error"
    assert res["simulate"]["error"]["type"] == "ExcessiveCensoring"
    assert res["simulate"]["error"]["partial"]["censored"] > 2


def test_csv_tables(tmp_path):
    run_scenario("fischler-susskind", csv_dir=str(tmp_path))
    path = tmp_path / "fischler-susskind_entropy_bound_density.csv"
    lines = path.read_text().splitlines()
    assert lines[0] == "R,S,area_over_4,margin"
    assert len(lines) == 65
    R, S, A, margin = map(float, lines[1].split(","))
    assert margin == A - S


def test_trend_csv(tmp_path):
    run_scenario("euclidean-plane-recurrence", csv_dir=str(tmp_path))
    lines = (tmp_path / "euclidean-plane-recurrence_recurrence-trend_trend.csv").read_text().splitlines()
    assert lines[0] == "b,p_inner,p_outer,stderr" and len(lines) == 4


def test_float_format():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(3.0) == "3.0"
    assert format_float(math.inf) == '"inf"' and format_float(math.nan) == '"nan"'
    assert json.loads(dumps({"a": [1.5, 2], "b": None, "c": True})) == {"a": [1.5, 2], "b": None, "c": True}


def test_published_schema_matches():
    published = json.loads((ROOT / "docs" / "scenario.schema.json").read_text())
    assert published == json.loads(json.dumps(SCENARIO_SCHEMA))


def _strip_wall_time(text):
    bundle = json.loads(text)
    bundle.pop("wall_time")
    return bundle


@pytest.mark.parametrize("name", catalog.names())
def test_round_trip_and_runtime(name, tmp_path, capsys):
    texts = []
    for i in range(2):
        out = tmp_path / f"{i}.json"
        t = time.perf_counter()
        assert _run(["run", name, "--out", str(out)], capsys)[0] == 0
        assert time.perf_counter() - t < 60
        texts.append(out.read_text())
    a, b = texts
    strip = [line for line in a.splitlines() if not line.lstrip().startswith('"wall_time"')]
    strip_b = [line for line in b.splitlines() if not line.lstrip().startswith('"wall_time"')]
    assert strip == strip_b
    assert _strip_wall_time(a) == _strip_wall_time(b)


def test_seed_override_changes_simulation():
    sc = {"name": "quick", "manifold": {"n": 3, "sigma": "sinh(r)"},
          "simulation": {"r0": 2, "inner": 1, "outer": 3, "dt": 1e-3, "paths": 2000},
          "analyses": ["simulate"]}
    a, _ = run_scenario(sc, seed=1)
    b, _ = run_scenario(sc, seed=2)
    assert a["seed"] == 1 and b["seed"] == 2
    assert a["results"]["simulate"] != b["results"]["simulate"]


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "holoparabolic", "explain", "thm33"],
                         capture_output=True, text=True, env=dict(os.environ), check=False)
    assert res.returncode == 0 and res.stdout.startswith("thm33")
