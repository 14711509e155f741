"""In-process checks for the command line entry points.

Each test drives ``main(argv)`` directly and inspects the exit code, the
captured stdout/stderr, and any JSON written through ``--out``.  The
cross-process byte determinism of the suite report is covered by the
acceptance tests.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from pmstat.cli import fn_from_spec, main, sequence_from_spec, space_from_spec
from pmstat.distfn import EPS0, StepDistFn, levy_distance, unit_step
from pmstat.harness import validate_report
from pmstat.pmspace import from_table
from pmstat.triangle import TRIANGLE_KINDS, TriangleFn

EQ3_SPEC = "equilateral:3:jumps:0.25:0.5,0.75:1.0"
F_HALF = StepDistFn.from_pairs([(0.25, 0.5), (0.75, 1.0)])


@pytest.fixture()
def degenerate_space_path(tmp_path: Path) -> str:
    # off-diagonal entry equal to the unit step at 0: a P-2 violation that
    # only surfaces when the file is loaded back with validation on
    table = {
        ("p", "p"): EPS0,
        ("q", "q"): EPS0,
        ("p", "q"): EPS0,
        ("q", "p"): EPS0,
    }
    space = from_table(("p", "q"), table, TriangleFn("min"), validate=False)
    path = tmp_path / "degenerate.json"
    path.write_text(json.dumps(space.to_json()))
    return str(path)


class TestSpecParsing:
    def test_fn_specs(self, tmp_path: Path) -> None:
        assert fn_from_spec("eps:0.4") == unit_step(0.4)
        assert fn_from_spec("jumps:0.25:0.5,0.75:1.0") == F_HALF
        path = tmp_path / "fn.json"
        path.write_text(json.dumps(F_HALF.to_json()))
        assert fn_from_spec(f"json:{path}") == F_HALF

    def test_fn_spec_errors(self) -> None:
        with pytest.raises(ValueError, match="bad jump"):
            fn_from_spec("jumps:0.25,0.5")
        with pytest.raises(ValueError, match="cannot parse"):
            fn_from_spec("bogus:1")

    def test_space_specs(self) -> None:
        eq = space_from_spec(EQ3_SPEC)
        assert eq.points == ("a", "b", "c")
        line = space_from_spec("line:4:0.2")
        assert line.points == ("v0", "v1", "v2", "v3")
        assert line.min_gap == pytest.approx(0.2)

    def test_space_spec_bounds(self) -> None:
        with pytest.raises(ValueError, match="1..26"):
            space_from_spec("equilateral:0:eps:0.5")
        with pytest.raises(ValueError, match="1..26"):
            space_from_spec("equilateral:27:eps:0.5")

    def test_sequence_specs(self) -> None:
        space = space_from_spec(EQ3_SPEC)
        assert sequence_from_spec(space, "const:b").values(3) == ["b", "b", "b"]
        x = sequence_from_spec(space, "except:a:squares")
        assert x.values(4) == ["c", "a", "a", "b"]
        # alternating holds the first point on the set, splice keeps the
        # base there and fills off it
        y = sequence_from_spec(space, "alternate:a,b:evens")
        assert y.values(4) == ["b", "a", "b", "a"]
        z = sequence_from_spec(space, "splice:const:a@squares@c")
        assert z.values(4) == ["a", "c", "c", "a"]

    def test_sequence_spec_errors(self) -> None:
        space = space_from_spec(EQ3_SPEC)
        with pytest.raises(ValueError, match="except needs"):
            sequence_from_spec(space, "except:a")
        with pytest.raises(ValueError, match="alternate needs"):
            sequence_from_spec(space, "alternate:a:evens")
        with pytest.raises(ValueError, match="splice needs"):
            sequence_from_spec(space, "splice:const:a@squares")
        with pytest.raises(ValueError, match="cannot parse"):
            sequence_from_spec(space, "walk:a")


class TestDistanceCommand:
    def test_prints_distance(self, capsys: pytest.CaptureFixture) -> None:
        assert main(["dl", "eps:0.2", "eps:0.5"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("levy distance:")

    def test_out_payload_matches_library(self, tmp_path: Path) -> None:
        out = tmp_path / "dl.json"
        assert main(["dl", "eps:0.2", "jumps:0.25:0.5,0.75:1.0", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["command"] == "dl"
        assert payload["distance"] == levy_distance(unit_step(0.2), F_HALF)
        assert StepDistFn.from_json(payload["f"]) == unit_step(0.2)
        assert StepDistFn.from_json(payload["g"]) == F_HALF

    def test_bad_spec_exits_2(self, capsys: pytest.CaptureFixture) -> None:
        assert main(["dl", "nonsense", "eps:0.5"]) == 2
        assert capsys.readouterr().err.startswith("error:")


class TestTnormCommand:
    @pytest.mark.parametrize("kind", TRIANGLE_KINDS)
    def test_every_kind_passes(self, kind: str, capsys: pytest.CaptureFixture) -> None:
        rc = main(["tnorm-check", "--tnorm", kind, "--samples", "4", "--seed", "3"])
        out = capsys.readouterr().out
        assert rc == 0, out
        assert "PASS commutative" in out
        assert "PASS associative" in out
        assert "FAIL" not in out

    def test_unknown_kind_rejected_by_parser(self) -> None:
        with pytest.raises(SystemExit) as exc:
            main(["tnorm-check", "--tnorm", "projection"])
        assert exc.value.code == 2

    def test_out_report(self, tmp_path: Path) -> None:
        out = tmp_path / "tnorm.json"
        assert main(["tnorm-check", "--tnorm", "min", "--samples", "3", "--seed", "1", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["tnorm"] == "min"
        assert payload["report"]["ok"] is True


class TestSpaceCommand:
    def test_valid_space(self, capsys: pytest.CaptureFixture) -> None:
        assert main(["space-validate", EQ3_SPEC]) == 0
        out = capsys.readouterr().out
        assert "points: a, b, c" in out
        assert "thresholds: 0.5" in out
        assert "all axioms hold" in out

    def test_line_space(self, capsys: pytest.CaptureFixture) -> None:
        assert main(["space-validate", "line:5:0.3"]) == 0
        assert "all axioms hold" in capsys.readouterr().out

    def test_degenerate_file_rejected_on_load(
        self, degenerate_space_path: str, capsys: pytest.CaptureFixture
    ) -> None:
        # from_json revalidates, so a bad table is an input error (2), not
        # a failed check (1)
        assert main(["space-validate", degenerate_space_path]) == 2
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert "P-2" in err

    def test_out_report(self, tmp_path: Path) -> None:
        out = tmp_path / "space.json"
        assert main(["space-validate", EQ3_SPEC, "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["points"] == ["a", "b", "c"]
        assert payload["report"]["ok"] is True
        assert payload["report"]["violations"] == []

    def test_missing_file_exits_2(self, capsys: pytest.CaptureFixture) -> None:
        assert main(["space-validate", "/no/such/space.json"]) == 2
        assert capsys.readouterr().err.startswith("error:")


class TestMatrixAndDensityCommands:
    def test_default_matrix_is_regular(self, capsys: pytest.CaptureFixture) -> None:
        assert main(["matrix-check", "--N", "2000"]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 3
        assert "FAIL" not in out

    def test_constant_column_fails(self, capsys: pytest.CaptureFixture) -> None:
        assert main(["matrix-check", "--matrix", "constcol", "--N", "2000"]) == 1
        assert "FAIL columns-vanish residual=1" in capsys.readouterr().out

    def test_bad_matrix_spec(self, capsys: pytest.CaptureFixture) -> None:
        assert main(["matrix-check", "--matrix", "hilbert"]) == 2
        assert "cannot parse matrix spec" in capsys.readouterr().err

    def test_density_reports_value(self, tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
        out = tmp_path / "density.json"
        assert main(["density", "evens", "--out", str(out)]) == 0
        assert "A^I-density of evens" in capsys.readouterr().out
        payload = json.loads(out.read_text())
        assert payload["matrix"] == "cesaro"
        assert payload["ideal"] == "fin"
        assert payload["verdict"]["status"] == "converged"
        assert payload["verdict"]["value"] == pytest.approx(0.5, abs=0.01)

    def test_density_ideal_spec(self, tmp_path: Path) -> None:
        out = tmp_path / "density.json"
        rc = main(["density", "squares", "--ideal", "density:cesaro", "--out", str(out)])
        assert rc == 0
        payload = json.loads(out.read_text())
        assert payload["ideal"] == "density-zero(cesaro)"


class TestDetectorCommands:
    def test_converge_accepts_planted_limit(self, capsys: pytest.CaptureFixture) -> None:
        rc = main(["converge", "--space", EQ3_SPEC, "--seq", "except:a:squares", "--limit", "a"])
        assert rc == 0
        assert "converged" in capsys.readouterr().out

    def test_converge_rejects_other_point(self, capsys: pytest.CaptureFixture) -> None:
        rc = main(["converge", "--space", EQ3_SPEC, "--seq", "except:a:squares", "--limit", "b"])
        assert rc == 1
        assert "diverged" in capsys.readouterr().out

    def test_missing_space_exits_2(self, capsys: pytest.CaptureFixture) -> None:
        assert main(["converge", "--seq", "const:a", "--limit", "a"]) == 2
        assert "needs --space" in capsys.readouterr().err

    def test_cauchy(self, capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
        out = tmp_path / "cauchy.json"
        rc = main(["cauchy", "--space", EQ3_SPEC, "--seq", "except:a:squares", "--out", str(out)])
        assert rc == 0
        assert "anchor a" in capsys.readouterr().out
        assert json.loads(out.read_text())["verdict"]["value"] == "a"

    def test_cauchy_alternator_fails(self, capsys: pytest.CaptureFixture) -> None:
        rc = main(["cauchy", "--space", EQ3_SPEC, "--seq", "alternate:a,b:evens"])
        assert rc == 1

    def test_limit_point_set(self, capsys: pytest.CaptureFixture) -> None:
        rc = main(["lambda", "--space", EQ3_SPEC, "--seq", "alternate:a,b:evens"])
        assert rc == 0
        assert "statistical limit points: {a, b}" in capsys.readouterr().out

    def test_cluster_point_set(self, tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
        out = tmp_path / "gamma.json"
        rc = main(["gamma", "--space", EQ3_SPEC, "--seq", "alternate:a,b:evens", "--out", str(out)])
        assert rc == 0
        assert "statistical cluster points: {a, b}" in capsys.readouterr().out
        assert json.loads(out.read_text())["points"] == ["a", "b"]


class TestConfigAndEnv:
    def test_config_supplies_options(self, tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"space": EQ3_SPEC, "tol": 0.02}))
        rc = main(["converge", "--config", str(cfg), "--seq", "except:a:squares", "--limit", "a"])
        assert rc == 0

    def test_config_unknown_key(self, tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        assert main(["matrix-check", "--config", str(cfg)]) == 2
        assert "unknown config key" in capsys.readouterr().err

    def test_config_must_be_object(self, tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
        cfg = tmp_path / "cfg.json"
        cfg.write_text("[1, 2]")
        assert main(["matrix-check", "--config", str(cfg)]) == 2
        assert "JSON object" in capsys.readouterr().err

    def test_flag_beats_config(self, tmp_path: Path) -> None:
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"matrix": "constcol"}))
        out = tmp_path / "density.json"
        rc = main(["density", "evens", "--config", str(cfg), "--matrix", "cesaro", "--out", str(out)])
        assert rc == 0
        assert json.loads(out.read_text())["matrix"] == "cesaro"
        rc = main(["density", "evens", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        assert json.loads(out.read_text())["matrix"] == "constcol:1"

    def test_horizon_alias_in_config(self, tmp_path: Path) -> None:
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"horizon": 2000}))
        out = tmp_path / "check.json"
        assert main(["matrix-check", "--config", str(cfg), "--out", str(out)]) == 0
        assert json.loads(out.read_text())["report"]["horizon"] == 2000

    def test_env_seed_used(self, monkeypatch: pytest.MonkeyPatch, tmp_path: Path, capsys) -> None:
        monkeypatch.setenv("PMSTAT_SEED", "77")
        out = tmp_path / "suite.json"
        assert main(["suite", "--size", "0", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["config"]["seed"] == 77

    def test_flag_beats_env_seed(self, monkeypatch: pytest.MonkeyPatch, tmp_path: Path, capsys) -> None:
        monkeypatch.setenv("PMSTAT_SEED", "77")
        out = tmp_path / "suite.json"
        assert main(["suite", "--size", "0", "--seed", "5", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["config"]["seed"] == 5

    def test_bad_env_seed(self, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture) -> None:
        monkeypatch.setenv("PMSTAT_SEED", "abc")
        assert main(["suite", "--size", "0"]) == 2
        assert capsys.readouterr().err.startswith("error:")


class TestSuiteCommand:
    def test_empty_suite_passes(self, capsys: pytest.CaptureFixture) -> None:
        assert main(["suite", "--size", "0"]) == 0
        out = capsys.readouterr().out
        assert "instances=0" in out.splitlines()[0]
        assert out.splitlines()[-1].endswith("ok=True")

    def test_small_suite_writes_report_and_csv(self, tmp_path: Path, capsys) -> None:
        out = tmp_path / "report.json"
        csv_path = tmp_path / "report.csv"
        rc = main(["suite", "--size", "2", "--out", str(out), "--csv", str(csv_path)])
        text = capsys.readouterr().out
        assert rc == 0, text
        report = json.loads(out.read_text())
        validate_report(report)
        assert report["summary"]["ok"] is True
        assert len(report["instances"]) == 2
        # header row plus one line per check
        rows = csv_path.read_text().strip().splitlines()
        assert len(rows) == len(report["checks"]) + 1
        assert rows[0].startswith("name,group,instance,control,passed,residual")

    def test_text_rendering_structure(self, capsys: pytest.CaptureFixture) -> None:
        assert main(["suite", "--size", "1", "--N", "4000"]) in (0, 1)
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("pmstat-theorem-suite seed=1")
        assert lines[-1].startswith("summary:")
        assert any(line.startswith("XFAIL") for line in lines)


class TestParserErrors:
    def test_help_exits_0(self) -> None:
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0

    def test_unknown_command(self) -> None:
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_required_flag(self) -> None:
        with pytest.raises(SystemExit) as exc:
            main(["converge", "--space", EQ3_SPEC, "--limit", "a"])
        assert exc.value.code == 2
