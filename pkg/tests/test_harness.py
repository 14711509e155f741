"""Instance generation, oracles, and the theorem-suite report."""

from __future__ import annotations

import csv
import json

import jsonschema
import numpy as np
import pytest

from pmstat import EPS0, levy_distance, unit_step
from pmstat.harness import (
    DEFAULT_SUITE_SIZE,
    FOURTH_POWERS,
    LATE_POW2,
    LATE_SQUARES,
    Instance,
    SuiteConfig,
    generate_suite,
    oracle_density,
    oracle_levy_distance,
    random_step_fn,
    render_text,
    report_to_json,
    run_theorem_suite,
    space_pool,
    suite_passed,
    validate_report,
    write_csv,
    write_report,
)
from pmstat.summability import (
    EVENS,
    SQUARES,
    BlockMatrix,
    IdentityMatrix,
    cesaro1,
    squares_rows,
)


@pytest.fixture(scope="module")
def full_report() -> dict:
    return run_theorem_suite(generate_suite(seed=1), SuiteConfig())


class TestOracles:
    def test_random_step_fns_are_canonical(self) -> None:
        rng = np.random.default_rng(42)
        for _ in range(200):
            f = random_step_fn(rng)
            assert f.values[-1] == 1.0  # constructor enforces the rest

    def test_grid_oracle_on_known_distances(self) -> None:
        assert oracle_levy_distance(unit_step(0.3), EPS0) == pytest.approx(0.3, abs=1e-9)
        assert oracle_levy_distance(EPS0, EPS0) == pytest.approx(0.01, abs=1e-9)
        assert oracle_levy_distance(unit_step(5.0), EPS0) == pytest.approx(1.0, abs=1e-9)

    def test_bisection_agrees_with_grid_oracle(self) -> None:
        rng = np.random.default_rng(7)
        for _ in range(80):
            f = random_step_fn(rng)
            g = random_step_fn(rng)
            d_impl = levy_distance(f, g)
            d_grid = oracle_levy_distance(f, g)
            diff = d_grid - d_impl
            assert -2e-6 <= diff <= 0.01 + 1e-9, (f.jumps, g.jumps)

    @pytest.mark.parametrize(
        "make",
        [cesaro1, squares_rows, lambda: BlockMatrix(10), IdentityMatrix],
        ids=["cesaro", "squares", "block10", "identity"],
    )
    def test_density_oracle_agrees_with_vectorized_path(self, make) -> None:
        A = make()
        for member in (EVENS, SQUARES):
            want = oracle_density(A, member, 40)
            got = A.density_series(member, 40)
            assert np.allclose(got, want, atol=1e-9)


class TestIndexSetsForInstances:
    def test_fourth_powers(self) -> None:
        assert [k for k in range(1, 100) if FOURTH_POWERS(k)] == [1, 16, 81]
        assert int(FOURTH_POWERS.indicator(10_000).sum()) == 10

    def test_late_sets_are_sparse_enough_for_the_horizon(self) -> None:
        n = 10_000
        for s, count in ((LATE_SQUARES, 51), (LATE_POW2, 3)):
            ind = s.indicator(n)
            assert int(ind.sum()) == count
            partial = np.cumsum(ind) / np.arange(1, n + 1)
            # never crosses the epsilon floor of the density-ideal verdict
            assert partial.max() < 0.02

    def test_late_pow2_members(self) -> None:
        assert [k for k in range(1, 10_001) if LATE_POW2(k)] == [2048, 4096, 8192]


class TestInstanceGeneration:
    def test_space_pool_is_valid(self) -> None:
        pool = space_pool()
        assert set(pool) == {"EQ3", "EQ4", "LINE4", "LINE5"}
        for sp in pool.values():
            assert sp.validate_axioms().ok

    def test_deterministic_for_fixed_seed(self) -> None:
        a = [i.to_json() for i in generate_suite(seed=1)]
        b = [i.to_json() for i in generate_suite(seed=1)]
        assert a == b

    def test_seed_changes_instances(self) -> None:
        a = [i.to_json() for i in generate_suite(seed=1)]
        b = [i.to_json() for i in generate_suite(seed=2)]
        assert a != b

    def test_size_control(self) -> None:
        assert generate_suite(seed=1, size=0) == []
        cycled = generate_suite(seed=1, size=DEFAULT_SUITE_SIZE + 3)
        assert len(cycled) == DEFAULT_SUITE_SIZE + 3
        assert cycled[DEFAULT_SUITE_SIZE].family == cycled[0].family
        with pytest.raises(ValueError):
            generate_suite(seed=1, size=-1)

    def test_ground_truth_is_coherent(self) -> None:
        for inst in generate_suite(seed=3):
            assert isinstance(inst, Instance)
            pts = set(inst.space.points)
            assert inst.expected_lambda <= pts
            assert inst.expected_gamma <= pts
            assert inst.expected_lambda <= inst.expected_gamma
            if inst.expected_limit is not None:
                assert inst.expected_limit in pts
            assert inst.x.space is inst.space
            data = inst.to_json()
            assert data["name"] == inst.name
            assert data["expected_lambda"] == sorted(inst.expected_lambda)


class TestSuiteReport:
    def test_empty_suite_passes_vacuously(self) -> None:
        rep = run_theorem_suite([])
        assert rep["checks"] == []
        assert rep["summary"]["total"] == 0
        assert suite_passed(rep)
        validate_report(rep)

    def test_full_suite_passes(self, full_report: dict) -> None:
        s = full_report["summary"]
        assert s["ok"], render_text(full_report)
        assert s["failed"] == 0
        assert s["controls"] == 4
        assert s["controls_failing_as_expected"] == 4
        assert suite_passed(full_report)
        validate_report(full_report)

    def test_expected_check_groups(self, full_report: dict) -> None:
        groups = {c["group"] for c in full_report["checks"]}
        assert groups == {"foundations", "theorems", "controls"}
        control_names = {c["name"] for c in full_report["checks"] if c["control"]}
        assert control_names == {
            "control-first-argument-projection-passes-axioms",
            "control-alternating-sequence-admits-a-limit",
            "control-zero-tolerance-accepts-sparse-noise",
            "control-constant-column-matrix-is-regular",
        }

    def test_report_is_byte_deterministic(self, full_report: dict) -> None:
        again = run_theorem_suite(generate_suite(seed=1), SuiteConfig())
        assert report_to_json(again) == report_to_json(full_report)

    def test_render_text_lines(self, full_report: dict) -> None:
        text = render_text(full_report)
        lines = text.strip().split("\n")
        assert lines[0].startswith("pmstat-theorem-suite seed=1")
        assert any(line.startswith("PASS ") for line in lines)
        assert any(line.startswith("XFAIL") for line in lines)
        assert not any(line.startswith("FAIL ") for line in lines)
        assert lines[-1].startswith("summary:")
        # one rendered line per check plus header and summary
        assert len(lines) == len(full_report["checks"]) + 2

    def test_write_report_round_trip(self, full_report: dict, tmp_path) -> None:
        path = tmp_path / "report.json"
        write_report(full_report, str(path))
        assert json.loads(path.read_text()) == full_report

    def test_write_csv(self, full_report: dict, tmp_path) -> None:
        path = tmp_path / "report.csv"
        write_csv(full_report, str(path))
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["name", "group", "instance", "control", "passed", "residual"]
        assert len(rows) == len(full_report["checks"]) + 1

    def test_schema_rejects_malformed_reports(self, full_report: dict) -> None:
        broken = dict(full_report)
        del broken["summary"]
        with pytest.raises(jsonschema.ValidationError):
            validate_report(broken)
        broken = json.loads(report_to_json(full_report))
        del broken["checks"][0]["residual"]
        with pytest.raises(jsonschema.ValidationError):
            validate_report(broken)
