"""Finite probabilistic metric spaces and their strong topology."""

from __future__ import annotations

import pytest

from pmstat import (
    EPS0,
    MAXIMAL,
    AxiomViolation,
    FinitePMSpace,
    StepDistFn,
    TriangleFn,
    build_equilateral,
    build_metric_induced,
    from_table,
    unit_step,
)

F_HALF = StepDistFn.from_pairs([(0.25, 0.5), (0.75, 1.0)])


def _degenerate_pair() -> FinitePMSpace:
    # off-diagonal entry equal to the unit step at 0: violates P-2
    table = {(p, q): EPS0 for p in "pq" for q in "pq"}
    return from_table(("p", "q"), table, MAXIMAL, validate=False)


class TestConstruction:
    def test_equilateral_basics(self, eq3: FinitePMSpace) -> None:
        assert eq3.points == ("a", "b", "c")
        assert eq3.ddf("a", "b") == F_HALF
        assert eq3.ddf("a", "a") == EPS0
        assert eq3.dist("a", "b") == 0.5
        assert eq3.dist("c", "c") == 0.0
        assert eq3.thresholds() == (0.5,)
        assert eq3.min_gap == 0.5
        assert eq3.tau.kind == "maximal"

    def test_equilateral_rejects_unit_step_at_zero(self) -> None:
        with pytest.raises(AxiomViolation) as exc:
            build_equilateral(("a", "b"), EPS0)
        assert exc.value.axiom == "P-2"
        assert isinstance(exc.value, ValueError)

    def test_single_point_carrier(self) -> None:
        sp = build_equilateral(("only",), EPS0)
        assert sp.validate_axioms().ok
        with pytest.raises(ValueError, match="no positive gaps"):
            sp.min_gap

    def test_empty_carrier_rejected(self) -> None:
        with pytest.raises(ValueError, match="at least one point"):
            FinitePMSpace((), {}, MAXIMAL)

    def test_duplicate_names_rejected(self) -> None:
        with pytest.raises(ValueError, match="duplicate"):
            build_equilateral(("a", "a"), F_HALF)

    def test_missing_pair_rejected(self) -> None:
        with pytest.raises(ValueError, match="missing the pair"):
            FinitePMSpace(("p", "q"), {("p", "p"): EPS0}, MAXIMAL)

    def test_metric_induced_line(self, line4: FinitePMSpace) -> None:
        assert line4.dist("w0", "w1") == pytest.approx(0.2)
        assert line4.dist("w0", "w3") == pytest.approx(0.6)
        assert line4.ddf("w0", "w2") == unit_step(0.4)
        assert line4.thresholds() == pytest.approx((0.2, 0.4, 0.6))
        assert line4.validate_axioms().ok

    def test_metric_rejections(self) -> None:
        with pytest.raises(AxiomViolation, match="asymmetric"):
            build_metric_induced(("p", "q"), {("p", "q"): 1.0, ("q", "p"): 2.0})
        with pytest.raises(AxiomViolation, match="negative"):
            build_metric_induced(("p", "q"), lambda p, q: -1.0 if p != q else 0.0)
        with pytest.raises(AxiomViolation, match="self-distance"):
            build_metric_induced(("p", "q"), lambda p, q: 1.0)
        with pytest.raises(AxiomViolation, match="zero distance"):
            build_metric_induced(("p", "q"), {("p", "q"): 0.0})
        with pytest.raises(ValueError, match="missing"):
            build_metric_induced(("p", "q", "r"), {("p", "q"): 1.0, ("q", "r"): 1.0})

    def test_metric_triangle_violation_has_witness(self) -> None:
        d = {("p", "q"): 1.0, ("q", "r"): 1.0, ("p", "r"): 3.0}
        with pytest.raises(AxiomViolation) as exc:
            build_metric_induced(("p", "q", "r"), d)
        assert exc.value.axiom == "triangle-inequality"
        assert set(exc.value.witness) == {"p", "q", "r"}

    def test_distances_above_one_saturate(self) -> None:
        sp = build_metric_induced(("p", "q"), {("p", "q"): 3.0})
        assert sp.dist("p", "q") == 1.0
        assert sp.strong_neighborhood("p", 1.0) == frozenset({"p"})
        assert sp.strong_neighborhood("p", 1.01) == frozenset({"p", "q"})


class TestAxiomValidation:
    def test_valid_spaces_report_ok(self, eq3, line4) -> None:
        for sp in (eq3, line4):
            rep = sp.validate_axioms()
            assert rep.ok
            assert rep.first is None
            assert rep.to_json()["ok"] is True

    def test_p2_detected_in_degenerate_table(self) -> None:
        rep = _degenerate_pair().validate_axioms()
        assert not rep.ok
        assert rep.first[0] == "P-2"

    def test_p1_detected(self) -> None:
        table = {
            ("p", "p"): unit_step(0.1),
            ("p", "q"): F_HALF,
            ("q", "p"): F_HALF,
            ("q", "q"): EPS0,
        }
        rep = from_table(("p", "q"), table, MAXIMAL, validate=False).validate_axioms()
        assert ("P-1", ("p",)) in [(v[0], v[1]) for v in rep.violations]

    def test_p3_detected(self) -> None:
        table = {
            ("p", "p"): EPS0,
            ("q", "q"): EPS0,
            ("p", "q"): F_HALF,
            ("q", "p"): unit_step(0.5),
        }
        with pytest.raises(AxiomViolation) as exc:
            from_table(("p", "q"), table, MAXIMAL)
        assert exc.value.axiom == "P-3"

    def test_p4_detected_under_min_supconv(self) -> None:
        # d(p,r)=3 > d(p,q)+d(q,r)=2, so tau(F_pq, F_qr) jumps before F_pr
        pts = ("p", "q", "r")
        d = {("p", "q"): 1.0, ("q", "r"): 1.0, ("p", "r"): 3.0}
        table = {}
        for a in pts:
            for b in pts:
                key = (a, b) if (a, b) in d else (b, a)
                table[(a, b)] = EPS0 if a == b else unit_step(d[key])
        sp = from_table(pts, table, TriangleFn("min"), validate=False)
        rep = sp.validate_axioms()
        assert not rep.ok
        tags = {v[0] for v in rep.violations}
        assert tags == {"P-4"}
        with pytest.raises(AxiomViolation) as exc:
            from_table(pts, table, TriangleFn("min"))
        assert exc.value.axiom == "P-4"
        assert exc.value.witness in {("p", "q", "r"), ("r", "q", "p")}


class TestStrongTopology:
    def test_neighborhood_at_thresholds(self, eq3: FinitePMSpace) -> None:
        assert eq3.strong_neighborhood("a", 0.5) == frozenset({"a"})
        assert eq3.strong_neighborhood("a", 0.51) == frozenset({"a", "b", "c"})
        assert eq3.strong_neighborhood("a", 0.1) == frozenset({"a"})

    def test_neighborhood_validation(self, eq3: FinitePMSpace) -> None:
        with pytest.raises(ValueError, match="positive"):
            eq3.strong_neighborhood("a", 0.0)
        with pytest.raises(ValueError, match="unknown point"):
            eq3.strong_neighborhood("z", 0.5)

    def test_neighborhoods_on_line(self, line4: FinitePMSpace) -> None:
        assert line4.strong_neighborhood("w0", 0.3) == frozenset({"w0", "w1"})
        assert line4.strong_neighborhood("w0", 0.45) == frozenset({"w0", "w1", "w2"})
        assert line4.strong_neighborhood("w1", 0.7) == frozenset(line4.points)

    def test_vicinity_is_symmetric_with_diagonal(self, line4: FinitePMSpace) -> None:
        v = line4.strong_vicinity(0.3)
        assert all((q, p) in v for (p, q) in v)
        assert all((p, p) in v for p in line4.points)
        assert ("w0", "w1") in v and ("w0", "w2") not in v
        with pytest.raises(ValueError, match="positive"):
            line4.strong_vicinity(-0.2)

    def test_composition_slack_on_line(self, line4: FinitePMSpace) -> None:
        # at 0.5 the hop w0->w2->w3 escapes V(0.5), so alpha backs off to 0.4
        assert line4.vicinity_composition_alpha(0.5) == pytest.approx(0.4)
        assert line4.vicinity_composition_alpha(0.21) == pytest.approx(0.2)

    def test_composition_slack_equilateral(self, eq3: FinitePMSpace) -> None:
        assert eq3.vicinity_composition_alpha(0.6) == 0.6
        assert eq3.vicinity_composition_alpha(0.5) == 0.5
        with pytest.raises(ValueError, match="positive"):
            eq3.vicinity_composition_alpha(0.0)

    def test_closure_is_identity(self, eq3, line4) -> None:
        for sp in (eq3, line4):
            pts = sp.points
            assert sp.strong_closure(()) == frozenset()
            assert sp.strong_closure((pts[0],)) == frozenset({pts[0]})
            assert sp.strong_closure(pts) == frozenset(pts)

    def test_no_set_limit_points_on_valid_space(self, eq3: FinitePMSpace) -> None:
        assert eq3.set_limit_points(("a", "b", "c")) == frozenset()
        assert eq3.set_limit_points(()) == frozenset()

    def test_degenerate_table_has_set_limit_points(self) -> None:
        sp = _degenerate_pair()
        assert sp.set_limit_points(("p", "q")) == frozenset({"p", "q"})
        assert sp.strong_closure(("p",)) == frozenset({"p", "q"})

    def test_compactness_is_universal(self, eq3: FinitePMSpace) -> None:
        assert eq3.is_strongly_compact(("a", "b"))
        assert eq3.is_strongly_compact(())
        with pytest.raises(ValueError, match="unknown"):
            eq3.is_strongly_compact(("a", "nope"))


class TestSerialization:
    def test_round_trip(self, eq3: FinitePMSpace) -> None:
        data = eq3.to_json()
        back = FinitePMSpace.from_json(data)
        assert back.points == eq3.points
        assert back.tau == eq3.tau
        assert all(
            back.table[(p, q)] == eq3.table[(p, q)]
            for p in eq3.points
            for q in eq3.points
        )

    def test_round_trip_metric_space(self, line4: FinitePMSpace) -> None:
        back = FinitePMSpace.from_json(line4.to_json())
        assert back.dist("w0", "w3") == line4.dist("w0", "w3")
        assert back.tau.kind == "min"

    def test_from_json_validates(self) -> None:
        data = _degenerate_pair().to_json()
        with pytest.raises(AxiomViolation):
            FinitePMSpace.from_json(data)
