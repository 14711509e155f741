"""Finite probabilistic metric spaces and their strong topology.

A probabilistic metric space assigns to each pair of points a distance
distribution function ``F_pq`` instead of a number, subject to:

* P-1: ``F_pp`` is the unit step at 0;
* P-2: ``F_pq`` differs from the unit step at 0 when p != q;
* P-3: ``F_pq = F_qp``;
* P-4: ``F_pr >= tau(F_pq, F_qr)`` pointwise, for a triangle function tau.

The strong topology is generated by the neighborhoods
``N_p(t) = { q : F_pq(t) > 1 - t }``.  The membership test is equivalent
to ``levy_distance(F_pq, unit_step(0)) < t``, so on a finite carrier the
whole topology is controlled by the finite set of exact pairwise values
``dist(p, q) = levy_distance_to_zero(F_pq)`` ("gap values").  By P-2
every off-diagonal gap is positive, which makes the strong topology on a
finite carrier discrete: every subset is closed and strongly compact and
no subset has limit points.  The methods below still compute these
notions from their definitions, so degenerate tables built with
``validate=False`` are handled honestly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .distfn import (
    EPS0,
    StepDistFn,
    evaluate,
    levy_distance_to_zero,
    pointwise_leq,
    unit_step,
)
from .triangle import MAXIMAL, TriangleFn


class AxiomViolation(ValueError):
    """A space axiom failed; carries the axiom tag and a witness tuple."""

    def __init__(self, axiom: str, witness: tuple, detail: str):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"{axiom} violated at {witness}: {detail}")


@dataclass(frozen=True)
class SpaceAxiomReport:
    violations: tuple[tuple[str, tuple, str], ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first(self) -> tuple[str, tuple, str] | None:
        return self.violations[0] if self.violations else None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"axiom": a, "witness": list(w), "detail": d} for a, w, d in self.violations
            ],
        }


@dataclass(frozen=True, eq=False)
class FinitePMSpace:
    """A finite carrier with a symmetric d.d.f. table and a triangle function.

    ``table`` maps ordered point pairs to d.d.f.s and contains every
    ordered pair including the diagonal.  Exact pairwise gap values and
    the threshold grid are precomputed.
    """

    points: tuple[str, ...]
    table: Mapping[tuple[str, str], StepDistFn]
    tau: TriangleFn

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("a space needs at least one point")
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate point names")
        for p in self.points:
            for q in self.points:
                if (p, q) not in self.table:
                    raise ValueError(f"table is missing the pair ({p}, {q})")
        dist = {
            (p, q): levy_distance_to_zero(self.table[(p, q)])
            for p in self.points
            for q in self.points
        }
        thresholds = tuple(sorted({d for d in dist.values() if d > 0.0}))
        object.__setattr__(self, "_dist", dist)
        object.__setattr__(self, "_thresholds", thresholds)

    # -- basic queries ----------------------------------------------------

    def ddf(self, p: str, q: str) -> StepDistFn:
        """The distance distribution function of the pair (p, q)."""
        return self.table[(p, q)]

    def dist(self, p: str, q: str) -> float:
        """Exact Levy distance from F_pq to the unit step at 0.

        This is the numeric gap that drives every strong-topology test:
        q lies in N_p(t) exactly when dist(p, q) < t.
        """
        return self._dist[(p, q)]

    def thresholds(self) -> tuple[float, ...]:
        """Sorted distinct positive gap values.

        As t crosses a threshold the vicinity V(t) changes; between
        thresholds nothing moves, so quantifiers over all t > 0 reduce
        to this finite grid.
        """
        return self._thresholds

    @property
    def min_gap(self) -> float:
        """Smallest positive gap value; below it every neighborhood is a singleton."""
        if not self._thresholds:
            raise ValueError("single-point space has no positive gaps")
        return self._thresholds[0]

    # -- validation --------------------------------------------------------

    def validate_axioms(self) -> SpaceAxiomReport:
        """Check P-1 through P-4 exhaustively and report all violations."""
        bad: list[tuple[str, tuple, str]] = []
        for p in self.points:
            if self.table[(p, p)] != EPS0:
                bad.append(("P-1", (p,), "diagonal entry is not the unit step at 0"))
        for p, q in itertools.combinations(self.points, 2):
            if self.table[(p, q)] == EPS0:
                bad.append(("P-2", (p, q), "off-diagonal entry equals the unit step at 0"))
            if self.table[(p, q)] != self.table[(q, p)]:
                bad.append(("P-3", (p, q), "table is not symmetric"))
        for p in self.points:
            for q in self.points:
                for r in self.points:
                    lower = self.tau(self.table[(p, q)], self.table[(q, r)])
                    if not pointwise_leq(lower, self.table[(p, r)]):
                        bad.append(
                            ("P-4", (p, q, r), "tau(F_pq, F_qr) exceeds F_pr somewhere")
                        )
        return SpaceAxiomReport(tuple(bad))

    # -- strong topology ----------------------------------------------------

    def strong_neighborhood(self, p: str, t: float) -> frozenset[str]:
        """``N_p(t) = { q : F_pq(t) > 1 - t }`` for t > 0."""
        if t <= 0.0:
            raise ValueError(f"neighborhood parameter must be positive, got {t}")
        if p not in self.points:
            raise ValueError(f"unknown point {p!r}")
        return frozenset(
            q for q in self.points if evaluate(self.table[(p, q)], t) > 1.0 - t
        )

    def strong_vicinity(self, u: float) -> frozenset[tuple[str, str]]:
        """All ordered pairs within strong distance u: ``{(p,q) : F_pq(u) > 1-u}``."""
        if u <= 0.0:
            raise ValueError(f"vicinity parameter must be positive, got {u}")
        return frozenset(
            (p, q)
            for p in self.points
            for q in self.points
            if evaluate(self.table[(p, q)], u) > 1.0 - u
        )

    def vicinity_composition_alpha(self, u: float) -> float:
        """A slack alpha in (0, u] with ``V(alpha) о V(alpha) <= V(u)``.

        Searches the candidate grid {u} plus all thresholds at or below u
        in descending order and returns the first (largest) value that
        works.  On a valid space the smallest positive gap always works,
        because V at that level is the diagonal.
        """
        if u <= 0.0:
            raise ValueError(f"vicinity parameter must be positive, got {u}")
        target = self.strong_vicinity(u)
        cands = sorted({u} | {t for t in self._thresholds if t <= u}, reverse=True)
        for alpha in cands:
            v = self.strong_vicinity(alpha)
            composed = {
                (p, r)
                for (p, q1) in v
                for (q2, r) in v
                if q1 == q2
            }
            if composed <= target:
                return alpha
        raise ValueError(
            f"no composition slack found down to {cands[-1]}; vicinities do not compose"
        )

    def strong_closure(self, members: Iterable[str]) -> frozenset[str]:
        """Points c such that every N_c(t) meets the set.

        For finite sets the condition collapses to ``min over members of
        dist(c, e) == 0``; on a valid space only points of the set itself
        qualify, so every subset is strongly closed.
        """
        m = self._point_set(members)
        if not m:
            return frozenset()
        return frozenset(
            c for c in self.points if min(self._dist[(c, e)] for e in m) == 0.0
        )

    def set_limit_points(self, members: Iterable[str]) -> frozenset[str]:
        """Points l such that every N_l(t) meets the set away from l.

        Empty on every valid finite space (off-diagonal gaps are
        positive); nonempty only for degenerate unvalidated tables.
        """
        m = self._point_set(members)
        out = set()
        for l in self.points:
            others = m - {l}
            if others and min(self._dist[(l, e)] for e in others) == 0.0:
                out.add(l)
        return frozenset(out)

    def is_strongly_compact(self, members: Iterable[str]) -> bool:
        """Every subset of a finite carrier is strongly compact."""
        self._point_set(members)
        return True

    def _point_set(self, members: Iterable[str]) -> frozenset[str]:
        m = frozenset(members)
        unknown = m - set(self.points)
        if unknown:
            raise ValueError(f"unknown points {sorted(unknown)}")
        return m

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        pairs = []
        for i, p in enumerate(self.points):
            for q in self.points[i + 1 :]:
                pairs.append([p, q, self.table[(p, q)].to_json()])
        return {"points": list(self.points), "tnorm": self.tau.kind, "F": pairs}

    @classmethod
    def from_json(cls, data: Mapping) -> "FinitePMSpace":
        points = tuple(data["points"])
        tau = TriangleFn.from_tag(data["tnorm"])
        table: dict[tuple[str, str], StepDistFn] = {(p, p): EPS0 for p in points}
        for p, q, jumps in data["F"]:
            f = StepDistFn.from_json(jumps)
            table[(p, q)] = f
            table[(q, p)] = f
        return from_table(points, table, tau)


def from_table(
    points: Sequence[str],
    table: Mapping[tuple[str, str], StepDistFn],
    tau: TriangleFn,
    validate: bool = True,
) -> FinitePMSpace:
    """Build a space from an explicit table; raise on the first axiom violation.

    ``validate=False`` skips the axiom check and is meant for negative
    tests against degenerate tables.
    """
    space = FinitePMSpace(tuple(points), dict(table), tau)
    if validate:
        report = space.validate_axioms()
        if not report.ok:
            axiom, witness, detail = report.first
            raise AxiomViolation(axiom, witness, detail)
    return space


def build_equilateral(points: Sequence[str], f: StepDistFn) -> FinitePMSpace:
    """The space where every distinct pair shares the d.d.f. ``f``.

    Uses the maximal triangle function; valid for any f other than the
    unit step at 0 (with two or more points).  A single-point carrier is
    valid for every f.
    """
    pts = tuple(points)
    if len(pts) >= 2 and f == EPS0:
        raise AxiomViolation("P-2", (pts[0], pts[1]), "equilateral d.d.f. equals the unit step at 0")
    table: dict[tuple[str, str], StepDistFn] = {}
    for p in pts:
        for q in pts:
            table[(p, q)] = EPS0 if p == q else f
    return from_table(pts, table, MAXIMAL)


def build_metric_induced(
    points: Sequence[str],
    d: Mapping[tuple[str, str], float] | Callable[[str, str], float],
) -> FinitePMSpace:
    """The space with ``F_pq = unit_step(d(p, q))``.

    ``d`` must be a metric on the points; symmetry, positivity, and the
    triangle inequality are verified exhaustively and a violation is
    rejected with its witness.  The triangle function is the
    sup-convolution under the minimum t-norm, under which unit steps add
    their locations, so P-4 is the triangle inequality itself.
    """
    pts = tuple(points)

    def metric(p: str, q: str) -> float:
        if callable(d):
            return float(d(p, q))
        if (p, q) in d:
            return float(d[(p, q)])
        if (q, p) in d:
            return float(d[(q, p)])
        if p == q:
            return 0.0
        raise ValueError(f"metric value missing for pair ({p}, {q})")

    vals: dict[tuple[str, str], float] = {}
    for p in pts:
        for q in pts:
            v = metric(p, q)
            if math.isnan(v) or v < 0.0:
                raise AxiomViolation("metric", (p, q), f"negative or NaN distance {v}")
            vals[(p, q)] = v
    for p in pts:
        if vals[(p, p)] != 0.0:
            raise AxiomViolation("metric", (p,), "nonzero self-distance")
    for p, q in itertools.combinations(pts, 2):
        if vals[(p, q)] != vals[(q, p)]:
            raise AxiomViolation("metric", (p, q), "asymmetric distances")
        if vals[(p, q)] == 0.0:
            raise AxiomViolation("metric", (p, q), "zero distance between distinct points")
    for p in pts:
        for q in pts:
            for r in pts:
                if vals[(p, r)] > vals[(p, q)] + vals[(q, r)] + 1e-12:
                    raise AxiomViolation(
                        "triangle-inequality",
                        (p, q, r),
                        f"d(p,r)={vals[(p, r)]} exceeds d(p,q)+d(q,r)={vals[(p, q)] + vals[(q, r)]}",
                    )
    table = {
        (p, q): EPS0 if p == q else unit_step(vals[(p, q)]) for p in pts for q in pts
    }
    return from_table(pts, table, TriangleFn("min"))
