"""Finite-horizon detectors for strong and matrix-ideal statistical convergence.

A sequence over a finite probabilistic metric space is examined through
the strong neighborhoods ``N_L(t) = { q : F_Lq(t) > 1 - t }``.  Strong
convergence to L means the sequence eventually stays in every N_L(t);
A^I-statistical convergence relaxes "eventually" to "outside an index
set of A^I-density zero".  On a finite carrier the neighborhoods change
only at the finitely many exact gap values ``dist(p, q)``, so the
quantifier over all t > 0 reduces to that threshold grid and every
detector below is exact in t.

All detectors are pure functions of (sequence, matrix, ideal, horizon,
tolerance) and return ``Verdict`` values; nothing here claims an actual
limit, only tail behavior up to the horizon.  Membership of an index k
in a neighborhood is evaluated both through the distribution function
``F_{x_k L}(t) > 1 - t`` and through the equivalent exact Levy gap
``dist(x_k, L) < t``; a disagreement away from the float knife edge is
an internal error.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .pmspace import FinitePMSpace
from .summability import (
    CONVERGED,
    DEFAULT_HORIZON,
    DEFAULT_TOL,
    DIVERGED,
    INCONCLUSIVE,
    Ideal,
    IndexSet,
    SummMatrix,
    Verdict,
    ai_density_is_null,
    tail_start,
)

_KNIFE_EDGE = 1e-9


@dataclass(eq=False)
class IndexedSequence:
    """A sequence of carrier points given by a total generator on k >= 1.

    ``annotations`` carries ground-truth metadata attached by
    constructors or the instance generator (intended limit, exceptional
    sets, expected cluster sets); detectors never read it.  Values and
    integer codes are cached per horizon.
    """

    space: FinitePMSpace
    fn: Callable[[int], str]
    description: str
    annotations: dict = field(default_factory=dict)
    _values: list = field(default_factory=list, repr=False)
    _codes: dict = field(default_factory=dict, repr=False)

    def values(self, n: int) -> list[str]:
        while len(self._values) < n:
            k = len(self._values) + 1
            v = self.fn(k)
            if v not in self.space.points:
                raise ValueError(f"sequence value {v!r} at k={k} is not a carrier point")
            self._values.append(v)
        return self._values[:n]

    def value_codes(self, n: int) -> np.ndarray:
        cached = self._codes.get(n)
        if cached is not None:
            return cached
        order = {p: i for i, p in enumerate(self.space.points)}
        codes = np.fromiter((order[v] for v in self.values(n)), dtype=np.int64, count=n)
        self._codes[n] = codes
        return codes


def constant_sequence(space: FinitePMSpace, point: str) -> IndexedSequence:
    _check_point(space, point)
    return IndexedSequence(space, lambda k: point, f"const:{point}", {"limit": point})


def eventually_constant(
    space: FinitePMSpace,
    limit: str,
    exceptional: IndexSet,
    off: str | Sequence[str] | None = None,
) -> IndexedSequence:
    """``x_k = limit`` off the exceptional set, other points on it.

    ``off`` names the point (or cycle of points) used on the exceptional
    indices; by default the other carrier points are cycled.
    """
    _check_point(space, limit)
    if off is None:
        pool = tuple(p for p in space.points if p != limit) or (limit,)
    elif isinstance(off, str):
        pool = (off,)
    else:
        pool = tuple(off)
    for p in pool:
        _check_point(space, p)

    def gen(k: int) -> str:
        return pool[k % len(pool)] if exceptional.fn(k) else limit

    return IndexedSequence(
        space,
        gen,
        f"except:{limit}:{exceptional.name}",
        {"limit": limit, "defect_set": exceptional},
    )


def alternating(
    space: FinitePMSpace, p: str, q: str, selector: IndexSet
) -> IndexedSequence:
    """``x_k = p`` on the selector set, ``q`` off it."""
    _check_point(space, p)
    _check_point(space, q)
    return IndexedSequence(
        space,
        lambda k: p if selector.fn(k) else q,
        f"alternate:{p},{q}:{selector.name}",
        {"cluster_pair": (p, q), "selector": selector},
    )


def from_values(space: FinitePMSpace, values: Sequence[str], tail: str) -> IndexedSequence:
    """Explicit prefix, then the constant ``tail``."""
    vals = tuple(values)
    for v in vals:
        _check_point(space, v)
    _check_point(space, tail)
    return IndexedSequence(
        space,
        lambda k: vals[k - 1] if k <= len(vals) else tail,
        f"list[{len(vals)}]-then-{tail}",
        {"limit": tail},
    )


def splice(x: IndexedSequence, keep: IndexSet, fill: str) -> IndexedSequence:
    """``y_k = x_k`` on the kept set and ``fill`` elsewhere.

    The agreement set is recorded so equivalence checks can verify the
    two sequences differ only inside a declared index set.
    """
    _check_point(x.space, fill)
    return IndexedSequence(
        x.space,
        lambda k: x.fn(k) if keep.fn(k) else fill,
        f"splice({x.description}|{keep.name}|{fill})",
        {"spliced_from": x.description, "agreement_set": keep, "fill": fill},
    )


def visit_set(x: IndexedSequence, point: str) -> IndexSet:
    """Indices where the sequence visits the point; total predicate."""
    _check_point(x.space, point)
    return IndexSet(f"visits:{point}", lambda k: x.fn(k) == point)


def visit_witnesses(x: IndexedSequence, candidates: Iterable[str] | None = None) -> dict[str, IndexSet]:
    """Visit sets for each candidate point.

    On a finite carrier a subsequence can converge strongly to c only by
    eventually sitting at c, so the visit set is the canonical witness:
    a nonthin witness exists for c exactly when the visit set is nonthin.
    """
    pts = tuple(candidates) if candidates is not None else x.space.points
    return {p: visit_set(x, p) for p in pts}


def _check_point(space: FinitePMSpace, p: str) -> None:
    if p not in space.points:
        raise ValueError(f"unknown carrier point {p!r}")


def _dist_to(x: IndexedSequence, target: str, n: int) -> np.ndarray:
    row = np.array([x.space.dist(p, target) for p in x.space.points])
    return row[x.value_codes(n)]


def _neighborhood_defect(
    x: IndexedSequence, target: str, t: float, n: int
) -> IndexSet:
    """Index set ``{ k : x_k not in N_target(t) }`` with a fast indicator.

    Computed from ``F_{x_k, target}(t) <= 1 - t`` and cross-checked
    against the exact gap form ``dist(x_k, target) >= t``; the two agree
    by construction except possibly one float ulp at the knife edge.
    """
    space = x.space
    by_f = {p: space.ddf(p, target)(t) <= 1.0 - t for p in space.points}
    for p in space.points:
        by_gap = space.dist(p, target) >= t
        if by_f[p] != by_gap and abs(space.dist(p, target) - t) > _KNIFE_EDGE:
            raise RuntimeError(
                f"neighborhood forms disagree for ({p}, {target}) at t={t}"
            )
    point_flags = np.array([by_f[p] for p in space.points], dtype=bool)
    arr = point_flags[x.value_codes(n)]

    def fn(k: int) -> bool:
        return by_f[x.fn(k)]

    def vec(m: int) -> np.ndarray:
        if m <= n:
            return arr[:m]
        return np.fromiter((fn(k) for k in range(1, m + 1)), dtype=bool, count=m)

    return IndexSet(f"defect({target},t={t})", fn, vec)


def _value_index_set(
    x: IndexedSequence, name: str, point_pred: Callable[[str], bool], n: int
) -> IndexSet:
    flags = {p: bool(point_pred(p)) for p in x.space.points}
    arr = np.array([flags[p] for p in x.space.points], dtype=bool)[x.value_codes(n)]

    def fn(k: int) -> bool:
        return flags[x.fn(k)]

    def vec(m: int) -> np.ndarray:
        if m <= n:
            return arr[:m]
        return np.fromiter((fn(k) for k in range(1, m + 1)), dtype=bool, count=m)

    return IndexSet(name, fn, vec)


def _grid(space: FinitePMSpace) -> tuple[float, ...]:
    ts = space.thresholds()
    # single-point carrier: any positive t behaves the same
    return ts if ts else (1.0,)


# ---------------------------------------------------------------------------
# detectors


def strong_conv_detect(
    x: IndexedSequence, limit: str, horizon: int = DEFAULT_HORIZON, tol: float = DEFAULT_TOL
) -> Verdict:
    """Strong convergence at a finite horizon.

    Requires an entry index k0 <= horizon/2 such that the sequence stays
    inside every N_limit(t) from k0 on, for all t on the exact threshold
    grid.  The margin keeps "eventually" honest: violations in the late
    tail cannot hide behind the horizon.
    """
    _check_point(x.space, limit)
    d = _dist_to(x, limit, horizon)
    k0 = 1
    for t in _grid(x.space):
        bad = np.nonzero(d >= t)[0]
        if len(bad):
            k0 = max(k0, int(bad[-1]) + 2)
    if k0 <= horizon // 2:
        return Verdict(CONVERGED, limit, 0.0, tol, witness=k0)
    late = k0 > horizon - max(1, horizon // 10)
    residual = (k0 - 1) / horizon
    return Verdict(DIVERGED if late else INCONCLUSIVE, limit, residual, tol, witness=k0)


def _aggregate(per_t: dict[float, Verdict], value: object, tol: float, witness: object = None) -> Verdict:
    statuses = [v.status for v in per_t.values()]
    residual = max((v.residual for v in per_t.values()), default=0.0)
    if all(s == CONVERGED for s in statuses):
        status = CONVERGED
    elif DIVERGED in statuses:
        status = DIVERGED
    else:
        status = INCONCLUSIVE
    detail = {f"t={t}": v.to_json() for t, v in sorted(per_t.items())}
    return Verdict(status, value, residual, tol, witness=witness, detail=detail)


def ai_stat_conv_detect(
    x: IndexedSequence,
    limit: str,
    A: SummMatrix,
    ideal: Ideal,
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Strong A^I-statistical convergence to a candidate limit.

    For every threshold t the defect set ``{ k : x_k not in N_limit(t) }``
    must have A^I-density zero within tol.
    """
    _check_point(x.space, limit)
    per_t: dict[float, Verdict] = {}
    for t in _grid(x.space):
        defect = _neighborhood_defect(x, limit, t, horizon)
        per_t[t] = ai_density_is_null(A, ideal, defect, horizon, tol)
    return _aggregate(per_t, limit, tol)


def ai_stat_cauchy_detect(
    x: IndexedSequence,
    A: SummMatrix,
    ideal: Ideal,
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Strong A^I-statistical Cauchy condition at a finite horizon.

    Searches for an anchor index k0 (equivalently an anchor point, since
    only the value at k0 matters) such that for every threshold t the set
    ``{ k : x_k not in N_{x_k0}(t) }`` has A^I-density zero.
    """
    codes = x.value_codes(horizon)
    first_seen: dict[str, int] = {}
    for i, c in enumerate(codes):
        p = x.space.points[int(c)]
        if p not in first_seen:
            first_seen[p] = i + 1
    best: Verdict | None = None
    for p, k0 in sorted(first_seen.items(), key=lambda kv: kv[1]):
        per_t = {
            t: ai_density_is_null(A, ideal, _neighborhood_defect(x, p, t, horizon), horizon, tol)
            for t in _grid(x.space)
        }
        v = _aggregate(per_t, p, tol, witness=k0)
        if v.converged:
            return v
        if best is None or v.residual < best.residual:
            best = v
    return best


def lemma_cauchy_predicates(
    x: IndexedSequence,
    A: SummMatrix,
    ideal: Ideal,
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_TOL,
) -> tuple[Verdict, Verdict, Verdict]:
    """Three equivalent finite-horizon readings of the Cauchy condition.

    The distance used is the exact Levy gap ``dist``, which on a
    metric-induced space is the metric capped at 1.

    1. anchor form: some x_k0 has null defect sets at every threshold;
    2. removal form: for every threshold g there is a null index set M
       (built from the anchor at the composition slack of g) off which
       all pairwise gaps stay below g;
    3. double-density form: the rows j whose defect set
       ``{ k : dist(x_k, x_j) >= g }`` is not null themselves form a null
       set, for every threshold g.
    """
    space = x.space
    p1 = ai_stat_cauchy_detect(x, A, ideal, horizon, tol)
    anchor = p1.value

    per_g2: dict[float, Verdict] = {}
    for g in _grid(space):
        try:
            slack = space.vicinity_composition_alpha(g)
        except ValueError:
            slack = g
        removal = _neighborhood_defect(x, anchor, slack, horizon)
        null_v = ai_density_is_null(A, ideal, removal, horizon, tol)
        kept = np.unique(x.value_codes(horizon)[~removal.indicator(horizon)])
        pair_gap = 0.0
        for a in kept:
            for b in kept:
                pa, pb = space.points[int(a)], space.points[int(b)]
                if space.dist(pa, pb) >= g:
                    pair_gap = max(pair_gap, space.dist(pa, pb) - g + tol)
        if pair_gap > 0.0 and null_v.converged:
            per_g2[g] = Verdict(DIVERGED, anchor, max(null_v.residual, pair_gap), tol)
        else:
            per_g2[g] = null_v
    p2 = _aggregate(per_g2, anchor, tol)

    per_g3: dict[float, Verdict] = {}
    for g in _grid(space):
        bad_points = set()
        for c in space.points:
            v = ai_density_is_null(A, ideal, _neighborhood_defect(x, c, g, horizon), horizon, tol)
            if not v.converged:
                bad_points.add(c)
        outer = _value_index_set(
            x, f"rows-with-bad-defect(t={g})", lambda p, bad=bad_points: p in bad, horizon
        )
        per_g3[g] = ai_density_is_null(A, ideal, outer, horizon, tol)
    p3 = _aggregate(per_g3, anchor, tol)

    return p1, p2, p3


def ai_star_conv_detect(
    x: IndexedSequence,
    limit: str | None,
    A: SummMatrix,
    ideal: Ideal,
    witness: IndexSet,
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_TOL,
    cauchy: bool = False,
) -> Verdict:
    """Witness-verified A^I*-statistical convergence (or Cauchyness).

    The caller supplies the index set K; the detector verifies that the
    complement of K has A^I-density zero and that the subsequence indexed
    by K converges strongly to the limit (or is strongly Cauchy when
    ``cauchy=True``).  No search over witness sets is attempted, and a
    witness whose density verdict is inconclusive is rejected as an
    error, not a negative.
    """
    comp_v = ai_density_is_null(A, ideal, ~witness, horizon, tol)
    if comp_v.status == INCONCLUSIVE:
        raise ValueError(
            f"witness set {witness.name} has inconclusive density (residual {comp_v.residual})"
        )
    ks = np.nonzero(witness.indicator(horizon))[0] + 1
    if len(ks) < 10:
        return Verdict(INCONCLUSIVE, limit, 1.0, tol, witness={"kept": int(len(ks))})
    sub_values = [x.fn(int(k)) for k in ks]
    target = sub_values[-1] if cauchy else limit
    if target is None:
        raise ValueError("a limit point is required unless cauchy=True")
    _check_point(x.space, target)
    row = {p: x.space.dist(p, target) for p in x.space.points}
    j0 = 1
    for t in _grid(x.space):
        for j in range(len(sub_values), 0, -1):
            if row[sub_values[j - 1]] >= t:
                j0 = max(j0, j + 1)
                break
    inner_ok = j0 <= len(ks) // 2
    ok = comp_v.converged and inner_ok
    residual = comp_v.residual if inner_ok else max(comp_v.residual, (j0 - 1) / len(ks))
    status = CONVERGED if ok else (DIVERGED if not inner_ok and j0 > len(ks) - len(ks) // 10 else INCONCLUSIVE)
    return Verdict(
        status,
        target,
        residual if not ok else min(residual, tol),
        tol,
        witness={"subsequence_entry": int(j0), "kept": int(len(ks))},
    )


# ---------------------------------------------------------------------------
# limit and cluster point sets


def _nonthin_verdict(
    A: SummMatrix, ideal: Ideal, member: IndexSet, horizon: int, tol: float
) -> tuple[bool, Verdict]:
    v = ai_density_is_null(A, ideal, member, horizon, tol)
    if v.converged:
        return False, v
    return (v.tail_low is not None and v.tail_low > tol), v


def lambda_set(
    x: IndexedSequence,
    A: SummMatrix,
    ideal: Ideal,
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_TOL,
    candidates: Iterable[str] | None = None,
    witnesses: Mapping[str, IndexSet] | None = None,
) -> frozenset[str]:
    """Points reached by a nonthin subsequence that strongly converges.

    A candidate is admitted when its witness index set is nonthin (its
    null verdict fails and the tail densities stay above tol) and the
    subsequence it indexes converges strongly to the candidate at the
    horizon.  With ``witnesses=None`` the visit sets are used, which on a
    finite carrier lose no generality; when an explicit mapping is given,
    candidates missing from it are skipped with a warning since no search
    over witness sets is performed.
    """
    pts = tuple(candidates) if candidates is not None else x.space.points
    wit = visit_witnesses(x, pts) if witnesses is None else witnesses
    out = set()
    for c in pts:
        _check_point(x.space, c)
        if c not in wit:
            warnings.warn(f"no witness set for candidate {c!r}; skipped", stacklevel=2)
            continue
        nonthin, _ = _nonthin_verdict(A, ideal, wit[c], horizon, tol)
        if not nonthin:
            continue
        ks = np.nonzero(wit[c].indicator(horizon))[0] + 1
        if len(ks) == 0:
            continue
        row = {p: x.space.dist(p, c) for p in x.space.points}
        sub = [x.fn(int(k)) for k in ks]
        j0 = 1
        for t in _grid(x.space):
            for j in range(len(sub), 0, -1):
                if row[sub[j - 1]] >= t:
                    j0 = max(j0, j + 1)
                    break
        if j0 == 1 or j0 <= len(ks) // 2:
            out.add(c)
    return frozenset(out)


def gamma_set(
    x: IndexedSequence,
    A: SummMatrix,
    ideal: Ideal,
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_TOL,
) -> frozenset[str]:
    """Statistical cluster points: the hit sets stay nonthin at every level.

    A carrier point c belongs when for every threshold t the index set
    ``{ k : F_{x_k c}(t) > 1 - t }`` fails to have A^I-density zero.
    Inconclusive density verdicts are flagged with a warning and treated
    as thin, matching the finite-horizon reading of nonthin.
    """
    out = set()
    for c in x.space.points:
        ok = True
        for t in _grid(x.space):
            hits = ~_neighborhood_defect(x, c, t, horizon)
            nonthin, v = _nonthin_verdict(A, ideal, hits, horizon, tol)
            if v.status == INCONCLUSIVE and not nonthin:
                warnings.warn(
                    f"cluster check for {c!r} at t={t} is inconclusive (residual {v.residual})",
                    stacklevel=2,
                )
            if not nonthin:
                ok = False
                break
        if ok:
            out.add(c)
    return frozenset(out)


def strong_limit_point_set(x: IndexedSequence, horizon: int = DEFAULT_HORIZON) -> frozenset[str]:
    """Points that recur in the tail window [horizon/2, horizon].

    On a finite carrier a subsequence converges strongly to c exactly
    when it eventually sits at c, so at a finite horizon the honest
    stand-in for "visited infinitely often" is recurrence in the tail.
    """
    w0 = tail_start(horizon)
    return frozenset(x.values(horizon)[w0 - 1 :])


def stat_bounded_check(
    x: IndexedSequence,
    A: SummMatrix,
    ideal: Ideal,
    inside: Iterable[str],
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Whether the sequence stays inside the given point set off a null set.

    Every subset of a finite carrier is strongly compact, so this is the
    finite-horizon statistical boundedness test against that subset.
    """
    allowed = frozenset(inside)
    for p in allowed:
        _check_point(x.space, p)
    outside = _value_index_set(x, f"outside:{sorted(allowed)}", lambda p: p not in allowed, horizon)
    return ai_density_is_null(A, ideal, outside, horizon, tol)
