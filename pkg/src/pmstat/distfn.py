"""Distance distribution functions represented as finite step functions.

A distance distribution function (d.d.f.) is a nondecreasing map
``f : [0, inf] -> [0, 1]`` with ``f(0) = 0`` and ``f(inf) = 1``,
left-continuous on ``(0, inf)``.  Read ``f(t)`` as "the probability that
the distance in question is less than ``t``".  The family of d.d.f.s,
ordered pointwise and metrized by the modified Levy metric, is the value
space for probabilistic metric spaces.

This module implements the piecewise-constant members of the family:

* left-continuous evaluation, so ``unit_step(b)`` evaluates to 0 at ``b``
  and to 1 strictly above ``b``;
* the modified Levy metric ``levy_distance``, computed by bisection over
  a feasibility predicate that is exact for step functions;
* an exact closed form ``levy_distance_to_zero`` for the distance to the
  unit step at 0 (the maximal d.d.f.);
* the pointwise partial order and pointwise min / max;
* a finite-horizon weak-convergence verdict.

A d.d.f. that reaches 1 only in the limit has no exact finite-jump
representation; approximate it with a final jump at a large declared
location (``TAIL_LOCATION`` by convention).
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

DEFAULT_DL_TOL = 1e-6
# Stand-in jump location when the value 1 is attained only in the limit.
TAIL_LOCATION = 1e6


@dataclass(frozen=True)
class StepDistFn:
    """A d.d.f. with finitely many jumps.

    ``jumps`` holds ``(location, value)`` pairs with strictly increasing
    locations (first one >= 0) and strictly increasing values in
    ``(0, 1]`` ending at exactly 1.  ``value`` is the plateau just above
    the location; by left-continuity the function evaluated at the
    location itself still returns the previous plateau.

    The representation is canonical (no zero-height jumps), so ``==`` on
    instances coincides with equality as functions.
    """

    jumps: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.jumps:
            raise ValueError("a step d.d.f. needs at least one jump")
        prev_loc = -math.inf
        prev_val = 0.0
        for loc, val in self.jumps:
            if not (math.isfinite(loc) and math.isfinite(val)):
                raise ValueError(f"non-finite jump ({loc}, {val})")
            if loc < 0.0:
                raise ValueError(f"jump location {loc} is negative")
            if loc <= prev_loc:
                raise ValueError("jump locations must be strictly increasing")
            if val <= prev_val:
                raise ValueError("jump values must be strictly increasing")
            if val > 1.0:
                raise ValueError(f"jump value {val} exceeds 1")
            prev_loc, prev_val = loc, val
        if prev_val != 1.0:
            raise ValueError("final jump value must be exactly 1")
        # cached parallel lists for bisection, not dataclass fields
        object.__setattr__(self, "_locs", [j[0] for j in self.jumps])
        object.__setattr__(self, "_vals", [j[1] for j in self.jumps])

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "StepDistFn":
        """Build from ``(location, value)`` pairs, dropping zero-height jumps.

        Locations must be strictly increasing and values nondecreasing;
        a pair whose value does not exceed the running value is redundant
        and is removed, which makes the result canonical.
        """
        kept: list[tuple[float, float]] = []
        prev_loc = -math.inf
        run = 0.0
        for loc, val in pairs:
            loc = float(loc)
            val = float(val)
            if loc <= prev_loc:
                raise ValueError("jump locations must be strictly increasing")
            if val < run - 0.0:
                raise ValueError("jump values must be nondecreasing")
            prev_loc = loc
            if val > run:
                kept.append((loc, val))
                run = val
        return cls(tuple(kept))

    @property
    def locations(self) -> tuple[float, ...]:
        return tuple(self._locs)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(self._vals)

    @property
    def support_end(self) -> float:
        """Location of the last jump; the function is 1 strictly above it."""
        return self._locs[-1]

    def __call__(self, t: float) -> float:
        return evaluate(self, t)

    def right_value(self, t: float) -> float:
        """Value just above ``t``, i.e. the plateau of the last jump at or below ``t``."""
        i = bisect_right(self._locs, t)
        return self._vals[i - 1] if i else 0.0

    def to_json(self) -> list[list[float]]:
        return [[loc, val] for loc, val in self.jumps]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[float]]) -> "StepDistFn":
        return cls.from_pairs((float(p[0]), float(p[1])) for p in data)


def unit_step(b: float) -> StepDistFn:
    """The d.d.f. that is 0 on [0, b] and 1 on (b, inf).

    ``unit_step(0)`` is the maximal d.d.f. (identity for triangle
    functions); ``unit_step(b)`` with b > 0 plays the role of the exact
    distance b.
    """
    if b < 0.0 or not math.isfinite(b):
        raise ValueError(f"step location must be finite and >= 0, got {b}")
    return StepDistFn(((float(b), 1.0),))


EPS0 = unit_step(0.0)


def evaluate(f: StepDistFn, t: float) -> float:
    """Left-continuous evaluation of ``f`` at ``t`` in [0, inf]."""
    if math.isnan(t):
        raise ValueError("cannot evaluate at NaN")
    if t == math.inf:
        return 1.0
    if t < 0.0:
        raise ValueError(f"evaluation point {t} outside [0, inf]")
    i = bisect_left(f._locs, t)  # count of jumps strictly below t
    return f._vals[i - 1] if i else 0.0


def _eval_line(f: StepDistFn, x: float) -> float:
    # Extension to the whole line used by the Levy feasibility predicate:
    # a d.d.f. vanishes at and below 0.
    if x <= 0.0:
        return 0.0
    i = bisect_left(f._locs, x)
    return f._vals[i - 1] if i else 0.0


def levy_feasible(f: StepDistFn, g: StepDistFn, a: float) -> bool:
    """Whether slack ``a`` satisfies the two-sided Levy sandwich.

    Tests ``f(x - a) - a <= g(x) <= f(x + a) + a`` and the same with f, g
    swapped, for all x in (-1/a, 1/a).  For x <= 0 every inequality holds
    trivially, and between breakpoints all six step functions involved
    are constant, so checking the breakpoints of both functions shifted
    by 0 and +-a inside (0, 1/a), plus the endpoint 1/a (left-continuous
    evaluation there returns the value on the final subinterval), decides
    the condition exactly.
    """
    if a >= 1.0:
        return True
    if a <= 0.0:
        return False
    bound = 1.0 / a
    cands = {bound}
    for loc in f._locs + g._locs:
        for s in (loc - a, loc, loc + a):
            if 0.0 < s < bound:
                cands.add(s)
    for x in cands:
        fx = _eval_line(f, x)
        gx = _eval_line(g, x)
        if _eval_line(f, x - a) - a > gx:
            return False
        if gx > _eval_line(f, x + a) + a:
            return False
        if _eval_line(g, x - a) - a > fx:
            return False
        if fx > _eval_line(g, x + a) + a:
            return False
    return True


def levy_distance(f: StepDistFn, g: StepDistFn, tol: float = DEFAULT_DL_TOL) -> float:
    """Modified Levy metric between two step d.d.f.s, within ``tol``.

    The feasible slacks form an interval with right endpoint 1, so the
    infimum is located by bisection; the returned value is feasible and
    at most ``tol`` above the infimum.  Equal functions return exactly 0.
    """
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if f.jumps == g.jumps:
        return 0.0
    lo, hi = 0.0, 1.0  # invariant: hi feasible, nothing at or below lo known feasible
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if levy_feasible(f, g, mid):
            hi = mid
        else:
            lo = mid
    return hi


def levy_distance_to_zero(f: StepDistFn) -> float:
    """Exact Levy distance from ``f`` to ``unit_step(0)``.

    Equals ``inf { t > 0 : f(t) > 1 - t }``.  On each plateau (a, b] with
    value v the condition reads ``t > max(a, 1 - v)``, so the infimum is
    the smallest such candidate that actually lies inside its plateau.
    For a unit step at b this gives ``min(b, 1)``.
    """
    locs = f._locs
    vals = f._vals
    best = math.inf
    # plateaus: leading (0, locs[0]] at 0, inner ones, final (locs[-1], inf) at 1
    pieces: list[tuple[float, float, float]] = []
    if locs[0] > 0.0:
        pieces.append((0.0, locs[0], 0.0))
    for i in range(len(locs) - 1):
        pieces.append((locs[i], locs[i + 1], vals[i]))
    pieces.append((locs[-1], math.inf, 1.0))
    for a, b, v in pieces:
        cand = max(a, 1.0 - v)
        if cand < b and cand < best:
            best = cand
    return best


def merged_locations(f: StepDistFn, g: StepDistFn) -> list[float]:
    """Sorted union of jump locations; a shared refinement grid."""
    return sorted(set(f._locs) | set(g._locs))


def pointwise_leq(f: StepDistFn, g: StepDistFn, tol: float = 0.0) -> bool:
    """Whether ``f(t) <= g(t) + tol`` for every t.

    Both functions are constant between consecutive merged jump
    locations and equal to 1 beyond the last, so left-continuous
    evaluation at the merged locations decides the order exactly.
    """
    return all(evaluate(f, x) <= evaluate(g, x) + tol for x in merged_locations(f, g))


def pointwise_gap(f: StepDistFn, g: StepDistFn) -> float:
    """Largest violation ``max_t (f(t) - g(t))``, clipped below at 0."""
    worst = 0.0
    for x in merged_locations(f, g):
        d = evaluate(f, x) - evaluate(g, x)
        if d > worst:
            worst = d
    return worst


def pointwise_min(f: StepDistFn, g: StepDistFn) -> StepDistFn:
    """Pointwise minimum, again a step d.d.f."""
    pairs = [(x, min(f.right_value(x), g.right_value(x))) for x in merged_locations(f, g)]
    return StepDistFn.from_pairs(pairs)


def pointwise_max(f: StepDistFn, g: StepDistFn) -> StepDistFn:
    """Pointwise maximum, again a step d.d.f."""
    pairs = [(x, max(f.right_value(x), g.right_value(x))) for x in merged_locations(f, g)]
    return StepDistFn.from_pairs(pairs)


@dataclass(frozen=True)
class WeakConvergence:
    """Finite-horizon weak-convergence verdict for a d.d.f. sequence.

    ``sup_residual`` is the worst pointwise deviation at sampled
    continuity points of the target over the tail window;
    ``dl_residual`` is the worst Levy distance over the same window.
    Weak convergence is equivalent to Levy-distance convergence, so both
    must be small for a true verdict.
    """

    ok: bool
    sup_residual: float
    dl_residual: float
    window: tuple[int, int]

    def __bool__(self) -> bool:
        return self.ok


def weakly_converges(
    fs: Sequence[StepDistFn],
    f: StepDistFn,
    horizon: int,
    tol: float,
    grid_step: float = 0.01,
    dl_tol: float = DEFAULT_DL_TOL,
) -> WeakConvergence:
    """Check weak convergence of ``fs`` to ``f`` at a finite horizon.

    Samples |fs_k - f| at continuity points of ``f`` (midpoints between
    jumps plus a fixed grid of step ``grid_step``, skipping the jump
    locations themselves) for every k in the tail window
    [horizon/2, horizon], and cross-checks with the Levy distance.
    """
    if not fs:
        raise ValueError("empty function sequence")
    if not 1 <= horizon <= len(fs):
        raise ValueError(f"horizon {horizon} outside [1, {len(fs)}]")
    if tol <= 0.0 or grid_step <= 0.0:
        raise ValueError("tol and grid_step must be positive")
    lo = max(1, math.ceil(horizon / 2))
    tail = fs[lo - 1 : horizon]
    hi_loc = max([f.support_end] + [h.support_end for h in tail]) + 1.0
    samples: list[float] = []
    locs = f.locations
    for i in range(len(locs) - 1):
        samples.append(0.5 * (locs[i] + locs[i + 1]))
    steps = int(hi_loc / grid_step) + 1
    jump_set = set(locs)
    for j in range(1, steps + 1):
        x = j * grid_step
        if all(abs(x - loc) > 1e-12 for loc in jump_set):
            samples.append(x)
    samples.append(hi_loc + 1.0)

    sup_res = 0.0
    dl_res = 0.0
    for h in tail:
        for x in samples:
            d = abs(evaluate(h, x) - evaluate(f, x))
            if d > sup_res:
                sup_res = d
        dl = levy_distance(h, f, dl_tol)
        if dl > dl_res:
            dl_res = dl
    ok = sup_res <= tol and dl_res <= tol
    return WeakConvergence(ok, sup_res, dl_res, (lo, horizon))
