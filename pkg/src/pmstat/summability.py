"""Regular summability matrices, ideals on the index set, and densities.

A summability matrix A = (a_nk) transforms a bounded sequence into the
row sums ``(Ay)_n = sum_k a_nk y_k``.  A is regular (limit-preserving)
exactly under the Silverman-Toeplitz conditions:

(i)   sup_n sum_k |a_nk| is finite,
(ii)  every column tends to 0,
(iii) the row sums tend to 1.

For a set M of indices, the A-density is the limit of
``y_n = sum_{m in M} a_nm`` when it exists; replacing the ordinary limit
by an ideal limit gives the A^I-density.  An ideal is a family of
"small" index sets closed under subsets and finite unions; the two kinds
used operationally are the finite sets ("fin") and the sets of
B-density zero for a second regular matrix B.

Everything here is finite-horizon and verdict-valued: a computation at
horizon N returns a ``Verdict`` carrying the estimate, a residual, and a
status, with the invariant that a converged status implies
residual <= tol.  Emptiness has density zero: the partial densities of
the empty set vanish identically, so its verdict converges to 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

DEFAULT_HORIZON = 10_000
DEFAULT_TOL = 1e-2
TAIL_FRACTION = 0.5
SETTLE_FACTOR = 4.0

CONVERGED = "converged"
INCONCLUSIVE = "inconclusive"
DIVERGED = "diverged"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a finite-horizon limit or density computation.

    ``value`` is the estimate (a number for densities, a point name for
    convergence detectors), ``residual`` the worst deviation over the
    tail window, and ``status`` one of converged / inconclusive /
    diverged.  ``tail_low`` and ``tail_high`` bracket the raw partial
    values over the tail window and serve as liminf / limsup proxies.
    """

    status: str
    value: object
    residual: float
    tol: float
    tail_low: float | None = None
    tail_high: float | None = None
    witness: object = None
    detail: dict | None = None

    def __post_init__(self) -> None:
        if self.status not in (CONVERGED, INCONCLUSIVE, DIVERGED):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == CONVERGED and self.residual > self.tol:
            raise ValueError(
                f"converged verdict with residual {self.residual} above tol {self.tol}"
            )

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def __bool__(self) -> bool:
        return self.converged

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "value": self.value,
            "residual": self.residual,
            "tol": self.tol,
        }
        if self.tail_low is not None:
            out["tail_low"] = self.tail_low
            out["tail_high"] = self.tail_high
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail is not None:
            out["detail"] = self.detail
        return out


def tail_start(n: int, fraction: float = TAIL_FRACTION) -> int:
    """First index (1-based) of the tail window [fraction * n, n]."""
    return max(1, math.ceil(n * fraction))


def _ordinary_limit_verdict(y: np.ndarray, target: float, tol: float) -> Verdict:
    """Tail-stabilization verdict for an ordinary limit against a fixed target.

    Converged when the final deviation is within tol and the whole tail
    window stays within SETTLE_FACTOR * tol; diverged when the tail never
    comes within tol of the target; inconclusive otherwise.
    """
    n = len(y)
    if n == 0:
        raise ValueError("empty partial-value sequence")
    w0 = tail_start(n)
    win = y[w0 - 1 :]
    dev = np.abs(win - target)
    residual = float(dev[-1])
    tail_low = float(win.min())
    tail_high = float(win.max())
    if residual <= tol and float(dev.max()) <= SETTLE_FACTOR * tol:
        status = CONVERGED
    elif float(dev.min()) > tol:
        status = DIVERGED
    else:
        status = INCONCLUSIVE
    return Verdict(status, target, residual, tol, tail_low, tail_high)


# ---------------------------------------------------------------------------
# index sets


@dataclass(frozen=True)
class IndexSet:
    """A set of positive integers given by a total membership predicate.

    ``vec``, when provided, returns the boolean indicator array for
    indices 1..n and must agree with ``fn``; built-in sets supply a
    vectorized form.  Sets compose with ~, | and &.
    """

    name: str
    fn: Callable[[int], bool]
    vec: Callable[[int], np.ndarray] | None = None

    def __call__(self, k: int) -> bool:
        return bool(self.fn(k))

    def indicator(self, n: int) -> np.ndarray:
        if self.vec is not None:
            arr = self.vec(n)
        else:
            arr = np.fromiter((self.fn(k) for k in range(1, n + 1)), dtype=bool, count=n)
        if len(arr) != n:
            raise ValueError(f"indicator for {self.name} returned length {len(arr)}, wanted {n}")
        return arr

    def __invert__(self) -> "IndexSet":
        vec = None if self.vec is None else (lambda n: ~self.indicator(n))
        return IndexSet(f"not({self.name})", lambda k: not self.fn(k), vec)

    def __or__(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(
            f"({self.name})|({other.name})",
            lambda k: self.fn(k) or other.fn(k),
            lambda n: self.indicator(n) | other.indicator(n),
        )

    def __and__(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(
            f"({self.name})&({other.name})",
            lambda k: self.fn(k) and other.fn(k),
            lambda n: self.indicator(n) & other.indicator(n),
        )


def _vec_evens(n: int) -> np.ndarray:
    arr = np.zeros(n, dtype=bool)
    arr[1::2] = True
    return arr


def _vec_odds(n: int) -> np.ndarray:
    arr = np.zeros(n, dtype=bool)
    arr[0::2] = True
    return arr


def _vec_squares(n: int) -> np.ndarray:
    arr = np.zeros(n, dtype=bool)
    j = 1
    while j * j <= n:
        arr[j * j - 1] = True
        j += 1
    return arr


def _vec_cubes(n: int) -> np.ndarray:
    arr = np.zeros(n, dtype=bool)
    j = 1
    while j * j * j <= n:
        arr[j * j * j - 1] = True
        j += 1
    return arr


def _vec_pow2(n: int) -> np.ndarray:
    arr = np.zeros(n, dtype=bool)
    v = 1
    while v <= n:
        arr[v - 1] = True
        v *= 2
    return arr


EVENS = IndexSet("evens", lambda k: k % 2 == 0, _vec_evens)
ODDS = IndexSet("odds", lambda k: k % 2 == 1, _vec_odds)
SQUARES = IndexSet("squares", lambda k: math.isqrt(k) ** 2 == k, _vec_squares)
CUBES = IndexSet("cubes", lambda k: round(k ** (1 / 3)) ** 3 == k or (round(k ** (1 / 3)) + 1) ** 3 == k, _vec_cubes)
POWERS_OF_TWO = IndexSet("pow2", lambda k: k & (k - 1) == 0, _vec_pow2)
ALL_INDICES = IndexSet("all", lambda k: True, lambda n: np.ones(n, dtype=bool))
NO_INDICES = IndexSet("none", lambda k: False, lambda n: np.zeros(n, dtype=bool))


def finite_set(members: Iterable[int]) -> IndexSet:
    ms = frozenset(int(m) for m in members)
    if any(m < 1 for m in ms):
        raise ValueError("indices start at 1")

    def vec(n: int) -> np.ndarray:
        arr = np.zeros(n, dtype=bool)
        for m in ms:
            if m <= n:
                arr[m - 1] = True
        return arr

    label = ",".join(str(m) for m in sorted(ms))
    return IndexSet(f"finite:{label}", lambda k: k in ms, vec)


def multiples(m: int, r: int = 0) -> IndexSet:
    if m < 1 or not 0 <= r < m:
        raise ValueError(f"need m >= 1 and 0 <= r < m, got m={m}, r={r}")

    def vec(n: int) -> np.ndarray:
        arr = np.zeros(n, dtype=bool)
        first = r if r >= 1 else m
        arr[first - 1 :: m] = True
        return arr

    return IndexSet(f"mod:{m},{r}", lambda k: k % m == r, vec)


def index_block(lo: int, hi: int) -> IndexSet:
    """Indices k with lo <= k < hi."""
    if not 1 <= lo < hi:
        raise ValueError(f"need 1 <= lo < hi, got {lo}, {hi}")

    def vec(n: int) -> np.ndarray:
        arr = np.zeros(n, dtype=bool)
        arr[lo - 1 : min(hi - 1, n)] = True
        return arr

    return IndexSet(f"block:{lo},{hi}", lambda k: lo <= k < hi, vec)


_NAMED_SETS = {
    "all": ALL_INDICES,
    "none": NO_INDICES,
    "evens": EVENS,
    "odds": ODDS,
    "squares": SQUARES,
    "cubes": CUBES,
    "pow2": POWERS_OF_TWO,
}


def index_set_from_spec(spec: str) -> IndexSet:
    """Parse an index-set spec string.

    Grammar: ``all | none | evens | odds | squares | cubes | pow2 |
    finite:1,2,3 | mod:m,r | block:lo,hi | not:<spec>``.
    """
    spec = spec.strip()
    if spec in _NAMED_SETS:
        return _NAMED_SETS[spec]
    if spec.startswith("not:"):
        return ~index_set_from_spec(spec[4:])
    if spec.startswith("finite:"):
        return finite_set(int(s) for s in spec[7:].split(",") if s)
    if spec.startswith("mod:"):
        m, r = (int(s) for s in spec[4:].split(","))
        return multiples(m, r)
    if spec.startswith("block:"):
        lo, hi = (int(s) for s in spec[6:].split(","))
        return index_block(lo, hi)
    raise ValueError(f"cannot parse index-set spec {spec!r}")


Membership = IndexSet | np.ndarray | Callable[[int], bool]


def _member_lookup(member: Membership) -> Callable[[int], bool]:
    if isinstance(member, IndexSet):
        return member.fn
    if isinstance(member, np.ndarray):
        def fn(k: int) -> bool:
            if k > len(member):
                raise ValueError(
                    f"membership array of length {len(member)} cannot answer index {k}"
                )
            return bool(member[k - 1])
        return fn
    return member


# ---------------------------------------------------------------------------
# summability matrices


class SummMatrix:
    """Base class: a matrix given by entries with finite row support.

    Subclasses override the vectorized paths; the generic fallbacks loop
    over ``row_support`` and suit only small horizons.
    """

    name: str = "abstract"

    def entry(self, n: int, k: int) -> float:
        raise NotImplementedError

    def row_support(self, n: int) -> Iterable[int]:
        raise NotImplementedError

    def support_bound(self, n: int) -> int:
        """Largest column index that row n touches (nondecreasing in n)."""
        raise NotImplementedError

    def max_row_for(self, horizon: int) -> int:
        """Largest row whose support fits inside indices 1..horizon."""
        if self.support_bound(1) > horizon:
            raise ValueError(f"horizon {horizon} below the support of the first row")
        lo, hi = 1, max(1, horizon)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.support_bound(mid) <= horizon:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def row_sums(self, n_rows: int) -> np.ndarray:
        return np.array(
            [sum(self.entry(n, k) for k in self.row_support(n)) for n in range(1, n_rows + 1)]
        )

    def abs_row_sums(self, n_rows: int) -> np.ndarray:
        return np.array(
            [sum(abs(self.entry(n, k)) for k in self.row_support(n)) for n in range(1, n_rows + 1)]
        )

    def column(self, k: int, n_rows: int) -> np.ndarray:
        return np.array([self.entry(n, k) for n in range(1, n_rows + 1)])

    def density_series(self, member: Membership, n_rows: int) -> np.ndarray:
        fn = _member_lookup(member)
        return np.array(
            [
                sum(self.entry(n, k) for k in self.row_support(n) if fn(k))
                for n in range(1, n_rows + 1)
            ]
        )


class TriangularMatrix(SummMatrix):
    """Rows that average the first n terms of a mapped subsequence.

    ``a_{n, phi(j)} = w_j / (w_1 + ... + w_n)`` for j <= n, with a
    strictly increasing index map phi and positive weights.  Covers the
    Cesaro matrix (phi = identity, w = 1), weighted means, and matrices
    supported on sparse index sets such as the squares.
    """

    def __init__(
        self,
        name: str,
        weight: Callable[[int], float] | None = None,
        index_map: Callable[[int], int] | None = None,
    ):
        self.name = name
        self._weight = weight
        self._map = index_map

    def _weights(self, n: int) -> np.ndarray:
        if self._weight is None:
            return np.ones(n)
        return np.fromiter((self._weight(j) for j in range(1, n + 1)), dtype=float, count=n)

    def _mapped(self, n: int) -> np.ndarray:
        if self._map is None:
            return np.arange(1, n + 1, dtype=np.int64)
        return np.fromiter((self._map(j) for j in range(1, n + 1)), dtype=np.int64, count=n)

    def support_bound(self, n: int) -> int:
        return int(self._map(n)) if self._map is not None else n

    def row_support(self, n: int) -> Iterable[int]:
        return (int(v) for v in self._mapped(n))

    def entry(self, n: int, k: int) -> float:
        mapped = self._mapped(n)
        idx = np.searchsorted(mapped, k)
        if idx >= n or mapped[idx] != k:
            return 0.0
        w = self._weights(n)
        return float(w[idx] / w.sum())

    def row_sums(self, n_rows: int) -> np.ndarray:
        csum = np.cumsum(self._weights(n_rows))
        return csum / csum

    abs_row_sums = row_sums

    def column(self, k: int, n_rows: int) -> np.ndarray:
        mapped = self._mapped(n_rows)
        idx = np.searchsorted(mapped, k)
        col = np.zeros(n_rows)
        if idx < n_rows and mapped[idx] == k:
            w = self._weights(n_rows)
            csum = np.cumsum(w)
            col[idx:] = w[idx] / csum[idx:]
        return col

    def density_series(self, member: Membership, n_rows: int) -> np.ndarray:
        w = self._weights(n_rows)
        if self._map is None and isinstance(member, IndexSet):
            mem = member.indicator(n_rows)
        elif self._map is None and isinstance(member, np.ndarray):
            if len(member) < n_rows:
                raise ValueError(f"membership array too short for {n_rows} rows")
            mem = member[:n_rows].astype(bool)
        else:
            mapped = self._mapped(n_rows)
            if isinstance(member, np.ndarray):
                if len(member) < int(mapped[-1]):
                    raise ValueError(
                        f"membership array of length {len(member)} does not cover index {int(mapped[-1])}"
                    )
                mem = member[mapped - 1].astype(bool)
            else:
                fn = _member_lookup(member)
                mem = np.fromiter((fn(int(m)) for m in mapped), dtype=bool, count=n_rows)
        return np.cumsum(w * mem) / np.cumsum(w)


class IdentityMatrix(SummMatrix):
    """a_nk = 1 when n = k; A-density of M is just the indicator of M."""

    name = "identity"

    def entry(self, n: int, k: int) -> float:
        return 1.0 if n == k else 0.0

    def row_support(self, n: int) -> Iterable[int]:
        return (n,)

    def support_bound(self, n: int) -> int:
        return n

    def row_sums(self, n_rows: int) -> np.ndarray:
        return np.ones(n_rows)

    abs_row_sums = row_sums

    def column(self, k: int, n_rows: int) -> np.ndarray:
        col = np.zeros(n_rows)
        if k <= n_rows:
            col[k - 1] = 1.0
        return col

    def density_series(self, member: Membership, n_rows: int) -> np.ndarray:
        if isinstance(member, IndexSet):
            return member.indicator(n_rows).astype(float)
        if isinstance(member, np.ndarray):
            return member[:n_rows].astype(float)
        fn = _member_lookup(member)
        return np.fromiter((fn(n) for n in range(1, n_rows + 1)), dtype=float, count=n_rows)


class ConstantColumnMatrix(SummMatrix):
    """a_nk = 1 for k = col in every row; fails the vanishing-column condition."""

    def __init__(self, col: int = 1):
        if col < 1:
            raise ValueError("column index starts at 1")
        self.col = col
        self.name = f"constcol:{col}"

    def entry(self, n: int, k: int) -> float:
        return 1.0 if k == self.col else 0.0

    def row_support(self, n: int) -> Iterable[int]:
        return (self.col,)

    def support_bound(self, n: int) -> int:
        return self.col

    def row_sums(self, n_rows: int) -> np.ndarray:
        return np.ones(n_rows)

    abs_row_sums = row_sums

    def column(self, k: int, n_rows: int) -> np.ndarray:
        return np.ones(n_rows) if k == self.col else np.zeros(n_rows)

    def density_series(self, member: Membership, n_rows: int) -> np.ndarray:
        fn = _member_lookup(member)
        return np.full(n_rows, 1.0 if fn(self.col) else 0.0)


class BlockMatrix(SummMatrix):
    """Row n averages uniformly over the block ((n-1) m, n m]."""

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("block length must be >= 1")
        self.m = m
        self.name = f"block:{m}"

    def entry(self, n: int, k: int) -> float:
        return 1.0 / self.m if (n - 1) * self.m < k <= n * self.m else 0.0

    def row_support(self, n: int) -> Iterable[int]:
        return range((n - 1) * self.m + 1, n * self.m + 1)

    def support_bound(self, n: int) -> int:
        return n * self.m

    def row_sums(self, n_rows: int) -> np.ndarray:
        return np.ones(n_rows)

    abs_row_sums = row_sums

    def column(self, k: int, n_rows: int) -> np.ndarray:
        col = np.zeros(n_rows)
        n = (k + self.m - 1) // self.m
        if 1 <= n <= n_rows:
            col[n - 1] = 1.0 / self.m
        return col

    def density_series(self, member: Membership, n_rows: int) -> np.ndarray:
        top = n_rows * self.m
        if isinstance(member, IndexSet):
            mem = member.indicator(top)
        elif isinstance(member, np.ndarray):
            if len(member) < top:
                raise ValueError(f"membership array too short for {n_rows} block rows")
            mem = member[:top].astype(bool)
        else:
            fn = _member_lookup(member)
            mem = np.fromiter((fn(k) for k in range(1, top + 1)), dtype=bool, count=top)
        counts = np.cumsum(mem)[self.m - 1 :: self.m][:n_rows].astype(float)
        prev = np.concatenate(([0.0], counts[:-1]))
        return (counts - prev) / self.m


class ExplicitMatrix(SummMatrix):
    """A matrix given by literal rows (small horizons only)."""

    def __init__(self, rows: Sequence[Sequence[float]], name: str = "explicit"):
        if not rows:
            raise ValueError("no rows given")
        self.rows = tuple(tuple(float(v) for v in row) for row in rows)
        self.name = name

    def _row(self, n: int) -> tuple[float, ...]:
        if n > len(self.rows):
            raise ValueError(f"row {n} beyond the {len(self.rows)} given rows")
        return self.rows[n - 1]

    def entry(self, n: int, k: int) -> float:
        row = self._row(n)
        return row[k - 1] if k <= len(row) else 0.0

    def row_support(self, n: int) -> Iterable[int]:
        return range(1, len(self._row(n)) + 1)

    def support_bound(self, n: int) -> int:
        return len(self._row(n))

    def max_row_for(self, horizon: int) -> int:
        best = 0
        for n in range(1, len(self.rows) + 1):
            if self.support_bound(n) <= horizon:
                best = n
        if best == 0:
            raise ValueError(f"horizon {horizon} below the support of the first row")
        return best

    @classmethod
    def from_file(cls, path: str) -> "ExplicitMatrix":
        with open(path) as fh:
            rows = json.load(fh)
        return cls(rows, name=f"file:{path}")


def cesaro1() -> TriangularMatrix:
    """The Cesaro matrix: a_nk = 1/n for k <= n."""
    return TriangularMatrix("cesaro")


def weighted_mean(p: float) -> TriangularMatrix:
    """Weighted means with weights w_j = j**p."""
    return TriangularMatrix(f"weighted:{p}", weight=lambda j: float(j) ** p)


def squares_rows() -> TriangularMatrix:
    """Row n uniform on the first n squares; gives the squares density 1."""
    return TriangularMatrix("squares", index_map=lambda j: j * j)


def matrix_from_spec(spec: str) -> SummMatrix:
    """Parse a matrix spec: ``cesaro | identity | constcol | squares |
    block:<m> | weighted:<p> | file:<path>``."""
    spec = spec.strip()
    if spec == "cesaro":
        return cesaro1()
    if spec == "identity":
        return IdentityMatrix()
    if spec == "constcol":
        return ConstantColumnMatrix()
    if spec == "squares":
        return squares_rows()
    if spec.startswith("block:"):
        return BlockMatrix(int(spec[6:]))
    if spec.startswith("weighted:"):
        return weighted_mean(float(spec[9:]))
    if spec.startswith("file:"):
        return ExplicitMatrix.from_file(spec[5:])
    raise ValueError(f"cannot parse matrix spec {spec!r}")


# ---------------------------------------------------------------------------
# Silverman-Toeplitz check


@dataclass(frozen=True)
class RegularityCondition:
    name: str
    passed: bool
    residual: float
    value: float


@dataclass(frozen=True)
class RegularityReport:
    matrix: str
    horizon: int
    tol: float
    conditions: tuple[RegularityCondition, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __getitem__(self, name: str) -> RegularityCondition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "matrix": self.matrix,
            "horizon": self.horizon,
            "tol": self.tol,
            "ok": self.ok,
            "conditions": [
                {"name": c.name, "passed": c.passed, "residual": c.residual, "value": c.value}
                for c in self.conditions
            ],
        }


def check_regularity(
    A: SummMatrix,
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_TOL,
    n_columns: int = 25,
) -> RegularityReport:
    """Finite-horizon Silverman-Toeplitz check.

    (i) the running sup of absolute row sums must not grow over the tail
    window, (ii) each of the first ``n_columns`` columns must vanish over
    the tail window, (iii) row sums must sit within tol of 1 there.
    """
    if horizon < 10:
        raise ValueError(f"horizon must be at least 10, got {horizon}")
    rows = min(horizon, A.max_row_for(horizon))
    w0 = tail_start(rows)

    conditions = []

    sums = np.asarray(A.abs_row_sums(rows), dtype=float)
    running = np.maximum.accumulate(sums)
    growth = float(running[-1] - running[w0 - 1])
    conditions.append(
        RegularityCondition("bounded-row-norms", growth <= tol, growth, float(running[-1]))
    )

    worst = 0.0
    for k in range(1, min(n_columns, rows) + 1):
        col = np.asarray(A.column(k, rows), dtype=float)
        worst = max(worst, float(np.abs(col[w0 - 1 :]).max()))
    conditions.append(RegularityCondition("columns-vanish", worst <= tol, worst, worst))

    rsums = np.asarray(A.row_sums(rows), dtype=float)
    res = float(np.abs(rsums[w0 - 1 :] - 1.0).max())
    conditions.append(RegularityCondition("row-sums-to-one", res <= tol, res, float(rsums[-1])))

    return RegularityReport(A.name, rows, tol, tuple(conditions))


# ---------------------------------------------------------------------------
# ideals


@dataclass(frozen=True)
class Ideal:
    """An admissible ideal of index sets, given as a decision procedure.

    Kinds: ``fin`` (finite sets), ``density`` (sets of B-density zero for
    a regular matrix B), ``predicate`` (caller-supplied membership test;
    no limit extraction).  All three contain every finite set and not the
    whole index set, hence are admissible.
    """

    kind: str
    name: str
    matrix: SummMatrix | None = None
    member_fn: Callable[[IndexSet, int], bool] | None = None

    @classmethod
    def fin(cls) -> "Ideal":
        return cls("fin", "fin")

    @classmethod
    def density_zero(cls, matrix: SummMatrix) -> "Ideal":
        return cls("density", f"density-zero({matrix.name})", matrix=matrix)

    @classmethod
    def from_predicate(cls, name: str, fn: Callable[[IndexSet, int], bool]) -> "Ideal":
        return cls("predicate", name, member_fn=fn)

    def contains(self, member: IndexSet, horizon: int, tol: float = DEFAULT_TOL) -> Verdict:
        """Finite-horizon membership verdict for a set in the ideal."""
        if self.kind == "fin":
            counts = np.cumsum(member.indicator(horizon))
            w0 = tail_start(horizon)
            growth = float(counts[-1] - counts[w0 - 1])
            rate = growth / max(1, horizon - w0)
            if growth == 0.0:
                status = CONVERGED
            elif rate > tol:
                status = DIVERGED
            else:
                status = INCONCLUSIVE
            return Verdict(status, float(counts[-1]), rate, tol)
        if self.kind == "density":
            rows = self.matrix.max_row_for(horizon)
            y = self.matrix.density_series(member, rows)
            return _ordinary_limit_verdict(y, 0.0, tol)
        if self.kind == "predicate":
            member_flag = bool(self.member_fn(member, horizon))
            status = CONVERGED if member_flag else DIVERGED
            return Verdict(status, member_flag, 0.0, tol)
        raise ValueError(f"unknown ideal kind {self.kind!r}")


def ideal_from_spec(spec: str) -> Ideal:
    """Parse an ideal spec: ``fin | density:<matrix spec>``."""
    spec = spec.strip()
    if spec == "fin":
        return Ideal.fin()
    if spec.startswith("density:"):
        return Ideal.density_zero(matrix_from_spec(spec[8:]))
    raise ValueError(f"cannot parse ideal spec {spec!r}")


# ---------------------------------------------------------------------------
# densities and ideal limits


def a_density_partial(A: SummMatrix, member: Membership, n_rows: int) -> np.ndarray:
    """Partial A-densities ``y_n = sum_{m in M} a_nm`` for n = 1..n_rows."""
    if n_rows < 1:
        raise ValueError("need at least one row")
    if isinstance(member, np.ndarray) and A.support_bound(n_rows) > len(member):
        usable = A.max_row_for(len(member))
        raise ValueError(
            f"membership array of length {len(member)} covers only {usable} rows of {A.name}"
        )
    return A.density_series(member, n_rows)


def _eps_grid(tol: float) -> tuple[float, ...]:
    grid = {0.25, 0.1, 0.05, min(1.0, 2 * tol), min(1.0, tol)}
    return tuple(sorted((g for g in grid if g > 0.0), reverse=True))


def ideal_limit_at(
    y: np.ndarray,
    ideal: Ideal,
    target: float,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Verdict for I-convergence of the real sequence ``y`` to ``target``.

    fin: ordinary tail stabilization.  density-zero(B): for each epsilon
    on a coarse grid down to tol, the rows where ``|y - target| >= eps``
    must have B-density converging to 0.  Predicate ideals support no
    limit extraction.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or len(y) == 0:
        raise ValueError("y must be a nonempty one-dimensional sequence")
    if ideal.kind == "fin":
        return _ordinary_limit_verdict(y, target, tol)
    if ideal.kind == "density":
        B = ideal.matrix
        rows = B.max_row_for(len(y))
        w0 = tail_start(len(y))
        win = y[w0 - 1 :]
        sub: dict[str, dict] = {}
        worst = 0.0
        statuses = []
        for eps in _eps_grid(tol):
            defect = np.abs(y - target) >= eps
            z = B.density_series(defect, rows)
            v = _ordinary_limit_verdict(z, 0.0, tol)
            sub[f"eps={eps}"] = v.to_json()
            worst = max(worst, v.residual)
            statuses.append(v.status)
        if all(s == CONVERGED for s in statuses):
            status = CONVERGED
        elif DIVERGED in statuses:
            status = DIVERGED
        else:
            status = INCONCLUSIVE
        return Verdict(
            status,
            target,
            worst,
            tol,
            float(win.min()),
            float(win.max()),
            detail=sub,
        )
    raise ValueError(f"ideal kind {ideal.kind!r} supports no limit extraction")


def ideal_limit(
    y: np.ndarray,
    ideal: Ideal,
    tol: float = DEFAULT_TOL,
    candidates: Sequence[float] | None = None,
) -> Verdict:
    """Search candidate limits and return the best verdict.

    When no candidates are supplied a coarse default is used: the last
    partial value, the tail median, and the landmarks 0, 1/2, 1.
    Converged candidates win by smallest residual; otherwise the smallest
    residual is reported with its (non-converged) status.
    """
    y = np.asarray(y, dtype=float)
    if candidates is None:
        w0 = tail_start(len(y))
        win = y[w0 - 1 :]
        candidates = [float(y[-1]), float(np.median(win)), 0.0, 0.5, 1.0]
    seen: list[float] = []
    for c in candidates:
        if not any(abs(c - s) <= 1e-12 for s in seen):
            seen.append(float(c))
    best: Verdict | None = None
    for c in seen:
        v = ideal_limit_at(y, ideal, c, tol)
        if best is None:
            best = v
        elif (v.converged, -v.residual) > (best.converged, -best.residual):
            best = v
    return best


def ai_density(
    A: SummMatrix,
    ideal: Ideal,
    member: Membership,
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_TOL,
    candidates: Sequence[float] | None = None,
) -> Verdict:
    """A^I-density verdict for a set at a finite horizon.

    Forms the partial A-densities on as many rows as the horizon's worth
    of indices supports, then extracts the I-limit.
    """
    if horizon < 10:
        raise ValueError(f"horizon must be at least 10, got {horizon}")
    limit = len(member) if isinstance(member, np.ndarray) else horizon
    rows = A.max_row_for(limit)
    y = a_density_partial(A, member, rows)
    return ideal_limit(y, ideal, tol, candidates)


def ai_density_is_null(
    A: SummMatrix,
    ideal: Ideal,
    member: Membership,
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Verdict for "the set has A^I-density zero"."""
    limit = len(member) if isinstance(member, np.ndarray) else horizon
    rows = A.max_row_for(limit)
    y = a_density_partial(A, member, rows)
    return ideal_limit_at(y, ideal, 0.0, tol)


def ai_density_is_full(
    A: SummMatrix,
    ideal: Ideal,
    member: Membership,
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Verdict for "the set has A^I-density one"."""
    limit = len(member) if isinstance(member, np.ndarray) else horizon
    rows = A.max_row_for(limit)
    y = a_density_partial(A, member, rows)
    return ideal_limit_at(y, ideal, 1.0, tol)


def ai_nonthin(
    A: SummMatrix,
    ideal: Ideal,
    member: Membership,
    horizon: int = DEFAULT_HORIZON,
    tol: float = DEFAULT_TOL,
) -> bool:
    """Whether a set fails to have A^I-density zero at the horizon.

    True when the null verdict is not converged and the tail of the
    partial densities stays above tol (a liminf proxy); a set whose null
    verdict converges is thin.  This is the finite-horizon reading of
    "does not have density zero".
    """
    v = ai_density_is_null(A, ideal, member, horizon, tol)
    if v.converged:
        return False
    return v.tail_low is not None and v.tail_low > tol
