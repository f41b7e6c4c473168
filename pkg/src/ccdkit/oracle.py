"""Conditional-independence oracles with memoisation and query accounting.

Two concrete oracles share one interface: an exact oracle answering by
d-separation in a known graph, and a statistical oracle running Fisher-z
partial-correlation tests on a data matrix. Queries are memoised per
instance, keyed on the unordered endpoint pair and the conditioning set;
statistics count each distinct query once, attributed to the search phase
that first asked it. Both the memo and the counters sit behind a lock, so
an oracle instance can be shared across threads.
"""
from __future__ import annotations

import csv
import io
import math
import threading
import warnings
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import cached_property
from statistics import NormalDist
from typing import Iterable, Iterator, Sequence

import numpy as np

from .digraph import DirectedGraph, UnknownVertexError
from .dsep import d_connected

__all__ = [
    "CiQuery",
    "DataMatrix",
    "OracleStats",
    "IndependenceOracle",
    "GraphOracle",
    "FisherZOracle",
    "SingularCovarianceError",
    "SingularCovarianceWarning",
    "partial_correlation",
    "partial_correlation_recursive",
    "partial_correlation_from_covariance",
    "fisher_z_statistic",
    "fisher_z_is_independent",
]


class SingularCovarianceError(ValueError):
    """The covariance needed for a partial correlation is degenerate."""


class SingularCovarianceWarning(UserWarning):
    """A statistical query met a degenerate covariance and counted as dependent."""


@dataclass(frozen=True)
class CiQuery:
    """One question: are x and y independent given s?"""

    x: str
    y: str
    s: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", frozenset(self.s))
        if self.x == self.y:
            raise ValueError("query endpoints must differ")
        if self.x in self.s or self.y in self.s:
            raise ValueError("endpoints cannot appear in the conditioning set")

    @property
    def key(self) -> tuple[frozenset[str], frozenset[str]]:
        return frozenset((self.x, self.y)), self.s


@dataclass
class OracleStats:
    """Distinct-query counts grouped by phase label and conditioning-set size."""

    counts: Counter = field(default_factory=Counter)

    def record(self, phase: str | None, size: int) -> None:
        self.counts[(phase, size)] += 1

    def total(self) -> int:
        return sum(self.counts.values())

    def for_phase(self, phase: str | None) -> int:
        return sum(n for (p, _), n in self.counts.items() if p == phase)

    def for_size(self, size: int) -> int:
        return sum(n for (_, s), n in self.counts.items() if s == size)

    def rows(self) -> list[tuple[str, int, int]]:
        """Sorted (phase, size, count) rows; unattributed queries show as '-'."""
        return sorted(
            (phase if phase is not None else "-", size, count)
            for (phase, size), count in self.counts.items()
        )


class IndependenceOracle:
    """Base answering service; subclasses implement ``_decide``."""

    def __init__(self, vertices: Iterable[str]):
        self.vertices: tuple[str, ...] = tuple(sorted({str(v) for v in vertices}))
        self.stats = OracleStats()
        self._vertex_set = frozenset(self.vertices)
        self._memo: dict[tuple[frozenset[str], frozenset[str]], bool] = {}
        self._lock = threading.Lock()
        self._phase: str | None = None

    def is_independent(self, x: str, y: str, s: Iterable[str] = ()) -> bool:
        query = CiQuery(str(x), str(y), frozenset(s))
        for v in (query.x, query.y, *query.s):
            if v not in self._vertex_set:
                raise UnknownVertexError(v)
        with self._lock:
            try:
                return self._memo[query.key]
            except KeyError:
                pass
            answer = bool(self._decide(query))
            self._memo[query.key] = answer
            self.stats.record(self._phase, len(query.s))
            return answer

    def _decide(self, query: CiQuery) -> bool:
        raise NotImplementedError

    @contextmanager
    def phase(self, label: str) -> Iterator["IndependenceOracle"]:
        """Attribute queries first asked inside the block to this label."""
        previous = self._phase
        self._phase = label
        try:
            yield self
        finally:
            self._phase = previous


class GraphOracle(IndependenceOracle):
    """Exact oracle: independent iff d-separated in the given graph."""

    def __init__(self, graph: DirectedGraph):
        super().__init__(graph.vertices)
        self.graph = graph

    def _decide(self, query: CiQuery) -> bool:
        return not d_connected(self.graph, query.x, query.y, query.s)


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """Rectangular real-valued samples with one labelled column per variable."""

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2:
            raise ValueError("values must be a two-dimensional array")
        rows, cols = vals.shape
        if rows < 1:
            raise ValueError("a data matrix needs at least one row")
        labels = tuple(str(c) for c in self.labels)
        if len(labels) != cols:
            raise ValueError("label count must match column count")
        if len(set(labels)) != len(labels):
            raise ValueError("column labels must be unique")
        if not np.isfinite(vals).all():
            raise ValueError("missing or non-finite values are not accepted")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", vals)

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])

    @cached_property
    def _col_index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def columns(self, names: Sequence[str]) -> np.ndarray:
        try:
            idx = [self._col_index[name] for name in names]
        except KeyError as exc:
            raise UnknownVertexError(exc.args[0]) from None
        return self.values[:, idx]

    @classmethod
    def from_csv(cls, text: str) -> "DataMatrix":
        """Read a header row of labels plus decimal rows; no missing cells."""
        reader = csv.reader(io.StringIO(text))
        rows = [row for row in reader if row]
        if len(rows) < 2:
            raise ValueError("CSV needs a header row and at least one data row")
        labels = tuple(cell.strip() for cell in rows[0])
        data = []
        for lineno, row in enumerate(rows[1:], start=2):
            if len(row) != len(labels):
                raise ValueError(f"CSV row {lineno} has {len(row)} cells, expected {len(labels)}")
            try:
                data.append([float(cell) for cell in row])
            except ValueError:
                raise ValueError(f"CSV row {lineno} has a non-numeric or missing cell") from None
        return cls(labels, np.asarray(data, dtype=float))

    def to_csv(self) -> str:
        lines = [",".join(self.labels)]
        lines.extend(",".join(repr(float(v)) for v in row) for row in self.values)
        return "\n".join(lines) + "\n"


def _partial_from_cov(cov: np.ndarray) -> float:
    """Partial correlation of the first two variables given the rest.

    Uses the conditional (Schur-complement) covariance of the leading pair,
    which needs only the conditioning block to be invertible; a variable
    that the conditioning set determines exactly is reported as singular.
    """
    cov = np.asarray(cov, dtype=float)
    base_x, base_y = float(cov[0, 0]), float(cov[1, 1])
    if base_x <= 0.0 or base_y <= 0.0:
        raise SingularCovarianceError("a queried column has zero variance")
    if cov.shape[0] > 2:
        try:
            solved = np.linalg.solve(cov[2:, 2:], cov[2:, :2])
        except np.linalg.LinAlgError as exc:
            raise SingularCovarianceError("conditioning covariance is singular") from exc
        top = cov[:2, :2] - cov[:2, 2:] @ solved
    else:
        top = cov[:2, :2]
    var_x, var_y = float(top[0, 0]), float(top[1, 1])
    if not (math.isfinite(var_x) and math.isfinite(var_y)):
        raise SingularCovarianceError("conditioning covariance is numerically singular")
    if var_x <= base_x * 1e-12 or var_y <= base_y * 1e-12:
        raise SingularCovarianceError("conditioning determines a queried variable")
    r = float(top[0, 1]) / math.sqrt(var_x * var_y)
    if not math.isfinite(r):
        raise SingularCovarianceError("partial correlation is not finite")
    return min(1.0, max(-1.0, r))


def _query_names(x: str, y: str, s: Iterable[str]) -> tuple[str, str, tuple[str, ...]]:
    cond = tuple(sorted(frozenset(s)))
    if x == y:
        raise ValueError("query endpoints must differ")
    if x in cond or y in cond:
        raise ValueError("endpoints cannot appear in the conditioning set")
    return x, y, cond


def partial_correlation(data: DataMatrix, x: str, y: str, s: Iterable[str] = ()) -> float:
    """Sample partial correlation of x and y controlling for s."""
    x, y, cond = _query_names(x, y, s)
    if data.n_rows <= len(cond) + 2:
        raise ValueError("need more rows than conditioning variables plus two")
    cov = np.cov(data.columns((x, y, *cond)), rowvar=False, ddof=1)
    return _partial_from_cov(np.atleast_2d(cov))


def partial_correlation_from_covariance(
    cov: np.ndarray, labels: Sequence[str], x: str, y: str, s: Iterable[str] = ()
) -> float:
    """Partial correlation read off a covariance matrix over ``labels``."""
    x, y, cond = _query_names(x, y, s)
    index = {label: i for i, label in enumerate(labels)}
    idx = [index[v] for v in (x, y, *cond)]
    cov = np.asarray(cov, dtype=float)
    return _partial_from_cov(cov[np.ix_(idx, idx)])


def partial_correlation_recursive(
    data: DataMatrix, x: str, y: str, s: Iterable[str] = ()
) -> float:
    """Same quantity by the classic recursion on lower-order correlations.

    Exponential in the conditioning-set size; kept as an independent
    cross-check of the matrix route.
    """
    x, y, cond = _query_names(x, y, s)
    if data.n_rows <= len(cond) + 2:
        raise ValueError("need more rows than conditioning variables plus two")
    cov = np.atleast_2d(np.cov(data.columns((x, y, *cond)), rowvar=False, ddof=1))
    scale = np.sqrt(np.diag(cov))
    if np.any(scale <= 0.0):
        raise SingularCovarianceError("a queried column has zero variance")
    corr = cov / np.outer(scale, scale)
    memo: dict[tuple[int, int, frozenset[int]], float] = {}

    def rho(i: int, j: int, given: frozenset[int]) -> float:
        if i > j:
            i, j = j, i
        key = (i, j, given)
        if key in memo:
            return memo[key]
        if not given:
            value = float(corr[i, j])
        else:
            k = min(given)
            rest = given - {k}
            r_ij = rho(i, j, rest)
            r_ik = rho(i, k, rest)
            r_jk = rho(j, k, rest)
            denom = (1.0 - r_ik * r_ik) * (1.0 - r_jk * r_jk)
            if denom <= 0.0:
                raise SingularCovarianceError("recursion hit a unit correlation")
            value = (r_ij - r_ik * r_jk) / math.sqrt(denom)
        memo[key] = value
        return value

    r = rho(0, 1, frozenset(range(2, 2 + len(cond))))
    return min(1.0, max(-1.0, r))


def fisher_z_statistic(r: float, n_rows: int, cond_size: int) -> float:
    """The z transform of r scaled by sqrt(N - |s| - 3); infinite at |r| = 1."""
    df = n_rows - cond_size - 3
    if df < 1:
        raise ValueError("need n_rows - |s| - 3 >= 1")
    if abs(r) >= 1.0:
        return math.inf
    return math.atanh(r) * math.sqrt(df)


def fisher_z_is_independent(
    data: DataMatrix, x: str, y: str, s: Iterable[str] = (), alpha: float = 0.01
) -> bool:
    """Two-sided test of zero partial correlation at level alpha.

    Degenerate covariances propagate as SingularCovarianceError; a unit
    partial correlation simply counts as dependent.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be strictly between 0 and 1")
    r = partial_correlation(data, x, y, s)
    z = fisher_z_statistic(r, data.n_rows, len(frozenset(s)))
    return abs(z) <= NormalDist().inv_cdf(1.0 - alpha / 2.0)


class FisherZOracle(IndependenceOracle):
    """Statistical oracle testing partial correlations on one data matrix.

    The covariance of all columns is computed once up front; each query
    reduces the block it needs. A degenerate block makes the query count
    as dependent and emits SingularCovarianceWarning, so a deterministic
    linear dependence in the data degrades the answer instead of aborting
    the search.
    """

    def __init__(self, data: DataMatrix, alpha: float = 0.01):
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must be strictly between 0 and 1")
        super().__init__(data.labels)
        self.data = data
        self.alpha = float(alpha)
        self._cov = np.atleast_2d(np.cov(data.values, rowvar=False, ddof=1))
        self._critical = NormalDist().inv_cdf(1.0 - self.alpha / 2.0)

    def _decide(self, query: CiQuery) -> bool:
        try:
            r = partial_correlation_from_covariance(
                self._cov, self.data.labels, query.x, query.y, query.s
            )
        except SingularCovarianceError as exc:
            warnings.warn(
                SingularCovarianceWarning(
                    f"query ({query.x}, {query.y} | {sorted(query.s)}): {exc}; "
                    "treating as dependent"
                ),
                stacklevel=4,
            )
            return False
        z = fisher_z_statistic(r, self.data.n_rows, len(query.s))
        return abs(z) <= self._critical
