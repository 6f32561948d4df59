"""Correlations, significance tiers, summaries and variance decomposition."""

from __future__ import annotations

import math
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Literal

import numpy as np
from loguru import logger
from scipy.special import betainc
from scipy.stats import rankdata

from .errors import (
    EmptyGroupError,
    EmptySeriesError,
    InsufficientDataError,
    InsufficientGroupsError,
    StatsError,
    ZeroVarianceError,
)
from .model import INDICATORS, FixtureTable, GroupPartition

Method = Literal["pearson", "spearman"]
TOTAL = "Total"


class ConfidenceTier(str, Enum):
    NONE = "none"
    P90 = "90"
    P95 = "95"
    P99 = "99"

    @property
    def marker(self) -> str:
        return {"none": "", "90": "*", "95": "**", "99": "***"}[self.value]


class EffectSize(str, Enum):
    NONE = "none"
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


@dataclass(frozen=True)
class PairedSeries:
    pairs: tuple[tuple[float | None, float | None], ...] = ()

    @classmethod
    def from_columns(
        cls, xs: Sequence[float | None], ys: Sequence[float | None]
    ) -> PairedSeries:
        if len(xs) != len(ys):
            raise ValueError("columns must be aligned by row")
        return cls(tuple(zip(xs, ys)))

    def complete(self) -> tuple[np.ndarray, np.ndarray]:
        """Pairwise-complete rows as two float arrays."""
        kept = [(x, y) for x, y in self.pairs if x is not None and y is not None]
        xs = np.array([x for x, _ in kept], dtype=np.float64)
        ys = np.array([y for _, y in kept], dtype=np.float64)
        return xs, ys

    @property
    def effective_n(self) -> int:
        return sum(1 for x, y in self.pairs if x is not None and y is not None)


@dataclass(frozen=True)
class CorrelationCell:
    r: float
    n: int
    confidence_tier: ConfidenceTier
    effect_size: EffectSize

    @property
    def determination(self) -> float:
        return self.r * self.r

    @property
    def marker(self) -> str:
        return self.confidence_tier.marker


@dataclass(frozen=True)
class SummaryStats:
    n: int
    median: float
    mean: float
    sd: float | None
    minimum: float
    maximum: float

    @property
    def range(self) -> float:
        return self.maximum - self.minimum


@dataclass(frozen=True)
class VarianceDecomposition:
    total_variance: float
    between_variance: float
    reduction: float
    pct_reduction: float
    groups: int
    n: int

    @property
    def flagged(self) -> bool:
        """Between-group variance exceeds total variance; pct is negative."""
        return self.between_variance > self.total_variance


@dataclass(frozen=True)
class CorrelationMatrix:
    group: str
    method: Method
    rows: int
    cells: dict[tuple[str, str], CorrelationCell | None]


def midranks(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span."""
    return rankdata(np.asarray(values, dtype=np.float64), method="average")


def _product_moment(xs: np.ndarray, ys: np.ndarray) -> float:
    # the mean of a constant float column can differ from its value in the last bit
    if np.ptp(xs) == 0 or np.ptp(ys) == 0:
        raise ZeroVarianceError("correlation undefined for a constant variable")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _cell(r: float, n: int) -> CorrelationCell:
    return CorrelationCell(r, n, significance_tier(r, n), classify_effect_size(r))


def _complete_pairs(series: PairedSeries) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = series.complete()
    if xs.size < 3:
        raise InsufficientDataError(f"need at least 3 complete pairs, got {xs.size}")
    return xs, ys


def pearson(series: PairedSeries) -> CorrelationCell:
    xs, ys = _complete_pairs(series)
    return _cell(_product_moment(xs, ys), int(xs.size))


def spearman(series: PairedSeries) -> CorrelationCell:
    xs, ys = _complete_pairs(series)
    return _cell(_product_moment(midranks(xs), midranks(ys)), int(xs.size))


def two_tailed_p(r: float, n: int) -> float:
    """p-value of the t test of r = 0 with n - 2 degrees of freedom."""
    if n < 3:
        raise InsufficientDataError("significance needs n >= 3")
    if abs(r) >= 1.0:
        return 0.0
    df = n - 2
    t2 = r * r * df / (1.0 - r * r)
    # P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    return float(betainc(df / 2.0, 0.5, df / (df + t2)))


def significance_tier(r: float, n: int) -> ConfidenceTier:
    if abs(r) >= 1.0:
        return ConfidenceTier.P99
    p = two_tailed_p(r, n)
    if p < 0.01:
        return ConfidenceTier.P99
    if p < 0.05:
        return ConfidenceTier.P95
    if p < 0.10:
        return ConfidenceTier.P90
    return ConfidenceTier.NONE


def classify_effect_size(r: float) -> EffectSize:
    magnitude = abs(r)
    if magnitude >= 0.50:
        return EffectSize.LARGE
    if magnitude >= 0.30:
        return EffectSize.MEDIUM
    if magnitude >= 0.10:
        return EffectSize.SMALL
    return EffectSize.NONE


def _present(values: Iterable[float | None]) -> np.ndarray:
    return np.array([v for v in values if v is not None], dtype=np.float64)


def summarize(values: Iterable[float | None]) -> SummaryStats:
    data = _present(values)
    if data.size == 0:
        raise EmptySeriesError("no present values to summarize")
    sd: float | None = None
    if data.size >= 2:
        sd = 0.0 if np.ptp(data) == 0 else float(data.std(ddof=1))
    return SummaryStats(
        n=int(data.size),
        median=float(np.median(data)),
        mean=float(data.mean()),
        sd=sd,
        minimum=float(data.min()),
        maximum=float(data.max()),
    )


def variance_decomposition(
    values: Sequence[float | None], groups: Sequence[Hashable]
) -> VarianceDecomposition:
    """Total variance over all present values against the variance of group means.

    The between-group term is the n-1 variance of the unweighted group means, so
    every category counts once regardless of its size.
    """
    if len(values) != len(groups):
        raise ValueError("values and groups must be aligned")
    by_group: dict[Hashable, list[float]] = {}
    for value, group in zip(values, groups):
        members = by_group.setdefault(group, [])
        if value is not None:
            members.append(value)
    if len(by_group) < 2:
        raise InsufficientGroupsError(f"need at least 2 groups, got {len(by_group)}")
    empty = [str(group) for group, members in by_group.items() if not members]
    if empty:
        raise EmptyGroupError(f"groups without present values: {', '.join(empty)}")
    pooled = np.array(
        [v for members in by_group.values() for v in members], dtype=np.float64
    )
    if pooled.size < 2:
        raise InsufficientGroupsError("need at least 2 present values")

    total = 0.0 if np.ptp(pooled) == 0 else float(pooled.var(ddof=1))
    means = np.array([np.mean(members) for members in by_group.values()])
    between = 0.0 if np.ptp(means) == 0 else float(means.var(ddof=1))
    reduction = total - between
    pct = 100.0 * reduction / total if total > 0 else 0.0
    return VarianceDecomposition(
        total_variance=total,
        between_variance=between,
        reduction=reduction,
        pct_reduction=pct,
        groups=len(by_group),
        n=int(pooled.size),
    )


def indicator_pairs(
    labels: Sequence[str] = tuple(INDICATORS),
) -> list[tuple[str, str]]:
    """Upper-triangle pairs in column order."""
    return [(a, b) for i, a in enumerate(labels) for b in labels[i + 1 :]]


def correlation_matrix(
    fixture: FixtureTable, partition: GroupPartition, method: Method = "pearson"
) -> list[CorrelationMatrix]:
    """One matrix per partition category followed by the pooled Total."""
    correlate = {"pearson": pearson, "spearman": spearman}[method]
    groups = [
        (category, fixture.select(partition, category))
        for category in partition.categories()
    ]
    groups.append((TOTAL, fixture.select(partition)))

    matrices = []
    for group, rows in groups:
        cells: dict[tuple[str, str], CorrelationCell | None] = {}
        for a, b in indicator_pairs():
            series = PairedSeries.from_columns(
                [row.indicator(a) for row in rows], [row.indicator(b) for row in rows]
            )
            try:
                cells[(a, b)] = correlate(series)
            except StatsError:
                cells[(a, b)] = None
        matrices.append(CorrelationMatrix(group, method, len(rows), cells))
    return matrices


def tally_cells(matrices: Iterable[CorrelationMatrix]) -> dict[str, dict[str, int]]:
    """Count available cells per confidence tier and per effect size."""
    tiers = {tier.value: 0 for tier in ConfidenceTier}
    effects = {effect.value: 0 for effect in EffectSize}
    for matrix in matrices:
        for cell in matrix.cells.values():
            if cell is None:
                continue
            tiers[cell.confidence_tier.value] += 1
            effects[cell.effect_size.value] += 1
    return {"tiers": tiers, "effects": effects}


def summary_table(
    fixture: FixtureTable, partition: GroupPartition
) -> dict[str, dict[str, SummaryStats | None]]:
    table: dict[str, dict[str, SummaryStats | None]] = {}
    for category in partition.categories():
        rows = fixture.select(partition, category)
        table[category] = {}
        for label in INDICATORS:
            values = [row.indicator(label) for row in rows]
            try:
                table[category][label] = summarize(values)
            except EmptySeriesError:
                table[category][label] = None
    return table


def aggregate_table(
    fixture: FixtureTable, partition: GroupPartition
) -> dict[str, tuple[SummaryStats | None, VarianceDecomposition | None]]:
    """Pooled summary and decomposition per indicator; None where undefined."""
    rows = fixture.select(partition)
    groups = [row.category for row in rows]
    table: dict[str, tuple[SummaryStats | None, VarianceDecomposition | None]] = {}
    for label in INDICATORS:
        values = [row.indicator(label) for row in rows]
        summary: SummaryStats | None = None
        decomposition: VarianceDecomposition | None = None
        try:
            summary = summarize(values)
            decomposition = variance_decomposition(values, groups)
        except StatsError as exc:
            logger.warning("{}: {}", label, exc)
        table[label] = (summary, decomposition)
    return table


@dataclass(frozen=True)
class SelfCitationShift:
    journal: str
    category: str
    cp_selfcite: float
    cp: float

    @property
    def shift(self) -> float:
        return abs(self.cp - self.cp_selfcite)


def self_citation_shifts(
    fixture: FixtureTable, threshold: float = 1.0
) -> tuple[list[SelfCitationShift], float]:
    """Journals whose topic potential moves by >= threshold with self-citations.

    Returns the shifts (largest first) and their share of comparable rows.
    """
    comparable = [
        SelfCitationShift(row.journal, row.category, row.cp_selfcite, row.cp)
        for row in fixture.rows
        if row.cp_selfcite is not None and row.cp is not None
    ]
    shifted = sorted(
        (item for item in comparable if item.shift >= threshold),
        key=lambda item: (-item.shift, item.journal, item.category),
    )
    share = len(shifted) / len(comparable) if comparable else 0.0
    return shifted, share
