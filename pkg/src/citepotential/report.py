"""Render result tables as csv, json or markdown with half-up rounding."""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import NamedTuple, Union

from .model import INDICATORS, MetricResult
from .stats import (
    CorrelationMatrix,
    SelfCitationShift,
    SummaryStats,
    VarianceDecomposition,
)
from .validation import ValidationReport

MISSING = "--"
CORRELATION_DIGITS = 2
# ES and FCIF are small numbers printed with two extra decimals.
EXTRA_DIGITS = {"ES": 2, "FCIF": 2}


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    MD = "md"


class Num(NamedTuple):
    """A number with its own rounding, overriding the table default."""

    value: float
    digits: int


Value = Union[str, int, float, Num, None]


@dataclass(frozen=True)
class Column:
    name: str
    extra_digits: int = 0


@dataclass
class Table:
    title: str
    columns: tuple[Column, ...]
    rows: list[tuple[Value, ...]] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)


def round_half_up(value: float, digits: int) -> str:
    quantum = Decimal(1).scaleb(-digits)
    rounded = Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP)
    if rounded == 0:
        rounded = abs(rounded)
    return f"{rounded:f}"


def _text(value: Value, digits: int) -> str:
    if value is None:
        return MISSING
    if isinstance(value, Num):
        return round_half_up(value.value, value.digits)
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return round_half_up(value, digits)
    return value


def _json_value(value: Value, digits: int) -> object:
    if value is None or isinstance(value, (str, bool, int)):
        return value
    return float(_text(value, digits))


def render(table: Table, fmt: OutputFormat | str, digits: int = 3) -> str:
    fmt = OutputFormat(fmt)
    widths = [digits + column.extra_digits for column in table.columns]
    if fmt is OutputFormat.JSON:
        payload = {
            "title": table.title,
            "metadata": dict(table.metadata),
            "rows": [
                {
                    column.name: _json_value(value, width)
                    for column, value, width in zip(table.columns, row, widths)
                }
                for row in table.rows
            ],
        }
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"

    cells = [
        [_text(value, width) for value, width in zip(row, widths)] for row in table.rows
    ]
    header = [column.name for column in table.columns]
    if fmt is OutputFormat.CSV:
        buffer = io.StringIO()
        for key, value in table.metadata.items():
            buffer.write(f"# {key}: {value}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(cells)
        return buffer.getvalue()

    lines = [f"### {table.title}", ""]
    for key, value in table.metadata.items():
        lines.append(f"- {key}: {value}")
    if table.metadata:
        lines.append("")
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "|".join("---" for _ in header) + "|")
    lines.extend("| " + " | ".join(row) + " |" for row in cells)
    return "\n".join(lines) + "\n"


def metric_table(
    results: Sequence[MetricResult],
    *,
    self_citations: str = "both",
    metadata: Mapping[str, str] | None = None,
) -> Table:
    layout = [
        ("jif", "jif", None),
        ("cp_topic_self", "cp_topic_incl_self", True),
        ("cp_topic", "cp_topic_excl_self", False),
        ("score_self", "score_incl_self", True),
        ("score", "score_excl_self", False),
        ("tnif_self", "tnif_incl_self", True),
        ("tnif", "tnif_excl_self", False),
    ]
    keep = {"both": {True, False}, "include": {True}, "exclude": {False}}[
        self_citations
    ]
    chosen = [
        (name, attr)
        for name, attr, variant in layout
        if variant is None or variant in keep
    ]
    columns = (
        Column("journal"),
        *(Column(name) for name, _ in chosen),
        Column("status"),
    )
    rows = [
        (
            result.journal,
            *(getattr(result, attr) for _, attr in chosen),
            result.status,
        )
        for result in results
    ]
    return Table("Topic normalized impact factors", columns, rows, dict(metadata or {}))


def validation_table(report: ValidationReport) -> Table:
    columns = (
        Column("journal"),
        Column("category"),
        Column("variant"),
        Column("jif2"),
        Column("cp"),
        Column("published"),
        Column("recomputed"),
        Column("delta"),
        Column("tolerance"),
        Column("status"),
    )
    rows = [
        (
            check.journal,
            check.category,
            check.variant,
            check.jif,
            check.cp_topic,
            check.published,
            check.recomputed,
            check.delta,
            check.tolerance,
            check.status,
        )
        for check in report.checks
    ]
    metadata = {
        "cp_db": repr(report.cp_db),
        "passed": str(report.passed_count),
        "failed": str(report.failed_count),
        "skipped": str(report.skipped_count),
        "rejected": str(len(report.rejected_rows)),
    }
    return Table("Fixture TNIF consistency", columns, rows, metadata)


def correlation_long_table(
    matrices: Iterable[CorrelationMatrix], metadata: Mapping[str, str] | None = None
) -> Table:
    columns = (
        Column("group"),
        Column("method"),
        Column("x"),
        Column("y"),
        Column("r"),
        Column("n"),
        Column("tier"),
        Column("effect"),
    )
    rows: list[tuple[Value, ...]] = []
    for matrix in matrices:
        for (x, y), cell in matrix.cells.items():
            if cell is None:
                rows.append((matrix.group, matrix.method, x, y, None, None, None, None))
                continue
            rows.append(
                (
                    matrix.group,
                    matrix.method,
                    x,
                    y,
                    Num(cell.r, CORRELATION_DIGITS),
                    cell.n,
                    cell.marker,
                    cell.effect_size.value,
                )
            )
    return Table("Correlation coefficients", columns, rows, dict(metadata or {}))


def correlation_wide_table(
    matrices: Sequence[CorrelationMatrix], metadata: Mapping[str, str] | None = None
) -> Table:
    """Two-way layout: one block of rows per group, upper triangle only.

    Each cell reads `r` with its star marker, then the pair count and the
    effect-size class, e.g. `0.85*** (n=224, large)`.
    """
    labels = list(INDICATORS)
    method = matrices[0].method if matrices else "pearson"
    title = (
        "Pearson correlation coefficients"
        if method == "pearson"
        else "Spearman rank correlation coefficients"
    )
    columns = (
        Column("group"),
        Column("journals"),
        Column(""),
        *map(Column, labels[1:]),
    )
    rows: list[tuple[Value, ...]] = []
    for matrix in matrices:
        for i, row_label in enumerate(labels[:-1]):
            cells: list[Value] = []
            for col_label in labels[1:]:
                if labels.index(col_label) <= i:
                    cells.append("")
                    continue
                cell = matrix.cells.get((row_label, col_label))
                if cell is None:
                    cells.append(MISSING)
                    continue
                r = round_half_up(cell.r, CORRELATION_DIGITS)
                cells.append(
                    f"{r}{cell.marker} (n={cell.n}, {cell.effect_size.value})"
                )
            first = i == 0
            rows.append(
                (
                    matrix.group if first else "",
                    matrix.rows if first else "",
                    row_label,
                    *cells,
                )
            )
    return Table(title, columns, rows, dict(metadata or {}))


def summary_output(
    summary: Mapping[str, Mapping[str, SummaryStats | None]],
) -> Table:
    labels = list(INDICATORS)
    columns = (
        Column("category"),
        Column("measure"),
        *(Column(label, EXTRA_DIGITS.get(label, 0)) for label in labels),
    )
    rows: list[tuple[Value, ...]] = []
    for category, stats in summary.items():
        for measure in ("Median", "Mean", "Sd"):
            values: list[Value] = []
            for label in labels:
                item = stats.get(label)
                if item is None:
                    values.append(None)
                else:
                    measures = {"Median": item.median, "Mean": item.mean, "Sd": item.sd}
                    values.append(measures[measure])
            rows.append((category, measure, *values))
    return Table("Central-tendency and variability measures", columns, rows)


def variance_output(
    aggregate: Mapping[str, tuple[SummaryStats | None, VarianceDecomposition | None]],
) -> Table:
    labels = list(aggregate)
    columns = (
        Column("measure"),
        *(Column(label, EXTRA_DIGITS.get(label, 0)) for label in labels),
    )
    from_summary = (
        ("Median", lambda s: s.median),
        ("Mean", lambda s: s.mean),
    )
    from_decomposition = (
        ("Total variance", lambda d: d.total_variance),
        ("Between-group variance", lambda d: d.between_variance),
        ("Total reduction of the variance", lambda d: d.reduction),
        ("Percentage reduction of the variance", lambda d: Num(d.pct_reduction, 1)),
    )
    rows: list[tuple[Value, ...]] = []
    for name, pick in from_summary:
        summaries = (aggregate[label][0] for label in labels)
        rows.append((name, *(None if s is None else pick(s) for s in summaries)))
    for name, pick in from_decomposition:
        parts = (aggregate[label][1] for label in labels)
        rows.append((name, *(None if d is None else pick(d) for d in parts)))

    metadata = {"groups": "between the categories; total over all rows"}
    flagged = [
        label
        for label in labels
        if (d := aggregate[label][1]) is not None and d.flagged
    ]
    if flagged:
        metadata["flagged"] = "between-group exceeds total: " + ", ".join(flagged)
    undefined = [label for label in labels if aggregate[label][1] is None]
    if undefined:
        metadata["undefined"] = ", ".join(undefined)
    return Table(
        "Central-tendency and variability measures for the aggregate data",
        columns,
        rows,
        metadata,
    )


def self_citation_table(
    shifts: Sequence[SelfCitationShift], share: float, threshold: float
) -> Table:
    columns = (
        Column("journal"),
        Column("category"),
        Column("cp_selfcite"),
        Column("cp"),
        Column("shift"),
    )
    rows: list[tuple[Value, ...]] = [
        (item.journal, item.category, item.cp_selfcite, item.cp, item.shift)
        for item in shifts
    ]
    metadata = {
        "threshold": repr(threshold),
        "journals": str(len(shifts)),
        "share": round_half_up(100.0 * share, 1) + "%",
    }
    return Table("Topic potential shift from self-citations", columns, rows, metadata)
