"""CSV ingestion for citation ledgers, publication counts, groups and fixtures."""

from __future__ import annotations

import csv
import math
import re
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO, TypeVar

from loguru import logger

from .errors import (
    DuplicateKeyError,
    DuplicatePairError,
    MalformedRowError,
    NegativeCountError,
    NegativeValueError,
    ParseError,
)
from .model import (
    FIXTURE_FIELDS,
    CitationKey,
    CitationLedger,
    FixtureRow,
    FixtureTable,
    GroupPartition,
    GroupRow,
    PublicationCounts,
    PublicationKey,
)

CITATION_HEADER = ("census_year", "citing", "cited", "cited_year", "count")
PUBLICATION_HEADER = ("journal", "year", "citable_items")
GROUP_HEADER = ("journal", "category")
FIXTURE_HEADER = ("journal", "category", *FIXTURE_FIELDS)

MISSING_MARKERS = {"--", ""}

_INTEGER = re.compile(r"-?[0-9]+")
_DECIMAL = re.compile(r"-?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)")

T = TypeVar("T")


@dataclass(frozen=True)
class ParseReport:
    accepted_rows: int = 0
    rejected_rows: tuple[tuple[int, str], ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def total_rows(self) -> int:
        return self.accepted_rows + len(self.rejected_rows)

    def lines(self) -> list[str]:
        out = [f"accepted rows: {self.accepted_rows}"]
        out.extend(
            f"rejected line {line}: {reason}" for line, reason in self.rejected_rows
        )
        out.extend(f"warning: {message}" for message in self.warnings)
        return out


@dataclass
class _ReportBuilder:
    accepted: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def build(self) -> ParseReport:
        return ParseReport(self.accepted, tuple(self.rejected), tuple(self.warnings))


class _RowRejected(Exception):
    """A row that is well-formed but violates a data invariant."""


def _rows(
    stream: TextIO, header: tuple[str, ...], builder: _ReportBuilder
) -> Iterator[tuple[int, list[str]]]:
    reader = csv.reader(stream)
    try:
        first = next(reader, None)
        if first is None:
            raise MalformedRowError("missing header row", report=builder.build())
        if first:
            first[0] = first[0].lstrip("\ufeff")
        if tuple(cell.strip() for cell in first) != header:
            raise MalformedRowError(
                f"expected header {','.join(header)}",
                line=reader.line_num,
                report=builder.build(),
            )
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            yield reader.line_num, row
    except (csv.Error, UnicodeDecodeError) as exc:
        raise MalformedRowError(
            f"unreadable CSV: {exc}", line=reader.line_num, report=builder.build()
        ) from exc


def _integer(text: str, name: str, line: int) -> int:
    token = text.strip()
    if not _INTEGER.fullmatch(token):
        raise MalformedRowError(f"{name} is not an integer: {text!r}", line=line)
    try:
        return int(token)
    except ValueError as exc:
        raise MalformedRowError(f"{name} is out of range", line=line) from exc


def _count(text: str, name: str, line: int) -> int:
    value = _integer(text, name, line)
    if value < 0:
        raise NegativeCountError(f"{name} is negative: {value}", line=line)
    return value


def _decimal(text: str, name: str, line: int) -> float | None:
    token = text.strip()
    if token in MISSING_MARKERS:
        return None
    if not _DECIMAL.fullmatch(token):
        raise MalformedRowError(f"{name} is not a plain decimal: {text!r}", line=line)
    value = float(token)
    if not math.isfinite(value):
        raise MalformedRowError(f"{name} is out of range", line=line)
    if value < 0:
        raise NegativeValueError(f"{name} is negative: {value}", line=line)
    return value


def _journal(text: str, name: str, line: int) -> str:
    if not text.strip():
        raise MalformedRowError(f"{name} is empty", line=line)
    return text


def _check_arity(row: list[str], header: tuple[str, ...], line: int) -> None:
    if len(row) != len(header):
        raise MalformedRowError(
            f"expected {len(header)} fields, got {len(row)}", line=line
        )


def _handle(exc: ParseError, builder: _ReportBuilder, *, strict: bool) -> None:
    if strict:
        exc.report = builder.build()
        raise exc
    builder.rejected.append((exc.line, exc.reason))


def _merge(
    entries: dict[T, int],
    key: T,
    value: int,
    line: int,
    builder: _ReportBuilder,
    *,
    strict: bool,
) -> None:
    if key not in entries:
        entries[key] = value
        return
    if strict:
        raise DuplicateKeyError(
            f"duplicate key {tuple(key)}", line=line, report=builder.build()
        )
    entries[key] += value
    message = f"line {line}: duplicate key {tuple(key)} summed"
    builder.warnings.append(message)
    logger.warning(message)


def parse_citations(
    stream: TextIO, *, strict: bool = True
) -> tuple[CitationLedger, ParseReport]:
    builder = _ReportBuilder()
    entries: dict[CitationKey, int] = {}
    for line, row in _rows(stream, CITATION_HEADER, builder):
        try:
            _check_arity(row, CITATION_HEADER, line)
            census_year = _integer(row[0], "census_year", line)
            citing = _journal(row[1], "citing", line)
            cited = _journal(row[2], "cited", line)
            cited_year = _integer(row[3], "cited_year", line)
            count = _count(row[4], "count", line)
            if cited_year >= census_year:
                raise _RowRejected(
                    f"cited_year {cited_year} is not before census_year {census_year}"
                )
        except ParseError as exc:
            _handle(exc, builder, strict=strict)
            continue
        except _RowRejected as exc:
            builder.rejected.append((line, str(exc)))
            continue
        key = CitationKey(census_year, citing, cited, cited_year)
        _merge(entries, key, count, line, builder, strict=strict)
        builder.accepted += 1
    return CitationLedger(entries), builder.build()


def parse_publications(
    stream: TextIO, *, strict: bool = True
) -> tuple[PublicationCounts, ParseReport]:
    builder = _ReportBuilder()
    entries: dict[PublicationKey, int] = {}
    for line, row in _rows(stream, PUBLICATION_HEADER, builder):
        try:
            _check_arity(row, PUBLICATION_HEADER, line)
            journal = _journal(row[0], "journal", line)
            year = _integer(row[1], "year", line)
            count = _count(row[2], "citable_items", line)
        except ParseError as exc:
            _handle(exc, builder, strict=strict)
            continue
        key = PublicationKey(journal, year)
        _merge(entries, key, count, line, builder, strict=strict)
        builder.accepted += 1
    return PublicationCounts(entries), builder.build()


def parse_groups(
    stream: TextIO, *, strict: bool = True
) -> tuple[GroupPartition, ParseReport]:
    builder = _ReportBuilder()
    rows: list[GroupRow] = []
    seen: set[GroupRow] = set()
    for line, row in _rows(stream, GROUP_HEADER, builder):
        try:
            _check_arity(row, GROUP_HEADER, line)
            pair = GroupRow(
                _journal(row[0], "journal", line), _journal(row[1], "category", line)
            )
        except ParseError as exc:
            _handle(exc, builder, strict=strict)
            continue
        if pair in seen:
            raise DuplicatePairError(
                f"duplicate pair ({pair.journal}, {pair.category})",
                line=line,
                report=builder.build(),
            )
        seen.add(pair)
        rows.append(pair)
        builder.accepted += 1
    return GroupPartition(tuple(rows)), builder.build()


def parse_fixture(
    stream: TextIO, *, strict: bool = True
) -> tuple[FixtureTable, ParseReport]:
    builder = _ReportBuilder()
    rows: dict[GroupRow, FixtureRow] = {}
    for line, row in _rows(stream, FIXTURE_HEADER, builder):
        try:
            _check_arity(row, FIXTURE_HEADER, line)
            journal = _journal(row[0], "journal", line)
            category = _journal(row[1], "category", line)
            values = {
                name: _decimal(text, name, line)
                for name, text in zip(FIXTURE_FIELDS, row[2:])
            }
        except ParseError as exc:
            _handle(exc, builder, strict=strict)
            continue
        key = GroupRow(journal, category)
        if key in rows:
            if strict:
                raise DuplicateKeyError(
                    f"duplicate fixture row ({journal}, {category})",
                    line=line,
                    report=builder.build(),
                )
            message = f"line {line}: duplicate fixture row ({journal}, {category})"
            builder.warnings.append(message)
            logger.warning(message)
            builder.rejected.append((line, "duplicate fixture row"))
            continue
        rows[key] = FixtureRow(journal, category, **values)
        builder.accepted += 1
    return FixtureTable(tuple(rows.values())), builder.build()


def _format_decimal(value: float | None) -> str:
    return "--" if value is None else f"{value:.5f}"


def _writer(stream: TextIO, header: tuple[str, ...]):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    return writer


def serialize_citations(ledger: CitationLedger, stream: TextIO) -> None:
    writer = _writer(stream, CITATION_HEADER)
    for key, count in ledger.entries.items():
        writer.writerow([key.census_year, key.citing, key.cited, key.cited_year, count])


def serialize_publications(pubs: PublicationCounts, stream: TextIO) -> None:
    writer = _writer(stream, PUBLICATION_HEADER)
    for key, count in pubs.entries.items():
        writer.writerow([key.journal, key.year, count])


def serialize_groups(partition: GroupPartition, stream: TextIO) -> None:
    writer = _writer(stream, GROUP_HEADER)
    for row in partition.rows:
        writer.writerow([row.journal, row.category])


def serialize_fixture(table: FixtureTable, stream: TextIO) -> None:
    writer = _writer(stream, FIXTURE_HEADER)
    for row in table.rows:
        writer.writerow(
            [row.journal, row.category]
            + [_format_decimal(getattr(row, name)) for name in FIXTURE_FIELDS]
        )


def read_file(
    path: Path,
    parser: Callable[..., tuple[T, ParseReport]],
    *,
    strict: bool = True,
) -> tuple[T, ParseReport]:
    if not path.exists():
        raise MalformedRowError(f"input file not found: {path}")
    with path.open(encoding="utf-8", newline="") as stream:
        value, report = parser(stream, strict=strict)
    logger.info(
        "parsed {}: {} rows accepted, {} rejected",
        path.name,
        report.accepted_rows,
        len(report.rejected_rows),
    )
    return value, report
