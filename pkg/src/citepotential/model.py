"""Domain types and the validated, immutable snapshot every computation reads."""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import NamedTuple

from loguru import logger

from .errors import (
    DuplicatePairError,
    MissingPublicationCountError,
    UnknownJournalError,
    WindowMismatchError,
)

# Indicator label -> FixtureRow attribute, in published column order.
INDICATORS: Mapping[str, str] = MappingProxyType(
    {
        "2-JIF": "jif2",
        "5-JIF": "jif5",
        "ES": "es",
        "FCIF": "fcif",
        "Self-cite": "tnif_selfcite",
        "TNIF": "tnif",
    }
)

FIXTURE_FIELDS = (
    "jif2",
    "jif5",
    "es",
    "fcif",
    "cp_selfcite",
    "cp",
    "tnif_selfcite",
    "tnif",
)


class PublicationKey(NamedTuple):
    journal: str
    year: int


class CitationKey(NamedTuple):
    census_year: int
    citing: str
    cited: str
    cited_year: int


class GroupRow(NamedTuple):
    journal: str
    category: str


def _check_journal(journal: str) -> None:
    if not isinstance(journal, str) or not journal.strip():
        raise ValueError("journal id must be a non-empty string")


@dataclass(frozen=True)
class YearWindow:
    census_year: int
    target_offsets: tuple[int, ...] = (1, 2)

    def __post_init__(self) -> None:
        offsets = tuple(int(t) for t in self.target_offsets)
        if not offsets:
            raise ValueError("target_offsets must be non-empty")
        if any(t <= 0 for t in offsets):
            raise ValueError("target_offsets must be strictly positive")
        if any(b <= a for a, b in zip(offsets, offsets[1:])):
            raise ValueError("target_offsets must be strictly increasing")
        object.__setattr__(self, "target_offsets", offsets)

    @property
    def target_years(self) -> tuple[int, ...]:
        return tuple(self.census_year - t for t in self.target_offsets)

    @property
    def is_standard(self) -> bool:
        """True for the two-year window the impact factor is defined on."""
        return self.target_offsets == (1, 2)

    def covers(self, census_year: int, cited_year: int) -> bool:
        return census_year == self.census_year and cited_year in self.target_years


@dataclass(frozen=True)
class PublicationCounts:
    entries: Mapping[PublicationKey, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        frozen: dict[PublicationKey, int] = {}
        for key, count in self.entries.items():
            key = PublicationKey(*key)
            _check_journal(key.journal)
            if count < 0:
                raise ValueError(f"negative publication count for {key}")
            frozen[key] = int(count)
        object.__setattr__(
            self, "entries", MappingProxyType(dict(sorted(frozen.items())))
        )

    def get(self, journal: str, year: int) -> int | None:
        return self.entries.get(PublicationKey(journal, year))

    def journals(self) -> frozenset[str]:
        return frozenset(key.journal for key in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class CitationLedger:
    entries: Mapping[CitationKey, int] = field(default_factory=dict)
    _by_cited: Mapping[tuple[int, str], tuple[tuple[str, int, int], ...]] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        frozen: dict[CitationKey, int] = {}
        by_cited: dict[tuple[int, str], list[tuple[str, int, int]]] = defaultdict(
            list
        )
        for key, count in sorted(self.entries.items()):
            key = CitationKey(*key)
            _check_journal(key.citing)
            _check_journal(key.cited)
            if count < 0:
                raise ValueError(f"negative citation count for {key}")
            if key.cited_year >= key.census_year:
                raise ValueError(f"cited_year must precede census_year in {key}")
            frozen[key] = int(count)
            by_cited[(key.census_year, key.cited)].append(
                (key.citing, key.cited_year, int(count))
            )
        object.__setattr__(self, "entries", MappingProxyType(frozen))
        object.__setattr__(
            self,
            "_by_cited",
            MappingProxyType({k: tuple(v) for k, v in by_cited.items()}),
        )

    def cited_by(
        self, census_year: int, cited: str
    ) -> tuple[tuple[str, int, int], ...]:
        """(citing, cited_year, count) entries pointing at `cited` in a census year."""
        return self._by_cited.get((census_year, cited), ())

    def journals(self) -> frozenset[str]:
        names: set[str] = set()
        for key in self.entries:
            names.add(key.citing)
            names.add(key.cited)
        return frozenset(names)

    def scaled(self, factor: int) -> CitationLedger:
        return CitationLedger({k: v * factor for k, v in self.entries.items()})

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Snapshot:
    registry: frozenset[str]
    window: YearWindow
    pubs: PublicationCounts
    ledger: CitationLedger
    _received: Mapping[str, Mapping[str, int]] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        object.__setattr__(self, "registry", frozenset(self.registry))
        received: dict[str, dict[str, int]] = {}
        for journal in self.registry:
            counts: dict[str, int] = defaultdict(int)
            for citing, cited_year, count in self.ledger.cited_by(
                self.window.census_year, journal
            ):
                if cited_year in self.window.target_years:
                    counts[citing] += count
            received[journal] = MappingProxyType(dict(sorted(counts.items())))
        object.__setattr__(self, "_received", MappingProxyType(received))

    def journals(self) -> tuple[str, ...]:
        return tuple(sorted(self.registry))

    def publications(self, journal: str) -> int:
        """Citable items of `journal` summed over the target years."""
        years = self.window.target_years
        return sum(self.pubs.get(journal, year) or 0 for year in years)

    def total_publications(self) -> int:
        return sum(self.publications(journal) for journal in self.registry)

    def citations_to(self, journal: str) -> Mapping[str, int]:
        """Window citations received by `journal`, keyed by citing journal."""
        return self._received.get(journal, MappingProxyType({}))

    def citations_received(self, journal: str) -> int:
        return sum(self.citations_to(journal).values())

    def total_citations(self) -> int:
        return sum(self.citations_received(journal) for journal in self.registry)


def build_snapshot(
    registry: Iterable[str],
    window: YearWindow,
    pubs: PublicationCounts,
    ledger: CitationLedger,
    *,
    strict: bool = False,
) -> Snapshot:
    names = frozenset(registry)
    for journal in names:
        _check_journal(journal)

    unknown = sorted((pubs.journals() | ledger.journals()) - names)
    if unknown:
        raise UnknownJournalError(
            f"journals not in registry: {', '.join(unknown[:10])}"
            + (f" (+{len(unknown) - 10} more)" if len(unknown) > 10 else "")
        )

    if strict:
        outside = [
            key
            for key in ledger.entries
            if not window.covers(key.census_year, key.cited_year)
        ]
        if outside:
            raise WindowMismatchError(
                f"{len(outside)} ledger entries fall outside census year "
                f"{window.census_year} window {list(window.target_years)}, "
                f"first: {tuple(outside[0])}"
            )

    filled = dict(pubs.entries)
    missing = [
        PublicationKey(journal, year)
        for journal in sorted(names)
        for year in window.target_years
        if PublicationKey(journal, year) not in filled
    ]
    if missing:
        if strict:
            first = missing[0]
            raise MissingPublicationCountError(
                f"{len(missing)} publication counts missing, "
                f"first: {first.journal} {first.year}"
            )
        logger.warning("filled {} missing publication counts with 0", len(missing))
        filled.update({key: 0 for key in missing})

    return Snapshot(
        registry=names,
        window=window,
        pubs=PublicationCounts(filled),
        ledger=ledger,
    )


@dataclass(frozen=True)
class GroupPartition:
    rows: tuple[GroupRow, ...] = ()

    def __post_init__(self) -> None:
        rows = tuple(GroupRow(*row) for row in self.rows)
        seen: set[GroupRow] = set()
        for row in rows:
            _check_journal(row.journal)
            if not row.category.strip():
                raise ValueError("category must be non-empty")
            if row in seen:
                raise DuplicatePairError(
                    f"duplicate pair ({row.journal}, {row.category})"
                )
            seen.add(row)
        object.__setattr__(self, "rows", rows)

    def categories(self) -> tuple[str, ...]:
        """Categories in order of first appearance."""
        return tuple(dict.fromkeys(row.category for row in self.rows))

    def members(self, category: str) -> tuple[str, ...]:
        return tuple(row.journal for row in self.rows if row.category == category)

    def journals(self) -> frozenset[str]:
        return frozenset(row.journal for row in self.rows)

    def counts(self) -> dict[str, int]:
        return {name: len(self.members(name)) for name in self.categories()}

    def __contains__(self, item: object) -> bool:
        return item in set(self.rows)

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class FixtureRow:
    journal: str
    category: str
    jif2: float | None = None
    jif5: float | None = None
    es: float | None = None
    fcif: float | None = None
    cp_selfcite: float | None = None
    cp: float | None = None
    tnif_selfcite: float | None = None
    tnif: float | None = None

    def __post_init__(self) -> None:
        _check_journal(self.journal)
        for name in FIXTURE_FIELDS:
            value = getattr(self, name)
            if value is None:
                continue
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")

    @property
    def key(self) -> GroupRow:
        return GroupRow(self.journal, self.category)

    def indicator(self, label: str) -> float | None:
        return getattr(self, INDICATORS[label])


@dataclass(frozen=True)
class FixtureTable:
    rows: tuple[FixtureRow, ...] = ()

    def __post_init__(self) -> None:
        rows = tuple(self.rows)
        keys = [row.key for row in rows]
        if len(set(keys)) != len(keys):
            raise ValueError("journal+category must identify a fixture row")
        object.__setattr__(self, "rows", rows)

    def select(
        self, partition: GroupPartition, category: str | None = None
    ) -> list[FixtureRow]:
        """Rows whose (journal, category) pair is in the partition."""
        wanted = set(partition.rows)
        return [
            row
            for row in self.rows
            if row.key in wanted and (category is None or row.category == category)
        ]

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class MetricResult:
    journal: str
    jif: float | None
    cp_topic_excl_self: float | None
    cp_topic_incl_self: float | None
    score_excl_self: float | None
    score_incl_self: float | None
    tnif_excl_self: float | None
    tnif_incl_self: float | None
    status: str = "ok"
    error: str | None = None

    def __post_init__(self) -> None:
        if self.status not in {"ok", "error"}:
            raise ValueError("status must be 'ok' or 'error'")
        if self.status == "ok":
            for name in (
                "jif",
                "cp_topic_excl_self",
                "cp_topic_incl_self",
                "score_excl_self",
                "score_incl_self",
                "tnif_excl_self",
                "tnif_incl_self",
            ):
                value = getattr(self, name)
                if value is None or not math.isfinite(value) or value < 0:
                    raise ValueError(f"{name} must be a finite real >= 0")

    @classmethod
    def failed(cls, journal: str, error: str) -> MetricResult:
        return cls(journal, None, None, None, None, None, None, None, "error", error)
