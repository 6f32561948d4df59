"""Consistency check of published TNIF values against their own inputs."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .metrics import DEFAULT_DATABASE_POTENTIAL, normalized_score
from .model import FixtureTable

ABSOLUTE_TOLERANCE = 0.01
RELATIVE_TOLERANCE = 0.03

# (label, cp attribute, tnif attribute, include_self_citations)
VARIANTS = (
    ("self-cite", "cp_selfcite", "tnif_selfcite", True),
    ("excl-self", "cp", "tnif", False),
)


@dataclass(frozen=True)
class ValidationCheck:
    journal: str
    category: str
    variant: str
    jif: float | None
    cp_topic: float | None
    published: float | None
    recomputed: float | None
    tolerance: float
    status: str
    note: str = ""

    @property
    def delta(self) -> float | None:
        if self.published is None or self.recomputed is None:
            return None
        return self.recomputed - self.published

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass(frozen=True)
class ValidationReport:
    cp_db: float
    checks: tuple[ValidationCheck, ...]
    # fixture lines the parser rejected; none of them could be checked
    rejected_rows: tuple[tuple[int, str], ...] = ()

    @property
    def passed_count(self) -> int:
        return sum(1 for check in self.checks if check.status == "pass")

    @property
    def failed_count(self) -> int:
        return sum(1 for check in self.checks if check.status == "fail")

    @property
    def skipped_count(self) -> int:
        return sum(1 for check in self.checks if check.status == "skip")

    @property
    def failures(self) -> list[ValidationCheck]:
        return [check for check in self.checks if check.status == "fail"]

    @property
    def exit_code(self) -> int:
        return 0 if self.failed_count == 0 and not self.rejected_rows else 1


def tolerance_for(published: float) -> float:
    return max(ABSOLUTE_TOLERANCE, RELATIVE_TOLERANCE * published)


def validate_fixture(
    fixture: FixtureTable,
    cp_db: float = DEFAULT_DATABASE_POTENTIAL,
    variants: Iterable[bool] = (True, False),
    rejected_rows: Iterable[tuple[int, str]] = (),
) -> ValidationReport:
    wanted = set(variants)
    checks: list[ValidationCheck] = []
    for row in fixture.rows:
        for label, cp_field, tnif_field, include_self in VARIANTS:
            if include_self not in wanted:
                continue
            cp = getattr(row, cp_field)
            published = getattr(row, tnif_field)
            if row.jif2 is None or cp is None or published is None:
                checks.append(
                    ValidationCheck(
                        row.journal, row.category, label, row.jif2, cp, published,
                        None, 0.0, "skip", "missing input",
                    )
                )
                continue
            recomputed = normalized_score(cp_db, cp) * row.jif2
            if cp == 0:
                # A zero topic potential forces TNIF to exactly zero.
                ok = published == 0.0
                checks.append(
                    ValidationCheck(
                        row.journal, row.category, label, row.jif2, cp, published,
                        recomputed, 0.0, "pass" if ok else "fail", "zero topic",
                    )
                )
                continue
            tolerance = tolerance_for(published)
            ok = abs(recomputed - published) <= tolerance
            checks.append(
                ValidationCheck(
                    row.journal, row.category, label, row.jif2, cp, published,
                    recomputed, tolerance, "pass" if ok else "fail",
                )
            )
    return ValidationReport(cp_db, tuple(checks), tuple(rejected_rows))
