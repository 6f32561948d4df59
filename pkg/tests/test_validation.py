import pytest

from citepotential.model import FixtureRow, FixtureTable
from citepotential.validation import tolerance_for, validate_fixture


def _check(report, journal, variant):
    return next(
        c for c in report.checks if c.journal == journal and c.variant == variant
    )


def test_bundled_fixture_is_consistent(fixture_table) -> None:
    report = validate_fixture(fixture_table)
    assert report.cp_db == 2.822
    assert report.failed_count == 0
    assert report.passed_count == 448
    assert report.skipped_count == 0
    assert report.exit_code == 0


def test_documented_rows(fixture_table) -> None:
    report = validate_fixture(fixture_table)
    acta = _check(report, "ACTA ASTRONOM", "excl-self")
    assert acta.recomputed == pytest.approx(0.993, abs=0.0005)
    bioethics = _check(report, "AM J BIOETHICS", "excl-self")
    assert bioethics.recomputed == pytest.approx(10.679, abs=0.002)
    spacecraft = _check(report, "J SPACECR TECHNOL", "excl-self")
    assert spacecraft.recomputed == 0.0
    assert spacecraft.note == "zero topic"
    history = _check(report, "ARCH HIST EXACT SCI", "excl-self")
    assert history.published == 0.0
    assert history.passed


def test_tampered_row_fails() -> None:
    table = FixtureTable(
        (
            FixtureRow("J1", "Biology", jif2=1.0, cp=2.822, tnif=1.0),
            FixtureRow("J2", "Biology", jif2=1.0, cp=2.822, tnif=1.2),
            FixtureRow("J3", "Biology", jif2=1.0, cp=0.0, tnif=0.001),
        )
    )
    report = validate_fixture(table, variants=(False,))
    assert [c.status for c in report.checks] == ["pass", "fail", "fail"]
    assert report.exit_code == 1
    assert [c.journal for c in report.failures] == ["J2", "J3"]
    assert report.failures[0].delta == pytest.approx(-0.2)


def test_missing_inputs_are_skipped() -> None:
    table = FixtureTable((FixtureRow("J1", "Biology", jif2=None, cp=1.0, tnif=1.0),))
    report = validate_fixture(table, variants=(False,))
    assert report.skipped_count == 1
    assert report.exit_code == 0


def test_tolerance_bounds() -> None:
    assert tolerance_for(0.1) == 0.01
    assert tolerance_for(10.0) == pytest.approx(0.3)
