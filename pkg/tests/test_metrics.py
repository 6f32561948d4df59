import math

import pytest

from citepotential.errors import (
    EmptyDatabaseError,
    NonPositiveDatabasePotentialError,
    UnknownJournalError,
    ZeroDenominatorError,
)
from citepotential.metrics import (
    CitationPotential,
    TopicProfile,
    compute_metric_table,
    database_citation_potential,
    database_weight,
    jif,
    normalized_score,
    tnif,
    topic_citation_potential,
    topic_weights,
    weighted_database_citation_potential,
)
from citepotential.model import (
    CitationKey,
    CitationLedger,
    PublicationCounts,
    PublicationKey,
    YearWindow,
    build_snapshot,
)


def test_toy_impact_factors(toy_snapshot) -> None:
    expected = {"A": 1.0, "B": 2.5, "C": 0.8, "D": 1.4, "J": 2.0}
    for journal, value in expected.items():
        assert jif(toy_snapshot, journal) == pytest.approx(value, abs=1e-12)


def test_toy_database_potential(toy_snapshot) -> None:
    assert database_citation_potential(toy_snapshot).value == pytest.approx(1.8)
    assert weighted_database_citation_potential(toy_snapshot).value == pytest.approx(
        1.8, abs=1e-12
    )
    assert database_weight(toy_snapshot, "J") == pytest.approx(0.5)


def test_worked_example_excluding_self_citations(toy_snapshot) -> None:
    profile = topic_weights(toy_snapshot, "J")
    assert dict(profile.weights) == pytest.approx(
        {"A": 0.5, "B": 0.3, "C": 0.15, "D": 0.05}
    )
    result = tnif(toy_snapshot, "J")
    assert abs(result.cp_topic - 1.44) < 1e-9
    assert abs(result.score - 1.25) < 1e-9
    assert abs(result.tnif - 2.5) < 1e-9


def test_worked_example_including_self_citations(toy_snapshot) -> None:
    profile = topic_weights(toy_snapshot, "J", include_self_citations=True)
    assert profile.weights["J"] == pytest.approx(20 / 120)
    result = tnif(toy_snapshot, "J", include_self_citations=True)
    assert result.cp_topic == pytest.approx(184 / 120, abs=1e-12)
    assert result.tnif == pytest.approx(1.8 / (184 / 120) * 2.0, abs=1e-12)


def test_override_replaces_database_potential(toy_snapshot) -> None:
    result = tnif(toy_snapshot, "J", cp_db_override=2.88)
    assert result.score == pytest.approx(2.0)
    assert result.tnif == pytest.approx(4.0)


def test_topic_profile_invariants() -> None:
    with pytest.raises(ValueError):
        TopicProfile("J", False, {"J": 1.0})
    with pytest.raises(ValueError):
        TopicProfile("J", False, {"A": 0.5})
    assert len(TopicProfile("J", False, {})) == 0
    with pytest.raises(ValueError):
        CitationPotential(-1.0)


def test_uncited_journal_has_zero_tnif() -> None:
    pubs = PublicationCounts(
        {PublicationKey(j, y): 4 for j in ("A", "B") for y in (2009, 2010)}
    )
    ledger = CitationLedger({CitationKey(2011, "A", "B", 2010): 8})
    snapshot = build_snapshot({"A", "B"}, YearWindow(2011), pubs, ledger)
    result = tnif(snapshot, "A")
    assert result.cp_topic == 0.0
    assert result.score == 0.0
    assert result.tnif == 0.0


def test_only_self_citations_gives_zero_topic_when_excluded() -> None:
    pubs = PublicationCounts({PublicationKey("A", y): 2 for y in (2009, 2010)})
    ledger = CitationLedger({CitationKey(2011, "A", "A", 2010): 6})
    snapshot = build_snapshot({"A"}, YearWindow(2011), pubs, ledger)
    assert tnif(snapshot, "A").tnif == 0.0
    included = tnif(snapshot, "A", include_self_citations=True)
    # the topic is the journal itself, so the score is 1
    assert included.tnif == pytest.approx(included.jif)


def test_error_cases() -> None:
    pubs = PublicationCounts({PublicationKey("A", y): 0 for y in (2009, 2010)})
    snapshot = build_snapshot({"A"}, YearWindow(2011), pubs, CitationLedger())
    with pytest.raises(ZeroDenominatorError):
        jif(snapshot, "A")
    with pytest.raises(UnknownJournalError):
        jif(snapshot, "Z")
    with pytest.raises(EmptyDatabaseError):
        database_citation_potential(snapshot)
    with pytest.raises(EmptyDatabaseError):
        weighted_database_citation_potential(snapshot)
    with pytest.raises(NonPositiveDatabasePotentialError):
        normalized_score(0.0, 1.0)
    assert normalized_score(1.8, 0.0) == 0.0


def test_citing_journal_without_items_contributes_zero() -> None:
    pubs = PublicationCounts(
        {
            PublicationKey("A", 2010): 5,
            PublicationKey("A", 2009): 5,
            PublicationKey("B", 2010): 0,
            PublicationKey("B", 2009): 0,
        }
    )
    ledger = CitationLedger({CitationKey(2011, "B", "A", 2010): 10})
    snapshot = build_snapshot({"A", "B"}, YearWindow(2011), pubs, ledger)
    profile = topic_weights(snapshot, "A")
    assert topic_citation_potential(snapshot, profile).value == 0.0


def test_metric_table_marks_failed_journals() -> None:
    pubs = PublicationCounts(
        {
            PublicationKey("A", 2010): 5,
            PublicationKey("A", 2009): 5,
            PublicationKey("B", 2010): 0,
            PublicationKey("B", 2009): 0,
        }
    )
    ledger = CitationLedger(
        {CitationKey(2011, "B", "A", 2010): 10, CitationKey(2011, "A", "B", 2010): 3}
    )
    snapshot = build_snapshot({"A", "B"}, YearWindow(2011), pubs, ledger)
    results = compute_metric_table(snapshot)
    assert [r.journal for r in results] == ["A", "B"]
    assert results[0].status == "ok"
    assert results[1].status == "error"
    assert results[1].jif is None


def test_metric_table_is_sorted_and_complete(toy_snapshot) -> None:
    results = compute_metric_table(toy_snapshot)
    assert [r.journal for r in results] == ["A", "B", "C", "D", "J"]
    by_journal = {r.journal: r for r in results}
    assert by_journal["J"].tnif_excl_self == pytest.approx(2.5)
    assert by_journal["A"].cp_topic_excl_self == pytest.approx(2.2)
    assert by_journal["C"].cp_topic_excl_self == pytest.approx(1.4)
    assert all(math.isfinite(r.tnif_incl_self) for r in results)


def test_extended_window_counts_more_years() -> None:
    pubs = PublicationCounts(
        {PublicationKey(j, y): 1 for j in ("A", "B") for y in range(2006, 2011)}
    )
    ledger = CitationLedger(
        {
            CitationKey(2011, "A", "B", 2010): 2,
            CitationKey(2011, "A", "B", 2007): 3,
        }
    )
    standard = build_snapshot({"A", "B"}, YearWindow(2011), pubs, ledger)
    extended = build_snapshot(
        {"A", "B"}, YearWindow(2011, (1, 2, 3, 4, 5)), pubs, ledger
    )
    assert jif(standard, "B") == pytest.approx(1.0)
    assert jif(extended, "B") == pytest.approx(1.0)
    assert extended.citations_received("B") == 5
