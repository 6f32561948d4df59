"""Impact factor, citation potentials and the topic normalized impact factor."""

from __future__ import annotations

import math
from collections.abc import Mapping, MutableMapping
from dataclasses import dataclass, field
from types import MappingProxyType

from loguru import logger
from tqdm import tqdm

from .errors import (
    EmptyDatabaseError,
    NonPositiveDatabasePotentialError,
    UnknownJournalError,
    ZeroDenominatorError,
)
from .model import MetricResult, Snapshot

# Citation potential of the whole 2011 JCR database. The full ledger behind it
# is not shipped, so fixture-mode runs use the constant.
DEFAULT_DATABASE_POTENTIAL = 2.822

EXTENDED_WINDOW_NOTE = "extended-window TNIF (non-paper variant)"


@dataclass(frozen=True)
class CitationPotential:
    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value < 0:
            raise ValueError(
                f"citation potential must be finite and >= 0: {self.value}"
            )

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class TopicProfile:
    subject: str
    include_self_citations: bool
    weights: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        weights = dict(sorted(self.weights.items()))
        if not self.include_self_citations and self.subject in weights:
            raise ValueError("self-citations present in a profile that excludes them")
        if weights and abs(math.fsum(weights.values()) - 1.0) > 1e-12:
            raise ValueError("topic weights must sum to 1")
        object.__setattr__(self, "weights", MappingProxyType(weights))

    def __len__(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class TopicNormalization:
    """One self-citation variant of the normalization of a journal."""

    journal: str
    include_self_citations: bool
    jif: float
    cp_database: float
    cp_topic: float
    score: float
    tnif: float


def _require_registered(snapshot: Snapshot, journal: str) -> None:
    if journal not in snapshot.registry:
        raise UnknownJournalError(f"journal {journal!r} is not registered")


def jif(snapshot: Snapshot, journal: str) -> float:
    _require_registered(snapshot, journal)
    denominator = snapshot.publications(journal)
    if denominator == 0:
        raise ZeroDenominatorError(
            f"{journal} has no citable items in {list(snapshot.window.target_years)}"
        )
    return snapshot.citations_received(journal) / denominator


def database_weight(snapshot: Snapshot, journal: str) -> float:
    _require_registered(snapshot, journal)
    total = snapshot.total_publications()
    if total == 0:
        raise EmptyDatabaseError("database has no citable items in the target window")
    return snapshot.publications(journal) / total


def database_citation_potential(snapshot: Snapshot) -> CitationPotential:
    total = snapshot.total_publications()
    if total == 0:
        raise EmptyDatabaseError("database has no citable items in the target window")
    return CitationPotential(snapshot.total_citations() / total)


def weighted_database_citation_potential(snapshot: Snapshot) -> CitationPotential:
    """Database potential as the publication-weighted average of journal JIFs."""
    if snapshot.total_publications() == 0:
        raise EmptyDatabaseError("database has no citable items in the target window")
    terms = [
        database_weight(snapshot, journal) * jif(snapshot, journal)
        for journal in snapshot.journals()
        if snapshot.publications(journal) > 0
    ]
    return CitationPotential(math.fsum(terms))


def topic_weights(
    snapshot: Snapshot, journal: str, include_self_citations: bool = False
) -> TopicProfile:
    _require_registered(snapshot, journal)
    counts = {
        citing: count
        for citing, count in snapshot.citations_to(journal).items()
        if count > 0 and (include_self_citations or citing != journal)
    }
    total = sum(counts.values())
    weights = {citing: count / total for citing, count in counts.items()}
    return TopicProfile(journal, include_self_citations, weights)


def topic_citation_potential(
    snapshot: Snapshot,
    profile: TopicProfile,
    *,
    jif_cache: MutableMapping[str, float] | None = None,
) -> CitationPotential:
    cache = jif_cache if jif_cache is not None else {}
    terms = []
    for citing, weight in profile.weights.items():
        if citing not in cache:
            try:
                cache[citing] = jif(snapshot, citing)
            except ZeroDenominatorError:
                # The weight stays; an undefined JIF contributes nothing.
                logger.warning(
                    "citing journal {} of {} has no citable items; JIF taken as 0",
                    citing,
                    profile.subject,
                )
                cache[citing] = 0.0
        terms.append(weight * cache[citing])
    return CitationPotential(math.fsum(terms))


def normalized_score(
    cp_db: float | CitationPotential, cp_topic: float | CitationPotential
) -> float:
    database = float(cp_db)
    topic = float(cp_topic)
    if not database > 0:
        raise NonPositiveDatabasePotentialError(
            f"database citation potential must be positive, got {database}"
        )
    if topic == 0:
        return 0.0
    return database / topic


def tnif(
    snapshot: Snapshot,
    journal: str,
    include_self_citations: bool = False,
    cp_db_override: float | None = None,
    *,
    jif_cache: MutableMapping[str, float] | None = None,
) -> TopicNormalization:
    cp_db = (
        float(cp_db_override)
        if cp_db_override is not None
        else database_citation_potential(snapshot).value
    )
    impact = jif(snapshot, journal)
    profile = topic_weights(snapshot, journal, include_self_citations)
    cp_topic = topic_citation_potential(snapshot, profile, jif_cache=jif_cache).value
    score = normalized_score(cp_db, cp_topic)
    # score is 0 exactly when the topic potential is 0, which zeroes TNIF.
    return TopicNormalization(
        journal=journal,
        include_self_citations=include_self_citations,
        jif=impact,
        cp_database=cp_db,
        cp_topic=cp_topic,
        score=score,
        tnif=score * impact,
    )


def compute_metric_table(
    snapshot: Snapshot,
    cp_db_override: float | None = None,
    *,
    show_progress: bool = False,
) -> list[MetricResult]:
    journals = snapshot.journals()
    if not journals:
        return []
    cp_db = (
        float(cp_db_override)
        if cp_db_override is not None
        else database_citation_potential(snapshot).value
    )
    if not cp_db > 0:
        raise NonPositiveDatabasePotentialError(
            f"database citation potential must be positive, got {cp_db}"
        )
    if not snapshot.window.is_standard:
        logger.warning(
            "window {} yields an {}",
            snapshot.window.target_offsets,
            EXTENDED_WINDOW_NOTE,
        )

    jif_cache: dict[str, float] = {}
    results: list[MetricResult] = []
    iterator = (
        tqdm(journals, desc="Journals", unit="journal") if show_progress else journals
    )
    for journal in iterator:
        try:
            excluded = tnif(snapshot, journal, False, cp_db, jif_cache=jif_cache)
            included = tnif(snapshot, journal, True, cp_db, jif_cache=jif_cache)
        except ZeroDenominatorError as exc:
            logger.warning("skipping {}: {}", journal, exc)
            results.append(MetricResult.failed(journal, str(exc)))
            continue
        results.append(
            MetricResult(
                journal=journal,
                jif=excluded.jif,
                cp_topic_excl_self=excluded.cp_topic,
                cp_topic_incl_self=included.cp_topic,
                score_excl_self=excluded.score,
                score_incl_self=included.score,
                tnif_excl_self=excluded.tnif,
                tnif_incl_self=included.tnif,
            )
        )
    return sorted(results, key=lambda result: result.journal)
