"""Topic normalized impact factors for journals and their statistics."""

from .errors import CitePotentialError, ComputationError, InputError
from .metrics import (
    DEFAULT_DATABASE_POTENTIAL,
    compute_metric_table,
    database_citation_potential,
    jif,
    tnif,
    topic_citation_potential,
    topic_weights,
    weighted_database_citation_potential,
)
from .model import (
    CitationLedger,
    FixtureTable,
    GroupPartition,
    MetricResult,
    PublicationCounts,
    Snapshot,
    YearWindow,
    build_snapshot,
)
from .stats import correlation_matrix, pearson, spearman, variance_decomposition
from .validation import validate_fixture

__all__ = [
    "DEFAULT_DATABASE_POTENTIAL",
    "CitationLedger",
    "CitePotentialError",
    "ComputationError",
    "FixtureTable",
    "GroupPartition",
    "InputError",
    "MetricResult",
    "PublicationCounts",
    "Snapshot",
    "YearWindow",
    "build_snapshot",
    "compute_metric_table",
    "correlation_matrix",
    "database_citation_potential",
    "jif",
    "pearson",
    "spearman",
    "tnif",
    "topic_citation_potential",
    "topic_weights",
    "validate_fixture",
    "variance_decomposition",
    "weighted_database_citation_potential",
]
