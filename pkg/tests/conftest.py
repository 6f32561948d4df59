from pathlib import Path

import pytest

from citepotential.ingest import (
    parse_citations,
    parse_fixture,
    parse_groups,
    parse_publications,
    read_file,
)
from citepotential.model import (
    FixtureTable,
    GroupPartition,
    Snapshot,
    YearWindow,
    build_snapshot,
)

DATA = Path(__file__).resolve().parents[1] / "data"
TOY = DATA / "figure1_toy"
FIXTURE_PATH = DATA / "fixture_table2.csv"
GROUPS_PATH = DATA / "groups.csv"


@pytest.fixture(scope="session")
def toy_snapshot() -> Snapshot:
    ledger, _ = read_file(TOY / "citations.csv", parse_citations)
    pubs, _ = read_file(TOY / "publications.csv", parse_publications)
    return build_snapshot(pubs.journals(), YearWindow(2011), pubs, ledger, strict=True)


@pytest.fixture(scope="session")
def fixture_table() -> FixtureTable:
    table, _ = read_file(FIXTURE_PATH, parse_fixture)
    return table


@pytest.fixture(scope="session")
def partition() -> GroupPartition:
    groups, _ = read_file(GROUPS_PATH, parse_groups)
    return groups
