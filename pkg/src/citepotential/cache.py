import hashlib
import json
import sqlite3
from collections.abc import Iterable, Mapping
from dataclasses import asdict, dataclass
from pathlib import Path

from loguru import logger

from .model import MetricResult

CACHE_FILE = "metrics.sqlite3"
SCHEMA_VERSION = 1


def input_hash(paths: Iterable[Path], params: Mapping[str, object]) -> str:
    """Digest of the input file contents and the parameters that shape results."""
    digest = hashlib.sha256()
    digest.update(f"schema={SCHEMA_VERSION}\n".encode())
    for path in paths:
        digest.update(path.name.encode("utf-8"))
        digest.update(b"\0")
        digest.update(hashlib.sha256(path.read_bytes()).digest())
    digest.update(json.dumps(dict(params), sort_keys=True, default=str).encode())
    return digest.hexdigest()


@dataclass
class MetricCache:
    path: Path

    @classmethod
    def for_dir(cls, cache_dir: Path) -> "MetricCache":
        return cls(Path(cache_dir) / CACHE_FILE).init_db()

    def init_db(self) -> "MetricCache":
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with sqlite3.connect(self.path) as conn:
            conn.execute(
                """
                CREATE TABLE IF NOT EXISTS metric_tables (
                    input_hash TEXT PRIMARY KEY,
                    created_at TEXT DEFAULT CURRENT_TIMESTAMP,
                    journal_count INTEGER NOT NULL,
                    results_json TEXT NOT NULL
                )
                """
            )
        return self

    def get(self, key: str) -> list[MetricResult] | None:
        with sqlite3.connect(self.path) as conn:
            row = conn.execute(
                "SELECT results_json FROM metric_tables WHERE input_hash = ?",
                (key,),
            ).fetchone()
        if row is None:
            return None
        try:
            return [MetricResult(**item) for item in json.loads(row[0])]
        except (ValueError, TypeError) as exc:
            logger.warning("discarding unreadable cache entry {}: {}", key[:12], exc)
            return None

    def put(self, key: str, results: Iterable[MetricResult]) -> None:
        items = [asdict(result) for result in results]
        with sqlite3.connect(self.path) as conn:
            conn.execute(
                """
                INSERT OR REPLACE INTO metric_tables (
                    input_hash, journal_count, results_json
                )
                VALUES (?, ?, ?)
                """,
                (key, len(items), json.dumps(items, sort_keys=True)),
            )
