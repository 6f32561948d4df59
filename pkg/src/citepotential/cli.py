import sys
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, TypeVar

import typer
from loguru import logger

from .cache import MetricCache, input_hash
from .config import RunConfig, load_config_file, resolve_config
from .errors import CitePotentialError, ConfigError, ParseError
from .ingest import (
    ParseReport,
    parse_citations,
    parse_fixture,
    parse_groups,
    parse_publications,
    read_file,
)
from .logging import configure_logging
from .metrics import (
    EXTENDED_WINDOW_NOTE,
    compute_metric_table,
    database_citation_potential,
)
from .model import (
    CitationLedger,
    FixtureTable,
    GroupPartition,
    MetricResult,
    Snapshot,
    build_snapshot,
)
from .report import (
    OutputFormat,
    Table,
    correlation_long_table,
    correlation_wide_table,
    metric_table,
    render,
    self_citation_table,
    summary_output,
    validation_table,
    variance_output,
)
from .settings import get_settings
from .stats import (
    aggregate_table,
    correlation_matrix,
    self_citation_shifts,
    summary_table,
    tally_cells,
)
from .validation import validate_fixture

T = TypeVar("T")

app = typer.Typer(
    add_completion=False,
    help="Topic normalized impact factors and their statistics",
    epilog=(
        "Examples:\n"
        "  citepotential metrics --citations c.csv --publications p.csv\n"
        "  citepotential validate-fixture --fixture data/fixture_table2.csv"
    ),
)

CITATIONS_OPTION = typer.Option(None, help="Citation ledger CSV.")
PUBLICATIONS_OPTION = typer.Option(None, help="Citable-item counts CSV.")
GROUPS_OPTION = typer.Option(None, help="Journal/category partition CSV.")
FIXTURE_OPTION = typer.Option(None, help="Published indicator table CSV.")
CENSUS_YEAR_OPTION = typer.Option(
    None, help="Census year; inferred when the ledger has one."
)
WINDOW_OPTION = typer.Option(None, help="Comma-separated target offsets, e.g. 1,2.")
SELF_CITATIONS_OPTION = typer.Option(
    None, help="Self-citation variants: both, exclude or include."
)
CP_DB_OPTION = typer.Option(None, "--cp-db", help="Database citation potential.")
OUTPUT_OPTION = typer.Option(None, help="Output format.")
ROUND_OPTION = typer.Option(None, "--round", help="Decimal digits (0-9).")
STRICT_OPTION = typer.Option(
    None, "--strict/--no-strict", help="Reject malformed rows instead of skipping."
)
CACHE_DIR_OPTION = typer.Option(None, help="Directory for the metric-table cache.")
CONFIG_OPTION = typer.Option(None, help="key=value config file.")
OUT_OPTION = typer.Option(None, help="Write the table here instead of stdout.")


@app.callback()
def main() -> None:
    """Root CLI group."""
    configure_logging()
    return


@contextmanager
def _handled(command: str) -> Iterator[Any]:
    log = logger.bind(command=command)
    try:
        yield log
    except ParseError as exc:
        log.error("{} failed: {}", command, exc)
        typer.echo(f"error: {exc}", err=True)
        if exc.report is not None:
            for line in exc.report.lines():
                typer.echo(line, err=True)
        raise typer.Exit(code=exc.exit_code) from exc
    except CitePotentialError as exc:
        log.error("{} failed: {}", command, exc)
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(code=exc.exit_code) from exc


def _load_config(config: Path | None, **cli_values: Any) -> RunConfig:
    settings = get_settings()
    path = config or settings.config
    file_values = load_config_file(path) if path is not None else None
    resolved = resolve_config(file_values, cli_values)
    if resolved.cache_dir is None and settings.cache_dir is not None:
        resolved = resolved.model_copy(update={"cache_dir": settings.cache_dir})
    return resolved


def _read(
    path: Path, parser: Callable[..., tuple[T, ParseReport]], strict: bool
) -> tuple[T, ParseReport]:
    value, report = read_file(path, parser, strict=strict)
    if not strict or report.rejected_rows or report.warnings:
        typer.echo(f"{path}:", err=True)
        for line in report.lines():
            typer.echo(f"  {line}", err=True)
    return value, report


def _emit(tables: Table | list[Table], config: RunConfig) -> None:
    if isinstance(tables, Table):
        tables = [tables]
    text = "\n".join(render(table, config.output, config.round) for table in tables)
    if config.out is not None:
        config.out.parent.mkdir(parents=True, exist_ok=True)
        config.out.write_text(text, encoding="utf-8")
        logger.info("wrote {}", config.out)
        return
    typer.echo(text, nl=False)


def _census_year(config: RunConfig, ledger: CitationLedger) -> int:
    if config.census_year is not None:
        return config.census_year
    years = sorted({key.census_year for key in ledger.entries})
    if len(years) != 1:
        raise ConfigError(
            f"cannot infer census year from ledger years {years}; pass --census-year"
        )
    return years[0]


def _fixture_and_groups(config: RunConfig) -> tuple[FixtureTable, GroupPartition]:
    config.require("fixture", "groups")
    assert config.fixture is not None and config.groups is not None
    fixture, _ = _read(config.fixture, parse_fixture, config.strict)
    partition, _ = _read(config.groups, parse_groups, config.strict)
    return fixture, partition


def _metric_results(
    config: RunConfig, snapshot: Snapshot, cp_db: float
) -> list[MetricResult]:
    params = {
        "census_year": snapshot.window.census_year,
        "window": list(snapshot.window.target_offsets),
        "cp_db": cp_db,
        "strict": config.strict,
        "registry": sorted(snapshot.registry),
    }
    cache = None
    key = ""
    if config.cache_dir is not None:
        paths = [p for p in (config.citations, config.publications) if p is not None]
        key = input_hash(paths, params)
        cache = MetricCache.for_dir(config.cache_dir)
        cached = cache.get(key)
        if cached is not None:
            logger.info("metric table served from cache {}", key[:12])
            return cached
    results = compute_metric_table(
        snapshot, cp_db, show_progress=sys.stderr.isatty()
    )
    if cache is not None:
        cache.put(key, results)
    return results


@app.command(help="Compute JIF, topic citation potentials and TNIF per journal.")
def metrics(
    citations: Path | None = CITATIONS_OPTION,
    publications: Path | None = PUBLICATIONS_OPTION,
    groups: Path | None = GROUPS_OPTION,
    census_year: int | None = CENSUS_YEAR_OPTION,
    window: str | None = WINDOW_OPTION,
    self_citations: str | None = SELF_CITATIONS_OPTION,
    cp_db: float | None = CP_DB_OPTION,
    output: OutputFormat | None = OUTPUT_OPTION,
    round_digits: int | None = ROUND_OPTION,
    strict: bool | None = STRICT_OPTION,
    cache_dir: Path | None = CACHE_DIR_OPTION,
    config: Path | None = CONFIG_OPTION,
    out: Path | None = OUT_OPTION,
) -> None:
    with _handled("metrics") as log:
        cfg = _load_config(
            config,
            citations=citations,
            publications=publications,
            groups=groups,
            census_year=census_year,
            window=window,
            self_citations=self_citations,
            cp_db=cp_db,
            output=output,
            round=round_digits,
            strict=strict,
            cache_dir=cache_dir,
            out=out,
        )
        cfg.require("citations", "publications")
        assert cfg.citations is not None and cfg.publications is not None
        ledger, _ = _read(cfg.citations, parse_citations, cfg.strict)
        pubs, _ = _read(cfg.publications, parse_publications, cfg.strict)
        registry = set(pubs.journals())
        if cfg.groups is not None:
            partition, _ = _read(cfg.groups, parse_groups, cfg.strict)
            registry |= partition.journals()

        year_window = cfg.year_window(_census_year(cfg, ledger))
        log = log.bind(census_year=year_window.census_year)
        snapshot = build_snapshot(
            registry, year_window, pubs, ledger, strict=cfg.strict
        )
        cp_value = (
            cfg.cp_db
            if cfg.cp_db is not None
            else database_citation_potential(snapshot).value
        )
        results = _metric_results(cfg, snapshot, cp_value)
        log.info("computed {} journals", len(results))

        metadata = {
            "census_year": str(year_window.census_year),
            "window": ",".join(str(t) for t in year_window.target_offsets),
            "cp_db": repr(cp_value),
        }
        if not year_window.is_standard:
            metadata["note"] = EXTENDED_WINDOW_NOTE
        _emit(
            metric_table(results, self_citations=cfg.self_citations, metadata=metadata),
            cfg,
        )


@app.command(
    "validate-fixture",
    help="Check published TNIF values against their own JIF and CP columns.",
)
def validate_fixture_command(
    fixture: Path | None = FIXTURE_OPTION,
    self_citations: str | None = SELF_CITATIONS_OPTION,
    cp_db: float | None = CP_DB_OPTION,
    output: OutputFormat | None = OUTPUT_OPTION,
    round_digits: int | None = ROUND_OPTION,
    strict: bool | None = STRICT_OPTION,
    config: Path | None = CONFIG_OPTION,
    out: Path | None = OUT_OPTION,
) -> None:
    with _handled("validate-fixture") as log:
        cfg = _load_config(
            config,
            fixture=fixture,
            self_citations=self_citations,
            cp_db=cp_db,
            output=output,
            round=round_digits,
            strict=strict,
            out=out,
        )
        cfg.require("fixture")
        assert cfg.fixture is not None
        table, parsed = _read(cfg.fixture, parse_fixture, cfg.strict)
        variants = {"both": (True, False), "include": (True,), "exclude": (False,)}
        report = validate_fixture(
            table,
            cfg.validation_cp_db,
            variants[cfg.self_citations],
            rejected_rows=parsed.rejected_rows,
        )
        _emit(validation_table(report), cfg)
        for check in report.failures:
            typer.echo(
                f"FAIL {check.journal} ({check.category}) {check.variant}: "
                f"published {check.published} recomputed {check.recomputed:.4f}",
                err=True,
            )
        for line, reason in report.rejected_rows:
            typer.echo(f"REJECTED line {line}: {reason}", err=True)
        log.info(
            "{} passed, {} failed, {} skipped",
            report.passed_count,
            report.failed_count,
            report.skipped_count,
        )
    raise typer.Exit(code=report.exit_code)


@app.command(help="Pearson and Spearman correlations per category and in total.")
def correlate(
    fixture: Path | None = FIXTURE_OPTION,
    groups: Path | None = GROUPS_OPTION,
    method: str = typer.Option(
        "both", help="Correlation method: pearson, spearman or both."
    ),
    output: OutputFormat | None = OUTPUT_OPTION,
    strict: bool | None = STRICT_OPTION,
    config: Path | None = CONFIG_OPTION,
    out: Path | None = OUT_OPTION,
) -> None:
    if method not in {"pearson", "spearman", "both"}:
        raise typer.BadParameter("method must be pearson, spearman or both")
    with _handled("correlate"):
        cfg = _load_config(
            config,
            fixture=fixture,
            groups=groups,
            output=output,
            strict=strict,
            out=out,
        )
        table, partition = _fixture_and_groups(cfg)
        methods = ["pearson", "spearman"] if method == "both" else [method]
        by_method = {m: correlation_matrix(table, partition, m) for m in methods}

        metadata: dict[str, str] = {}
        for name, matrices in by_method.items():
            tally = tally_cells(matrices)
            for kind, counts in tally.items():
                metadata[f"{name} {kind}"] = ", ".join(
                    f"{label}={count}" for label, count in counts.items()
                )
        if cfg.output is OutputFormat.MD:
            _emit(
                [
                    correlation_wide_table(matrices, metadata if i == 0 else None)
                    for i, matrices in enumerate(by_method.values())
                ],
                cfg,
            )
            return
        everything = [m for matrices in by_method.values() for m in matrices]
        _emit(correlation_long_table(everything, metadata), cfg)


@app.command(help="Median, mean and standard deviation per category and indicator.")
def summarize(
    fixture: Path | None = FIXTURE_OPTION,
    groups: Path | None = GROUPS_OPTION,
    output: OutputFormat | None = OUTPUT_OPTION,
    round_digits: int | None = ROUND_OPTION,
    strict: bool | None = STRICT_OPTION,
    config: Path | None = CONFIG_OPTION,
    out: Path | None = OUT_OPTION,
) -> None:
    with _handled("summarize"):
        cfg = _load_config(
            config,
            fixture=fixture,
            groups=groups,
            output=output,
            round=round_digits,
            strict=strict,
            out=out,
        )
        table, partition = _fixture_and_groups(cfg)
        _emit(summary_output(summary_table(table, partition)), cfg)


@app.command(help="Total against between-category variance for each indicator.")
def variance(
    fixture: Path | None = FIXTURE_OPTION,
    groups: Path | None = GROUPS_OPTION,
    output: OutputFormat | None = OUTPUT_OPTION,
    round_digits: int | None = ROUND_OPTION,
    strict: bool | None = STRICT_OPTION,
    config: Path | None = CONFIG_OPTION,
    out: Path | None = OUT_OPTION,
) -> None:
    with _handled("variance"):
        cfg = _load_config(
            config,
            fixture=fixture,
            groups=groups,
            output=output,
            round=round_digits,
            strict=strict,
            out=out,
        )
        table, partition = _fixture_and_groups(cfg)
        _emit(variance_output(aggregate_table(table, partition)), cfg)


@app.command(
    "self-citation",
    help="Journals whose topic potential moves when self-citations count.",
)
def self_citation(
    fixture: Path | None = FIXTURE_OPTION,
    threshold: float = typer.Option(1.0, min=0.0, help="Minimum |cp - cp_selfcite|."),
    output: OutputFormat | None = OUTPUT_OPTION,
    round_digits: int | None = ROUND_OPTION,
    strict: bool | None = STRICT_OPTION,
    config: Path | None = CONFIG_OPTION,
    out: Path | None = OUT_OPTION,
) -> None:
    with _handled("self-citation"):
        cfg = _load_config(
            config,
            fixture=fixture,
            output=output,
            round=round_digits,
            strict=strict,
            out=out,
        )
        cfg.require("fixture")
        assert cfg.fixture is not None
        table, _ = _read(cfg.fixture, parse_fixture, cfg.strict)
        shifts, share = self_citation_shifts(table, threshold)
        _emit(self_citation_table(shifts, share, threshold), cfg)
