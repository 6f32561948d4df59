import csv
import io
import json

from typer.testing import CliRunner

from citepotential.cli import app

from .conftest import FIXTURE_PATH, GROUPS_PATH, TOY

runner = CliRunner(env={"CITEPOTENTIAL_LOG_LEVEL": "ERROR"})
TOY_ARGS = [
    "--citations",
    str(TOY / "citations.csv"),
    "--publications",
    str(TOY / "publications.csv"),
]
FIXTURE_ARGS = ["--fixture", str(FIXTURE_PATH), "--groups", str(GROUPS_PATH)]


def _csv_rows(text: str) -> list[dict[str, str]]:
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def test_metrics_worked_example(tmp_path) -> None:
    out = tmp_path / "metrics.csv"
    result = runner.invoke(app, ["metrics", *TOY_ARGS, "--out", str(out)])
    assert result.exit_code == 0
    text = out.read_text(encoding="utf-8")
    assert "# census_year: 2011" in text
    rows = {row["journal"]: row for row in _csv_rows(text)}
    assert list(rows) == ["A", "B", "C", "D", "J"]
    assert rows["J"]["tnif"] == "2.500"
    assert rows["J"]["cp_topic"] == "1.440"
    assert rows["J"]["score"] == "1.250"


def test_metrics_is_idempotent_and_json_matches_csv(tmp_path) -> None:
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    as_json = tmp_path / "a.json"
    runner.invoke(app, ["metrics", *TOY_ARGS, "--out", str(first)])
    runner.invoke(app, ["metrics", *TOY_ARGS, "--out", str(second)])
    result = runner.invoke(
        app, ["metrics", *TOY_ARGS, "--output", "json", "--out", str(as_json)]
    )
    assert result.exit_code == 0
    assert first.read_bytes() == second.read_bytes()

    csv_rows = _csv_rows(first.read_text(encoding="utf-8"))
    json_rows = json.loads(as_json.read_text(encoding="utf-8"))["rows"]
    for row, record in zip(csv_rows, json_rows):
        for key, value in row.items():
            if key in {"journal", "status"}:
                assert record[key] == value
            else:
                assert record[key] == float(value)


def test_metrics_uncited_journal_has_zero_tnif(tmp_path) -> None:
    citations = tmp_path / "c.csv"
    publications = tmp_path / "p.csv"
    citations.write_text(
        "census_year,citing,cited,cited_year,count\n2011,A,B,2010,4\n",
        encoding="utf-8",
    )
    publications.write_text(
        "journal,year,citable_items\nA,2010,2\nA,2009,2\nB,2010,2\nB,2009,2\n",
        encoding="utf-8",
    )
    result = runner.invoke(
        app,
        [
            "metrics",
            "--citations",
            str(citations),
            "--publications",
            str(publications),
            "--self-citations",
            "exclude",
        ],
    )
    assert result.exit_code == 0
    rows = {row["journal"]: row for row in _csv_rows(result.stdout)}
    assert rows["A"]["tnif"] == "0.000"


def test_metrics_extended_window_is_marked(tmp_path) -> None:
    out = tmp_path / "wide.md"
    result = runner.invoke(
        app,
        ["metrics", *TOY_ARGS, "--window", "1,2,3,4,5", "--output", "md"]
        + ["--no-strict", "--out", str(out)],
    )
    assert result.exit_code == 0
    assert "extended-window TNIF (non-paper variant)" in out.read_text("utf-8")


def test_metrics_uses_cache(tmp_path) -> None:
    cache_dir = tmp_path / "cache"
    args = ["metrics", *TOY_ARGS, "--cache-dir", str(cache_dir)]
    first = runner.invoke(app, args)
    second = runner.invoke(app, args)
    assert first.exit_code == 0
    assert (cache_dir / "metrics.sqlite3").exists()
    assert first.stdout == second.stdout


def test_exit_code_input_error(tmp_path) -> None:
    bad = tmp_path / "bad.csv"
    bad.write_text("journal,year,citable_items\nA,2010,-1\n", encoding="utf-8")
    result = runner.invoke(
        app,
        [
            "metrics",
            "--citations",
            str(TOY / "citations.csv"),
            "--publications",
            str(bad),
            "--strict",
        ],
    )
    assert result.exit_code == 2
    assert "negative" in result.output


def test_exit_code_missing_option() -> None:
    result = runner.invoke(app, ["summarize", "--fixture", str(FIXTURE_PATH)])
    assert result.exit_code == 2
    assert "--groups" in result.output


def test_exit_code_computation_error(tmp_path) -> None:
    citations = tmp_path / "c.csv"
    publications = tmp_path / "p.csv"
    citations.write_text(
        "census_year,citing,cited,cited_year,count\n", encoding="utf-8"
    )
    publications.write_text(
        "journal,year,citable_items\nA,2010,0\nA,2009,0\n", encoding="utf-8"
    )
    result = runner.invoke(
        app,
        [
            "metrics",
            "--citations",
            str(citations),
            "--publications",
            str(publications),
            "--census-year",
            "2011",
        ],
    )
    assert result.exit_code == 3


def test_validate_fixture_passes() -> None:
    result = runner.invoke(app, ["validate-fixture", "--fixture", str(FIXTURE_PATH)])
    assert result.exit_code == 0
    assert "# failed: 0" in result.stdout


def test_validate_fixture_reports_failures(tmp_path) -> None:
    fixture = tmp_path / "fixture.csv"
    lines = FIXTURE_PATH.read_text(encoding="utf-8").splitlines()
    lines[2] = lines[2].rsplit(",", 1)[0] + ",5.000"
    fixture.write_text("\n".join(lines) + "\n", encoding="utf-8")
    result = runner.invoke(app, ["validate-fixture", "--fixture", str(fixture)])
    assert result.exit_code == 1
    assert "FAIL ACTA ASTRONOM" in result.output


def _corrupted_fixture(tmp_path):
    fixture = tmp_path / "fixture.csv"
    lines = FIXTURE_PATH.read_text(encoding="utf-8").splitlines()
    lines[2] = lines[2].rsplit(",", 1)[0] + ",5.0x0"
    fixture.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return fixture


def test_validate_fixture_is_strict_by_default(tmp_path) -> None:
    fixture = _corrupted_fixture(tmp_path)
    result = runner.invoke(app, ["validate-fixture", "--fixture", str(fixture)])
    assert result.exit_code == 2
    assert "5.0x0" in result.output


def test_validate_fixture_fails_on_rejected_rows(tmp_path) -> None:
    fixture = _corrupted_fixture(tmp_path)
    out = tmp_path / "report.csv"
    result = runner.invoke(
        app,
        ["validate-fixture", "--fixture", str(fixture), "--no-strict"]
        + ["--out", str(out)],
    )
    assert result.exit_code == 1
    assert "REJECTED line 3" in result.output
    assert "rejected line 3" in result.output
    text = out.read_text(encoding="utf-8")
    assert "# failed: 0" in text
    assert "# rejected: 1" in text


def test_lenient_metrics_prints_parse_report(tmp_path) -> None:
    publications = tmp_path / "p.csv"
    publications.write_text(
        (TOY / "publications.csv").read_text(encoding="utf-8") + "J,2008,-3\n",
        encoding="utf-8",
    )
    out = tmp_path / "metrics.csv"
    result = runner.invoke(
        app,
        [
            "metrics",
            "--citations",
            str(TOY / "citations.csv"),
            "--publications",
            str(publications),
            "--no-strict",
            "--out",
            str(out),
        ],
    )
    assert result.exit_code == 0
    assert "accepted rows: 10" in result.output
    assert "rejected line 12" in result.output
    assert out.read_text(encoding="utf-8").startswith("# census_year: 2011")


def test_metrics_defaults_to_strict_snapshot() -> None:
    result = runner.invoke(app, ["metrics", *TOY_ARGS, "--window", "1,2,3"])
    assert result.exit_code == 2
    assert "publication counts missing" in result.output


def test_correlate_markdown_layout() -> None:
    result = runner.invoke(app, ["correlate", *FIXTURE_ARGS, "--output", "md"])
    assert result.exit_code == 0
    assert "### Pearson correlation coefficients" in result.stdout
    assert "### Spearman rank correlation coefficients" in result.stdout
    assert "0.85***" in result.stdout


def test_correlate_long_format() -> None:
    result = runner.invoke(
        app, ["correlate", *FIXTURE_ARGS, "--method", "pearson", "--output", "json"]
    )
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    cell = next(
        row
        for row in payload["rows"]
        if row["group"] == "Total" and row["x"] == "Self-cite" and row["y"] == "TNIF"
    )
    assert cell["r"] == 0.85
    assert cell["tier"] == "***"
    assert cell["effect"] == "large"
    assert len(payload["rows"]) == 75


def test_summarize_and_variance(tmp_path) -> None:
    summary = runner.invoke(app, ["summarize", *FIXTURE_ARGS])
    assert summary.exit_code == 0
    rows = _csv_rows(summary.stdout)
    hps = next(
        row
        for row in rows
        if row["category"] == "History & Philosophy of Science"
        and row["measure"] == "Mean"
    )
    assert hps["TNIF"] == "3.523"

    variance = runner.invoke(app, ["variance", *FIXTURE_ARGS, "--output", "json"])
    assert variance.exit_code == 0
    payload = json.loads(variance.stdout)
    pct = next(
        row for row in payload["rows"] if row["measure"].startswith("Percentage")
    )
    assert pct["TNIF"] == 94.4
    assert pct["Self-cite"] == 93.1
    assert pct["2-JIF"] == 80.5


def test_config_file_supplies_options(tmp_path) -> None:
    config = tmp_path / "run.conf"
    config.write_text(
        f"fixture={FIXTURE_PATH}\ngroups={GROUPS_PATH}\noutput=json\n",
        encoding="utf-8",
    )
    result = runner.invoke(app, ["variance", "--config", str(config)])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["rows"]

    result = runner.invoke(
        app, ["variance"], env={"CITEPOTENTIAL_CONFIG": str(config)}
    )
    assert result.exit_code == 0


def test_self_citation_command() -> None:
    result = runner.invoke(
        app, ["self-citation", "--fixture", str(FIXTURE_PATH), "--threshold", "1.9"]
    )
    assert result.exit_code == 0
    journals = [row["journal"] for row in _csv_rows(result.stdout)]
    assert "P NATL A SCI INDIA B" in journals
    assert "J BIOL EDUC" in journals


def test_variance_renders_undefined_indicator_as_missing(tmp_path) -> None:
    fixture = tmp_path / "fixture.csv"
    groups = tmp_path / "groups.csv"
    fixture.write_text(
        "journal,category,jif2,jif5,es,fcif,cp_selfcite,cp,tnif_selfcite,tnif\n"
        "J1,A,1.0,2.0,--,--,1.0,1.0,1.0,1.0\n"
        "J2,A,2.0,3.0,--,--,2.0,2.0,2.0,2.0\n"
        "J3,B,3.0,--,--,--,3.0,3.0,3.0,3.0\n"
        "J4,B,4.0,--,--,--,4.0,4.0,4.0,4.0\n",
        encoding="utf-8",
    )
    groups.write_text("journal,category\nJ1,A\nJ2,A\nJ3,B\nJ4,B\n", encoding="utf-8")
    out = tmp_path / "variance.json"
    result = runner.invoke(
        app,
        ["variance", "--fixture", str(fixture), "--groups", str(groups)]
        + ["--output", "json", "--out", str(out)],
    )
    assert result.exit_code == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    rows = {row["measure"]: row for row in payload["rows"]}
    assert rows["Mean"]["5-JIF"] == 2.5
    assert rows["Total variance"]["5-JIF"] is None
    assert rows["Median"]["ES"] is None
    assert rows["Total variance"]["2-JIF"] == 1.667
    assert payload["metadata"]["undefined"] == "5-JIF, ES, FCIF"
