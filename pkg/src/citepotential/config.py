"""Run configuration: defaults, an optional key=value file and CLI flags."""

from __future__ import annotations

from collections.abc import Mapping
from pathlib import Path
from typing import Any, Literal

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigError
from .metrics import DEFAULT_DATABASE_POTENTIAL
from .model import YearWindow
from .report import OutputFormat

SelfCitations = Literal["both", "exclude", "include"]


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    citations: Path | None = None
    publications: Path | None = None
    groups: Path | None = None
    fixture: Path | None = None
    out: Path | None = None
    census_year: int | None = None
    window: tuple[int, ...] = (1, 2)
    self_citations: SelfCitations = "both"
    cp_db: float | None = Field(default=None, gt=0)
    output: OutputFormat = OutputFormat.CSV
    round: int = Field(default=3, ge=0, le=9)
    strict: bool = True
    cache_dir: Path | None = None

    @field_validator("window", mode="before")
    @classmethod
    def _parse_window(cls, value: Any) -> Any:
        if isinstance(value, str):
            parts = [part.strip() for part in value.split(",")]
            if not all(parts):
                raise ValueError("window must be a comma-separated list of offsets")
            return tuple(int(part) for part in parts)
        return value

    @field_validator("window")
    @classmethod
    def _check_window(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        # census year is irrelevant to offset validation
        YearWindow(0, value)
        return value

    @property
    def validation_cp_db(self) -> float:
        return self.cp_db if self.cp_db is not None else DEFAULT_DATABASE_POTENTIAL

    def year_window(self, census_year: int) -> YearWindow:
        return YearWindow(census_year, self.window)

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            flags = ", ".join(f"--{name.replace('_', '-')}" for name in missing)
            raise ConfigError(f"missing required option(s): {flags}")


def _normalize_key(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_").lower()


def load_config_file(path: Path) -> dict[str, str]:
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = dotenv_values(path)
    return {
        _normalize_key(key): value
        for key, value in values.items()
        if value is not None and value != ""
    }


def _location(loc: tuple[int | str, ...]) -> str:
    return ".".join(str(part) for part in loc) or "config"


def resolve_config(
    file_values: Mapping[str, Any] | None, cli_values: Mapping[str, Any]
) -> RunConfig:
    """Merge with precedence CLI flag > config file > model default."""
    merged: dict[str, Any] = dict(file_values or {})
    merged.update(
        {key: value for key, value in cli_values.items() if value is not None}
    )
    try:
        return RunConfig(**merged)
    except ValidationError as exc:
        problems = "; ".join(
            f"{_location(error['loc'])}: {error['msg']}" for error in exc.errors()
        )
        raise ConfigError(f"invalid configuration: {problems}") from exc
