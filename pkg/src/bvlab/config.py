"""Run configuration: defaults, key=value config files, flag overrides.

Precedence is flags > config file > defaults.  A configuration that
violates an invariant (table limit too small, precision target outside
its admissible window, unknown output format) is rejected up front with
a `DomainError`, which the CLI maps to a usage-error exit.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional

from .errors import DomainError

__all__ = ["RunConfig", "parse_config_file", "resolve_config",
           "DEFAULT_TABLES_LIMIT", "MIN_TABLES_LIMIT",
           "PRECISION_MIN", "PRECISION_MAX", "OUTPUT_FORMATS"]

DEFAULT_TABLES_LIMIT = 10 ** 6
MIN_TABLES_LIMIT = 10 ** 4
PRECISION_MIN = 1e-15
PRECISION_MAX = 1e-6
OUTPUT_FORMATS = ("json", "csv")


@dataclass(frozen=True)
class RunConfig:
    """Validated run-wide settings shared by the CLI and the service."""

    tables_limit: int = DEFAULT_TABLES_LIMIT
    character_cap: int = 10 ** 4
    precision_target: float = 1e-12
    worker_count: int = 1
    seed: int = 12345
    output_format: str = "json"
    cache_dir: Optional[str] = None

    def __post_init__(self) -> None:
        if self.tables_limit < MIN_TABLES_LIMIT:
            raise DomainError(
                f"tables_limit must be >= {MIN_TABLES_LIMIT}, "
                f"got {self.tables_limit}")
        if self.character_cap < 1:
            raise DomainError("character_cap must be positive")
        if not (PRECISION_MIN <= self.precision_target <= PRECISION_MAX):
            raise DomainError(
                f"precision_target must lie in [{PRECISION_MIN}, "
                f"{PRECISION_MAX}], got {self.precision_target}")
        if self.worker_count < 1:
            raise DomainError("worker_count must be >= 1")
        if self.output_format not in OUTPUT_FORMATS:
            raise DomainError(
                f"output_format must be one of {list(OUTPUT_FORMATS)}, "
                f"got {self.output_format!r}")

    def apply_environment(self) -> None:
        """Export settings consumed via the environment (table cache dir)."""
        if self.cache_dir:
            os.environ["BVLAB_CACHE_DIR"] = self.cache_dir


_FIELD_PARSERS = {
    "tables_limit": int,
    "character_cap": int,
    "precision_target": float,
    "worker_count": int,
    "seed": int,
    "output_format": str,
    "cache_dir": str,
}


def _parse_value(key: str, raw: str) -> Any:
    parser = _FIELD_PARSERS.get(key)
    if parser is None:
        valid = ", ".join(sorted(_FIELD_PARSERS))
        raise DomainError(f"unknown config key {key!r}; valid keys: {valid}")
    try:
        if parser is int:
            # Accept scientific notation for integer-valued settings.
            as_float = float(raw)
            as_int = int(as_float)
            if as_int != as_float:
                raise ValueError(raw)
            return as_int
        return parser(raw)
    except ValueError as exc:
        raise DomainError(f"bad value for config key {key!r}: {raw!r}") from exc


def parse_config_file(path: str) -> Dict[str, Any]:
    """Parse a key=value config file.

    Blank lines and `#` comments are ignored; keys must be known settings.
    """
    if not os.path.exists(path):
        raise DomainError(f"config file not found: {path}")
    values: Dict[str, Any] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise DomainError(
                    f"{path}:{lineno}: expected key=value, got {stripped!r}")
            key, raw = stripped.split("=", 1)
            key = key.strip()
            values[key] = _parse_value(key, raw.strip())
    return values


def resolve_config(file_values: Optional[Mapping[str, Any]] = None,
                   flag_values: Optional[Mapping[str, Any]] = None
                   ) -> RunConfig:
    """Merge defaults, config-file values, and flag overrides (in that order).

    Entries whose value is None are treated as "not provided".
    """
    merged: Dict[str, Any] = {}
    for source in (file_values or {}), (flag_values or {}):
        for key, value in source.items():
            if value is None:
                continue
            if key not in _FIELD_PARSERS:
                valid = ", ".join(sorted(_FIELD_PARSERS))
                raise DomainError(
                    f"unknown config key {key!r}; valid keys: {valid}")
            merged[key] = value
    return RunConfig(**merged)


def config_to_dict(config: RunConfig) -> Dict[str, Any]:
    return dataclasses.asdict(config)
