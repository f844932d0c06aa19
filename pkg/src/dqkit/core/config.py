"""
INI configuration for dqkit runs.

Defaults for truncation order, enumeration guard, Monte-Carlo parameters,
residual tolerances and the Hochschild size guard live in an INI file
(configs/dqkit.ini) parsed into a RunDefaults dataclass.

INI Format Example (configs/dqkit.ini):
    [series]
    ORDER=4

    [graphs]
    ENUMERATION_GUARD=10000000

    [weights]
    SAMPLES=1000000
    SEED=42
    CHUNK_SIZE=65536
    WORKERS=0
    REJECTION_THRESHOLD=0.001
    CACHE=weights.json

    [residuals]
    PROBE_DEGREE=3
    TOLERANCE=3

    [hochschild]
    SIZE_GUARD=100000

Lookup order for the weight cache path: explicit argument, then the
DQ_CACHE environment variable, then the INI value.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

CACHE_ENV_VAR = "DQ_CACHE"


def _read_int(config: configparser.ConfigParser, section: str, key: str, default: int) -> int:
    if section not in config:
        return default
    raw = config[section].get(key, "")
    if not raw:
        return default
    # Accept 1e6-style values for sample counts
    return int(float(raw)) if any(c in raw for c in "eE.") else int(raw, 0)


def _read_float(config: configparser.ConfigParser, section: str, key: str, default: float) -> float:
    if section not in config:
        return default
    raw = config[section].get(key, "")
    return float(raw) if raw else default


@dataclass
class WeightSettings:
    """Monte-Carlo integration parameters."""

    samples: int = 1_000_000
    seed: int = 42
    chunk_size: int = 65_536
    workers: int = 0
    rejection_threshold: float = 1e-3
    cache: Path = Path("weights.json")


@dataclass
class RunDefaults:
    """
    Defaults shared by the library entry points and the CLI.

    Attributes:
        order: Truncation order N for ℏ-series
        enumeration_guard: Maximum raw graph candidates
        weights: Monte-Carlo settings
        probe_degree: Monomial degree bound for residual probes
        tolerance: Multiplier on propagated stderr for pass/fail verdicts
        size_guard: Maximum m^(n+2) for bar-complex matrices

    Example:
        >>> defaults = RunDefaults.from_file("configs/dqkit.ini")
        >>> defaults.weights.samples
        1000000
    """

    order: int = 4
    enumeration_guard: int = 10_000_000
    weights: WeightSettings = field(default_factory=WeightSettings)
    probe_degree: int = 3
    tolerance: float = 3.0
    size_guard: int = 100_000

    @classmethod
    def from_file(cls, path: str | Path) -> RunDefaults:
        """
        Parse a dqkit INI file.

        Args:
            path: Path to the INI file

        Returns:
            Parsed RunDefaults; missing keys keep their built-in defaults

        Raises:
            FileNotFoundError: If the file does not exist
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
        config = configparser.ConfigParser()
        config.read(path, encoding="utf-8")

        base = cls()
        w = base.weights
        cache = w.cache
        if "weights" in config and config["weights"].get("CACHE"):
            cache = Path(config["weights"]["CACHE"])
            if not cache.is_absolute():
                cache = path.parent / cache

        weights = WeightSettings(
            samples=_read_int(config, "weights", "SAMPLES", w.samples),
            seed=_read_int(config, "weights", "SEED", w.seed),
            chunk_size=_read_int(config, "weights", "CHUNK_SIZE", w.chunk_size),
            workers=_read_int(config, "weights", "WORKERS", w.workers),
            rejection_threshold=_read_float(
                config, "weights", "REJECTION_THRESHOLD", w.rejection_threshold
            ),
            cache=cache,
        )
        return cls(
            order=_read_int(config, "series", "ORDER", base.order),
            enumeration_guard=_read_int(
                config, "graphs", "ENUMERATION_GUARD", base.enumeration_guard
            ),
            weights=weights,
            probe_degree=_read_int(config, "residuals", "PROBE_DEGREE", base.probe_degree),
            tolerance=_read_float(config, "residuals", "TOLERANCE", base.tolerance),
            size_guard=_read_int(config, "hochschild", "SIZE_GUARD", base.size_guard),
        )

    def with_cache(self, explicit: str | Path | None = None) -> RunDefaults:
        """Resolve the cache path: explicit > $DQ_CACHE > configured value."""
        if explicit is not None:
            cache = Path(explicit)
        elif os.environ.get(CACHE_ENV_VAR):
            cache = Path(os.environ[CACHE_ENV_VAR])
        else:
            return self
        return replace(self, weights=replace(self.weights, cache=cache))


def load_defaults(path: str | Path | None = None) -> RunDefaults:
    """Load defaults from ``path`` (if given) and apply the cache env override."""
    defaults = RunDefaults.from_file(path) if path is not None else RunDefaults()
    return defaults.with_cache()
