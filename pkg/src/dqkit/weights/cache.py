"""
JSON weight cache keyed by graph key.

File format:
    {"n=1;nbar=2;p1:q1,q2": {"value": 0.5, "stderr": 0.0003,
                             "samples": 1000000, "seed": 42}}
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from dqkit.core.errors import CacheError
from dqkit.graphs.graph import GraphKey
from dqkit.weights.integrate import WeightEstimate

logger = logging.getLogger(__name__)


class WeightCache:
    """In-memory view of a cache file; ``save`` writes it back."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._records: dict[GraphKey, WeightEstimate] = {}
        if self.path.exists():
            self._records = self._load()

    def _load(self) -> dict[GraphKey, WeightEstimate]:
        try:
            raw = json.loads(self.path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise CacheError(f"cannot read weight cache {self.path}: {e}") from e
        if not isinstance(raw, dict):
            raise CacheError(f"weight cache {self.path} is not a JSON object")
        records = {}
        for key, entry in raw.items():
            try:
                records[key] = WeightEstimate.from_dict(entry)
            except (KeyError, TypeError, ValueError) as e:
                raise CacheError(f"corrupt cache record for {key!r}: {e}") from e
        logger.debug("loaded %d cached weights from %s", len(records), self.path)
        return records

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, key: object) -> bool:
        return key in self._records

    def get(self, key: GraphKey) -> WeightEstimate | None:
        record = self._records.get(key)
        logger.debug("cache %s: %s", "hit" if record else "miss", key)
        return record

    def put(self, key: GraphKey, estimate: WeightEstimate) -> bool:
        """Store unless an existing record has at least as many samples; True if stored."""
        existing = self._records.get(key)
        if existing is not None and existing.samples >= estimate.samples:
            return False
        self._records[key] = estimate
        return True

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        data = {key: self._records[key].to_dict() for key in sorted(self._records)}
        self.path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
        logger.info("wrote %d weights to %s", len(data), self.path)
