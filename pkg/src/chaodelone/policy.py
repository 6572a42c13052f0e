"""Numeric tolerances and enumeration budgets shared by every module."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "CHAODELONE_NUMERIC"


@dataclass(frozen=True)
class NumericPolicy:
    construction: float = 1e-12
    comparison: float = 1e-9
    dedup: float = 1e-7
    boundary: float = 1e-9
    max_elements: int = 2_000_000

    @classmethod
    def from_env(cls) -> "NumericPolicy":
        """Read overrides from a JSON object in ``$CHAODELONE_NUMERIC``."""
        raw = os.environ.get(ENV_VAR)
        if not raw:
            return cls()
        data = json.loads(raw)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown numeric policy keys: {sorted(unknown)}")
        return replace(cls(), **data)


DEFAULT = NumericPolicy()
