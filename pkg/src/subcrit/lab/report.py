"""Experiment reports: statistics, verdicts against stated thresholds, provenance."""

from __future__ import annotations

import json
import math
import platform
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import __version__


def verdict(name: str, value, threshold, rule: str = "<") -> dict:
    """A single decision ``value <rule> threshold`` recorded together with its inputs."""
    if rule == "<":
        passed = value < threshold
    elif rule == "<=":
        passed = value <= threshold
    elif rule == ">":
        passed = value > threshold
    elif rule == ">=":
        passed = value >= threshold
    elif rule == "is":
        passed = value == threshold
    else:
        raise ValueError(f"unknown rule {rule!r}")
    if isinstance(value, float) and math.isnan(value):
        passed = False
    return {"name": name, "value": value, "rule": rule, "threshold": threshold, "passed": bool(passed)}


def provenance(**extra) -> dict:
    out = {"version": __version__, "python": platform.python_version(), "numpy": np.__version__}
    out.update(extra)
    return out


@dataclass
class ExperimentReport:
    experiment: str
    cls: str
    parameters: dict
    statistics: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    provenance: dict = field(default_factory=provenance)

    @property
    def passed(self) -> bool:
        return all(v["passed"] for v in self.verdicts)

    def failures(self) -> list[str]:
        return [v["name"] for v in self.verdicts if not v["passed"]]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), default=_jsonable, **kw)


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, bytes):
        return x.hex()
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    return str(x)
