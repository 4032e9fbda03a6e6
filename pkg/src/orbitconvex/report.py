"""Structured pass/fail records emitted by every verification routine."""

from __future__ import annotations

import json
import math
import operator
from dataclasses import dataclass, field
from typing import Any

import numpy as np

_OPS = {
    "<=": operator.le,
    "<": operator.lt,
    ">=": operator.ge,
    ">": operator.gt,
    "==": operator.eq,
}


def _plain(x: Any) -> Any:
    """Convert numpy scalars/arrays into JSON-friendly Python values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return repr(x)
        return x
    return x


@dataclass
class VerificationReport:
    scenario_id: str
    status: str = "pass"
    verdict: str = ""
    metrics: dict[str, float] = field(default_factory=dict)
    tolerances: dict[str, dict[str, Any]] = field(default_factory=dict)
    budgets: dict[str, Any] = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)
    config: dict[str, Any] = field(default_factory=dict)

    def record(self, name: str, value) -> float:
        self.metrics[name] = float(value)
        return self.metrics[name]

    def check(self, name: str, value, op: str, threshold) -> bool:
        """Record ``value`` and test it against ``threshold``; failures flip the status."""
        value = float(value)
        ok = bool(_OPS[op](value, float(threshold)))
        self.metrics[name] = value
        self.tolerances[name] = {"op": op, "value": float(threshold), "pass": ok}
        if not ok and self.status == "pass":
            self.status = "fail"
        return ok

    def mark_unconverged(self, note: str):
        if self.status == "pass":
            self.status = "unconverged"
        self.notes.append(note)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def failing_metrics(self) -> list[str]:
        return [k for k, t in self.tolerances.items() if not t["pass"]]

    def to_dict(self) -> dict:
        return _plain(
            {
                "scenario_id": self.scenario_id,
                "status": self.status,
                "verdict": self.verdict,
                "metrics": self.metrics,
                "tolerances": self.tolerances,
                "budgets": self.budgets,
                "artifacts": self.artifacts,
                "notes": self.notes,
                "details": self.details,
                "config": self.config,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "VerificationReport":
        return cls(
            scenario_id=obj["scenario_id"],
            status=obj.get("status", "pass"),
            verdict=obj.get("verdict", ""),
            metrics=dict(obj.get("metrics", {})),
            tolerances=dict(obj.get("tolerances", {})),
            budgets=dict(obj.get("budgets", {})),
            artifacts=list(obj.get("artifacts", [])),
            notes=list(obj.get("notes", [])),
            details=dict(obj.get("details", {})),
            config=dict(obj.get("config", {})),
        )
