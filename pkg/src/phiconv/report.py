"""Machine-readable reports with pass/fail checks."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional

import numpy as np


def jsonable(x: Any) -> Any:
    """Plain JSON data: numpy scalars and arrays unwrapped, non-finite floats to None."""
    if hasattr(x, "to_dict"):
        return jsonable(x.to_dict())
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [jsonable(v) for v in items]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if x is None or isinstance(x, str):
        return x
    if hasattr(x, "__iter__"):
        return [jsonable(v) for v in x]
    raise TypeError(f"cannot serialize {type(x).__name__}")


@dataclass
class Check:
    name: str
    passed: bool
    tolerance: Optional[float] = None
    details: dict = field(default_factory=dict)
    counterexample: Any = None

    def __post_init__(self):
        self.passed = bool(self.passed)
        if not self.passed and self.counterexample is None:
            self.counterexample = self.details or {"note": "no further data"}

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "details": self.details,
            "counterexample": self.counterexample,
        }


@dataclass
class Report:
    task: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    seed: Optional[int] = None
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, passed: bool, tolerance=None, counterexample=None, **details) -> Check:
        c = Check(name, passed, tolerance, details, counterexample)
        self.checks.append(c)
        return c

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "task": self.task,
            "inputs": self.inputs,
            "results": self.results,
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
            "seed": self.seed,
        }
        if timing:
            d["timing"] = self.timing
        return jsonable(d)

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"task: {self.task}"]
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        for k, v in sorted(jsonable(self.results).items()):
            lines.append(f"{k}: {json.dumps(v, sort_keys=True)}")
        for c in self.checks:
            tol = "" if c.tolerance is None else f" (tol {c.tolerance:g})"
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}{tol}")
            if not c.passed:
                lines.append(f"    counterexample: {json.dumps(jsonable(c.counterexample), sort_keys=True)}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        checks = [Check(c["name"], c["passed"], c.get("tolerance"), c.get("details", {}), c.get("counterexample"))
                  for c in d.get("checks", [])]
        return cls(d["task"], d.get("inputs", {}), d.get("results", {}), checks, d.get("seed"), d.get("timing", {}))


def write_report(report: Report, path, fmt: str = "json") -> None:
    Path(path).write_text(report.to_json() if fmt == "json" else report.to_text())


def read_report(path) -> Report:
    return Report.from_dict(json.loads(Path(path).read_text()))
