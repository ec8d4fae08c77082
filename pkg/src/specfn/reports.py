"""Verification reports and their JSON encoding."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Report", "jsonable", "dumps"]


def jsonable(obj):
    """Convert numpy/complex values into plain JSON types.

    Complex numbers become ``[re, im]``; non-finite floats become strings so
    that the output is strict JSON.
    """
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return obj


@dataclass
class Report:
    """Outcome of one verification check.

    ``checks`` maps sub-check names to ``{"pass": bool, "max_violation": x,
    ...}`` entries; ``passed`` is the conjunction of all asserted sub-checks.
    Sub-checks marked ``"asserted": False`` are observational only.
    """

    suite: str
    seed: int | None = None
    dims: list = field(default_factory=list)
    trials: int = 0
    passed: bool = True
    max_violation: float = 0.0
    witnesses: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    def add_check(self, name: str, passed: bool, violation: float = 0.0,
                  asserted: bool = True, **info) -> None:
        entry = {"pass": bool(passed), "max_violation": float(violation),
                 "asserted": bool(asserted)}
        entry.update(info)
        self.checks[name] = entry
        if asserted:
            self.passed = self.passed and bool(passed)
            if math.isfinite(violation):
                self.max_violation = max(self.max_violation, float(violation))
            else:
                self.max_violation = float("inf")

    def check(self, name: str) -> dict:
        return self.checks[name]

    def to_dict(self) -> dict:
        return jsonable({
            "suite": self.suite,
            "seed": self.seed,
            "dims": list(self.dims),
            "trials": self.trials,
            "pass": self.passed,
            "max_violation": self.max_violation,
            "witnesses": self.witnesses,
            "checks": self.checks,
        })


def dumps(report: Report) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"
