"""
Report values produced by certificate and inequality checkers.

Comparisons between floats use a guard band: a condition passes when
lhs <= rhs + guard, and is flagged marginal when |lhs - rhs| <= guard.
Integer inputs are compared exactly.
"""

import math
from dataclasses import dataclass, field
from numbers import Integral
from typing import Any, Dict, List, Optional

GUARD = 1e-9


def _jsonable(x: Any) -> Any:
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, Integral):
        return int(x)
    if isinstance(x, float):
        return float(x)
    return x


@dataclass
class Condition:
    name: str
    lhs: Any
    rhs: Any
    passed: bool
    detail: str = ""
    marginal: bool = False

    def to_dict(self) -> Dict[str, Any]:
        detail = self.detail
        if self.marginal:
            detail = f"{detail}; marginal" if detail else "marginal"
        return {
            "name": self.name,
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "pass": bool(self.passed),
            "detail": detail,
        }


def compare(name: str, lhs, rhs, op: str = "<=", detail: str = "", guard: float = GUARD) -> Condition:
    """Build a Condition for `lhs op rhs` with the guard band for floats."""
    exact = isinstance(lhs, Integral) and isinstance(rhs, Integral)
    g = 0.0 if exact else guard
    if lhs is None or rhs is None or (not exact and (math.isnan(float(lhs)) or math.isnan(float(rhs)))):
        return Condition(name, lhs, rhs, False, detail or "undefined")
    if op == "<=":
        passed = lhs <= rhs + g
    elif op == "<":
        passed = lhs < rhs + g if not exact else lhs < rhs
    elif op == ">=":
        passed = lhs >= rhs - g
    elif op == ">":
        passed = lhs > rhs - g if not exact else lhs > rhs
    else:
        raise ValueError(f"unknown comparison {op!r}")
    marginal = (not exact) and math.isfinite(float(lhs)) and math.isfinite(float(rhs)) \
        and abs(float(lhs) - float(rhs)) <= g
    return Condition(name, lhs, rhs, bool(passed), detail, marginal)


@dataclass
class CertificateReport:
    conditions: List[Condition] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.conditions)

    def add(self, condition: Condition) -> Condition:
        self.conditions.append(condition)
        return condition

    def extend(self, other: "CertificateReport") -> "CertificateReport":
        self.conditions.extend(other.conditions)
        return self

    def get(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self) -> List[str]:
        return [c.name for c in self.conditions if not c.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {"overall": self.overall, "conditions": [c.to_dict() for c in self.conditions]}


@dataclass
class InequalityAudit:
    """Outcome of sampling an inequality that is a theorem under its hypotheses."""

    name: str
    trials: int = 0
    violations: int = 0
    hypotheses_ok: bool = True
    vacuous: bool = False
    counterexample: Optional[Dict[str, Any]] = None
    detail: str = ""

    @property
    def clean(self) -> bool:
        return self.violations == 0

    def record(self, holds: bool, witness: Dict[str, Any]) -> None:
        self.trials += 1
        if not holds:
            self.violations += 1
            if self.counterexample is None:
                self.counterexample = witness

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "trials": self.trials,
            "violations": self.violations,
            "hypotheses_ok": self.hypotheses_ok,
            "vacuous": self.vacuous,
            "counterexample": self.counterexample,
            "detail": self.detail,
        }
