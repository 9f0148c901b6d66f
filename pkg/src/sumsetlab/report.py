"""Structured verifier output."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact import Interval, REPORT_PRECISION, root_to_precision
from .lattice import PointSet

SCHEMA_VERSION = 1


def json_value(x):
    """Exact values as strings of rationals; intervals as {lo, hi}."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if isinstance(x, Interval):
        return x.to_json()
    if isinstance(x, PointSet):
        return [list(p) for p in x.points]
    if isinstance(x, dict):
        return {str(k): json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [json_value(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


@dataclass
class InequalityReport:
    """Outcome of one verifier run.

    ``lhs`` and ``rhs`` are exact rationals when the compared quantities are
    rational and otherwise rational enclosures (``Interval``) at
    ``REPORT_PRECISION``; ``passed`` is always decided exactly.
    """

    name: str
    hypothesis_values: dict
    hypotheses_ok: bool
    lhs: object
    rhs: object
    passed: bool
    caps_used: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def slack(self):
        return self.lhs - self.rhs

    def to_json(self) -> dict:
        return {
            "kind": "inequality_report",
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "hypothesis_values": json_value(self.hypothesis_values),
            "hypotheses_ok": self.hypotheses_ok,
            "lhs": json_value(self.lhs),
            "rhs": json_value(self.rhs),
            "slack": json_value(self.slack),
            "pass": self.passed,
            "caps_used": json_value(self.caps_used),
            "details": json_value(self.details),
        }


def root_sum_sides(u, v, w, d: int, precision=REPORT_PRECISION):
    """Enclosures of u^(1/d) and v^(1/d) + w^(1/d) for reporting."""
    lhs = root_to_precision(u, d, precision)
    rhs = root_to_precision(v, d, precision) + root_to_precision(w, d, precision)
    return _collapse(lhs), _collapse(rhs)


def _collapse(x: Interval):
    return x.lo if x.is_exact else x
