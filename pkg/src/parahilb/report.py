"""Verification reports.

Every verification suite returns a Report. Reports of disjoint parts of an
enumeration merge associatively, so suites can be split across workers.
"""

import logging
from dataclasses import dataclass, field
from typing import Any

logger = logging.getLogger(__name__)

# Violations kept per report; the count is always exact.
MAX_RECORDED_VIOLATIONS = 50


@dataclass
class Report:
    """Outcome of a verification suite."""

    suite: str
    counts: dict[str, int] = field(default_factory=dict)
    violations: list[dict[str, Any]] = field(default_factory=list)
    violation_count: int = 0
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def bump(self, key: str, amount: int = 1) -> None:
        """Increase a named counter."""
        self.counts[key] = self.counts.get(key, 0) + amount

    def add_violation(self, **info: Any) -> None:
        """Record one violation."""
        self.violation_count += 1
        if len(self.violations) < MAX_RECORDED_VIOLATIONS:
            self.violations.append(info)
        logger.warning("%s violation: %s", self.suite, info)

    def merge(self, other: "Report") -> "Report":
        """Combine two reports of the same suite."""
        if other.suite != self.suite:
            raise ValueError(f"cannot merge {other.suite!r} into {self.suite!r}")
        counts = dict(self.counts)
        for key, value in other.counts.items():
            counts[key] = counts.get(key, 0) + value
        violations = (self.violations + other.violations)[:MAX_RECORDED_VIOLATIONS]
        return Report(
            suite=self.suite,
            counts=counts,
            violations=violations,
            violation_count=self.violation_count + other.violation_count,
            details={**self.details, **other.details},
        )

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {"suite": self.suite}
        data.update(self.counts)
        data.update(self.details)
        data["violation_count"] = self.violation_count
        data["violations"] = self.violations
        return data
