"""A small structured pass/fail report reused by every verifier."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    name: str
    residuals: dict[str, float] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, key: str, value: float, limit: float, message: str | None = None):
        """Keep the worst residual seen under ``key``; fail if it exceeds ``limit``."""
        value = float(value)
        self.residuals[key] = max(self.residuals.get(key, 0.0), value)
        if value > limit and not any(f.startswith(f"{key}:") for f in self.failures):
            self.failures.append(f"{key}: {message or f'residual {value:.3e} > {limit:.1e}'}")

    def fail(self, key: str, message: str):
        self.failures.append(f"{key}: {message}")

    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "residuals": dict(sorted(self.residuals.items())),
            "failures": list(self.failures),
            "notes": list(self.notes),
        }

    def __bool__(self):
        return self.passed
