"""Residual-check evidence records and the machine-readable report schema."""

from __future__ import annotations

from dataclasses import dataclass, field

SCHEMA_VERSION = 1
TOOL_VERSION = "0.1.0"


@dataclass
class ResidualReport:
    """Evidence for one numeric check: worst scaled residual vs tolerance."""

    name: str
    n_points: int
    max_residual: float
    tolerance: float
    seed: int
    max_raw_residual: float = 0.0
    note: str = ""
    parts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "n_points": self.n_points,
            "max_abs_residual": self.max_residual,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "pass": self.passed,
        }
        if self.note:
            d["note"] = self.note
        if self.parts:
            d["parts"] = [p.to_dict() for p in self.parts]
        return d

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"[{verdict}] {self.name}: max residual {self.max_residual:.3e} "
            f"(tol {self.tolerance:.1e}, {self.n_points} pts)"
        )


def combine_reports(name: str, parts, note: str = "") -> ResidualReport:
    """Aggregate sub-checks into one report; fails iff any part fails."""
    parts = list(parts)
    worst = max((p.max_residual / p.tolerance for p in parts), default=0.0)
    tol = min((p.tolerance for p in parts), default=1e-9)
    return ResidualReport(
        name=name,
        n_points=max((p.n_points for p in parts), default=0),
        max_residual=worst * tol,
        tolerance=tol,
        seed=parts[0].seed if parts else 0,
        note=note,
        parts=parts,
    )


@dataclass
class Report:
    """Top-level JSON report for a CLI run."""

    case: str
    seed: int
    checks: list = field(default_factory=list)
    timing_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, include_timing: bool = True) -> dict:
        d = {
            "schema": SCHEMA_VERSION,
            "tool_version": TOOL_VERSION,
            "case": self.case,
            "seed": self.seed,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }
        if include_timing:
            d["timing_s"] = self.timing_s
        return d
