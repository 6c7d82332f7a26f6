"""Check reports shared by the toolkit and certificate checkers."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class Tol:
    """Absolute plus relative tolerance: ``lhs <= rhs + abs + rel * |rhs|``."""

    abs: float = 1e-6
    rel: float = 1e-6

    def slack(self, rhs: float) -> float:
        return self.abs + self.rel * abs(rhs)

    def as_dict(self) -> dict:
        return {"abs": self.abs, "rel": self.rel}


DEFAULT_TOL = Tol()
DERIV_TOL = Tol(abs=1e-3, rel=1e-6)


@dataclass(frozen=True)
class Violation:
    t: float
    j: int
    cond: str
    lhs: float
    rhs: float
    margin: float

    def to_dict(self) -> dict:
        return {k: _clean(v) for k, v in asdict(self).items()}


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


@dataclass
class CheckReport:
    """Result of one check. ``passed`` holds exactly when there are no violations."""

    variant: str
    samples_checked: int = 0
    trigger_hits: int | None = None
    violations: list[Violation] = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    trace: list[dict] | None = None
    worst_margin: float = -math.inf

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def vacuous(self) -> bool:
        """A gated check that passed without its trigger ever firing."""
        return self.passed and self.trigger_hits == 0

    def compare(self, t: float, j: int, cond: str, lhs: float, rhs: float, tol: Tol) -> bool:
        """Record one ``lhs <= rhs`` test. Returns True when it holds within ``tol``."""
        self.samples_checked += 1
        margin = lhs - rhs
        if not math.isnan(margin):
            self.worst_margin = max(self.worst_margin, margin)
        ok = lhs <= rhs + tol.slack(rhs)
        if not ok:
            self.violations.append(Violation(float(t), int(j), cond, float(lhs), float(rhs), float(margin)))
        if self.trace is not None:
            self.trace.append({"t": float(t), "j": int(j), "cond": cond, "lhs": float(lhs), "rhs": float(rhs)})
        return ok

    def require(self, ok: bool, cond: str, lhs: float, rhs: float, t: float = math.nan, j: int = 0) -> bool:
        """Record a test whose verdict was decided by the caller (strict inequalities, flags)."""
        self.samples_checked += 1
        if not math.isnan(lhs - rhs):
            self.worst_margin = max(self.worst_margin, lhs - rhs)
        if not ok:
            self.violations.append(Violation(float(t), int(j), cond, float(lhs), float(rhs), float(lhs - rhs)))
        return ok

    def hit(self) -> None:
        self.trigger_hits = (self.trigger_hits or 0) + 1

    def merge(self, other: "CheckReport") -> "CheckReport":
        self.samples_checked += other.samples_checked
        if other.trigger_hits is not None:
            self.trigger_hits = (self.trigger_hits or 0) + other.trigger_hits
        self.violations.extend(other.violations)
        self.tolerances.update(other.tolerances)
        self.notes.extend(n for n in other.notes if n not in self.notes)
        self.worst_margin = max(self.worst_margin, other.worst_margin)
        if other.trace is not None:
            self.trace = (self.trace or []) + other.trace
        return self

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.vacuous:
            status += " (vacuous)"
        hits = "" if self.trigger_hits is None else f", trigger hits {self.trigger_hits}"
        return f"{self.variant}: {status}, {self.samples_checked} checked{hits}, {len(self.violations)} violations"

    def to_dict(self, max_violations: int | None = None) -> dict:
        vs = self.violations if max_violations is None else self.violations[:max_violations]
        out = {
            "variant": self.variant,
            "passed": self.passed,
            "vacuous": self.vacuous,
            "samples_checked": self.samples_checked,
            "trigger_hits": self.trigger_hits,
            "violation_count": len(self.violations),
            "violations": [v.to_dict() for v in vs],
            "tolerances": self.tolerances,
            "notes": list(self.notes),
            "worst_margin": _clean(float(self.worst_margin)),
        }
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        wm = d.get("worst_margin", -math.inf)
        return cls(
            variant=d["variant"],
            samples_checked=d.get("samples_checked", 0),
            trigger_hits=d.get("trigger_hits"),
            violations=[Violation(**{**v, "lhs": float(v["lhs"]), "rhs": float(v["rhs"]), "margin": float(v["margin"])})
                        for v in d.get("violations", [])],
            tolerances=dict(d.get("tolerances", {})),
            notes=list(d.get("notes", [])),
            worst_margin=float(wm),
        )
