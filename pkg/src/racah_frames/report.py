"""Check results shared by every verification routine."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    """Outcome of one relation check.

    ``where`` locates the worst violation (a member label, an index pair, ...)
    and ``details`` carries any extra numbers worth reporting.
    """

    name: str
    relation: str
    passed: bool
    residual: float
    tolerance: float
    where: object = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "relation": self.relation,
            "pass": bool(self.passed),
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
        }
        if self.where is not None:
            out["where"] = _jsonable(self.where)
        if self.details:
            out["details"] = _jsonable(self.details)
        return out


@dataclass
class Report:
    """An ordered battery of checks; passes only if every check passes."""

    title: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def extend(self, checks) -> "Report":
        self.checks.extend(checks)
        return self

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def summary(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            flag = "ok  " if c.passed else "FAIL"
            loc = "" if c.where is None else f"  at {c.where}"
            lines.append(f"  [{flag}] {c.name:<28} residual={c.residual:.3e} tol={c.tolerance:.0e}{loc}")
        return "\n".join(lines)


def _jsonable(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj
