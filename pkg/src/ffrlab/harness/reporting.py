"""Report structures: per-case records, constant fits, JSON/CSV output."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

SCHEMA_VERSION = 1


@dataclass
class CaseRecord:
    """One verified case: grid position, measured values, verdict."""

    label: str
    q: int
    d: int
    passed: bool | None = True  # None marks informational / skipped cases
    params: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    note: str = ""
    seconds: float = 0.0

    def __post_init__(self):
        if self.passed is not None:
            self.passed = bool(self.passed)  # numpy bools break `is True`

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class ConstantFit:
    """Per-q max ratios with a log-log slope: the measurable form of
    'the constant does not depend on the field size'."""

    per_q_max: dict[int, float]
    global_max: float
    slope: float | None  # None (flagged) when only one q is present
    flagged: bool

    def to_dict(self) -> dict:
        return {
            "per_q_max": {str(q): v for q, v in sorted(self.per_q_max.items())},
            "global_max": self.global_max,
            "slope": self.slope,
            "flagged": self.flagged,
        }


def constant_fit(pairs) -> ConstantFit:
    """Fit from (q, ratio) pairs: per-q max + least-squares log-log slope."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("constant_fit needs at least one (q, ratio) record")
    per_q: dict[int, float] = {}
    for q, ratio in pairs:
        q = int(q)
        per_q[q] = max(per_q.get(q, 0.0), float(ratio))
    global_max = max(per_q.values())
    qs = sorted(per_q)
    if len(qs) < 2 or any(per_q[q] <= 0 for q in qs):
        return ConstantFit(per_q, global_max, None, True)
    slope = float(np.polyfit(np.log([float(q) for q in qs]),
                             np.log([per_q[q] for q in qs]), 1)[0])
    return ConstantFit(per_q, global_max, slope, False)


@dataclass
class VerificationReport:
    suite: str
    config: dict
    cases: list[CaseRecord]
    constants: dict[str, ConstantFit] = field(default_factory=dict)
    seconds: float = 0.0
    claim: str = ""  # the inequality/identity this suite certifies

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.cases)

    def counts(self) -> tuple[int, int, int]:
        """(passed, failed, informational)."""
        ok = sum(1 for c in self.cases if c.passed is True)
        bad = sum(1 for c in self.cases if c.passed is False)
        info = sum(1 for c in self.cases if c.passed is None)
        return ok, bad, info

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "claim": self.claim,
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "config": self.config,
            "cases": [c.to_dict() for c in self.cases],
            "constants": {k: v.to_dict() for k, v in self.constants.items()},
            "passed": self.passed,
            "seconds": self.seconds,
        }

    def write_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, default=_jsonable)
            fh.write("\n")

    def write_csv(self, path: str) -> None:
        """One row per case; params/values flatten to prefixed columns."""
        pkeys = sorted({k for c in self.cases for k in c.params})
        vkeys = sorted({k for c in self.cases for k in c.values})
        header = (["suite", "label", "q", "d", "passed", "note", "seconds"]
                  + [f"param_{k}" for k in pkeys] + [f"value_{k}" for k in vkeys])
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for c in self.cases:
                row = [self.suite, c.label, c.q, c.d,
                       "" if c.passed is None else c.passed, c.note, f"{c.seconds:.6f}"]
                row += [_csv_cell(c.params.get(k, "")) for k in pkeys]
                row += [_csv_cell(c.values.get(k, "")) for k in vkeys]
                writer.writerow(row)


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def _csv_cell(v):
    if isinstance(v, float) and math.isfinite(v):
        return f"{v:.12g}"
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v, default=_jsonable)
    return v
