"""Experiment configuration: grids, sample counts, seeds, budgets."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from ffrlab.field import FieldError, field_for_order

DEFAULT_BUDGET = 60_000_000  # largest admissible q**d


@dataclass
class ExperimentConfig:
    """Knobs shared by every suite; suites read the slices they care about.

    ``samples`` counts random draws per size regime; witness sets are always
    injected on top.  ``budget`` caps q**d — cases above it are skipped with
    a notice rather than attempted.  The seed fans out deterministically per
    (suite, q, case), so worker count never changes the numbers.
    """

    q_list: list[int] = field(default_factory=list)
    d_list: list[int] = field(default_factory=list)
    j_list: list[int] = field(default_factory=lambda: [1])
    pairs: list[tuple[float, float]] = field(default_factory=list)  # (p, r)
    samples: int = 10
    seed: int = 2024
    budget: int = DEFAULT_BUDGET
    out: str | None = None
    fmt: str = "json"
    workers: int = 1

    def __post_init__(self):
        for q in self.q_list:
            try:
                field_for_order(q)
            except FieldError as exc:
                raise ValueError(f"q = {q} is not an admissible field order") from exc
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.fmt!r}")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        self.pairs = [tuple(pr) for pr in self.pairs]

    def within_budget(self, q: int, d: int) -> bool:
        return q**d <= self.budget

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


# Per-suite default grids.  Zero-radius suites run at d = 6 (the smallest
# interesting 4k+2) over q = 3 mod 4; nonzero-radius suites run at d = 4 with
# q up to 31 and stay under the enumeration budget.  Suites with irregular
# (d, q) grids (sphere-fourier, lines, weak-l4) keep those grids internally
# and use empty lists here; explicit q_list/d_list overrides zip pairwise.
SUITE_DEFAULTS: dict[str, dict] = {
    "gauss": dict(q_list=[3, 5, 7, 9, 11, 13, 23, 25, 27, 49]),
    "sphere-fourier": dict(),
    "weak-l2": dict(q_list=[3, 7, 11], d_list=[6]),
    "energy": dict(q_list=[9, 11, 13, 17, 19, 23, 25, 27, 29, 31], d_list=[4], j_list=[1]),
    "paraboloid-pairs": dict(q_list=[5, 7, 11], d_list=[4], j_list=[1]),
    "lines": dict(),
    "weak-l4": dict(),
    "main-zero": dict(q_list=[3, 7, 11, 19], d_list=[6], pairs=[(2.0, 8 / 3), (2.0, 2.4)]),
    "main-nonzero": dict(
        q_list=[5, 7, 11, 13, 17, 19, 23], d_list=[4], j_list=[1],
        pairs=[(8 / 5, 4.0), (1.3, 4.0)],
    ),
    "duality": dict(q_list=[5, 3], d_list=[4, 6], pairs=[(2.0, 8 / 3)]),
    "decay": dict(q_list=[3, 5, 7, 9], d_list=[2, 3, 4, 5, 6]),
}


def suite_config(suite: str, **overrides) -> ExperimentConfig:
    """Config for a suite: its defaults with any explicit overrides on top."""
    if suite not in SUITE_DEFAULTS:
        raise ValueError(f"unknown suite {suite!r}")
    merged = dict(SUITE_DEFAULTS[suite])
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(merged)
