"""Shared result records: run status codes, run records, experiment logs.

These are the types the runner produces, the log writer/parser serializes, and
the database ingests. They carry no behavior beyond validation so that all
three layers agree on one vocabulary.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class ValueType(Enum):
    """Type tags for run and progress properties."""

    INTEGER = "INTEGER"
    REAL = "REAL"
    BOOLEAN = "BOOLEAN"
    ENUM = "ENUM"
    STRING = "STRING"


class RunStatus(Enum):
    EXACT_SOLUTION = 0
    APPROXIMATE_SOLUTION = 1
    TIMEOUT = 2
    MEMORY_LIMIT = 3
    CRASH = 4

    @classmethod
    def from_code(cls, code: int) -> RunStatus:
        return cls(code)


@dataclass(frozen=True)
class ProgressSample:
    """One timed observation of an in-flight run. best_cost None = not yet known."""

    t: float
    best_cost: float | None
    iterations: int


# The canonical progress schema written by the runner. Foreign logs may use
# other schemas; streams are stored as plain tuples aligned to the schema.
PROGRESS_SCHEMA: tuple[tuple[str, ValueType], ...] = (
    ("time", ValueType.REAL),
    ("best_cost", ValueType.REAL),
    ("iterations", ValueType.INTEGER),
)


@dataclass
class RunRecord:
    """One benchmark run: property values keyed by name, None meaning N/A."""

    planner_instance: str
    run_index: int
    properties: dict[str, object | None]
    progress: list[tuple] = field(default_factory=list)

    @property
    def status(self) -> RunStatus | None:
        code = self.properties.get("status")
        if code is None:
            return None
        return RunStatus(int(code))


@dataclass
class PlannerBlock:
    """All runs of one planner instance, plus its declared schemas."""

    name: str
    settings: dict[str, str]
    run_schema: list[tuple[str, ValueType]]
    runs: list[RunRecord]
    progress_schema: list[tuple[str, ValueType]] = field(default_factory=list)

    def validate(self) -> None:
        seen = set()
        for prop_name, _ in self.run_schema:
            if not NAME_RE.match(prop_name):
                raise ValueError(f"invalid property name {prop_name!r}")
            if prop_name in seen:
                raise ValueError(f"duplicate property {prop_name!r} for planner {self.name!r}")
            seen.add(prop_name)
        schema_names = {n for n, _ in self.run_schema}
        for run in self.runs:
            extra = set(run.properties) - schema_names
            if extra:
                raise ValueError(
                    f"run {run.run_index} of planner {self.name!r} has properties "
                    f"outside the declared schema: {sorted(extra)}"
                )


@dataclass
class ExperimentLog:
    """One complete benchmark campaign; maps one-to-one to a log file."""

    name: str
    version: str
    hostname: str
    cpuinfo: str
    date: str
    seed: int
    time_limit: float
    memory_limit: float  # MB
    run_count: int
    total_time: float
    problem_properties: dict[str, str] = field(default_factory=dict)
    planners: list[PlannerBlock] = field(default_factory=list)

    def validate(self) -> None:
        for block in self.planners:
            block.validate()
