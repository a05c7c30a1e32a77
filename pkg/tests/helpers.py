"""Shared test utilities: randomized log construction and fixture databases."""

from __future__ import annotations

import contextlib
import random
import string
import time

from plannerbench import benchdb, sample_logs
from plannerbench.benchlog import parse_log
from plannerbench.geometry import SpaceKind
from plannerbench.planners import Planner, register_planner_type
from plannerbench.planners.base import PLANNER_TYPES
from plannerbench.records import ExperimentLog, PlannerBlock, RunRecord, ValueType


class CrashingPlanner(Planner):
    """Raises on every solve; exercises crash containment in the runner."""

    type_name = "CRASHER"
    space_kinds = frozenset((SpaceKind.R2, SpaceKind.SE2))
    PARAMS = {}

    def _plan(self, problem, tc, rng):
        raise RuntimeError("synthetic failure")


class StubbornPlanner(Planner):
    """Ignores its deadline; exercises worker abandonment in the runner."""

    type_name = "SLEEPER"
    space_kinds = frozenset((SpaceKind.R2, SpaceKind.SE2))
    PARAMS = {}

    def _plan(self, problem, tc, rng):
        time.sleep(30)
        return self._finish(problem, [problem.start], None, 0.0, 1, 0, 0)


@contextlib.contextmanager
def temp_planner_type(cls):
    register_planner_type(cls)
    try:
        yield cls
    finally:
        PLANNER_TYPES.pop(cls.type_name, None)

_NAME_FIRST = string.ascii_letters + "_"
_NAME_REST = string.ascii_letters + string.digits + "_"
_STRING_CHARS = string.ascii_letters + string.digits + " -_./"


def random_name(rng: random.Random, max_len: int = 12) -> str:
    n = rng.randint(1, max_len)
    return rng.choice(_NAME_FIRST) + "".join(rng.choice(_NAME_REST) for _ in range(n - 1))


def random_real(rng: random.Random) -> float:
    kind = rng.randrange(5)
    if kind == 0:
        return rng.uniform(-1e3, 1e3)
    if kind == 1:
        return rng.uniform(0, 1) * 10 ** rng.randint(-300, 300)
    if kind == 2:
        return float(rng.randint(-10**12, 10**12))
    if kind == 3:
        return 0.0
    return -rng.random()


def random_string(rng: random.Random) -> str:
    n = rng.randint(1, 20)
    s = "".join(rng.choice(_STRING_CHARS) for _ in range(n)).strip()
    if not s or s in (".", "N/A"):
        return "x"
    return s


def random_value(rng: random.Random, tag: ValueType):
    if rng.random() < 0.15:
        return None
    if tag is ValueType.REAL:
        return random_real(rng)
    if tag is ValueType.INTEGER:
        return rng.randint(-10**9, 10**9)
    if tag is ValueType.BOOLEAN:
        return rng.random() < 0.5
    if tag is ValueType.ENUM:
        return rng.randint(0, 4)
    return random_string(rng)


def random_log(rng: random.Random) -> ExperimentLog:
    """A structurally valid ExperimentLog exercising the whole grammar."""
    n_runs = rng.randint(0, 5)
    planners = []
    for _ in range(rng.randint(1, 4)):
        block_name = random_name(rng)
        run_schema = [("status", ValueType.ENUM), ("time", ValueType.REAL)]
        used = {"status", "time"}
        for _ in range(rng.randint(0, 5)):
            name = random_name(rng)
            if name in used:
                continue
            used.add(name)
            run_schema.append((name, rng.choice(list(ValueType))))
        progress_schema = []
        if rng.random() < 0.5:
            progress_schema = [("time", ValueType.REAL), ("best_cost", ValueType.REAL)]
            if rng.random() < 0.5:
                progress_schema.append(("iterations", ValueType.INTEGER))
        runs = []
        for run_index in range(n_runs):
            props = {name: random_value(rng, tag) for name, tag in run_schema}
            progress = []
            if progress_schema:
                t = 0.0
                for _ in range(rng.randint(0, 4)):
                    t += rng.random()
                    sample = [t] + [
                        random_value(rng, tag) for _, tag in progress_schema[1:]
                    ]
                    progress.append(tuple(sample))
            runs.append(RunRecord(block_name, run_index, props, progress))
        settings = {"type": random_name(rng).upper()}
        for _ in range(rng.randint(0, 4)):
            settings.setdefault(random_name(rng), random_string(rng))
        planners.append(
            PlannerBlock(block_name, settings, run_schema, runs, progress_schema)
        )
    problem_properties = {}
    for _ in range(rng.randint(0, 5)):
        problem_properties.setdefault(random_name(rng), random_string(rng))
    return ExperimentLog(
        name=random_name(rng),
        version=f"{rng.randint(0, 3)}.{rng.randint(0, 9)}.{rng.randint(0, 9)}",
        hostname=random_name(rng),
        cpuinfo="\n".join(random_string(rng) for _ in range(rng.randint(1, 3))),
        date=f"2026-0{rng.randint(1, 9)}-1{rng.randint(0, 9)}T0{rng.randint(0, 9)}:00:00+00:00",
        seed=rng.randint(0, 10**6),
        time_limit=rng.choice([1.0, 5.0, rng.uniform(0.1, 100)]),
        memory_limit=rng.choice([100.0, 1000.0, rng.uniform(1, 4096)]),
        run_count=n_runs,
        total_time=rng.uniform(0, 1000),
        problem_properties=problem_properties,
        planners=planners,
    )


def sample_db(path) -> benchdb.sqlite3.Connection:
    """Database populated with the four bundled sample logs."""
    conn = benchdb.open_db(path)
    for log_file in sample_logs():
        benchdb.ingest_log(conn, parse_log(log_file.read_text()))
    return conn
