"""Benchmark campaign execution: config parsing, contained runs, log assembly.

Each run gets three concurrent roles: a worker thread that plans, a collector
thread that snapshots progress at a fixed interval, and the supervising caller
that enforces the deadline and the memory model. A worker that ignores the
stop signal past a 0.5 s grace period is abandoned and the run recorded as a
crash; the campaign continues.
"""

from __future__ import annotations

import configparser
import io
import math
import platform
import random
import socket
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path as FsPath

from . import __version__
from .geometry import (
    Objective,
    ProblemDef,
    Polygon,
    Robot,
    RobotShape,
    SpaceKind,
    State,
    StateSpace,
    load_world,
)
from .paths import Path, path_clearance, path_length, simplify, save_path_file
from .planners import PlannerSpec, ProgressSample, TerminationCondition, create_planner
from .records import (
    PROGRESS_SCHEMA,
    ExperimentLog,
    PlannerBlock,
    RunRecord,
    RunStatus,
    ValueType,
)

GRACE_SECONDS = 0.5
MB = 1e6

RUN_SCHEMA: tuple[tuple[str, ValueType], ...] = (
    ("status", ValueType.ENUM),
    ("time", ValueType.REAL),
    ("graph_states", ValueType.INTEGER),
    ("iterations", ValueType.INTEGER),
    ("solution_length", ValueType.REAL),
    ("raw_solution_length", ValueType.REAL),
    ("solution_clearance", ValueType.REAL),
    ("solution_difference", ValueType.REAL),
    ("simplification_time", ValueType.REAL),
    ("memory", ValueType.INTEGER),
)


class SavePaths(Enum):
    NONE = "NONE"
    BEST = "BEST"
    ALL = "ALL"


@dataclass
class BenchmarkSpec:
    """Everything one campaign needs: the problem, the planners, the limits."""

    problem: ProblemDef
    planner_specs: list[PlannerSpec]
    time_limit: float
    run_count: int
    seed: int = 1
    memory_limit: float = 1000 * MB  # bytes
    save_paths: SavePaths = SavePaths.NONE
    progress_interval: float = 0.1
    problem_properties: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.run_count < 1:
            raise ValueError("run_count must be at least 1")
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        names = [ps.instance_name for ps in self.planner_specs]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ValueError(f"duplicate planner instance names: {sorted(dupes)}")


# ---------------------------------------------------------------------------
# Config parsing


def _parse_state(raw: str, key: str) -> State:
    parts = raw.split()
    try:
        values = [float(v) for v in parts]
    except ValueError:
        raise ValueError(f"{key}: expected numbers, got {raw!r}") from None
    if len(values) == 2:
        return State(values[0], values[1])
    if len(values) == 3:
        return State(values[0], values[1], values[2])
    raise ValueError(f"{key}: expected `x y` or `x y theta`, got {raw!r}")


def _parse_robot(raw: str) -> Robot:
    fields = raw.split()
    if fields == ["point"]:
        return Robot()
    if fields and fields[0] == "polygon":
        try:
            nums = [float(v) for v in fields[1:]]
        except ValueError:
            raise ValueError(f"robot: non-numeric vertex in {raw!r}") from None
        if len(nums) < 6 or len(nums) % 2:
            raise ValueError("robot polygon needs an even count of >= 6 numbers")
        verts = tuple((nums[i], nums[i + 1]) for i in range(0, len(nums), 2))
        return Robot(RobotShape.POLYGON, Polygon(verts))
    raise ValueError(f"robot must be `point` or `polygon x1 y1 ...`, got {raw!r}")


def parse_config(text: str, base_dir: FsPath | None = None) -> BenchmarkSpec:
    """Parse an INI-style benchmark config.

    Sections: [problem], [benchmark], and one [planner:<instance>] per planner
    instance. Planner parameters other than `type` are passed through as
    strings and validated by the planner itself. Relative world paths resolve
    against base_dir.
    """
    cp = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#",), strict=True, interpolation=None
    )
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.DuplicateSectionError as exc:
        raise ValueError(f"duplicate section [{exc.section}] (line {exc.lineno})") from None
    except configparser.Error as exc:
        raise ValueError(f"malformed config: {exc}") from None

    for section in ("problem", "benchmark"):
        if not cp.has_section(section):
            raise ValueError(f"missing [{section}] section")
    prob = dict(cp.items("problem"))
    bench = dict(cp.items("benchmark"))
    for key in ("world", "space", "start", "goal"):
        if key not in prob:
            raise ValueError(f"missing mandatory key {key!r} in [problem]")
    for key in ("time_limit", "run_count"):
        if key not in bench:
            raise ValueError(f"missing mandatory key {key!r} in [benchmark]")

    try:
        kind = SpaceKind(prob["space"])
    except ValueError:
        raise ValueError(f"space must be one of R2, SE2, CAR1; got {prob['space']!r}") from None
    world = load_world(prob["world"], base_dir=base_dir)
    space = StateSpace(kind, world.bounds, float(prob.get("rotation_weight", 0.5)))
    diag = world.bounds.diagonal
    objective_name = prob.get("objective", "NONE").strip().upper()
    try:
        objective = Objective(objective_name)
    except ValueError:
        choices = ", ".join(o.value for o in Objective)
        raise ValueError(f"objective must be one of {choices}; got {prob['objective']!r}") from None
    problem = ProblemDef(
        name=prob.get("name", prob["world"]),
        space=space,
        world=world,
        robot=_parse_robot(prob.get("robot", "point")),
        start=_parse_state(prob["start"], "start"),
        goal=_parse_state(prob["goal"], "goal"),
        goal_tolerance=float(prob.get("goal_tolerance", 0.05 * diag)),
        objective=objective,
        objective_threshold=float(prob.get("objective_threshold", 0.0)),
        collision_resolution=float(prob.get("collision_resolution", 0.0)),
    )

    planner_specs = []
    for section in cp.sections():
        if not section.startswith("planner:"):
            if section not in ("problem", "benchmark"):
                raise ValueError(f"unknown section [{section}]")
            continue
        instance = section[len("planner:") :].strip()
        options = dict(cp.items(section))
        ptype = options.pop("type", None)
        if ptype is None:
            raise ValueError(f"planner {instance!r} needs a `type` key")
        planner_specs.append(PlannerSpec(instance, ptype, options))
    if not planner_specs:
        raise ValueError("config declares no [planner:<instance>] sections")

    return BenchmarkSpec(
        problem=problem,
        planner_specs=planner_specs,
        time_limit=float(bench["time_limit"]),
        run_count=int(bench["run_count"]),
        seed=int(bench.get("seed", 1)),
        memory_limit=float(bench.get("memory_limit", 1000)) * MB,
        save_paths=SavePaths(bench.get("save_paths", "none").upper()),
        progress_interval=float(bench.get("progress_interval", 0.1)),
        problem_properties=dict(prob),
    )


# ---------------------------------------------------------------------------
# Run execution


def _absent_record(instance: str, run_index: int, elapsed: float) -> RunRecord:
    props: dict[str, object | None] = {name: None for name, _ in RUN_SCHEMA}
    props["status"] = RunStatus.CRASH.value
    props["time"] = elapsed
    return RunRecord(instance, run_index, props)


def execute_run(
    planner,
    problem: ProblemDef,
    time_limit: float,
    memory_limit: float,
    seed: int,
    run_index: int = 0,
    progress_interval: float = 0.1,
) -> tuple[RunRecord, Path | None, bool]:
    """Run one contained solve. Returns (record, final path, worker_abandoned)."""
    instance = planner.spec.instance_name
    samples: list[ProgressSample] = []
    box: dict[str, object] = {}
    done = threading.Event()
    stop_collect = threading.Event()
    tc = TerminationCondition(time_limit)
    t0 = time.perf_counter()

    def sink(best_cost: float | None, iterations: int) -> None:
        samples.append(ProgressSample(time.perf_counter() - t0, best_cost, iterations))

    planner.clear_progress_sinks()
    planner.register_progress_sink(sink)

    def work() -> None:
        w0 = time.perf_counter()
        try:
            box["result"] = planner.solve(problem, tc, seed)
        except BaseException as exc:  # contained: any failure becomes a CRASH record
            box["error"] = exc
        finally:
            box["elapsed"] = time.perf_counter() - w0
            done.set()

    def collect() -> None:
        while not stop_collect.wait(progress_interval):
            planner.publish_progress()

    worker = threading.Thread(target=work, daemon=True, name=f"plan-{instance}-{run_index}")
    collector = threading.Thread(target=collect, daemon=True, name=f"collect-{instance}-{run_index}")
    worker.start()
    collector.start()

    abandoned = False
    memory_exceeded = False
    while not done.is_set():
        remaining = time_limit - (time.perf_counter() - t0)
        if remaining <= 0:
            tc.signal()
            if not done.wait(GRACE_SECONDS):
                abandoned = True
            break
        done.wait(min(remaining, progress_interval))
        if not memory_exceeded and planner.memory_estimate() > memory_limit:
            memory_exceeded = True
            tc.signal()
    stop_collect.set()
    collector.join()

    if abandoned:
        return _absent_record(instance, run_index, time.perf_counter() - t0), None, True
    if "error" in box:
        return _absent_record(instance, run_index, box["elapsed"]), None, False

    result = box["result"]
    elapsed = box["elapsed"]
    if planner.publishes_progress:
        final_best, final_iters = planner._snapshot
        samples.append(ProgressSample(time.perf_counter() - t0, final_best, final_iters))

    props: dict[str, object | None] = {name: None for name, _ in RUN_SCHEMA}
    props["time"] = elapsed
    props["graph_states"] = result.run_properties["graph_states"]
    props["iterations"] = result.run_properties["iterations"]
    props["solution_difference"] = result.solution_difference
    props["memory"] = result.memory_estimate

    final_path: Path | None = None
    if memory_exceeded:
        props["status"] = RunStatus.MEMORY_LIMIT.value
    elif result.status.value == "EXACT_SOLUTION":
        props["status"] = RunStatus.EXACT_SOLUTION.value
        raw = Path(tuple(result.path), problem.space)
        raw_len = path_length(raw)
        props["raw_solution_length"] = raw_len
        if planner.simplifiable:
            rng = random.Random((seed << 1) ^ 0x9E3779B9)
            final_path, simp_time = simplify(raw, problem, rng)
            props["simplification_time"] = simp_time
        else:
            final_path = raw
        props["solution_length"] = path_length(final_path)
        props["solution_clearance"] = path_clearance(final_path, problem)
    elif result.status.value == "APPROXIMATE_SOLUTION":
        props["status"] = RunStatus.APPROXIMATE_SOLUTION.value
        final_path = Path(tuple(result.path), problem.space)
        props["solution_length"] = path_length(final_path)
        props["solution_clearance"] = path_clearance(final_path, problem)
    else:
        props["status"] = RunStatus.TIMEOUT.value

    progress = [(s.t, s.best_cost, s.iterations) for s in samples] if planner.publishes_progress else []
    record = RunRecord(instance, run_index, props, progress)
    return record, final_path, False


def _read_cpuinfo() -> str:
    try:
        with open("/proc/cpuinfo") as fh:
            for line in fh:
                if line.startswith("model name"):
                    return line.split(":", 1)[1].strip()
    except OSError:
        pass
    return platform.processor() or platform.machine() or "unknown"


def run_benchmark(
    spec: BenchmarkSpec,
    out_dir: FsPath | None = None,
    version: str = __version__,
) -> ExperimentLog:
    """Execute the full campaign: every planner instance, run_count runs each."""
    t_start = time.perf_counter()
    problem = spec.problem
    planners = [create_planner(ps, problem) for ps in spec.planner_specs]

    blocks: list[PlannerBlock] = []
    for pspec, planner in zip(spec.planner_specs, planners):
        records: list[RunRecord] = []
        run_paths: list[Path | None] = []
        for run_index in range(spec.run_count):
            record, final_path, abandoned = execute_run(
                planner,
                problem,
                spec.time_limit,
                spec.memory_limit,
                seed=spec.seed + run_index,
                run_index=run_index,
                progress_interval=spec.progress_interval,
            )
            records.append(record)
            run_paths.append(final_path)
            if abandoned:
                # the zombie worker may still mutate the old instance; replace it
                planner = create_planner(pspec, problem)
        if out_dir is not None and spec.save_paths is not SavePaths.NONE:
            _write_paths(spec, records, run_paths, pspec.instance_name, FsPath(out_dir))
        blocks.append(
            PlannerBlock(
                name=pspec.instance_name,
                settings=planner.effective_settings(),
                run_schema=list(RUN_SCHEMA),
                runs=records,
                progress_schema=list(PROGRESS_SCHEMA) if planner.publishes_progress else [],
            )
        )

    log = ExperimentLog(
        name=problem.name,
        version=version,
        hostname=socket.gethostname(),
        cpuinfo=_read_cpuinfo(),
        date=datetime.now(timezone.utc).isoformat(),
        seed=spec.seed,
        time_limit=spec.time_limit,
        memory_limit=spec.memory_limit / MB,
        run_count=spec.run_count,
        total_time=time.perf_counter() - t_start,
        problem_properties=dict(spec.problem_properties),
        planners=blocks,
    )
    log.validate()
    return log


def _write_paths(
    spec: BenchmarkSpec,
    records: list[RunRecord],
    run_paths: list[Path | None],
    instance: str,
    out_dir: FsPath,
) -> None:
    exact = [
        (records[i].properties["solution_length"], i)
        for i in range(len(records))
        if records[i].status is RunStatus.EXACT_SOLUTION and run_paths[i] is not None
    ]
    if spec.save_paths is SavePaths.BEST:
        if not exact:
            return
        _, best_i = min(exact)
        keep = [best_i]
    else:
        keep = [i for i in range(len(run_paths)) if run_paths[i] is not None]
    out_dir.mkdir(parents=True, exist_ok=True)
    for i in keep:
        save_path_file(run_paths[i], out_dir, spec.problem.name, instance, i)
