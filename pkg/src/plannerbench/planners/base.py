"""Planner plumbing: specs, termination, results, progress publishing, cost models.

All planners share one cooperative contract: they poll a TerminationCondition
at least once per iteration, maintain an O(1) progress snapshot a collector
thread can read at any moment, and report a documented memory estimate of
(24 + 64) bytes per node plus 32 bytes per edge.
"""

from __future__ import annotations

import math
import random
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from ..geometry import (
    Objective,
    ProblemDef,
    SpaceKind,
    State,
    distance,
    is_state_valid,
)
from ..paths import DELTA, EPSILON, state_cost
from ..records import ProgressSample

NODE_BYTES = 24 + 64
EDGE_BYTES = 32


class PlanStatus(Enum):
    EXACT_SOLUTION = "EXACT_SOLUTION"
    APPROXIMATE_SOLUTION = "APPROXIMATE_SOLUTION"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class PlannerSpec:
    """A named planner instance: type plus raw string parameters."""

    instance_name: str
    type: str
    params: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.instance_name.strip():
            raise ValueError("planner instance name must be nonempty")
        if any(c in self.instance_name for c in "\t\n\r"):
            raise ValueError("planner instance name must not contain whitespace controls")


class TerminationCondition:
    """Deadline plus an externally settable stop flag; once signaled, stays signaled."""

    def __init__(self, time_limit: float | None = None, clock: Callable[[], float] = time.monotonic):
        self._clock = clock
        self._deadline = None if time_limit is None else clock() + time_limit
        self._stop = threading.Event()

    def signal(self) -> None:
        self._stop.set()

    def triggered(self) -> bool:
        if self._stop.is_set():
            return True
        if self._deadline is not None and self._clock() >= self._deadline:
            self._stop.set()
            return True
        return False


@dataclass
class PlannerResult:
    """Outcome of one solve call.

    run_properties always includes integer `graph_states` and `iterations`.
    solution_difference is the space distance from the best reached state to
    the goal; zero for exact solutions.
    """

    status: PlanStatus
    path: list[State] | None
    solution_difference: float
    run_properties: dict[str, object]
    memory_estimate: int


@dataclass(frozen=True)
class Car1Control:
    """Constant control for the first-order car."""

    speed: float
    steering: float
    duration: float

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("control duration must be positive")


# ---------------------------------------------------------------------------
# Cost models for optimizing planners


class CostModel:
    """Edge costs an optimizing planner minimizes; combine must be monotone."""

    def edge_cost(self, a: State, b: State) -> float:
        raise NotImplementedError

    def combine(self, acc: float, edge: float) -> float:
        return acc + edge

    zero = 0.0


class LengthCost(CostModel):
    def __init__(self, problem: ProblemDef):
        self.space = problem.space

    def edge_cost(self, a: State, b: State) -> float:
        return distance(self.space, a, b)


class WorkCost(CostModel):
    """Uphill reciprocal-clearance increments plus a small length penalty.

    Telescopes so that a tree path's accumulated cost equals the mechanical
    work of the vertex sequence.
    """

    def __init__(self, problem: ProblemDef):
        self.problem = problem
        self._cache: dict[State, float] = {}

    def _c(self, s: State) -> float:
        v = self._cache.get(s)
        if v is None:
            v = state_cost(self.problem, s)
            self._cache[s] = v
        return v

    def edge_cost(self, a: State, b: State) -> float:
        return max(0.0, self._c(b) - self._c(a)) + EPSILON * distance(self.problem.space, a, b)


class ClearanceCost(CostModel):
    """Minimax reciprocal clearance: minimizing it maximizes the worst vertex clearance."""

    def __init__(self, problem: ProblemDef):
        self.problem = problem
        self._cache: dict[State, float] = {}

    def _c(self, s: State) -> float:
        v = self._cache.get(s)
        if v is None:
            v = state_cost(self.problem, s)
            self._cache[s] = v
        return v

    def edge_cost(self, a: State, b: State) -> float:
        ca, cb = self._c(a), self._c(b)
        return ca if ca >= cb else cb

    def combine(self, acc: float, edge: float) -> float:
        return acc if acc >= edge else edge


def cost_model_for(problem: ProblemDef) -> CostModel:
    if problem.objective in (Objective.NONE, Objective.LENGTH):
        return LengthCost(problem)
    if problem.objective is Objective.WORK:
        return WorkCost(problem)
    if problem.objective is Objective.CLEARANCE:
        return ClearanceCost(problem)
    raise ValueError(f"no cost model for objective {problem.objective}")


# ---------------------------------------------------------------------------
# Parameter tables


@dataclass(frozen=True)
class ParamDef:
    parse: Callable[[str], object]
    default: Callable[[ProblemDef], object]


def _float_in(lo: float, hi: float) -> Callable[[str], float]:
    def parse(raw: str) -> float:
        v = float(raw)
        if not lo <= v <= hi:
            raise ValueError(f"value {v} outside [{lo}, {hi}]")
        return v

    return parse


def _positive_float(raw: str) -> float:
    v = float(raw)
    if v <= 0:
        raise ValueError(f"value must be positive, got {v}")
    return v


def _positive_int(raw: str) -> int:
    v = int(raw)
    if v <= 0:
        raise ValueError(f"value must be a positive integer, got {v}")
    return v


def _plain_float(raw: str) -> float:
    return float(raw)


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


# ---------------------------------------------------------------------------
# Base planner and registry


class Planner:
    """Base class: parameter handling, progress snapshots, memory accounting."""

    type_name: str = ""
    space_kinds: frozenset[SpaceKind] = frozenset((SpaceKind.R2, SpaceKind.SE2))
    publishes_progress = False
    simplifiable = True
    PARAMS: dict[str, ParamDef] = {}

    def __init__(self, spec: PlannerSpec, problem: ProblemDef):
        if problem.space.kind not in self.space_kinds:
            kinds = ", ".join(sorted(k.value for k in self.space_kinds))
            raise ValueError(
                f"planner type {self.type_name} requires a {kinds} space, "
                f"got {problem.space.kind.value}"
            )
        self.spec = spec
        self.problem = problem
        self.params: dict[str, object] = {}
        for key, raw in spec.params.items():
            pdef = self.PARAMS.get(key)
            if pdef is None:
                valid = ", ".join(sorted(self.PARAMS)) or "(none)"
                raise ValueError(
                    f"unknown parameter {key!r} for planner type {self.type_name}; valid: {valid}"
                )
            try:
                self.params[key] = pdef.parse(raw)
            except ValueError as exc:
                raise ValueError(
                    f"bad value {raw!r} for parameter {key!r} of {spec.instance_name}: {exc}"
                ) from None
        for key, pdef in self.PARAMS.items():
            if key not in self.params:
                self.params[key] = pdef.default(problem)
        self._sinks: list[Callable[[float | None, int], None]] = []
        self._snapshot: tuple[float | None, int] = (None, 0)
        self._mem = NODE_BYTES

    def effective_settings(self) -> dict[str, str]:
        """All effective parameters as strings, for logging."""
        settings = {"type": self.type_name}
        for key in self.PARAMS:
            settings[key] = _fmt(self.params[key])
        return settings

    # Progress publishing: the planner updates a snapshot tuple each iteration
    # (an atomic reference swap); the collector triggers sink callbacks.
    def register_progress_sink(self, sink: Callable[[float | None, int], None]) -> None:
        self._sinks.append(sink)

    def clear_progress_sinks(self) -> None:
        self._sinks.clear()

    def publish_progress(self) -> None:
        if not self.publishes_progress:
            return
        best, iterations = self._snapshot
        for sink in self._sinks:
            sink(best, iterations)

    def memory_estimate(self) -> int:
        return self._mem

    def _set_memory(self, nodes: int, edges: int) -> None:
        self._mem = NODE_BYTES * nodes + EDGE_BYTES * edges

    def solve(self, problem: ProblemDef, tc: TerminationCondition, seed: int) -> PlannerResult:
        if not is_state_valid(problem, problem.start):
            raise ValueError("start state is invalid (out of bounds or in collision)")
        if not is_state_valid(problem, problem.goal):
            raise ValueError("goal state is invalid (out of bounds or in collision)")
        self._snapshot = (None, 0)
        self._set_memory(1, 0)
        if distance(problem.space, problem.start, problem.goal) <= problem.goal_tolerance:
            props = {"graph_states": 1, "iterations": 0}
            return PlannerResult(PlanStatus.EXACT_SOLUTION, [problem.start], 0.0, props, self._mem)
        return self._plan(problem, tc, random.Random(seed))

    def _plan(self, problem: ProblemDef, tc: TerminationCondition, rng: random.Random) -> PlannerResult:
        raise NotImplementedError

    def _finish(
        self,
        problem: ProblemDef,
        exact_path: list[State] | None,
        approx_path: list[State] | None,
        best_goal_distance: float,
        graph_states: int,
        edges: int,
        iterations: int,
    ) -> PlannerResult:
        props = {"graph_states": graph_states, "iterations": iterations}
        self._set_memory(graph_states, edges)
        if exact_path is not None:
            return PlannerResult(PlanStatus.EXACT_SOLUTION, exact_path, 0.0, props, self._mem)
        start_distance = distance(problem.space, problem.start, problem.goal)
        if approx_path is not None and best_goal_distance < start_distance:
            return PlannerResult(
                PlanStatus.APPROXIMATE_SOLUTION, approx_path, best_goal_distance, props, self._mem
            )
        return PlannerResult(PlanStatus.TIMEOUT, None, best_goal_distance, props, self._mem)


PLANNER_TYPES: dict[str, type[Planner]] = {}


def register_planner_type(cls: type[Planner]) -> type[Planner]:
    """Register a planner class under its type_name. Usable as a decorator."""
    if not cls.type_name:
        raise ValueError("planner class must set type_name")
    if cls.type_name in PLANNER_TYPES:
        raise ValueError(f"planner type {cls.type_name!r} already registered")
    PLANNER_TYPES[cls.type_name] = cls
    return cls


def planner_type_names() -> list[str]:
    return sorted(PLANNER_TYPES)


def create_planner(spec: PlannerSpec, problem: ProblemDef) -> Planner:
    cls = PLANNER_TYPES.get(spec.type)
    if cls is None:
        raise ValueError(
            f"unknown planner type {spec.type!r}; known types: {', '.join(planner_type_names())}"
        )
    return cls(spec, problem)
