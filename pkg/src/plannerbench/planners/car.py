"""First-order car: Euler propagation and a control-sampling RRT.

The car model is x' = v cos(theta), y' = v sin(theta),
theta' = (v / wheelbase) tan(steering). CRRT has no steering function; each
extension propagates a handful of random controls and keeps the one ending
closest to the sampled target.
"""

from __future__ import annotations

import math
import random

from ..geometry import ProblemDef, SpaceKind, State, distance, is_state_valid, sample_uniform
from .base import (
    Car1Control,
    ParamDef,
    Planner,
    PlannerResult,
    TerminationCondition,
    _float_in,
    _positive_float,
    _positive_int,
    _plain_float,
    register_planner_type,
)
from .nn import NNIndex


def propagate_car(s: State, u: Car1Control, step: float, wheelbase: float = 1.0) -> State:
    """Explicit Euler integration with sub-steps no longer than `step` seconds."""
    if step <= 0:
        raise ValueError("integration step must be positive")
    n = max(1, math.ceil(u.duration / step))
    h = u.duration / n
    x, y, theta = s.x, s.y, s.theta
    rate = (u.speed / wheelbase) * math.tan(u.steering)
    for _ in range(n):
        x += h * u.speed * math.cos(theta)
        y += h * u.speed * math.sin(theta)
        theta += h * rate
    return State(x, y, theta)


def _propagate_checked(
    problem: ProblemDef, s: State, u: Car1Control, step: float, wheelbase: float
) -> list[State] | None:
    """Propagate and validate; returns waypoints spaced under collision_resolution.

    The returned list ends with the final state and excludes the source, or is
    None if any checked state along the way is invalid.
    """
    n = max(1, math.ceil(u.duration / step))
    h = u.duration / n
    x, y, theta = s.x, s.y, s.theta
    rate = (u.speed / wheelbase) * math.tan(u.steering)
    gap = 0.45 * problem.collision_resolution
    kept: list[State] = []
    last = s
    acc = 0.0
    for i in range(n):
        x += h * u.speed * math.cos(theta)
        y += h * u.speed * math.sin(theta)
        theta += h * rate
        current = State(x, y, theta)
        acc += distance(problem.space, last, current)
        last = current
        if acc >= gap or i == n - 1:
            if not is_state_valid(problem, current):
                return None
            kept.append(current)
            acc = 0.0
    return kept


@register_planner_type
class CRRT(Planner):
    """Control-sampling RRT for the first-order car."""

    type_name = "CRRT"
    space_kinds = frozenset((SpaceKind.CAR1,))
    publishes_progress = True
    simplifiable = False
    PARAMS = {
        "control_samples": ParamDef(_positive_int, lambda p: 10),
        "goal_bias": ParamDef(_float_in(0.0, 1.0), lambda p: 0.05),
        "wheelbase": ParamDef(_positive_float, lambda p: 1.0),
        "v_min": ParamDef(_plain_float, lambda p: -1.0),
        "v_max": ParamDef(_plain_float, lambda p: 1.0),
        "steer_max": ParamDef(_positive_float, lambda p: 0.5),
        "duration_min": ParamDef(_positive_float, lambda p: 0.1),
        "duration_max": ParamDef(_positive_float, lambda p: 1.0),
        "integration_step": ParamDef(_positive_float, lambda p: 0.05),
    }

    def __init__(self, spec, problem):
        super().__init__(spec, problem)
        if self.params["v_min"] > self.params["v_max"]:
            raise ValueError("v_min must not exceed v_max")
        if self.params["duration_min"] > self.params["duration_max"]:
            raise ValueError("duration_min must not exceed duration_max")

    def _plan(self, problem: ProblemDef, tc: TerminationCondition, rng: random.Random) -> PlannerResult:
        space = problem.space
        start, goal = problem.start, problem.goal
        n_controls = self.params["control_samples"]
        goal_bias = self.params["goal_bias"]
        wheelbase = self.params["wheelbase"]
        v_min, v_max = self.params["v_min"], self.params["v_max"]
        steer_max = self.params["steer_max"]
        d_min, d_max = self.params["duration_min"], self.params["duration_max"]
        step = self.params["integration_step"]

        states = [start]
        parents = [-1]
        motions: list[list[State]] = [[]]
        nn = NNIndex(space)
        nn.add(start)
        best_d = distance(space, start, goal)
        best_i = 0
        exact_i = -1
        iterations = 0

        while not tc.triggered():
            iterations += 1
            q = goal if rng.random() < goal_bias else sample_uniform(space, rng)
            ni = nn.nearest(q)
            source = states[ni]
            chosen: list[State] | None = None
            chosen_d = math.inf
            for _ in range(n_controls):
                u = Car1Control(
                    rng.uniform(v_min, v_max),
                    rng.uniform(-steer_max, steer_max),
                    rng.uniform(d_min, d_max),
                )
                waypoints = _propagate_checked(problem, source, u, step, wheelbase)
                if waypoints is None:
                    continue
                d = distance(space, waypoints[-1], q)
                if d < chosen_d:
                    chosen, chosen_d = waypoints, d
            if chosen is None:
                self._snapshot = (best_d, iterations)
                continue
            end = chosen[-1]
            states.append(end)
            parents.append(ni)
            motions.append(chosen)
            idx = nn.add(end)
            self._set_memory(len(states), len(states) - 1)
            gd = distance(space, end, goal)
            if gd < best_d:
                best_d = gd
                best_i = idx
            self._snapshot = (best_d, iterations)
            if gd <= problem.goal_tolerance:
                exact_i = idx
                break

        leaf = exact_i if exact_i >= 0 else best_i
        path: list[State] = []
        chain = []
        i = leaf
        while i >= 0:
            chain.append(i)
            i = parents[i]
        chain.reverse()
        path.append(states[chain[0]])
        for node in chain[1:]:
            path.extend(motions[node])
        if exact_i >= 0:
            return self._finish(problem, path, None, 0.0,
                                len(states), len(states) - 1, iterations)
        return self._finish(problem, None, path, best_d,
                            len(states), len(states) - 1, iterations)
