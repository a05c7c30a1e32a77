"""RRT and RRT-Connect: non-optimizing tree planners for R2 and SE2."""

from __future__ import annotations

import random

from ..geometry import ProblemDef, State, check_motion, distance, interpolate, sample_uniform
from .base import (
    ParamDef,
    Planner,
    PlannerResult,
    TerminationCondition,
    _float_in,
    _positive_float,
    register_planner_type,
)
from .nn import NNIndex


def _default_range(problem: ProblemDef) -> float:
    return 0.1 * problem.space.bounds.diagonal


def extract_path(states: list[State], parents: list[int], leaf: int) -> list[State]:
    path = []
    i = leaf
    while i >= 0:
        path.append(states[i])
        i = parents[i]
    path.reverse()
    return path


@register_planner_type
class RRT(Planner):
    """Grow one tree from the start with goal-biased uniform sampling."""

    type_name = "RRT"
    PARAMS = {
        "range": ParamDef(_positive_float, _default_range),
        "goal_bias": ParamDef(_float_in(0.0, 1.0), lambda p: 0.05),
    }

    def _plan(self, problem: ProblemDef, tc: TerminationCondition, rng: random.Random) -> PlannerResult:
        space = problem.space
        start, goal = problem.start, problem.goal
        max_step = self.params["range"]
        goal_bias = self.params["goal_bias"]

        states = [start]
        parents = [-1]
        nn = NNIndex(space)
        nn.add(start)
        best_i = 0
        best_d = distance(space, start, goal)
        exact = None
        iterations = 0

        while not tc.triggered():
            iterations += 1
            q = goal if rng.random() < goal_bias else sample_uniform(space, rng)
            ni = nn.nearest(q)
            near = states[ni]
            d = distance(space, near, q)
            if d == 0.0:
                continue
            target = q if d <= max_step else interpolate(space, near, q, max_step / d)
            if not check_motion(problem, near, target):
                continue
            states.append(target)
            parents.append(ni)
            idx = nn.add(target)
            self._set_memory(len(states), len(states) - 1)
            gd = distance(space, target, goal)
            if gd < best_d:
                best_d = gd
                best_i = idx
            if gd <= problem.goal_tolerance:
                exact = extract_path(states, parents, idx)
                break

        approx = None if exact else extract_path(states, parents, best_i)
        return self._finish(problem, exact, approx, 0.0 if exact else best_d,
                            len(states), len(states) - 1, iterations)


class _Tree:
    __slots__ = ("states", "parents", "nn", "root_is_start")

    def __init__(self, root: State, space, root_is_start: bool):
        self.states = [root]
        self.parents = [-1]
        self.nn = NNIndex(space)
        self.nn.add(root)
        self.root_is_start = root_is_start


@register_planner_type
class RRTConnect(Planner):
    """Bidirectional RRT: alternate extending two trees and connecting them."""

    type_name = "RRTCONNECT"
    PARAMS = {
        "range": ParamDef(_positive_float, _default_range),
    }

    TRAPPED, ADVANCED, REACHED = 0, 1, 2

    def _extend(self, problem: ProblemDef, tree: _Tree, q: State) -> tuple[int, int]:
        space = problem.space
        ni = tree.nn.nearest(q)
        near = tree.states[ni]
        d = distance(space, near, q)
        if d == 0.0:
            return self.REACHED, ni
        max_step = self.params["range"]
        if d <= max_step:
            target, outcome = q, self.REACHED
        else:
            target, outcome = interpolate(space, near, q, max_step / d), self.ADVANCED
        if not check_motion(problem, near, target):
            return self.TRAPPED, -1
        tree.states.append(target)
        tree.parents.append(ni)
        idx = tree.nn.add(target)
        return outcome, idx

    def _plan(self, problem: ProblemDef, tc: TerminationCondition, rng: random.Random) -> PlannerResult:
        space = problem.space
        start, goal = problem.start, problem.goal
        ta = _Tree(start, space, True)
        tb = _Tree(goal, space, False)
        iterations = 0
        exact = None

        while not tc.triggered():
            iterations += 1
            q = sample_uniform(space, rng)
            status, idx = self._extend(problem, ta, q)
            if status != self.TRAPPED:
                bridge = ta.states[idx]
                while True:
                    status_b, idx_b = self._extend(problem, tb, bridge)
                    if status_b != self.ADVANCED:
                        break
                self._set_memory(len(ta.states) + len(tb.states),
                                 len(ta.states) + len(tb.states) - 2)
                if status_b == self.REACHED:
                    half_a = extract_path(ta.states, ta.parents, idx)
                    half_b = extract_path(tb.states, tb.parents, idx_b)
                    if ta.root_is_start:
                        exact = half_a + half_b[::-1][1:]
                    else:
                        exact = half_b + half_a[::-1][1:]
                    break
            ta, tb = tb, ta

        n_states = len(ta.states) + len(tb.states)
        n_edges = n_states - 2
        start_tree = ta if ta.root_is_start else tb
        best_i = 0
        best_d = distance(space, start_tree.states[0], goal)
        if exact is None:
            for i, s in enumerate(start_tree.states):
                d = distance(space, s, goal)
                if d < best_d:
                    best_d = d
                    best_i = i
            approx = extract_path(start_tree.states, start_tree.parents, best_i)
        else:
            approx, best_d = None, 0.0
        return self._finish(problem, exact, approx, best_d, n_states, n_edges, iterations)
