"""RRT*: asymptotically optimal tree planner with k-nearest rewiring."""

from __future__ import annotations

import math
import random

from ..geometry import ProblemDef, check_motion, distance, interpolate, sample_uniform
from .base import (
    ParamDef,
    Planner,
    PlannerResult,
    TerminationCondition,
    _float_in,
    _positive_float,
    cost_model_for,
    register_planner_type,
)
from .nn import NNIndex
from .rrt import _default_range, extract_path


@register_planner_type
class RRTStar(Planner):
    """RRT with choose-parent and rewire steps over k-nearest neighborhoods.

    k = ceil(rewire_factor * e * (1 + 1/dim) * ln n). The optimality threshold
    on the problem controls termination: 0 runs to the deadline, +inf stops at
    the first solution, anything else stops once the best cost drops below it.
    """

    type_name = "RRTSTAR"
    publishes_progress = True
    PARAMS = {
        "range": ParamDef(_positive_float, _default_range),
        "goal_bias": ParamDef(_float_in(0.0, 1.0), lambda p: 0.05),
        "rewire_factor": ParamDef(_positive_float, lambda p: 1.1),
    }

    def _plan(self, problem: ProblemDef, tc: TerminationCondition, rng: random.Random) -> PlannerResult:
        space = problem.space
        start, goal = problem.start, problem.goal
        cm = cost_model_for(problem)
        max_step = self.params["range"]
        goal_bias = self.params["goal_bias"]
        k_const = self.params["rewire_factor"] * math.e * (1.0 + 1.0 / space.kind.dimension)
        threshold = problem.objective_threshold

        states = [start]
        parents = [-1]
        costs = [0.0]
        edge_costs = [0.0]
        children: list[list[int]] = [[]]
        nn = NNIndex(space)
        nn.add(start)

        goal_nodes: list[int] = []
        best_cost: float | None = None
        best_goal_node = -1
        best_d = distance(space, start, goal)
        best_i = 0
        iterations = 0

        while not tc.triggered():
            iterations += 1
            q = goal if rng.random() < goal_bias else sample_uniform(space, rng)
            ni = nn.nearest(q)
            near = states[ni]
            d = distance(space, near, q)
            if d == 0.0:
                self._snapshot = (best_cost, iterations)
                continue
            target = q if d <= max_step else interpolate(space, near, q, max_step / d)
            if not check_motion(problem, near, target):
                self._snapshot = (best_cost, iterations)
                continue

            n = len(states)
            k = min(n, max(1, math.ceil(k_const * math.log(n + 1))))
            neighbors = nn.k_nearest(target, k)

            parent = ni
            parent_edge = cm.edge_cost(near, target)
            new_cost = cm.combine(costs[ni], parent_edge)
            for j in neighbors:
                if j == ni:
                    continue
                e = cm.edge_cost(states[j], target)
                c = cm.combine(costs[j], e)
                if c < new_cost and check_motion(problem, states[j], target):
                    parent, new_cost, parent_edge = j, c, e

            idx = len(states)
            states.append(target)
            parents.append(parent)
            costs.append(new_cost)
            edge_costs.append(parent_edge)
            children.append([])
            children[parent].append(idx)
            nn.add(target)

            for j in neighbors:
                if j == parent:
                    continue
                e = cm.edge_cost(target, states[j])
                c = cm.combine(new_cost, e)
                if c < costs[j] and check_motion(problem, target, states[j]):
                    children[parents[j]].remove(j)
                    parents[j] = idx
                    edge_costs[j] = e
                    children[idx].append(j)
                    costs[j] = c
                    stack = [j]
                    while stack:
                        u = stack.pop()
                        for ch in children[u]:
                            costs[ch] = cm.combine(costs[u], edge_costs[ch])
                            stack.append(ch)

            gd = distance(space, target, goal)
            if gd < best_d:
                best_d = gd
                best_i = idx
            if gd <= problem.goal_tolerance:
                goal_nodes.append(idx)
            if goal_nodes:
                best_cost, best_goal_node = min((costs[g], g) for g in goal_nodes)
            self._set_memory(len(states), len(states) - 1)
            self._snapshot = (best_cost, iterations)
            if best_cost is not None:
                if math.isinf(threshold):
                    break
                if threshold > 0.0 and best_cost <= threshold:
                    break

        if best_goal_node >= 0:
            exact = extract_path(states, parents, best_goal_node)
            approx, final_d = None, 0.0
        else:
            exact = None
            approx = extract_path(states, parents, best_i)
            final_d = best_d
        return self._finish(problem, exact, approx, final_d,
                            len(states), len(states) - 1, iterations)
