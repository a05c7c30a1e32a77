"""PRM and PRM*: roadmap planners.

PRM grows a k-nearest roadmap and stops at the first start-goal connection.
PRM* uses the log-growing neighborhood rule and keeps refining until its
optimality threshold or the termination condition fires.
"""

from __future__ import annotations

import heapq
import math
import random

from ..geometry import ProblemDef, State, check_motion, distance, is_state_valid, sample_uniform
from .base import (
    CostModel,
    LengthCost,
    ParamDef,
    Planner,
    PlannerResult,
    TerminationCondition,
    _positive_float,
    _positive_int,
    cost_model_for,
    register_planner_type,
)
from .nn import NNIndex

START, GOAL = 0, 1


class _UnionFind:
    def __init__(self):
        self.parent: list[int] = []

    def make(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


class _Roadmap:
    """Undirected milestone graph; edge costs stored per direction."""

    def __init__(self, space):
        self.states: list[State] = []
        self.adj: list[dict[int, float]] = []
        self.nn = NNIndex(space)
        self.n_edges = 0

    def add(self, s: State) -> int:
        self.states.append(s)
        self.adj.append({})
        return self.nn.add(s)

    def connect(self, i: int, j: int, cost_ij: float, cost_ji: float) -> None:
        self.adj[i][j] = cost_ij
        self.adj[j][i] = cost_ji
        self.n_edges += 1

    def dijkstra(self, source: int, cm: CostModel) -> tuple[list[float], list[int]]:
        n = len(self.states)
        dist = [math.inf] * n
        pred = [-1] * n
        dist[source] = cm.zero
        heap = [(cm.zero, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for v, w in self.adj[u].items():
                nd = cm.combine(d, w)
                if nd < dist[v]:
                    dist[v] = nd
                    pred[v] = u
                    heapq.heappush(heap, (nd, v))
        return dist, pred

    def path_to(self, pred: list[int], target: int) -> list[State]:
        idxs = []
        i = target
        while i >= 0:
            idxs.append(i)
            i = pred[i]
        idxs.reverse()
        return [self.states[i] for i in idxs]


def _best_reachable(problem: ProblemDef, rm: _Roadmap, dist: list[float]) -> tuple[int, float]:
    """Closest-to-goal milestone among those reachable from the start."""
    best_i, best_d = START, distance(problem.space, rm.states[START], problem.goal)
    for i, s in enumerate(rm.states):
        if dist[i] == math.inf:
            continue
        d = distance(problem.space, s, problem.goal)
        if d < best_d:
            best_i, best_d = i, d
    return best_i, best_d


@register_planner_type
class PRM(Planner):
    """Probabilistic roadmap with k-nearest connections; non-optimizing."""

    type_name = "PRM"
    PARAMS = {
        "k": ParamDef(_positive_int, lambda p: 10),
    }

    def _plan(self, problem: ProblemDef, tc: TerminationCondition, rng: random.Random) -> PlannerResult:
        space = problem.space
        k = self.params["k"]
        rm = _Roadmap(space)
        uf = _UnionFind()
        length = LengthCost(problem)
        rm.add(problem.start)
        uf.make()
        rm.add(problem.goal)
        uf.make()
        iterations = 0
        solved = False

        while not tc.triggered():
            iterations += 1
            q = sample_uniform(space, rng)
            if not is_state_valid(problem, q):
                continue
            neighbors = rm.nn.k_nearest(q, k)
            idx = rm.add(q)
            uf.make()
            for j in neighbors:
                if uf.find(idx) == uf.find(j):
                    continue
                if check_motion(problem, q, rm.states[j]):
                    w = length.edge_cost(q, rm.states[j])
                    rm.connect(idx, j, w, w)
                    uf.union(idx, j)
            self._set_memory(len(rm.states), rm.n_edges)
            if uf.find(START) == uf.find(GOAL):
                solved = True
                break

        dist, pred = rm.dijkstra(START, length)
        if solved and dist[GOAL] < math.inf:
            exact = rm.path_to(pred, GOAL)
            return self._finish(problem, exact, None, 0.0,
                                len(rm.states), rm.n_edges, iterations)
        best_i, best_d = _best_reachable(problem, rm, dist)
        approx = rm.path_to(pred, best_i)
        return self._finish(problem, None, approx, best_d,
                            len(rm.states), rm.n_edges, iterations)


@register_planner_type
class PRMStar(Planner):
    """PRM with the k = ceil(rewire_factor * e * (1+1/dim) * ln n) connection rule."""

    type_name = "PRMSTAR"
    publishes_progress = True
    PARAMS = {
        "rewire_factor": ParamDef(_positive_float, lambda p: 1.1),
        "recompute_interval": ParamDef(_positive_int, lambda p: 25),
    }

    def _plan(self, problem: ProblemDef, tc: TerminationCondition, rng: random.Random) -> PlannerResult:
        space = problem.space
        cm = cost_model_for(problem)
        k_const = self.params["rewire_factor"] * math.e * (1.0 + 1.0 / space.kind.dimension)
        interval = self.params["recompute_interval"]
        threshold = problem.objective_threshold

        rm = _Roadmap(space)
        uf = _UnionFind()
        rm.add(problem.start)
        uf.make()
        rm.add(problem.goal)
        uf.make()

        iterations = 0
        since_recompute = 0
        connected = False
        best_cost: float | None = None
        exact: list[State] | None = None
        stop = False

        def recompute() -> None:
            nonlocal best_cost, exact
            dist, pred = rm.dijkstra(START, cm)
            if dist[GOAL] < math.inf:
                best_cost = dist[GOAL]
                exact = rm.path_to(pred, GOAL)

        while not stop and not tc.triggered():
            iterations += 1
            q = sample_uniform(space, rng)
            if not is_state_valid(problem, q):
                self._snapshot = (best_cost, iterations)
                continue
            n = len(rm.states)
            k = min(n, max(1, math.ceil(k_const * math.log(n + 1))))
            neighbors = rm.nn.k_nearest(q, k)
            idx = rm.add(q)
            uf.make()
            for j in neighbors:
                if check_motion(problem, q, rm.states[j]):
                    rm.connect(idx, j, cm.edge_cost(q, rm.states[j]),
                               cm.edge_cost(rm.states[j], q))
                    uf.union(idx, j)
            self._set_memory(len(rm.states), rm.n_edges)
            since_recompute += 1

            newly_connected = not connected and uf.find(START) == uf.find(GOAL)
            if newly_connected:
                connected = True
            if newly_connected or (connected and since_recompute >= interval):
                since_recompute = 0
                recompute()
                if best_cost is not None:
                    if math.isinf(threshold):
                        stop = True
                    elif threshold > 0.0 and best_cost <= threshold:
                        stop = True
            self._snapshot = (best_cost, iterations)

        if connected:
            recompute()
            self._snapshot = (best_cost, iterations)
        if exact is not None:
            return self._finish(problem, exact, None, 0.0,
                                len(rm.states), rm.n_edges, iterations)
        dist, pred = rm.dijkstra(START, LengthCost(problem))
        best_i, best_d = _best_reachable(problem, rm, dist)
        approx = rm.path_to(pred, best_i)
        return self._finish(problem, None, approx, best_d,
                            len(rm.states), rm.n_edges, iterations)
