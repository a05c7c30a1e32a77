"""Planner behavior: nearest neighbors, each planner type, progress, memory."""

from __future__ import annotations

import math
import random

import pytest

from plannerbench.geometry import (
    ProblemDef,
    Rect,
    Robot,
    SpaceKind,
    State,
    StateSpace,
    check_motion,
    distance,
    is_state_valid,
    load_world,
    sample_uniform,
)
from plannerbench.planners import (
    EDGE_BYTES,
    NODE_BYTES,
    Car1Control,
    NNIndex,
    PlannerSpec,
    PlanStatus,
    TerminationCondition,
    create_planner,
    nearest_neighbor,
    planner_type_names,
    propagate_car,
)

SE2 = StateSpace(SpaceKind.SE2, Rect(0, 0, 20, 20), rotation_weight=0.5)


def _problem(world_name: str, start: State, goal: State, kind=SpaceKind.R2, **kw) -> ProblemDef:
    world = load_world(world_name)
    return ProblemDef(
        name=world_name,
        space=StateSpace(kind, world.bounds),
        world=world,
        robot=Robot(),
        start=start,
        goal=goal,
        goal_tolerance=kw.pop("goal_tolerance", 0.5),
        **kw,
    )


def _solve(ptype: str, problem: ProblemDef, seed: int = 1, time_limit: float = 5.0, **params):
    spec = PlannerSpec("p", ptype, {k: str(v) for k, v in params.items()})
    planner = create_planner(spec, problem)
    return planner, planner.solve(problem, TerminationCondition(time_limit), seed)


# ---------------------------------------------------------------------------
# Nearest neighbors


def test_nearest_neighbor_brute_force_oracle():
    rng = random.Random(10)
    points = [sample_uniform(SE2, rng) for _ in range(200)]
    index = NNIndex(SE2)
    for p in points:
        index.add(p)
    for _ in range(50):
        q = sample_uniform(SE2, rng)
        dists = [distance(SE2, p, q) for p in points]
        best = min(range(len(points)), key=lambda i: (dists[i], i))
        assert nearest_neighbor(points, q, SE2) == best
        assert index.nearest(q) == best


def test_nn_index_distances_bit_equal_to_scalar():
    rng = random.Random(11)
    points = [sample_uniform(SE2, rng) for _ in range(300)]
    index = NNIndex(SE2)
    for p in points:
        index.add(p)
    for _ in range(20):
        q = sample_uniform(SE2, rng)
        vec = index.distances(q)
        for i, p in enumerate(points):
            assert vec[i] == distance(SE2, p, q)  # exact equality, not approx


def test_k_nearest_order_and_ties():
    space = StateSpace(SpaceKind.R2, Rect(0, 0, 20, 20))
    index = NNIndex(space)
    for s in (State(5, 5), State(3, 5), State(7, 5), State(5, 9)):
        index.add(s)
    got = index.k_nearest(State(5, 5), 3)
    assert list(got) == [0, 1, 2]  # equidistant 1 and 2 resolve by insertion order
    assert list(index.k_nearest(State(5, 5), 99)) == [0, 1, 2, 3]


# ---------------------------------------------------------------------------
# Termination and car propagation


def test_termination_condition_deadline_and_latch():
    now = [0.0]
    tc = TerminationCondition(2.0, clock=lambda: now[0])
    assert not tc.triggered()
    now[0] = 1.9
    assert not tc.triggered()
    now[0] = 2.1
    assert tc.triggered()
    now[0] = 0.0
    assert tc.triggered()  # stays triggered even if the clock rewinds
    tc2 = TerminationCondition(100.0, clock=lambda: now[0])
    tc2.signal()
    assert tc2.triggered()


def test_car1_control_validation():
    Car1Control(1.0, 0.1, 0.5)
    with pytest.raises(ValueError):
        Car1Control(1.0, 0.1, 0.0)


def test_propagate_car_straight_line():
    s = propagate_car(State(0, 0, 0), Car1Control(1.0, 0.0, 2.0), step=0.01)
    assert s.x == pytest.approx(2.0)
    assert s.y == pytest.approx(0.0, abs=1e-12)
    assert s.theta == pytest.approx(0.0, abs=1e-12)


def test_propagate_car_zero_speed_is_identity():
    start = State(3, 4, 0.7)
    s = propagate_car(start, Car1Control(0.0, 0.3, 1.0), step=0.05)
    assert (s.x, s.y, s.theta) == (start.x, start.y, start.theta)


def test_propagate_car_turn_rate_matches_model():
    # dtheta/dt = v/L tan(phi): heading after t seconds is vt/L tan(phi)
    u = Car1Control(0.5, 0.3, 1.0)
    s = propagate_car(State(0, 0, 0), u, step=1e-4, wheelbase=2.0)
    expected = 0.5 * 1.0 / 2.0 * math.tan(0.3)
    assert s.theta == pytest.approx(expected, abs=1e-3)


def test_propagate_car_finer_steps_converge():
    u = Car1Control(1.0, 0.4, 1.5)
    coarse = propagate_car(State(1, 1, 0.2), u, step=0.1)
    fine = propagate_car(State(1, 1, 0.2), u, step=0.001)
    finer = propagate_car(State(1, 1, 0.2), u, step=0.0005)
    d_cf = math.hypot(fine.x - coarse.x, fine.y - coarse.y)
    d_ff = math.hypot(finer.x - fine.x, finer.y - fine.y)
    assert d_ff < d_cf


# ---------------------------------------------------------------------------
# Planner construction


def test_planner_type_registry():
    assert set(planner_type_names()) == {"RRT", "RRTCONNECT", "PRM", "RRTSTAR", "PRMSTAR", "CRRT"}


def test_create_planner_unknown_type():
    p = _problem("empty", State(2, 2), State(18, 18))
    with pytest.raises(ValueError, match="unknown planner type"):
        create_planner(PlannerSpec("x", "ASTAR", {}), p)


def test_create_planner_rejects_unknown_and_bad_params():
    p = _problem("empty", State(2, 2), State(18, 18))
    with pytest.raises(ValueError, match="unknown parameter"):
        create_planner(PlannerSpec("x", "RRT", {"stride": "1"}), p)
    with pytest.raises(ValueError, match="goal_bias"):
        create_planner(PlannerSpec("x", "RRT", {"goal_bias": "1.5"}), p)
    with pytest.raises(ValueError, match="range"):
        create_planner(PlannerSpec("x", "RRT", {"range": "-1"}), p)


def test_space_kind_gating():
    r2 = _problem("empty", State(2, 2), State(18, 18))
    car = _problem("empty", State(2, 2), State(18, 18), kind=SpaceKind.CAR1)
    with pytest.raises(ValueError, match="CAR1"):
        create_planner(PlannerSpec("x", "CRRT", {}), r2)
    with pytest.raises(ValueError, match="requires"):
        create_planner(PlannerSpec("x", "RRT", {}), car)


def test_effective_settings_cover_all_params():
    p = _problem("empty", State(2, 2), State(18, 18))
    planner = create_planner(PlannerSpec("x", "RRT", {"goal_bias": "0.2"}), p)
    settings = planner.effective_settings()
    assert settings["type"] == "RRT"
    assert settings["goal_bias"] == "0.2"
    assert float(settings["range"]) == pytest.approx(0.1 * p.space.bounds.diagonal)
    assert all(isinstance(v, str) for v in settings.values())


def test_default_range_is_tenth_of_diagonal():
    p = _problem("empty", State(2, 2), State(18, 18))
    planner = create_planner(PlannerSpec("x", "RRT", {}), p)
    assert planner.params["range"] == pytest.approx(0.1 * math.sqrt(800))


# ---------------------------------------------------------------------------
# Solving


def test_solve_rejects_invalid_endpoints():
    p = _problem("corridor", State(10, 5), State(18, 3))  # start inside a slab
    planner = create_planner(PlannerSpec("x", "RRT", {}), p)
    with pytest.raises(ValueError, match="start"):
        planner.solve(p, TerminationCondition(1.0), 1)
    p2 = _problem("corridor", State(2, 17), State(10, 5))
    planner2 = create_planner(PlannerSpec("x", "RRT", {}), p2)
    with pytest.raises(ValueError, match="goal"):
        planner2.solve(p2, TerminationCondition(1.0), 1)


def test_solve_start_within_tolerance_of_goal():
    p = _problem("empty", State(10, 10), State(10.2, 10), goal_tolerance=0.5)
    for ptype in ("RRT", "RRTCONNECT", "PRM", "RRTSTAR", "PRMSTAR"):
        _, result = _solve(ptype, p)
        assert result.status is PlanStatus.EXACT_SOLUTION
        assert result.path == [p.start]
        assert result.run_properties["iterations"] == 0


@pytest.mark.parametrize("ptype", ["RRT", "RRTCONNECT", "PRM", "RRTSTAR", "PRMSTAR"])
def test_geometric_planners_solve_empty_world(ptype):
    p = _problem("empty", State(2, 2), State(18, 18), objective_threshold=math.inf)
    planner, result = _solve(ptype, p, seed=3)
    assert result.status is PlanStatus.EXACT_SOLUTION
    path = result.path
    assert path[0] == p.start
    assert distance(p.space, path[-1], p.goal) <= p.goal_tolerance
    for a, b in zip(path, path[1:]):
        assert check_motion(p, a, b)
    assert result.solution_difference == 0.0
    assert result.run_properties["graph_states"] >= 2
    assert result.memory_estimate >= NODE_BYTES * result.run_properties["graph_states"]


@pytest.mark.parametrize("ptype", ["RRT", "RRTCONNECT", "PRM"])
def test_planners_cross_the_corridor(ptype):
    p = _problem("corridor", State(2, 17), State(18, 3))
    _, result = _solve(ptype, p, seed=2)
    assert result.status is PlanStatus.EXACT_SOLUTION
    # any corridor solution must pass through the passage band
    assert any(9.0 < s.y < 11.0 and 5.0 <= s.x <= 15.0 for s in result.path)


def test_solve_deterministic_for_fixed_seed():
    p = _problem("corridor", State(2, 17), State(18, 3))
    for ptype in ("RRT", "RRTCONNECT", "PRM"):
        _, r1 = _solve(ptype, p, seed=9)
        _, r2 = _solve(ptype, p, seed=9)
        assert r1.path == r2.path
        assert r1.run_properties == r2.run_properties
        _, r3 = _solve(ptype, p, seed=10)
        assert r3.path != r1.path


def test_rrt_respects_range_param():
    p = _problem("empty", State(2, 2), State(18, 18), objective_threshold=math.inf)
    _, result = _solve("RRT", p, seed=4, range=1.0)
    steps = [distance(p.space, a, b) for a, b in zip(result.path, result.path[1:])]
    assert max(steps) <= 1.0 + 1e-9


def test_memory_estimate_tracks_graph():
    p = _problem("corridor", State(2, 17), State(18, 3))
    planner, result = _solve("PRM", p, seed=5)
    states = result.run_properties["graph_states"]
    assert planner.memory_estimate() >= NODE_BYTES * states
    assert planner.memory_estimate() == result.memory_estimate
    assert (planner.memory_estimate() - NODE_BYTES * states) % EDGE_BYTES == 0


# ---------------------------------------------------------------------------
# Optimizing planners and progress


def _collect_stream(planner):
    stream = []
    planner.register_progress_sink(lambda best, iters: stream.append((best, iters)))
    return stream


def test_rrtstar_converges_and_reports_progress():
    p = _problem("empty", State(2, 2), State(18, 18),
                 objective_threshold=0.0, goal_tolerance=0.5)
    spec = PlannerSpec("opt", "RRTSTAR", {})
    planner = create_planner(spec, p)
    assert planner.publishes_progress
    stream = _collect_stream(planner)
    tc = TerminationCondition(2.0)
    result = planner.solve(p, tc, 1)
    planner.publish_progress()
    assert result.status is PlanStatus.EXACT_SOLUTION
    defined = [b for b, _ in stream if b is not None]
    assert defined, "no progress published"
    assert all(x >= y - 1e-12 for x, y in zip(defined, defined[1:]))
    # final snapshot equals the raw path cost
    from plannerbench.paths import Path, path_length

    assert defined[-1] == path_length(Path(tuple(result.path), p.space))
    straight = distance(p.space, p.start, p.goal)
    assert path_length(Path(tuple(result.path), p.space)) <= 1.15 * straight


def test_rrtstar_threshold_inf_returns_first_solution():
    p = _problem("empty", State(2, 2), State(18, 18), objective_threshold=math.inf)
    _, result = _solve("RRTSTAR", p, seed=2, time_limit=5.0)
    assert result.status is PlanStatus.EXACT_SOLUTION


def test_rrtstar_threshold_value_stops_when_reached():
    p = _problem("empty", State(2, 2), State(18, 18),
                 objective_threshold=24.0)
    _, result = _solve("RRTSTAR", p, seed=2, time_limit=10.0)
    from plannerbench.paths import Path, path_length

    assert result.status is PlanStatus.EXACT_SOLUTION
    assert path_length(Path(tuple(result.path), p.space)) <= 24.0


def test_prmstar_converges_on_corridor():
    p = _problem("corridor", State(2, 17), State(18, 3), objective_threshold=0.0)
    spec = PlannerSpec("opt", "PRMSTAR", {})
    planner = create_planner(spec, p)
    stream = _collect_stream(planner)
    result = planner.solve(p, TerminationCondition(2.0), 3)
    planner.publish_progress()
    assert result.status is PlanStatus.EXACT_SOLUTION
    defined = [b for b, _ in stream if b is not None]
    assert defined
    assert all(x >= y - 1e-12 for x, y in zip(defined, defined[1:]))
    for a, b in zip(result.path, result.path[1:]):
        assert check_motion(p, a, b)


def test_progress_snapshot_before_solution_is_none():
    p = _problem("corridor", State(2, 17), State(18, 3), objective_threshold=0.0)
    planner = create_planner(PlannerSpec("opt", "RRTSTAR", {}), p)
    seen = _collect_stream(planner)
    planner.publish_progress()
    assert seen == [(None, 0)]
    planner.clear_progress_sinks()
    planner.publish_progress()
    assert seen == [(None, 0)]


def test_non_publisher_ignores_sinks():
    p = _problem("empty", State(2, 2), State(18, 18))
    planner = create_planner(PlannerSpec("x", "RRT", {}), p)
    assert not planner.publishes_progress
    seen = _collect_stream(planner)
    planner.publish_progress()
    assert seen == []


# ---------------------------------------------------------------------------
# Kinodynamic car


def test_crrt_solves_trivial_car_world():
    p = _problem("trivial", State(2, 2, 0), State(16, 4, 0),
                 kind=SpaceKind.CAR1, goal_tolerance=1.0)
    planner, result = _solve("CRRT", p, seed=1)
    assert not planner.simplifiable
    assert planner.publishes_progress
    assert result.status is PlanStatus.EXACT_SOLUTION
    path = result.path
    assert path[0] == p.start
    assert distance(p.space, path[-1], p.goal) <= 1.0
    # waypoints are dense enough that validity checks cover the motion
    for a, b in zip(path, path[1:]):
        assert is_state_valid(p, b)
        assert distance(p.space, a, b) <= p.collision_resolution + 1e-9


def test_crrt_rejects_inconsistent_bounds():
    p = _problem("trivial", State(2, 2, 0), State(16, 4, 0),
                 kind=SpaceKind.CAR1, goal_tolerance=1.0)
    with pytest.raises(ValueError, match="v_min"):
        create_planner(PlannerSpec("x", "CRRT", {"v_min": "2", "v_max": "1"}), p)
    with pytest.raises(ValueError, match="duration"):
        create_planner(
            PlannerSpec("x", "CRRT", {"duration_min": "2", "duration_max": "1"}), p
        )


def test_crrt_deterministic():
    p = _problem("trivial", State(2, 2, 0), State(16, 4, 0),
                 kind=SpaceKind.CAR1, goal_tolerance=1.0)
    _, r1 = _solve("CRRT", p, seed=6)
    _, r2 = _solve("CRRT", p, seed=6)
    assert r1.path == r2.path
    assert r1.run_properties == r2.run_properties
