"""Geometry core: angles, metrics, polygons, worlds, validity checks."""

from __future__ import annotations

import math
import random

import pytest

from plannerbench.geometry import (
    BUNDLED_WORLDS,
    Objective,
    Polygon,
    ProblemDef,
    Rect,
    Robot,
    RobotShape,
    SpaceKind,
    State,
    StateSpace,
    World,
    check_motion,
    clearance,
    distance,
    format_world,
    interpolate,
    is_state_valid,
    load_world,
    parse_world,
    point_segment_distance,
    polygons_intersect,
    sample_uniform,
    segments_intersect,
    wrap_angle,
)

R2 = StateSpace(SpaceKind.R2, Rect(0, 0, 20, 20))
SE2 = StateSpace(SpaceKind.SE2, Rect(0, 0, 20, 20), rotation_weight=0.5)


def _problem(world: World, start: State, goal: State, space: StateSpace | None = None,
             robot: Robot | None = None, **kw) -> ProblemDef:
    space = space or StateSpace(SpaceKind.R2, world.bounds)
    return ProblemDef(
        name="t",
        space=space,
        world=world,
        robot=robot or Robot(),
        start=start,
        goal=goal,
        goal_tolerance=kw.pop("goal_tolerance", 0.5),
        **kw,
    )


def test_wrap_angle_range_and_fixed_points():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    rng = random.Random(1)
    for _ in range(500):
        theta = rng.uniform(-50, 50)
        w = wrap_angle(theta)
        assert -math.pi < w <= math.pi
        assert math.isclose(math.sin(w), math.sin(theta), abs_tol=1e-9)
        assert math.isclose(math.cos(w), math.cos(theta), abs_tol=1e-9)


def test_state_normalizes_theta():
    s = State(1.0, 2.0, 5 * math.pi)
    assert s.theta == pytest.approx(math.pi)


def test_distance_r2_is_euclidean():
    assert distance(R2, State(0, 0), State(3, 4)) == 5.0


def test_distance_metric_properties():
    rng = random.Random(2)
    for space in (R2, SE2):
        for _ in range(300):
            a = sample_uniform(space, rng)
            b = sample_uniform(space, rng)
            c = sample_uniform(space, rng)
            dab = distance(space, a, b)
            assert dab >= 0
            assert dab == distance(space, b, a)
            assert distance(space, a, a) == 0
            assert distance(space, a, c) <= dab + distance(space, b, c) + 1e-9


def test_distance_se2_wraps_angle():
    a = State(0, 0, math.pi - 0.1)
    b = State(0, 0, -math.pi + 0.1)
    assert distance(SE2, a, b) == pytest.approx(0.5 * 0.2)


def test_interpolate_endpoints_and_midpoint():
    a = State(0, 0, math.pi - 0.2)
    b = State(2, 2, -math.pi + 0.2)
    assert interpolate(SE2, a, b, 0.0) == a
    assert interpolate(SE2, a, b, 1.0) == b
    mid = interpolate(SE2, a, b, 0.5)
    assert mid.x == pytest.approx(1.0)
    assert abs(mid.theta) == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        interpolate(SE2, a, b, 1.5)


def test_interpolate_consistent_with_distance():
    rng = random.Random(3)
    for _ in range(200):
        a = sample_uniform(SE2, rng)
        b = sample_uniform(SE2, rng)
        t = rng.random()
        m = interpolate(SE2, a, b, t)
        d = distance(SE2, a, b)
        assert distance(SE2, a, m) + distance(SE2, m, b) == pytest.approx(d, abs=1e-9)


def test_sample_uniform_in_bounds_and_deterministic():
    rng = random.Random(4)
    states = [sample_uniform(SE2, rng) for _ in range(200)]
    for s in states:
        assert 0 <= s.x <= 20 and 0 <= s.y <= 20
        assert -math.pi < s.theta <= math.pi
    rng2 = random.Random(4)
    assert [sample_uniform(SE2, rng2) for _ in range(200)] == states


def test_rect_rejects_degenerate():
    with pytest.raises(ValueError):
        Rect(0, 0, 0, 5)


def test_segments_intersect_cases():
    assert segments_intersect((0, 0), (2, 2), (0, 2), (2, 0))
    assert not segments_intersect((0, 0), (1, 0), (0, 1), (1, 1))
    # touching endpoint counts as intersection
    assert segments_intersect((0, 0), (1, 1), (1, 1), (2, 0))
    # collinear overlap
    assert segments_intersect((0, 0), (2, 0), (1, 0), (3, 0))
    # collinear disjoint
    assert not segments_intersect((0, 0), (1, 0), (2, 0), (3, 0))


def test_point_segment_distance():
    assert point_segment_distance(0, 1, -1, 0, 1, 0) == 1.0
    assert point_segment_distance(5, 0, -1, 0, 1, 0) == 4.0


def test_polygon_requires_ccw():
    Polygon(((0, 0), (1, 0), (1, 1)))
    with pytest.raises(ValueError):
        Polygon(((0, 0), (1, 1), (1, 0)))
    with pytest.raises(ValueError):
        Polygon(((0, 0), (1, 0)))


def test_polygon_contains_point_boundary_inclusive():
    square = Polygon(((0, 0), (2, 0), (2, 2), (0, 2)))
    assert square.contains_point(1, 1)
    assert square.contains_point(0, 0)
    assert square.contains_point(2, 1)
    assert square.contains_point(1, 0)
    assert not square.contains_point(3, 1)
    assert not square.contains_point(-0.001, 1)


def test_polygon_contains_point_concave():
    # U-shape opening right
    u = Polygon(((0, 0), (3, 0), (3, 1), (1, 1), (1, 2), (3, 2), (3, 3), (0, 3)))
    assert u.contains_point(0.5, 1.5)
    assert not u.contains_point(2, 1.5)
    assert u.contains_point(2, 0.5)


def test_polygon_convexity():
    assert Polygon(((0, 0), (2, 0), (2, 2), (0, 2))).is_convex()
    assert not Polygon(((0, 0), (4, 0), (4, 4), (2, 1), (0, 4))).is_convex()


def test_polygons_intersect():
    a = Polygon(((0, 0), (2, 0), (2, 2), (0, 2)))
    b = Polygon(((1, 1), (3, 1), (3, 3), (1, 3)))
    c = Polygon(((5, 5), (6, 5), (6, 6), (5, 6)))
    inner = Polygon(((0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5)))
    assert polygons_intersect(a, b)
    assert not polygons_intersect(a, c)
    assert polygons_intersect(a, inner)  # full containment, no edge crossing
    assert polygons_intersect(inner, a)


def test_world_rejects_out_of_bounds_obstacle():
    with pytest.raises(ValueError):
        World(Rect(0, 0, 10, 10), (Polygon(((5, 5), (15, 5), (15, 6), (5, 6))),))


def test_robot_polygon_must_be_convex():
    with pytest.raises(ValueError):
        Robot(RobotShape.POLYGON, Polygon(((0, 0), (4, 0), (4, 4), (2, 1), (0, 4))))
    with pytest.raises(ValueError):
        Robot(RobotShape.POINT, Polygon(((0, 0), (1, 0), (1, 1))))


def test_robot_footprint_rotation():
    tri = Polygon(((1, 0), (0, 1), (-1, -1)))
    robot = Robot(RobotShape.POLYGON, tri)
    pts = robot.footprint(State(5, 5, math.pi / 2))
    assert pts[0][0] == pytest.approx(5.0)
    assert pts[0][1] == pytest.approx(6.0)


def test_is_state_valid_point_robot():
    world = load_world("corridor")
    p = _problem(world, State(2, 17), State(18, 3))
    assert is_state_valid(p, State(2, 17))
    assert is_state_valid(p, State(10, 10))  # inside the passage
    assert not is_state_valid(p, State(10, 5))  # inside lower slab
    assert not is_state_valid(p, State(10, 9))  # touching slab boundary
    assert not is_state_valid(p, State(0, 10))  # on world boundary
    assert not is_state_valid(p, State(-1, 10))


def test_is_state_valid_polygon_robot():
    world = load_world("corridor")
    body = Polygon(((-0.8, -0.8), (0.8, -0.8), (0.8, 0.8), (-0.8, 0.8)))
    p = _problem(
        world, State(2, 17), State(18, 3),
        space=StateSpace(SpaceKind.SE2, world.bounds),
        robot=Robot(RobotShape.POLYGON, body),
    )
    assert is_state_valid(p, State(10, 10))  # 1.6 wide robot in a 2 wide passage
    assert not is_state_valid(p, State(10, 9.5))  # shifted into the slab
    assert not is_state_valid(p, State(10, 10, math.pi / 4))  # rotated diagonal 2.26 > 2


def test_check_motion_straight_through_passage():
    world = load_world("corridor")
    p = _problem(world, State(2, 17), State(18, 3))
    assert check_motion(p, State(2, 10), State(18, 10))
    assert not check_motion(p, State(2, 17), State(18, 3))
    assert not check_motion(p, State(2, 17), State(10, 5))


def test_check_motion_endpoint_rules():
    world = load_world("corridor")
    p = _problem(world, State(2, 17), State(18, 3))
    bad = State(10, 5)
    good = State(2, 17)
    assert not check_motion(p, bad, good)
    assert not check_motion(p, good, bad)
    assert check_motion(p, good, good)


def test_check_motion_resolution_matters():
    # a thin spike between two states is caught only if steps land inside it
    world = World(Rect(0, 0, 20, 20), (Polygon(((9.9, 0.0), (10.1, 0.0), (10.1, 15.0), (9.9, 15.0))),))
    fine = _problem(world, State(2, 5), State(18, 5), collision_resolution=0.05)
    assert not check_motion(fine, State(2, 5), State(18, 5))
    coarse = _problem(world, State(2, 5), State(18, 5), collision_resolution=19.0)
    assert coarse.collision_resolution == 19.0
    assert check_motion(coarse, State(2, 5), State(18, 5))


def test_clearance_values():
    world = load_world("corridor")
    p = _problem(world, State(2, 17), State(18, 3))
    assert clearance(p, State(10, 10)) == pytest.approx(1.0)
    # nearest obstacle points from (2, 10) are the slab corners (5, 9) and (5, 11)
    assert clearance(p, State(2, 10)) == pytest.approx(math.sqrt(10))
    empty = _problem(load_world("empty"), State(2, 2), State(18, 18))
    assert clearance(empty, State(5, 5)) == math.inf


def test_clearance_polygon_robot_smaller_than_point():
    world = load_world("corridor")
    body = Polygon(((-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)))
    pt = _problem(world, State(2, 17), State(18, 3))
    poly = _problem(
        world, State(2, 17), State(18, 3),
        space=StateSpace(SpaceKind.SE2, world.bounds),
        robot=Robot(RobotShape.POLYGON, body),
    )
    s = State(10, 10)
    assert clearance(poly, s) == pytest.approx(clearance(pt, s) - 0.5)


def test_problem_defaults_collision_resolution():
    world = load_world("empty")
    p = _problem(world, State(2, 2), State(18, 18))
    assert p.collision_resolution == pytest.approx(0.01 * world.bounds.diagonal)


def test_problem_rejects_bad_fields():
    world = load_world("empty")
    with pytest.raises(ValueError):
        _problem(world, State(2, 2), State(18, 18), goal_tolerance=0.0)
    with pytest.raises(ValueError):
        _problem(world, State(-5, 2), State(18, 18))


def test_bundled_worlds_load_and_roundtrip():
    assert BUNDLED_WORLDS == ("empty", "corridor", "decoys", "trivial")
    for name in BUNDLED_WORLDS:
        world = load_world(name)
        again = parse_world(format_world(world))
        assert again == world


def test_world_file_parsing():
    world = parse_world(
        """
        # comment
        bounds 0 0 10 5

        poly 1 1 2 1 2 2 1 2
        """
    )
    assert world.bounds == Rect(0, 0, 10, 5)
    assert len(world.obstacles) == 1
    assert world.obstacles[0].vertices == ((1, 1), (2, 1), (2, 2), (1, 2))


def test_world_file_errors():
    with pytest.raises(ValueError):
        parse_world("poly 1 1 2 1 2 2")  # no bounds line
    with pytest.raises(ValueError):
        parse_world("bounds 0 0 10 10\npoly 1 1 2 1")  # too few vertices
    with pytest.raises(ValueError):
        parse_world("bounds 0 0 10 10\nwall 1 1 2 1 2 2")  # unknown directive
    with pytest.raises(ValueError):
        parse_world("bounds 0 0 10 10\nbounds 0 0 5 5")  # duplicate bounds


def test_load_world_from_path(tmp_path):
    target = tmp_path / "w.world"
    target.write_text("bounds 0 0 4 4\npoly 1 1 2 1 2 2 1 2\n")
    world = load_world("w.world", base_dir=tmp_path)
    assert len(world.obstacles) == 1
    with pytest.raises(FileNotFoundError):
        load_world("missing_world_name")


def test_objective_enum_values():
    assert {o.value for o in Objective} == {"NONE", "LENGTH", "CLEARANCE", "WORK"}
