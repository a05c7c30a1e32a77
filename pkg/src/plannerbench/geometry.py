"""2D planning primitives: state spaces, polygonal worlds, robots, collision checking.

States live in R^2, SE(2), or the first-order-car space (same manifold as SE(2),
different planners apply). Worlds are axis-aligned rectangles containing simple
polygonal obstacles; obstacles are closed sets, so boundary contact counts as a
collision.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

TAU = math.tau


class SpaceKind(Enum):
    R2 = "R2"
    SE2 = "SE2"
    CAR1 = "CAR1"

    @property
    def has_rotation(self) -> bool:
        return self is not SpaceKind.R2

    @property
    def dimension(self) -> int:
        return 2 if self is SpaceKind.R2 else 3


class Objective(Enum):
    NONE = "NONE"
    LENGTH = "LENGTH"
    CLEARANCE = "CLEARANCE"
    WORK = "WORK"


def wrap_angle(theta: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    r = math.remainder(theta, TAU)
    if r <= -math.pi:
        r = math.pi
    return r


def _angle_abs_diff(a: float, b: float) -> float:
    # round() is half-even, matching np.rint, so scalar and vectorized
    # distance paths stay bit-identical.
    d = b - a
    return abs(d - TAU * round(d / TAU))


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self) -> None:
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(f"degenerate rectangle: {self}")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def diagonal(self) -> float:
        return math.sqrt(self.width * self.width + self.height * self.height)

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))

    def contains_strict(self, x: float, y: float) -> bool:
        return self.xmin < x < self.xmax and self.ymin < y < self.ymax

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax


@dataclass(frozen=True)
class StateSpace:
    """Planning space: kind, translational bounds, and SE(2) rotation weighting."""

    kind: SpaceKind
    bounds: Rect
    rotation_weight: float = 0.5

    def __post_init__(self) -> None:
        if self.rotation_weight < 0:
            raise ValueError("rotation_weight must be nonnegative")


@dataclass(frozen=True)
class State:
    """A planning state. theta is always normalized to (-pi, pi]; 0.0 in R2."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", wrap_angle(self.theta))


def distance(space: StateSpace, a: State, b: State) -> float:
    """Metric distance between two states.

    R2 is Euclidean; SE2/CAR1 add rotation_weight times the absolute wrapped
    angular difference. Symmetric, nonnegative, zero iff the states are equal.
    """
    dx = b.x - a.x
    dy = b.y - a.y
    d = math.sqrt(dx * dx + dy * dy)
    if space.kind.has_rotation:
        d += space.rotation_weight * _angle_abs_diff(a.theta, b.theta)
    return d


def interpolate(space: StateSpace, a: State, b: State, t: float) -> State:
    """State at fraction t in [0, 1] from a to b (shortest wrapped arc in angle)."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"interpolation fraction outside [0, 1]: {t}")
    if t == 0.0:
        return a
    if t == 1.0:
        return b
    x = a.x + t * (b.x - a.x)
    y = a.y + t * (b.y - a.y)
    if space.kind.has_rotation:
        dth = wrap_angle(b.theta - a.theta)
        return State(x, y, wrap_angle(a.theta + t * dth))
    return State(x, y)


def sample_uniform(space: StateSpace, rng: random.Random) -> State:
    """Uniform state over bounds x (-pi, pi]. Deterministic for a fixed rng state."""
    b = space.bounds
    x = rng.uniform(b.xmin, b.xmax)
    y = rng.uniform(b.ymin, b.ymax)
    if space.kind.has_rotation:
        return State(x, y, rng.uniform(-math.pi, math.pi))
    return State(x, y)


# ---------------------------------------------------------------------------
# Polygons


Point = tuple[float, float]


def _cross(ox: float, oy: float, ax: float, ay: float, bx: float, by: float) -> float:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _on_segment(px: float, py: float, ax: float, ay: float, bx: float, by: float) -> bool:
    if _cross(ax, ay, bx, by, px, py) != 0.0:
        return False
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    """True if closed segments p1p2 and q1q2 share any point (touching counts)."""
    d1 = _cross(q1[0], q1[1], q2[0], q2[1], p1[0], p1[1])
    d2 = _cross(q1[0], q1[1], q2[0], q2[1], p2[0], p2[1])
    d3 = _cross(p1[0], p1[1], p2[0], p2[1], q1[0], q1[1])
    d4 = _cross(p1[0], p1[1], p2[0], p2[1], q2[0], q2[1])
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    if d1 == 0 and _on_segment(p1[0], p1[1], q1[0], q1[1], q2[0], q2[1]):
        return True
    if d2 == 0 and _on_segment(p2[0], p2[1], q1[0], q1[1], q2[0], q2[1]):
        return True
    if d3 == 0 and _on_segment(q1[0], q1[1], p1[0], p1[1], p2[0], p2[1]):
        return True
    if d4 == 0 and _on_segment(q2[0], q2[1], p1[0], p1[1], p2[0], p2[1]):
        return True
    return False


def point_segment_distance(px: float, py: float, ax: float, ay: float, bx: float, by: float) -> float:
    vx = bx - ax
    vy = by - ay
    wx = px - ax
    wy = py - ay
    seg_len2 = vx * vx + vy * vy
    if seg_len2 == 0.0:
        return math.sqrt(wx * wx + wy * wy)
    t = (wx * vx + wy * vy) / seg_len2
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    dx = px - (ax + t * vx)
    dy = py - (ay + t * vy)
    return math.sqrt(dx * dx + dy * dy)


def segment_segment_distance(p1: Point, p2: Point, q1: Point, q2: Point) -> float:
    if segments_intersect(p1, p2, q1, q2):
        return 0.0
    return min(
        point_segment_distance(p1[0], p1[1], q1[0], q1[1], q2[0], q2[1]),
        point_segment_distance(p2[0], p2[1], q1[0], q1[1], q2[0], q2[1]),
        point_segment_distance(q1[0], q1[1], p1[0], p1[1], p2[0], p2[1]),
        point_segment_distance(q2[0], q2[1], p1[0], p1[1], p2[0], p2[1]),
    )


@dataclass(frozen=True)
class Polygon:
    """Simple polygon, CCW vertex order, not self-intersecting."""

    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if self.signed_area() <= 0:
            raise ValueError("polygon vertices must be in CCW order")

    def signed_area(self) -> float:
        a = 0.0
        verts = self.vertices
        for i in range(len(verts)):
            x1, y1 = verts[i]
            x2, y2 = verts[(i + 1) % len(verts)]
            a += x1 * y2 - x2 * y1
        return 0.5 * a

    def edges(self) -> list[tuple[Point, Point]]:
        verts = self.vertices
        return [(verts[i], verts[(i + 1) % len(verts)]) for i in range(len(verts))]

    def contains_point(self, x: float, y: float) -> bool:
        """Point-in-polygon, boundary inclusive."""
        verts = self.vertices
        n = len(verts)
        inside = False
        j = n - 1
        for i in range(n):
            xi, yi = verts[i]
            xj, yj = verts[j]
            if _on_segment(x, y, xi, yi, xj, yj):
                return True
            if (yi > y) != (yj > y):
                x_cross = xi + (y - yi) * (xj - xi) / (yj - yi)
                if x < x_cross:
                    inside = not inside
            j = i
        return inside

    def is_convex(self) -> bool:
        verts = self.vertices
        n = len(verts)
        for i in range(n):
            ox, oy = verts[i]
            ax, ay = verts[(i + 1) % n]
            bx, by = verts[(i + 2) % n]
            if _cross(ox, oy, ax, ay, bx, by) < 0:
                return False
        return True

    def distance_to_point(self, x: float, y: float) -> float:
        """Distance from a point outside (or on) the polygon to its boundary."""
        return min(point_segment_distance(x, y, a[0], a[1], b[0], b[1]) for a, b in self.edges())


def polygons_intersect(a: Polygon, b: Polygon) -> bool:
    """True if the closed polygons a and b share any point."""
    for pa, pb in a.edges():
        for qa, qb in b.edges():
            if segments_intersect(pa, pb, qa, qb):
                return True
    ax, ay = a.vertices[0]
    if b.contains_point(ax, ay):
        return True
    bx, by = b.vertices[0]
    return a.contains_point(bx, by)


# ---------------------------------------------------------------------------
# Worlds and robots


@dataclass(frozen=True)
class World:
    bounds: Rect
    obstacles: tuple[Polygon, ...] = ()

    def __post_init__(self) -> None:
        for poly in self.obstacles:
            for x, y in poly.vertices:
                if not self.bounds.contains(x, y):
                    raise ValueError(f"obstacle vertex ({x}, {y}) outside world bounds")


class RobotShape(Enum):
    POINT = "POINT"
    POLYGON = "POLYGON"


@dataclass(frozen=True)
class Robot:
    """Point robot, or a convex CCW polygon in the body frame."""

    shape: RobotShape = RobotShape.POINT
    polygon: Polygon | None = None

    def __post_init__(self) -> None:
        if self.shape is RobotShape.POLYGON:
            if self.polygon is None:
                raise ValueError("polygon robot requires vertices")
            if not self.polygon.is_convex():
                raise ValueError("robot polygon must be convex")
        elif self.polygon is not None:
            raise ValueError("point robot must not carry a polygon")

    def footprint(self, s: State) -> tuple[Point, ...]:
        """Body polygon transformed to the world frame at state s."""
        assert self.polygon is not None
        c = math.cos(s.theta)
        sn = math.sin(s.theta)
        return tuple((s.x + c * vx - sn * vy, s.y + sn * vx + c * vy) for vx, vy in self.polygon.vertices)


@dataclass(frozen=True)
class ProblemDef:
    """One benchmarkable planning problem."""

    name: str
    space: StateSpace
    world: World
    robot: Robot
    start: State
    goal: State
    goal_tolerance: float
    objective: Objective = Objective.NONE
    objective_threshold: float = 0.0
    collision_resolution: float = field(default=0.0)

    def __post_init__(self) -> None:
        if self.goal_tolerance <= 0:
            raise ValueError("goal_tolerance must be positive")
        if self.objective_threshold < 0:
            raise ValueError("objective_threshold must be nonnegative")
        if self.collision_resolution == 0.0:
            object.__setattr__(self, "collision_resolution", 0.01 * self.space.bounds.diagonal)
        if self.collision_resolution <= 0:
            raise ValueError("collision_resolution must be positive")
        for label, s in (("start", self.start), ("goal", self.goal)):
            if not self.space.bounds.contains(s.x, s.y):
                raise ValueError(f"{label} state outside bounds: {s}")


def is_state_valid(problem: ProblemDef, s: State) -> bool:
    """True iff the robot placed at s is strictly inside bounds and touches no obstacle."""
    world = problem.world
    robot = problem.robot
    if robot.shape is RobotShape.POINT:
        if not world.bounds.contains_strict(s.x, s.y):
            return False
        for obstacle in world.obstacles:
            if obstacle.contains_point(s.x, s.y):
                return False
        return True

    footprint = robot.footprint(s)
    for x, y in footprint:
        if not world.bounds.contains_strict(x, y):
            return False
    if not world.obstacles:
        return True
    placed = Polygon(footprint)
    return not any(polygons_intersect(placed, obstacle) for obstacle in world.obstacles)


def check_motion(problem: ProblemDef, a: State, b: State) -> bool:
    """Discrete motion validity from a to b at collision_resolution spacing.

    Endpoints included. For a point robot (or a non-rotating polygon robot) in
    an obstacle-free world the segment between two valid states cannot leave
    the rectangular bounds, so only the endpoints need checking.
    """
    if not is_state_valid(problem, a):
        return False
    if a == b:
        return True
    if not is_state_valid(problem, b):
        return False
    if not problem.world.obstacles and (
        problem.robot.shape is RobotShape.POINT or a.theta == b.theta
    ):
        return True
    d = distance(problem.space, a, b)
    n = math.ceil(d / problem.collision_resolution)
    for i in range(1, n):
        if not is_state_valid(problem, interpolate(problem.space, a, b, i / n)):
            return False
    return True


def clearance(problem: ProblemDef, s: State) -> float:
    """Minimum distance from the robot boundary at s to any obstacle; inf if none."""
    world = problem.world
    if not world.obstacles:
        return math.inf
    robot = problem.robot
    if robot.shape is RobotShape.POINT:
        return min(obstacle.distance_to_point(s.x, s.y) for obstacle in world.obstacles)
    footprint = robot.footprint(s)
    n = len(footprint)
    robot_edges = [(footprint[i], footprint[(i + 1) % n]) for i in range(n)]
    best = math.inf
    for obstacle in world.obstacles:
        for qa, qb in obstacle.edges():
            for pa, pb in robot_edges:
                d = segment_segment_distance(pa, pb, qa, qb)
                if d < best:
                    best = d
    return best


# ---------------------------------------------------------------------------
# World files

WORLDS_DIR = Path(__file__).parent / "worlds"
BUNDLED_WORLDS = ("empty", "corridor", "decoys", "trivial")


def parse_world(text: str) -> World:
    """Parse the plain-text world format.

    One `bounds xmin ymin xmax ymax` line and any number of
    `poly x1 y1 x2 y2 ...` lines; `#` starts a comment.
    """
    bounds: Rect | None = None
    polygons: list[Polygon] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        tag, values = fields[0], fields[1:]
        try:
            numbers = [float(v) for v in values]
        except ValueError as exc:
            raise ValueError(f"world line {lineno}: non-numeric field ({exc})") from None
        if tag == "bounds":
            if len(numbers) != 4:
                raise ValueError(f"world line {lineno}: bounds needs 4 numbers")
            if bounds is not None:
                raise ValueError(f"world line {lineno}: duplicate bounds")
            bounds = Rect(*numbers)
        elif tag == "poly":
            if len(numbers) < 6 or len(numbers) % 2 != 0:
                raise ValueError(f"world line {lineno}: poly needs an even count of >= 6 numbers")
            vertices = tuple((numbers[i], numbers[i + 1]) for i in range(0, len(numbers), 2))
            polygons.append(Polygon(vertices))
        else:
            raise ValueError(f"world line {lineno}: unknown directive {tag!r}")
    if bounds is None:
        raise ValueError("world file has no bounds line")
    return World(bounds, tuple(polygons))


def format_world(world: World) -> str:
    b = world.bounds
    lines = [f"bounds {b.xmin:g} {b.ymin:g} {b.xmax:g} {b.ymax:g}"]
    for poly in world.obstacles:
        coords = " ".join(f"{x:g} {y:g}" for x, y in poly.vertices)
        lines.append(f"poly {coords}")
    return "\n".join(lines) + "\n"


def load_world(name_or_path: str | Path, base_dir: Path | None = None) -> World:
    """Load a bundled world by name or a world file by path."""
    name = str(name_or_path)
    if name in BUNDLED_WORLDS:
        path = WORLDS_DIR / f"{name}.world"
    else:
        path = Path(name_or_path)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
    if not path.exists():
        raise FileNotFoundError(
            f"world {name_or_path!r} not found (bundled worlds: {', '.join(BUNDLED_WORLDS)})"
        )
    return parse_world(path.read_text())
