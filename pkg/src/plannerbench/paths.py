"""Path objects, cost objectives, and default simplification.

Objectives: path length, minimum clearance along the path, and mechanical
work. Work is driven by a reciprocal-clearance state cost
c(s) = 1/(clearance(s) + DELTA), accumulating only uphill changes plus a
small length penalty, so paths that dive toward obstacles pay for it.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from pathlib import Path as FsPath

from .geometry import (
    ProblemDef,
    State,
    StateSpace,
    check_motion,
    clearance,
    distance,
    interpolate,
)

DELTA = 1e-3
EPSILON = 1e-4


@dataclass(frozen=True)
class Path:
    """An ordered, in-bounds state sequence in a given space."""

    states: tuple[State, ...]
    space: StateSpace

    def __post_init__(self) -> None:
        if not self.states:
            raise ValueError("path needs at least one state")
        for s in self.states:
            if not self.space.bounds.contains(s.x, s.y):
                raise ValueError(f"path state outside bounds: {s}")

    def __len__(self) -> int:
        return len(self.states)


def state_cost(problem: ProblemDef, s: State) -> float:
    """Reciprocal-clearance state cost; bounded by 1/DELTA, 0 in empty worlds."""
    return 1.0 / (clearance(problem, s) + DELTA)


def path_length(p: Path) -> float:
    total = 0.0
    for a, b in zip(p.states, p.states[1:]):
        total += distance(p.space, a, b)
    return total


def _walk(p: Path, resolution: float):
    """Yield states along p at most `resolution` apart, endpoints included."""
    yield p.states[0]
    for a, b in zip(p.states, p.states[1:]):
        d = distance(p.space, a, b)
        n = max(1, math.ceil(d / resolution))
        for i in range(1, n + 1):
            yield interpolate(p.space, a, b, i / n)


def path_clearance(p: Path, problem: ProblemDef) -> float:
    """Minimum clearance over states sampled along p at collision_resolution spacing."""
    return min(clearance(problem, s) for s in _walk(p, problem.collision_resolution))


def mechanical_work(p: Path, problem: ProblemDef) -> float:
    if len(p) < 2:
        return 0.0
    total = 0.0
    prev_cost = state_cost(problem, p.states[0])
    for s in p.states[1:]:
        cost = state_cost(problem, s)
        total += max(0.0, cost - prev_cost)
        prev_cost = cost
    return total + EPSILON * path_length(p)


def _point_on(p: Path, segment: int, fraction: float) -> State:
    return interpolate(p.space, p.states[segment], p.states[segment + 1], fraction)


def shortcut(p: Path, problem: ProblemDef, attempts: int, rng: random.Random) -> Path:
    """Random segment-to-segment shortcutting; never lengthens the path."""
    states = list(p.states)
    for _ in range(attempts):
        if len(states) < 3:
            break
        n_seg = len(states) - 1
        si, ui = rng.randrange(n_seg), rng.random()
        sj, uj = rng.randrange(n_seg), rng.random()
        if (si, ui) > (sj, uj):
            si, ui, sj, uj = sj, uj, si, ui
        if si == sj:
            continue
        work = Path(tuple(states), p.space)
        a = _point_on(work, si, ui)
        b = _point_on(work, sj, uj)
        if a == b:
            continue
        if check_motion(problem, a, b):
            spliced = states[: si + 1] + [a, b] + states[sj + 1 :]
            states = [s for i, s in enumerate(spliced) if i == 0 or s != spliced[i - 1]]
    return Path(tuple(states), p.space)


def smooth(p: Path, problem: ProblemDef, rounds: int) -> Path:
    """Pull interior vertices to their neighbors' midpoint when the motion allows."""
    states = list(p.states)
    for _ in range(rounds):
        for i in range(1, len(states) - 1):
            mid = interpolate(p.space, states[i - 1], states[i + 1], 0.5)
            if mid == states[i]:
                continue
            if check_motion(problem, states[i - 1], mid) and check_motion(problem, mid, states[i + 1]):
                states[i] = mid
    return Path(tuple(states), p.space)


def simplify(p: Path, problem: ProblemDef, rng: random.Random) -> tuple[Path, float]:
    """Default simplification: shortcut 4x path size, then 3 smoothing rounds.

    Returns the simplified path and the wall time spent.
    """
    t0 = time.perf_counter()
    out = shortcut(p, problem, 4 * len(p), rng)
    out = smooth(out, problem, 3)
    return out, time.perf_counter() - t0


# ---------------------------------------------------------------------------
# Path files


def format_path_file(p: Path) -> str:
    """One state per line: `x y` in R2, `x y theta` otherwise."""
    lines = []
    for s in p.states:
        if p.space.kind.has_rotation:
            lines.append("%.17g %.17g %.17g" % (s.x, s.y, s.theta))
        else:
            lines.append("%.17g %.17g" % (s.x, s.y))
    return "\n".join(lines) + "\n"


def parse_path_file(text: str, space: StateSpace) -> Path:
    expected = 3 if space.kind.has_rotation else 2
    states = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != expected:
            raise ValueError(
                f"path line {lineno}: expected {expected} fields for "
                f"{space.kind.value}, got {len(parts)}"
            )
        try:
            values = [float(v) for v in parts]
        except ValueError:
            raise ValueError(f"path line {lineno}: non-numeric field") from None
        states.append(State(*values))
    return Path(tuple(states), space)


def path_file_name(experiment: str, planner: str, run_index: int) -> str:
    return f"{experiment}_{planner}_{run_index}.path"


def save_path_file(p: Path, directory: FsPath, experiment: str, planner: str, run_index: int) -> FsPath:
    target = FsPath(directory) / path_file_name(experiment, planner, run_index)
    target.write_text(format_path_file(p))
    return target
