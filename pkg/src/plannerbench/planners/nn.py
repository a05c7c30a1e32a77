"""Nearest-neighbor search over growing state sets.

The vectorized index and the scalar reference function compute distances with
the same floating-point operations, so their results agree bit-for-bit. Ties
break toward the lowest index in both.
"""

from __future__ import annotations

import math

import numpy as np

from ..geometry import State, StateSpace, distance

TAU = math.tau


def nearest_neighbor(points: list[State], q: State, space: StateSpace) -> int:
    """Index of the point closest to q; lowest index wins ties."""
    if not points:
        raise ValueError("nearest_neighbor requires a nonempty point list")
    best_i = 0
    best_d = distance(space, points[0], q)
    for i in range(1, len(points)):
        d = distance(space, points[i], q)
        if d < best_d:
            best_d = d
            best_i = i
    return best_i


class NNIndex:
    """Append-only state index with vectorized distance queries."""

    def __init__(self, space: StateSpace, capacity: int = 256):
        self.space = space
        self._rot = space.kind.has_rotation
        self._w = space.rotation_weight
        self.n = 0
        self._x = np.empty(capacity)
        self._y = np.empty(capacity)
        self._t = np.empty(capacity)

    def __len__(self) -> int:
        return self.n

    def add(self, s: State) -> int:
        if self.n == self._x.shape[0]:
            for name in ("_x", "_y", "_t"):
                arr = getattr(self, name)
                grown = np.empty(2 * arr.shape[0])
                grown[: self.n] = arr[: self.n]
                setattr(self, name, grown)
        i = self.n
        self._x[i] = s.x
        self._y[i] = s.y
        self._t[i] = s.theta
        self.n = i + 1
        return i

    def distances(self, q: State) -> np.ndarray:
        n = self.n
        dx = self._x[:n] - q.x
        dy = self._y[:n] - q.y
        d = np.sqrt(dx * dx + dy * dy)
        if self._rot:
            dt = self._t[:n] - q.theta
            dt = dt - TAU * np.rint(dt / TAU)
            d = d + self._w * np.abs(dt)
        return d

    def nearest(self, q: State) -> int:
        if self.n == 0:
            raise ValueError("nearest on empty index")
        return int(np.argmin(self.distances(q)))

    def k_nearest(self, q: State, k: int) -> list[int]:
        """Indices of the k closest states, ordered by (distance, index)."""
        if k <= 0:
            return []
        d = self.distances(q)
        order = np.argsort(d, kind="stable")
        return [int(i) for i in order[:k]]
