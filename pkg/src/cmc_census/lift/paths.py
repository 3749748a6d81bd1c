import abc
import cmath
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np


class PathSegment(abc.ABC):
    """A smooth piece of a path in the complex plane, parametrized by `[0, 1]`."""

    @abc.abstractmethod
    def point(self, t: float) -> complex:
        """The point at parameter `t`."""
        pass

    @abc.abstractmethod
    def velocity(self, t: float) -> complex:
        """`dz/dt` at parameter `t`."""
        pass

    @property
    @abc.abstractmethod
    def length(self) -> float:
        """The arclength."""
        pass

    def distance_to(self, p: complex, samples: int = 257) -> float:
        """Distance from `p` to the segment, sampled densely."""
        t = np.linspace(0.0, 1.0, samples)
        return float(min(abs(self.point(float(s)) - p) for s in t))

    @property
    def start(self) -> complex:
        """The first point."""
        return self.point(0.0)

    @property
    def end(self) -> complex:
        """The last point."""
        return self.point(1.0)


@dataclass(frozen=True)
class Line(PathSegment):
    """The straight segment from `a` to `b`."""

    a: complex
    b: complex

    def point(self, t: float) -> complex:
        """The point at parameter `t`."""
        return self.a + t * (self.b - self.a)

    def velocity(self, t: float) -> complex:
        """`dz/dt` at parameter `t`."""
        return self.b - self.a

    @property
    def length(self) -> float:
        """The arclength."""
        return abs(self.b - self.a)

    def distance_to(self, p: complex, samples: int = 257) -> float:
        """Exact distance from `p` to the segment."""
        d = self.b - self.a
        if d == 0:
            return abs(p - self.a)
        t = min(1.0, max(0.0, ((p - self.a) * d.conjugate()).real / abs(d) ** 2))
        return abs(p - self.point(t))


@dataclass(frozen=True)
class Arc(PathSegment):
    """The arc `center + radius e^(i(start_angle + t sweep))`.

    A positive sweep runs counterclockwise.
    """

    center: complex
    radius: float
    start_angle: float
    sweep: float = 2 * math.pi

    def point(self, t: float) -> complex:
        """The point at parameter `t`."""
        return self.center + self.radius * cmath.exp(
            1j * (self.start_angle + t * self.sweep)
        )

    def velocity(self, t: float) -> complex:
        """`dz/dt` at parameter `t`."""
        return 1j * self.sweep * (self.point(t) - self.center)

    @property
    def length(self) -> float:
        """The arclength."""
        return abs(self.sweep) * self.radius


def as_segments(path: Any) -> list[PathSegment]:
    """Turn a path description into segments.

    :param path: A segment, a sequence of segments, or a sequence of at least two
        complex vertices of a polyline.
    :raises ValueError: When the path is empty or a polyline has one vertex.
    :return: The segments.
    """
    if isinstance(path, PathSegment):
        return [path]
    items = list(path)
    if not items:
        raise ValueError("Empty path.")
    if all(isinstance(x, PathSegment) for x in items):
        return items
    vertices = [complex(v) for v in items]
    if len(vertices) < 2:
        raise ValueError("A polyline needs at least two vertices.")
    return [Line(a, b) for a, b in zip(vertices[:-1], vertices[1:])]


def loop_around(
    base: complex, point: complex, radius: float, clockwise: bool = False
) -> list[PathSegment]:
    """A loop from `base` once around `point`: out along a ray, around, back.

    :param base: The base point.
    :param point: The point to encircle.
    :param radius: Radius of the circle, smaller than `|base - point|`.
    :param clockwise: Orientation of the circle.
    :raises ValueError: When the radius is not positive or too large.
    :return: The three segments.
    """
    distance = abs(base - point)
    if not 0 < radius < distance:
        raise ValueError(f"Expected 0 < radius < {distance}, got {radius}.")
    angle = cmath.phase(base - point)
    on_circle = point + radius * cmath.exp(1j * angle)
    sweep = -2 * math.pi if clockwise else 2 * math.pi
    return [
        Line(base, on_circle),
        Arc(point, radius, angle, sweep),
        Line(on_circle, base),
    ]


def total_length(segments: Sequence[PathSegment]) -> float:
    """Total arclength."""
    return sum(s.length for s in segments)
