"""
Planar points, the REMOTE padding sentinel and the orientation predicate.
"""

from typing import NamedTuple


class Point2(NamedTuple):
    """A point in the plane. Data points have 0 < x < 1; x > 1 marks padding."""

    x: float
    y: float

    def translate(self, dx: float, dy: float) -> 'Point2':
        return Point2(self.x + dx, self.y + dy)

    def dropped(self, amount: float = 1.0) -> 'Point2':
        """The fictitious neighbour directly below this point."""
        return Point2(self.x, self.y - amount)


REMOTE = Point2(10.0, 0.0)


def is_remote(p: Point2) -> bool:
    return p.x > 1.0


def make_remote() -> Point2:
    return Point2(10.0, 0.0)


def orientation(r: Point2, p: Point2, q: Point2) -> float:
    """det(q - p, r - p); positive when r is left of the directed segment p->q."""
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)


def left_of(r: Point2, p: Point2, q: Point2) -> bool:
    """True iff r is strictly left of p->q. Collinear triples give False."""
    return orientation(r, p, q) > 0
