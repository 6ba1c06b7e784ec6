"""
Serial reference implementations used as ground truth for the parallel kernel.

These are exhaustive scans and share no code with the kernel beyond the
orientation predicate.
"""

import logging
from typing import List, Sequence, Tuple

from .errors import NoUniqueTangent
from .geom import Point2, left_of

logger = logging.getLogger('hull')


def oracle_upper_hull(points: Sequence[Point2]) -> List[Point2]:
    """Monotone-chain upper hull of x-sorted points, left to right."""
    hull: List[Point2] = []
    for p in points:
        # the last corner must stay strictly above the chord from its predecessor to p
        while len(hull) >= 2 and not left_of(hull[-1], hull[-2], p):
            hull.pop()
        hull.append(p)
    return hull


def _strictly_below(r: Point2, p: Point2, q: Point2) -> bool:
    # right of p->q, i.e. below the line when p is left of q
    return left_of(r, q, p)


def brute_tangent_to_right(p: Point2, hull: Sequence[Point2]) -> int:
    """
    Index of the corner of `hull` supporting the tangent from p.

    Args:
        p: Point strictly left of every corner
        hull: Well-formed corner sequence

    Returns:
        Index k such that every other corner lies strictly below the line p -> hull[k]

    Raises:
        NoUniqueTangent: if zero or several corners qualify
    """
    found = [
        k for k, q in enumerate(hull)
        if all(_strictly_below(r, p, q) for m, r in enumerate(hull) if m != k)
    ]
    if len(found) != 1:
        raise NoUniqueTangent(f"Tangent from {p} has {len(found)} supporting corners")
    return found[0]


def brute_common_tangent(P: Sequence[Point2], Q: Sequence[Point2]) -> Tuple[int, int]:
    """
    Exhaustive pair scan for the common upper tangent of two hoods.

    Args:
        P: Left corner sequence
        Q: Right corner sequence, entirely right of P

    Returns:
        (pindex, qindex) into P and Q

    Raises:
        NoUniqueTangent: if the supporting pair is not unique
    """
    found = []
    for a, p in enumerate(P):
        for b, q in enumerate(Q):
            others = [r for m, r in enumerate(P) if m != a] + [r for m, r in enumerate(Q) if m != b]
            if all(_strictly_below(r, p, q) for r in others):
                found.append((a, b))
    if len(found) != 1:
        raise NoUniqueTangent(f"Common tangent has {len(found)} supporting pairs")
    return found[0]


def interval_hulls(points: Sequence[Point2], d: int) -> List[List[Point2]]:
    """Upper hull of each consecutive interval of d points."""
    return [oracle_upper_hull(points[b:b + d]) for b in range(0, len(points), d)]
