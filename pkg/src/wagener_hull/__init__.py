"""
Wagener Hull Package

This package builds the upper convex hull ("hood") of x-sorted planar points by
pairwise hood merging, simulated as a barrier-phased thread-block kernel with
race auditing, a serial oracle and trace/SVG output.
"""

from .driver import build_hood, round_metrics
from .hoodbuf import PointSet, random_point_set, validate_points
from .oracle import oracle_upper_hull

__version__ = "1.0.0"

__all__ = [
    'PointSet',
    'build_hood',
    'oracle_upper_hull',
    'random_point_set',
    'round_metrics',
    'validate_points',
]
