"""
Padded block representation of intermediate hoods, and input validation.

A HoodBuffer of n slots is split into blocks of d slots. Each block holds the
corners of one hood shifted left and padded with copies of REMOTE.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from itertools import takewhile
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (DegenerateTriple, NonFiniteCoordinate, NotPowerOfTwo,
                     ValidationError, XNotIncreasing, XOutOfRange)
from .geom import REMOTE, Point2, is_remote, left_of

logger = logging.getLogger('hull')

EPS_COLLINEAR = 1e-9
EXHAUSTIVE_LIMIT = 64
SAMPLES_PER_POINT = 10
MAX_DRAW_ATTEMPTS = 100

# ConformanceReport rule names
REMOTE_BEFORE_DATA = "remote before non-remote"
EMPTY_BLOCK = "empty block"
X_NOT_INCREASING = "x not increasing"
NOT_CONCAVE = "concavity"


def is_power_of_two(n: int) -> bool:
    return n >= 2 and n & (n - 1) == 0


@dataclass(frozen=True)
class PointSet:
    """Validated input: power-of-two count, 0 < x < 1, x increasing, general position."""

    points: Tuple[Point2, ...]

    @property
    def n(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point2]:
        return iter(self.points)


@dataclass(frozen=True)
class HoodBuffer:
    """n slots in blocks of d, each block a left-packed, REMOTE-padded hood."""

    slots: Tuple[Point2, ...]
    d: int

    def __post_init__(self):
        if not is_power_of_two(len(self.slots)):
            raise ValueError(f"Buffer length {len(self.slots)} is not a power of 2")
        if not is_power_of_two(self.d) or len(self.slots) % self.d:
            raise ValueError(f"Block size {self.d} does not divide {len(self.slots)}")

    @property
    def n(self) -> int:
        return len(self.slots)

    @property
    def block_count(self) -> int:
        return self.n // self.d

    def block(self, b: int) -> Tuple[Point2, ...]:
        return self.slots[b * self.d:(b + 1) * self.d]

    @classmethod
    def from_blocks(cls, blocks: Iterable[Sequence[Point2]], d: int) -> 'HoodBuffer':
        slots: List[Point2] = []
        for corners in blocks:
            slots.extend(pack_block(corners, d))
        return cls(tuple(slots), d)


@dataclass(frozen=True)
class Violation:
    block: int
    slot: int
    rule: str
    message: str


@dataclass
class ConformanceReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def is_clean(self) -> bool:
        return not self.violations

    def rules(self) -> List[str]:
        return [v.rule for v in self.violations]

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)


def pack_block(corners: Sequence[Point2], d: int) -> List[Point2]:
    """Corners shifted left and padded with REMOTE to length d."""
    if len(corners) > d:
        raise ValueError(f"{len(corners)} corners do not fit in a block of {d}")
    return list(corners) + [REMOTE] * (d - len(corners))


def _candidate_triples(n: int, seed: int) -> np.ndarray:
    if n <= EXHAUSTIVE_LIMIT:
        combos = list(itertools.combinations(range(n), 3))
        return np.array(combos, dtype=np.int64).reshape(-1, 3)
    consecutive = np.stack([np.arange(n - 2), np.arange(1, n - 1), np.arange(2, n)], axis=1)
    rng = np.random.default_rng(seed)
    sampled = np.sort(rng.integers(0, n, size=(SAMPLES_PER_POINT * n, 3)), axis=1)
    distinct = (sampled[:, 0] < sampled[:, 1]) & (sampled[:, 1] < sampled[:, 2])
    return np.concatenate([consecutive, sampled[distinct]])


def _check_general_position(points: Sequence[Point2], seed: int) -> None:
    xs = np.array([p.x for p in points], dtype=np.float64)
    ys = np.array([p.y for p in points], dtype=np.float64)
    triples = _candidate_triples(len(points), seed)
    if not len(triples):
        return
    i, j, k = triples[:, 0], triples[:, 1], triples[:, 2]
    dets = (xs[j] - xs[i]) * (ys[k] - ys[i]) - (ys[j] - ys[i]) * (xs[k] - xs[i])
    bad = np.flatnonzero(np.abs(dets) < EPS_COLLINEAR)
    if bad.size:
        first = bad[0]
        raise DegenerateTriple(int(i[first]), int(j[first]), int(k[first]), float(dets[first]))
    logger.debug(f"Checked {len(triples)} triples for collinearity")


def validate_points(points: Sequence[Sequence[float]], seed: int = 0) -> PointSet:
    """
    Check the algorithm's input assumptions and wrap the points.

    Args:
        points: Points (or (x, y) pairs) in input order
        seed: Seed for the sampled collinearity check on large inputs

    Returns:
        PointSet of the same points

    Raises:
        NotPowerOfTwo, XOutOfRange, NonFiniteCoordinate, XNotIncreasing, DegenerateTriple
    """
    pts = tuple(Point2(float(p[0]), float(p[1])) for p in points)
    if not is_power_of_two(len(pts)):
        raise NotPowerOfTwo(len(pts))
    for index, p in enumerate(pts):
        if not 0.0 < p.x < 1.0:
            raise XOutOfRange(index, p.x)
        if not math.isfinite(p.y):
            raise NonFiniteCoordinate(index)
        if index and p.x <= pts[index - 1].x:
            raise XNotIncreasing(index)
    _check_general_position(pts, seed)
    return PointSet(pts)


def init_hood(ps: PointSet) -> HoodBuffer:
    """Every pair of consecutive points is its own hood."""
    return HoodBuffer(ps.points, 2)


def block_corners(h: HoodBuffer, b: int) -> List[Point2]:
    """The non-remote prefix of block b."""
    return list(takewhile(lambda p: not is_remote(p), h.block(b)))


def validate_hood(h: HoodBuffer, require_nonempty: bool = True) -> ConformanceReport:
    """
    List every violated block invariant.

    Args:
        h: Buffer to check
        require_nonempty: Flag blocks with no corners (driver-produced buffers never have them)

    Returns:
        ConformanceReport, empty iff the buffer is well-formed
    """
    report = ConformanceReport()
    for b in range(h.block_count):
        base = b * h.d
        block = h.block(b)
        corners = block_corners(h, b)
        k = len(corners)
        for s in range(k, h.d):
            if not is_remote(block[s]):
                report.violations.append(Violation(
                    b, base + s, REMOTE_BEFORE_DATA,
                    f"block {b}: slot {base + s} holds data after padding"))
        if require_nonempty and k == 0:
            report.violations.append(Violation(b, base, EMPTY_BLOCK, f"block {b} has no corners"))
        for s in range(1, k):
            if corners[s].x <= corners[s - 1].x:
                report.violations.append(Violation(
                    b, base + s, X_NOT_INCREASING,
                    f"block {b}: x does not increase at slot {base + s}"))
        for s in range(1, k - 1):
            if not left_of(corners[s], corners[s - 1], corners[s + 1]):
                report.violations.append(Violation(
                    b, base + s, NOT_CONCAVE,
                    f"block {b}: corner at slot {base + s} is not above its neighbours' chord"))
    return report


def random_point_set(n: int, seed: Optional[int] = None, shape: str = "uniform") -> PointSet:
    """
    Random valid input of n points, x sorted in (0, 1).

    shape "uniform" draws y uniformly in [0, 1); "cap" places points on a
    slightly noisy concave arc so most of them are hood corners (meant for n <= 256).
    """
    if shape not in ("uniform", "cap"):
        raise ValueError(f"Unknown shape: {shape}")
    if not is_power_of_two(n):
        raise NotPowerOfTwo(n)
    rng = np.random.default_rng(seed)
    for attempt in range(MAX_DRAW_ATTEMPTS):
        if shape == "cap":
            # jittered grid keeps consecutive gaps away from zero
            xs = (np.arange(n) + rng.uniform(0.2, 0.8, n)) / n
            ys = 0.1 + 3.2 * xs * (1.0 - xs) + rng.normal(0.0, 1e-6, n)
        else:
            xs = np.sort(rng.uniform(0.0, 1.0, n))
            ys = rng.uniform(0.0, 1.0, n)
        try:
            return validate_points(list(zip(xs.tolist(), ys.tolist())))
        except ValidationError as e:
            logger.debug(f"Redrawing random points (attempt {attempt + 1}): {e}")
    raise ValidationError(f"Could not draw {n} points in general position")
