"""
Host-side round loop: schedules block dimensions and carries hood buffers
from one match_and_merge launch to the next.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Protocol, Tuple

from .geom import Point2
from .hoodbuf import HoodBuffer, PointSet, block_corners, init_hood
from .kernel import launch_match_and_merge
from .psim import BlockDims, ConflictReport, StepMetrics

logger = logging.getLogger('hull')


class HoodTrace(Protocol):
    """Sink for the intermediate hoods of a build."""

    def show_current_hoods(self, buffer: HoodBuffer) -> None:
        ...

    def finish(self) -> None:
        ...


@dataclass(frozen=True)
class RoundRecord:
    index: int
    dims: BlockDims
    before: HoodBuffer
    after: HoodBuffer
    report: ConflictReport
    metrics: StepMetrics
    scratch: Tuple[int, ...]


def round_schedule(n: int) -> List[BlockDims]:
    """Block dimensions of every round for n points, starting from 2x1."""
    schedule = []
    d1, d2 = 2, 1
    d = 2
    while d < n:
        schedule.append(BlockDims(d1, d2))
        if d1 > d2:
            d2 *= 2
        else:
            d1 *= 2
        d = d1 * d2
    return schedule


def iter_rounds(ps: PointSet, *, trace: Optional[HoodTrace] = None, workers: Optional[int] = None,
                strict: bool = False, order_seed: Optional[int] = None) -> Iterator[RoundRecord]:
    """
    Run the build one round at a time.

    The trace, when given, sees the buffer before each round and is finished
    once the last round has run.
    """
    buffer = init_hood(ps)
    for index, dims in enumerate(round_schedule(ps.n), start=1):
        if trace is not None:
            trace.show_current_hoods(buffer)
        outcome = launch_match_and_merge(buffer, round_index=index, workers=workers,
                                         strict=strict, order_seed=order_seed)
        logger.debug(f"Round {index}: d1={dims.d1}, d2={dims.d2}, d={dims.d} -> {outcome.buffer.d}")
        yield RoundRecord(index, dims, buffer, outcome.buffer, outcome.report,
                          outcome.metrics, outcome.arrays.scratch)
        buffer = outcome.buffer
    if trace is not None:
        trace.finish()


def build_hood(ps: PointSet, trace: Optional[HoodTrace] = None, *, workers: Optional[int] = None,
               strict: bool = False, on_round: Optional[Callable[[RoundRecord], None]] = None) -> List[Point2]:
    """
    Upper hull of all points, left to right.

    Args:
        ps: Validated points
        trace: Optional sink for the intermediate hoods
        workers: Thread-pool size for block dispatch (None runs blocks in order)
        strict: Escalate audit findings to ConflictError
        on_round: Called with every RoundRecord as it completes

    Returns:
        Corners of the upper hull
    """
    if ps.n == 2:
        if trace is not None:
            trace.finish()
        return list(ps.points)

    last = None
    findings = 0
    for record in iter_rounds(ps, trace=trace, workers=workers, strict=strict):
        findings += record.report.total
        if on_round is not None:
            on_round(record)
        last = record
    hood = block_corners(last.after, 0)
    logger.info(f"Built hood of {len(hood)} corners from {ps.n} points in {last.index} rounds")
    if findings:
        logger.warning(f"Audit reported {findings} findings during the build")
    return hood


def round_metrics(ps: PointSet, *, workers: Optional[int] = None) -> StepMetrics:
    total = StepMetrics()
    for record in iter_rounds(ps, workers=workers):
        total = total + record.metrics
    return total
