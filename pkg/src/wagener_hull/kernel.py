"""
The match_and_merge kernel: one round of pairwise hood merging.

Block b merges the hoods in slots [start, start+d) (P) and [start+d, start+2d)
(Q), start = 2*d*b, by locating their common upper tangent with a two-level
search and splicing P[..pindex] with Q[qindex..] into newhood.

scratch layout inside a block window:
    scratch[start .. start+d1)        first-level brackets on Q, then k0, pindex, qindex
    scratch[start+d .. start+d+d1)    second-level brackets on Q for each sampled P corner
    scratch[start+d .. start+d+d2)    brackets on Q for the P corners k0..k0+d2-1
"""

import logging
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import NamedTuple, Optional, Sequence, Tuple

from .errors import ConflictError, DegenerateTangent
from .geom import REMOTE, Point2, is_remote, left_of
from .hoodbuf import HoodBuffer
from .psim import (BlockDims, ConflictReport, MergeArrays, Phase, PhaseKernel,
                   StepMetrics, ThreadCoord, launch, run_blocks_parallel)

logger = logging.getLogger('hull')


class Classification(IntEnum):
    """Where a candidate corner lies relative to the tangent corner."""

    LOW = -1
    EQUAL = 0
    HIGH = 1


@dataclass(frozen=True)
class ThreadLocals:
    i: int = -1
    j: int = -1
    pindex: int = -1
    qindex: int = -1


def classify_g(hood: Sequence[Point2], i: int, j: int, start: int, d: int) -> Classification:
    """
    Classify Q corner hood[j] against the tangent from P corner hood[i].

    LOW means the tangent corner lies right of j, HIGH left of j (or j is
    padding), EQUAL that hood[j] is the tangent corner.
    """
    if is_remote(hood[j]):
        return Classification.HIGH
    p, q = hood[i], hood[j]
    atend = j == start + 2 * d - 1 or is_remote(hood[j + 1])
    q_next = q.dropped() if atend else hood[j + 1]
    if left_of(q_next, p, q):
        return Classification.LOW
    atstart = j == start + d
    q_prev = q.dropped() if atstart else hood[j - 1]
    if left_of(q_prev, p, q):
        return Classification.HIGH
    return Classification.EQUAL


def classify_f(hood: Sequence[Point2], i: int, j: int, start: int, d: int) -> Classification:
    """Mirror of classify_g: P corner hood[i] against the line to Q corner hood[j]."""
    if is_remote(hood[i]):
        return Classification.HIGH
    p, q = hood[i], hood[j]
    atend = i == start + d - 1 or is_remote(hood[i + 1])
    p_next = p.dropped() if atend else hood[i + 1]
    if left_of(p_next, p, q):
        return Classification.LOW
    atstart = i == start
    p_prev = p.dropped() if atstart else hood[i - 1]
    if left_of(p_prev, p, q):
        return Classification.HIGH
    return Classification.EQUAL


def mam0_init(mem, coord: ThreadCoord, local: ThreadLocals) -> ThreadLocals:
    """Every thread clears one scratch cell; thread (x, y) samples P corner start + d2*x."""
    mem.scratch[coord.start + coord.indx] = -1
    mem.scratch[coord.start + coord.d + coord.indx] = -1
    return replace(local, i=coord.start + coord.d2 * coord.x)


def mam1_bracket_on_Q(mem, coord: ThreadCoord, local: ThreadLocals) -> ThreadLocals:
    hood, scratch = mem.hood, mem.scratch
    start, d, d1, d2 = coord.start, coord.d, coord.d1, coord.d2
    i = local.i
    if is_remote(hood[i]):
        return local
    j = start + d + d1 * coord.y
    if classify_g(hood, i, j, start, d) > Classification.EQUAL:
        return replace(local, j=j)
    if coord.y == d2 - 1 or is_remote(hood[j + d1]) \
            or classify_g(hood, i, j + d1, start, d) == Classification.HIGH:
        scratch[start + coord.x] = j
    return replace(local, j=j)


def mam2_refine_on_Q(mem, coord: ThreadCoord, local: ThreadLocals) -> ThreadLocals:
    """Row y checks bracket offsets y and, when d2 < d1, y + d2."""
    hood, scratch = mem.hood, mem.scratch
    start, d, d1, d2 = coord.start, coord.d, coord.d1, coord.d2
    i = local.i
    if is_remote(hood[i]):
        return local
    bracket = scratch[start + coord.x]
    if bracket < 0:
        return local
    j = bracket + coord.y
    if classify_g(hood, i, j, start, d) == Classification.EQUAL:
        scratch[start + d + coord.x] = j
    elif d2 < d1 and classify_g(hood, i, j + d2, start, d) == Classification.EQUAL:
        scratch[start + d + coord.x] = j + d2
    return replace(local, j=j)


def mam3_locate_k0(mem, coord: ThreadCoord, local: ThreadLocals) -> ThreadLocals:
    """Row 0 finds the sampled P corner k0 whose successor sample is already HIGH."""
    hood, scratch = mem.hood, mem.scratch
    start, d, d1, d2, x = coord.start, coord.d, coord.d1, coord.d2, coord.x
    i = local.i
    if coord.y != 0 or is_remote(hood[i]):
        return local
    j = scratch[start + d + x]
    if j < 0 or classify_f(hood, i, j, start, d) > Classification.EQUAL:
        return replace(local, j=j)
    if x == d1 - 1 or is_remote(hood[i + d2]):
        scratch[start] = i
    else:
        j_next = scratch[start + d + x + 1]
        if j_next >= 0 and classify_f(hood, i + d2, j_next, start, d) == Classification.HIGH:
            scratch[start] = i
    return replace(local, j=j)


def mam4_rebracket_on_Q(mem, coord: ThreadCoord, local: ThreadLocals) -> ThreadLocals:
    hood, scratch = mem.hood, mem.scratch
    start, d, d1, d2 = coord.start, coord.d, coord.d1, coord.d2
    k0 = scratch[start]
    # without a mam3 writer the cell still holds a Q-side bracket
    if not start <= k0 < start + d:
        return replace(local, i=-1)
    i = k0 + coord.y
    if is_remote(hood[i]):
        return replace(local, i=i)
    j = start + d + coord.x * d2
    if classify_g(hood, i, j, start, d) > Classification.EQUAL:
        return replace(local, i=i, j=j)
    if coord.x == d1 - 1 or is_remote(hood[j + d2]) \
            or classify_g(hood, i, j + d2, start, d) == Classification.HIGH:
        scratch[start + d + coord.y] = j
    return replace(local, i=i, j=j)


def mam5_pinpoint(mem, coord: ThreadCoord, local: ThreadLocals) -> ThreadLocals:
    hood, scratch = mem.hood, mem.scratch
    start, d = coord.start, coord.d
    i = local.i
    if coord.x >= coord.d2 or i < 0 or is_remote(hood[i]):
        return local
    bracket = scratch[start + d + coord.y]
    if bracket < 0:
        return local
    j = bracket + coord.x
    if classify_g(hood, i, j, start, d) == Classification.EQUAL \
            and classify_f(hood, i, j, start, d) == Classification.EQUAL:
        scratch[start] = i
        scratch[start + 1] = j
    return replace(local, j=j)


def mam6a_fill_remote(mem, coord: ThreadCoord, local: ThreadLocals) -> ThreadLocals:
    """Pad the whole output window so no stale slot survives the splice."""
    start, d, indx = coord.start, coord.d, coord.indx
    mem.newhood[start + indx] = REMOTE
    mem.newhood[start + d + indx] = REMOTE
    return replace(local, pindex=mem.scratch[start], qindex=mem.scratch[start + 1])


def mam6b_copy_p(mem, coord: ThreadCoord, local: ThreadLocals) -> ThreadLocals:
    slot = coord.start + coord.indx
    if local.pindex >= coord.start and slot <= local.pindex:
        mem.newhood[slot] = mem.hood[slot]
    return local


def mam6c_shift_q(mem, coord: ThreadCoord, local: ThreadLocals) -> ThreadLocals:
    start, d = coord.start, coord.d
    if local.pindex < start or local.qindex < start + d:
        return local
    source = start + d + coord.indx
    if source >= local.qindex:
        shift = local.qindex - local.pindex - 1
        mem.newhood[source - shift] = mem.hood[source]
    return local


MAM6_SPLICE: Tuple[Phase, ...] = (
    Phase("mam6a", mam6a_fill_remote),
    Phase("mam6b", mam6b_copy_p),
    Phase("mam6c", mam6c_shift_q),
)

MATCH_AND_MERGE_PHASES: Tuple[Phase, ...] = (
    Phase("mam0", mam0_init),
    Phase("mam1", mam1_bracket_on_Q),
    Phase("mam2", mam2_refine_on_Q),
    Phase("mam3", mam3_locate_k0, exclusive=(("scratch", 0),)),
    Phase("mam4", mam4_rebracket_on_Q),
    Phase("mam5", mam5_pinpoint, exclusive=(("scratch", 0), ("scratch", 1))),
) + MAM6_SPLICE


def match_and_merge_kernel(n: int, dims: BlockDims,
                           phases: Tuple[Phase, ...] = MATCH_AND_MERGE_PHASES) -> PhaseKernel:
    if n % (2 * dims.d):
        raise ValueError(f"{n} slots do not split into blocks of {2 * dims.d}")
    return PhaseKernel(
        phases=phases,
        grid=n // (2 * dims.d),
        dims=dims,
        make_locals=ThreadLocals,
        name=f"match_and_merge[d={dims.d}]",
    )


def merge_arrays(buffer: HoodBuffer) -> MergeArrays:
    """Launch-initial arrays: newhood all padding, scratch zeroed."""
    return MergeArrays(
        hood=buffer.slots,
        newhood=(REMOTE,) * buffer.n,
        scratch=(0,) * buffer.n,
    )


class MergeOutcome(NamedTuple):
    buffer: HoodBuffer
    report: ConflictReport
    metrics: StepMetrics
    arrays: MergeArrays


def _raise_on_failure(report: ConflictReport, strict: bool, round_index: Optional[int]) -> None:
    for missing in report.missing_writes:
        if missing.phase == "mam5":
            raise DegenerateTangent(missing.block, round_index)
    if strict and not report.is_clean:
        raise ConflictError(report)


def launch_match_and_merge(buffer: HoodBuffer, *, round_index: Optional[int] = None,
                           workers: Optional[int] = None, strict: bool = False,
                           order_seed: Optional[int] = None) -> MergeOutcome:
    """
    Merge every adjacent pair of blocks of `buffer` in one simulated launch.

    Args:
        buffer: Well-formed buffer with block size d
        round_index: Round number, used in error messages only
        workers: Run blocks on a thread pool of this size (None runs them in order)
        strict: Raise ConflictError on any audit finding
        order_seed: Shuffle thread order inside each phase

    Returns:
        MergeOutcome with the new buffer of block size 2d

    Raises:
        DegenerateTangent: if some block found no common tangent
        ConflictError: in strict mode, if the audit is not clean
    """
    dims = BlockDims.for_round(buffer.d.bit_length() - 1)
    kernel = match_and_merge_kernel(buffer.n, dims)
    arrays = merge_arrays(buffer)
    if workers is None:
        result, report, metrics = launch(kernel, arrays, order_seed=order_seed)
    else:
        result, report, metrics = run_blocks_parallel(kernel, arrays, workers=workers, order_seed=order_seed)
    _raise_on_failure(report, strict, round_index)
    logger.debug(f"Merged {buffer.block_count} hoods of interval length {buffer.d}")
    return MergeOutcome(HoodBuffer(result.newhood, 2 * buffer.d), report, metrics, result)


def match_and_merge_block(arrays: MergeArrays, dims: BlockDims, block: int, *,
                          strict: bool = False, order_seed: Optional[int] = None) -> list:
    """Run one block of a launch and return its 2d-slot newhood window."""
    kernel = match_and_merge_kernel(arrays.n, dims)
    result, report, _ = launch(kernel, arrays, blocks=[block], order_seed=order_seed)
    _raise_on_failure(report, strict, None)
    window = kernel.window(block)
    return list(result.newhood[window.start:window.stop])
