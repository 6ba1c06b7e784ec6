"""
Deterministic barrier-synchronous execution of thread-block kernels.

A kernel is a fixed list of phases. Within a phase every thread reads the
snapshot taken at the previous barrier; its writes are collected, audited and
applied together at the next barrier. Block b owns the window
[2*d*b, 2*d*(b+1)) of every shared array.
"""

import logging
import operator
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import (Any, Callable, Dict, Iterable, List, Optional, Sequence,
                    Tuple)

import numpy as np

from .errors import ConflictError, OutOfBoundsAccess
from .geom import Point2

logger = logging.getLogger('psim')

ThreadId = Tuple[int, int, int]  # (block, x, y)


@dataclass(frozen=True)
class BlockDims:
    """Thread block of d1 x d2 threads merging two hoods of interval length d = d1*d2."""

    d1: int
    d2: int

    def __post_init__(self):
        for value in (self.d1, self.d2):
            if value < 1 or value & (value - 1):
                raise ValueError(f"Block dimensions must be powers of 2, got {self.d1}x{self.d2}")
        if self.d1 not in (self.d2, 2 * self.d2):
            raise ValueError(f"d1 must equal d2 or 2*d2, got {self.d1}x{self.d2}")

    @property
    def d(self) -> int:
        return self.d1 * self.d2

    @property
    def r(self) -> int:
        return self.d.bit_length() - 1

    @classmethod
    def for_round(cls, r: int) -> 'BlockDims':
        return cls(2 ** ((r + 1) // 2), 2 ** (r // 2))


@dataclass(frozen=True)
class ThreadCoord:
    block: int
    x: int
    y: int
    dims: BlockDims

    @property
    def d1(self) -> int:
        return self.dims.d1

    @property
    def d2(self) -> int:
        return self.dims.d2

    @property
    def d(self) -> int:
        return self.dims.d

    @property
    def start(self) -> int:
        return self.block * 2 * self.dims.d

    @property
    def indx(self) -> int:
        return self.x + self.dims.d1 * self.y

    @property
    def thread_id(self) -> ThreadId:
        return (self.block, self.x, self.y)


PhaseFn = Callable[['SharedView', ThreadCoord, Any], Any]


def _no_locals() -> Any:
    return None


@dataclass(frozen=True)
class Phase:
    """
    One barrier-terminated step of a kernel.

    `fn(mem, coord, local)` reads and writes shared memory through `mem` and
    returns the thread's new locals. `exclusive` lists (array, offset from the
    block start) cells that exactly one thread of every block must write.
    """

    name: str
    fn: PhaseFn
    exclusive: Tuple[Tuple[str, int], ...] = ()


@dataclass(frozen=True)
class PhaseKernel:
    phases: Tuple[Phase, ...]
    grid: int
    dims: BlockDims
    make_locals: Callable[[], Any] = _no_locals
    name: str = "kernel"

    @property
    def threads_per_block(self) -> int:
        return self.dims.d

    def window(self, block: int) -> range:
        size = 2 * self.dims.d
        return range(block * size, (block + 1) * size)


@dataclass(frozen=True)
class MergeArrays:
    """The shared arrays of one match_and_merge launch."""

    hood: Tuple[Point2, ...]
    newhood: Tuple[Point2, ...]
    scratch: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.hood)

    def named(self) -> Dict[str, Sequence]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class WriteConflict:
    phase: str
    array: str
    index: int
    threads: Tuple[ThreadId, ...]
    values: Tuple[Any, ...]


@dataclass(frozen=True)
class ReadWriteOverlap:
    phase: str
    array: str
    index: int
    reader: ThreadId
    writer: ThreadId


@dataclass(frozen=True)
class WindowViolation:
    phase: str
    array: str
    index: int
    thread: ThreadId
    access: str  # "read" or "write"


@dataclass(frozen=True)
class MissingWrite:
    phase: str
    block: int
    array: str
    index: int


@dataclass
class ConflictReport:
    write_conflicts: List[WriteConflict] = field(default_factory=list)
    overlaps: List[ReadWriteOverlap] = field(default_factory=list)
    window_violations: List[WindowViolation] = field(default_factory=list)
    missing_writes: List[MissingWrite] = field(default_factory=list)

    @property
    def is_clean(self) -> bool:
        return self.total == 0

    @property
    def total(self) -> int:
        return sum(self.counts().values())

    def counts(self) -> Dict[str, int]:
        return {
            'write_conflicts': len(self.write_conflicts),
            'rw_overlaps': len(self.overlaps),
            'window_violations': len(self.window_violations),
            'missing_writes': len(self.missing_writes),
        }

    def extend(self, other: 'ConflictReport') -> None:
        self.write_conflicts.extend(other.write_conflicts)
        self.overlaps.extend(other.overlaps)
        self.window_violations.extend(other.window_violations)
        self.missing_writes.extend(other.missing_writes)

    def summary(self) -> str:
        return ", ".join(f"{count} {name}" for name, count in self.counts().items())


@dataclass
class StepMetrics:
    launches: int = 0
    barriers: int = 0
    thread_steps: int = 0

    def __add__(self, other: 'StepMetrics') -> 'StepMetrics':
        return StepMetrics(
            self.launches + other.launches,
            self.barriers + other.barriers,
            self.thread_steps + other.thread_steps,
        )

    @property
    def barriers_per_launch(self) -> float:
        return self.barriers / self.launches if self.launches else 0.0


class ArrayView:
    """Indexable view of one shared array as seen by one thread."""

    __slots__ = ('_mem', '_name')

    def __init__(self, mem: 'SharedView', name: str):
        self._mem = mem
        self._name = name

    def __getitem__(self, index: int) -> Any:
        return self._mem.load(self._name, index)

    def __setitem__(self, index: int, value: Any) -> None:
        self._mem.store(self._name, index, value)

    def __len__(self) -> int:
        return self._mem.size


class SharedView:
    """
    One thread's access to shared memory during one phase.

    Reads see the barrier snapshot; writes are only recorded. Arrays are
    exposed as attributes (`mem.hood`, `mem.scratch`, ...).
    """

    def __init__(self, base: Dict[str, Sequence], overlay: Dict[str, Dict[int, Any]]):
        self._base = base
        self._overlay = overlay
        self.size = len(next(iter(base.values()))) if base else 0
        self.reads: List[Tuple[str, int]] = []
        self.writes: List[Tuple[str, int, Any]] = []
        for name in base:
            setattr(self, name, ArrayView(self, name))

    def _check(self, name: str, index: int) -> int:
        index = operator.index(index)
        if not 0 <= index < self.size:
            raise OutOfBoundsAccess(name, index)
        return index

    def load(self, name: str, index: int) -> Any:
        index = self._check(name, index)
        self.reads.append((name, index))
        changed = self._overlay[name]
        return changed[index] if index in changed else self._base[name][index]

    def store(self, name: str, index: int, value: Any) -> None:
        index = self._check(name, index)
        self.writes.append((name, index, value))


def _audit_phase(phase: Phase, window: range, block: int,
                 coords: List[ThreadCoord], memories: List[SharedView]) -> ConflictReport:
    report = ConflictReport()
    writers: Dict[Tuple[str, int], Dict[ThreadId, Any]] = defaultdict(dict)
    for coord, mem in zip(coords, memories):
        tid = coord.thread_id
        for name, index, value in mem.writes:
            writers[(name, index)][tid] = value
            if index not in window:
                report.window_violations.append(WindowViolation(phase.name, name, index, tid, "write"))
        for name, index in dict.fromkeys(mem.reads):
            if index not in window:
                report.window_violations.append(WindowViolation(phase.name, name, index, tid, "read"))

    for (name, index), by_thread in writers.items():
        if len(by_thread) > 1:
            report.write_conflicts.append(WriteConflict(
                phase.name, name, index, tuple(by_thread), tuple(by_thread.values())))

    for coord, mem in zip(coords, memories):
        tid = coord.thread_id
        for cell in dict.fromkeys(mem.reads):
            for writer in writers.get(cell, ()):
                if writer != tid:
                    report.overlaps.append(ReadWriteOverlap(phase.name, cell[0], cell[1], tid, writer))

    for name, offset in phase.exclusive:
        index = window.start + offset
        if (name, index) not in writers:
            report.missing_writes.append(MissingWrite(phase.name, block, name, index))
    return report


def _run_block(kernel: PhaseKernel, base: Dict[str, Sequence], block: int,
               order_seed: Optional[int]) -> Tuple[Dict[str, Dict[int, Any]], ConflictReport]:
    dims = kernel.dims
    window = kernel.window(block)
    overlay: Dict[str, Dict[int, Any]] = {name: {} for name in base}
    # canonical order: rank == indx
    coords = [ThreadCoord(block, x, y, dims) for y in range(dims.d2) for x in range(dims.d1)]
    thread_locals = [kernel.make_locals() for _ in coords]
    rng = np.random.default_rng([order_seed % 2**32, block]) if order_seed is not None else None
    report = ConflictReport()

    for phase in kernel.phases:
        order = rng.permutation(len(coords)).tolist() if rng is not None else list(range(len(coords)))
        memories: List[SharedView] = [None] * len(coords)
        for rank in order:
            mem = SharedView(base, overlay)
            thread_locals[rank] = phase.fn(mem, coords[rank], thread_locals[rank])
            memories[rank] = mem
        report.extend(_audit_phase(phase, window, block, coords, memories))
        # barrier
        for mem in memories:
            for name, index, value in mem.writes:
                overlay[name][index] = value
    return overlay, report


def _prepare(kernel: PhaseKernel, arrays: MergeArrays,
             blocks: Optional[Iterable[int]]) -> Tuple[Dict[str, Sequence], List[int]]:
    base = arrays.named()
    lengths = {len(values) for values in base.values()}
    if len(lengths) != 1:
        raise ValueError(f"Shared arrays differ in length: {sorted(lengths)}")
    n = lengths.pop()
    if kernel.grid * 2 * kernel.dims.d != n:
        raise ValueError(
            f"Grid of {kernel.grid} blocks of {kernel.dims.d1}x{kernel.dims.d2} does not cover {n} slots")
    selected = list(range(kernel.grid)) if blocks is None else list(blocks)
    for block in selected:
        if not 0 <= block < kernel.grid:
            raise ValueError(f"Block {block} is outside the grid of {kernel.grid}")
    return base, selected


def _finish(kernel: PhaseKernel, arrays: MergeArrays, base: Dict[str, Sequence], selected: List[int],
            results: List[Tuple[Dict[str, Dict[int, Any]], ConflictReport]],
            strict: bool) -> Tuple[MergeArrays, ConflictReport, StepMetrics]:
    merged = {name: list(values) for name, values in base.items()}
    report = ConflictReport()
    for overlay, block_report in results:
        for name, changed in overlay.items():
            target = merged[name]
            for index, value in changed.items():
                target[index] = value
        report.extend(block_report)

    metrics = StepMetrics(
        launches=1,
        barriers=len(kernel.phases),
        thread_steps=len(selected) * kernel.threads_per_block * len(kernel.phases),
    )
    logger.debug(
        f"{kernel.name}: {len(selected)} blocks of {kernel.dims.d1}x{kernel.dims.d2}, "
        f"{metrics.barriers} barriers, {metrics.thread_steps} thread-steps")
    if not report.is_clean:
        logger.warning(f"{kernel.name}: audit found {report.summary()}")
        if strict:
            raise ConflictError(report)

    result = replace(arrays, **{name: tuple(values) for name, values in merged.items()})
    return result, report, metrics


def launch(kernel: PhaseKernel, arrays: MergeArrays, *, blocks: Optional[Iterable[int]] = None,
           order_seed: Optional[int] = None,
           strict: bool = False) -> Tuple[MergeArrays, ConflictReport, StepMetrics]:
    """
    Run a kernel over the grid, one block after another.

    Args:
        kernel: Phases, grid size and block dimensions
        arrays: Shared arrays, each of length grid * 2 * d
        blocks: Restrict the launch to these block indices
        order_seed: Shuffle thread evaluation order inside every phase
        strict: Raise ConflictError instead of returning a non-empty report

    Returns:
        (arrays after the last barrier, audit report, step counts)
    """
    base, selected = _prepare(kernel, arrays, blocks)
    results = [_run_block(kernel, base, block, order_seed) for block in selected]
    return _finish(kernel, arrays, base, selected, results, strict)


def run_blocks_parallel(kernel: PhaseKernel, arrays: MergeArrays, *, workers: Optional[int] = None,
                        blocks: Optional[Iterable[int]] = None, order_seed: Optional[int] = None,
                        strict: bool = False) -> Tuple[MergeArrays, ConflictReport, StepMetrics]:
    """Same contract as launch, with blocks dispatched to a pool of workers."""
    base, selected = _prepare(kernel, arrays, blocks)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda block: _run_block(kernel, base, block, order_seed), selected))
    return _finish(kernel, arrays, base, selected, results, strict)
