"""
Command-line surface: point files, trace files, SVG rendering and bench tables.

INPUT   integer n, then n whitespace-separated "x y" pairs; lines starting # are ignored
OUTPUT  "points <n>" and n coordinate lines, then "hood <k>" and k coordinate lines
TRACE   per round "d <d>", then per block "<size>" and that many coordinate lines; final "0"
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence, TextIO, Tuple, Union

import matplotlib.pyplot as plt
import pandas as pd

from .config import HullConfig
from .driver import RoundRecord, build_hood, iter_rounds
from .errors import HullError, NotPowerOfTwo, PointFileError
from .geom import Point2
from .hoodbuf import (HoodBuffer, PointSet, block_corners, is_power_of_two,
                      random_point_set, validate_points)
from .logger import setup_loggers
from .oracle import oracle_upper_hull

logger = logging.getLogger('hull')

PathLike = Union[str, Path]

BENCH_COLUMNS = [
    'round', 'd1', 'd2', 'd', 'blocks', 'launches', 'barriers', 'thread_steps',
    'write_conflicts', 'rw_overlaps', 'window_violations', 'missing_writes',
]
SCRATCH_PER_LINE = 16


def format_point(p: Point2) -> str:
    return f"{p.x:.17g} {p.y:.17g}"


def _tokens(lines: Iterable[str]) -> Iterator[Tuple[int, str]]:
    for line_no, line in enumerate(lines, start=1):
        if line.lstrip().startswith('#'):
            continue
        for token in line.split():
            yield line_no, token


def read_points(path: PathLike, seed: int = 0) -> PointSet:
    """
    Read and validate a point file.

    Args:
        path: File in the INPUT grammar
        seed: Seed for the sampled collinearity check

    Returns:
        Validated PointSet

    Raises:
        OSError: if the file cannot be opened
        PointFileError: on malformed content
        ValidationError: if the points violate an input assumption
    """
    with Path(path).open('r') as f:
        tokens = list(_tokens(f))
    if not tokens:
        raise PointFileError("missing point count")

    line_no, first = tokens[0]
    try:
        count = int(first)
    except ValueError:
        raise PointFileError(f"expected point count, got {first!r}", line_no) from None
    if not is_power_of_two(count):
        raise NotPowerOfTwo(count)

    values = tokens[1:]
    if len(values) < 2 * count:
        last_line = values[-1][0] if values else line_no
        raise PointFileError(f"expected {count} points, found {len(values) // 2}", last_line)
    if len(values) > 2 * count:
        raise PointFileError("unexpected data after the last point", values[2 * count][0])

    coords: List[float] = []
    for value_line, token in values:
        try:
            coords.append(float(token))
        except ValueError:
            raise PointFileError(f"not a number: {token!r}", value_line) from None
    ps = validate_points(list(zip(coords[0::2], coords[1::2])), seed=seed)
    logger.debug(f"Read {ps.n} points from {path}")
    return ps


def write_points(ps: Union[PointSet, Sequence[Point2]], path: PathLike) -> None:
    points = list(ps)
    lines = [str(len(points))] + [format_point(p) for p in points]
    Path(path).write_text("\n".join(lines) + "\n")


def format_output(points: Sequence[Point2], hood: Sequence[Point2]) -> List[str]:
    return [
        f"points {len(points)}",
        *(format_point(p) for p in points),
        f"hood {len(hood)}",
        *(format_point(p) for p in hood),
    ]


class TraceWriter:
    """Writes the intermediate hoods of a build in the TRACE grammar."""

    def __init__(self, stream: TextIO, owns_stream: bool = False):
        self.stream = stream
        self.owns_stream = owns_stream
        self.rounds = 0

    @classmethod
    def open(cls, path: PathLike) -> 'TraceWriter':
        return cls(Path(path).open('w'), owns_stream=True)

    def show_current_hoods(self, buffer: HoodBuffer) -> None:
        lines = [f"d {buffer.d}"]
        for b in range(buffer.block_count):
            corners = block_corners(buffer, b)
            lines.append(str(len(corners)))
            lines.extend(format_point(p) for p in corners)
        self.stream.write("\n".join(lines) + "\n")
        self.rounds += 1

    def finish(self) -> None:
        self.stream.write("0\n")
        self.close()

    def close(self) -> None:
        if self.owns_stream and not self.stream.closed:
            self.stream.close()


def emit_svg(points: Sequence[Point2], hood: Sequence[Point2], path: PathLike, size: int = 512) -> None:
    """Render the points as dots and the hood as a red line over the unit square."""
    # no simplification, so every hood corner stays a vertex of the drawn path
    with plt.rc_context({'path.simplify': False}):
        fig, ax = plt.subplots(figsize=(size / 100, size / 100), dpi=100)
        try:
            ax.scatter([p.x for p in points], [p.y for p in points], s=4, color='black', gid='points')
            ax.plot([p.x for p in hood], [p.y for p in hood], color='red', linewidth=1, gid='hood')
            ax.set_xlim(0, 1)
            ax.set_ylim(0, 1)
            ax.set_aspect('equal')
            fig.savefig(path, format='svg')
        finally:
            plt.close(fig)
    logger.info(f"Wrote SVG with {len(hood)} hood corners to {path}")


def _verbose_dump(record: RoundRecord, out: TextIO) -> None:
    dims = record.dims
    out.write(f"# returned from match_and_merge, d1={dims.d1}, d2={dims.d2}, d={dims.d}\n")
    scratch = record.scratch
    for offset in range(0, len(scratch), SCRATCH_PER_LINE):
        row = " ".join(str(v) for v in scratch[offset:offset + SCRATCH_PER_LINE])
        out.write(f"# {row}\n")


def _newhood_dump(slots: Sequence[Point2], out: TextIO) -> None:
    out.write("#newhood contents\n")
    for p in slots:
        out.write(f"# {format_point(p)}\n")


def run(input_path: PathLike, trace_path: Optional[PathLike] = None, mode: str = 'parallel',
        svg_path: Optional[PathLike] = None, strict: bool = False, workers: Optional[int] = None,
        verbose: bool = False, seed: int = 0, out: Optional[TextIO] = None) -> int:
    """
    Build the hood of a point file and write the OUTPUT grammar.

    Returns:
        0 on success, 1 if the parallel and serial hoods differ
    """
    if mode not in ('parallel', 'serial', 'both'):
        raise ValueError(f"Unknown mode: {mode}")
    out = out or sys.stdout
    ps = read_points(input_path, seed=seed)

    hood: Optional[List[Point2]] = None
    if mode in ('parallel', 'both'):
        trace = None
        if trace_path is not None:
            try:
                trace = TraceWriter.open(trace_path)
            except OSError as e:
                logger.error(f"Can't write to {trace_path}: {e}")
        rounds: List[RoundRecord] = []

        def dump_round(record: RoundRecord) -> None:
            _verbose_dump(record, out)
            rounds.append(record)

        try:
            hood = build_hood(ps, trace, workers=workers, strict=strict,
                              on_round=dump_round if verbose else None)
        finally:
            if trace is not None:
                trace.close()
        if verbose:
            _newhood_dump(rounds[-1].after.slots if rounds else ps.points, out)
    elif trace_path is not None:
        logger.warning("Serial mode writes no trace")

    serial = oracle_upper_hull(ps.points) if mode in ('serial', 'both') else None
    if hood is None:
        hood = serial

    out.write("\n".join(format_output(ps.points, hood)) + "\n")
    if svg_path is not None:
        emit_svg(ps.points, hood, svg_path)

    if serial is not None and hood != serial:
        logger.error(f"Parallel hood ({len(hood)} corners) differs from serial hood ({len(serial)} corners)")
        return 1
    return 0


def bench(input_path: PathLike, workers: Optional[int] = None, stats_path: Optional[PathLike] = None,
          seed: int = 0, out: Optional[TextIO] = None) -> int:
    """Print per-round step counts and audit findings as a tab-separated table."""
    out = out or sys.stdout
    ps = read_points(input_path, seed=seed)

    rows = []
    for record in iter_rounds(ps, workers=workers):
        rows.append({
            'round': record.index,
            'd1': record.dims.d1,
            'd2': record.dims.d2,
            'd': record.dims.d,
            'blocks': ps.n // (2 * record.dims.d),
            'launches': record.metrics.launches,
            'barriers': record.metrics.barriers,
            'thread_steps': record.metrics.thread_steps,
            **record.report.counts(),
        })
    total = {column: sum(row[column] for row in rows) for column in BENCH_COLUMNS[4:]}
    rows.append({'round': 'total', 'd1': '', 'd2': '', 'd': '', **total})

    df = pd.DataFrame(rows, columns=BENCH_COLUMNS)
    df.to_csv(out, sep='\t', index=False)

    if stats_path is not None:
        stats = {'points': ps.n, 'rounds': len(rows) - 1, **total}
        stats_path = Path(stats_path)
        stats_path.parent.mkdir(parents=True, exist_ok=True)
        with stats_path.open('w') as f:
            json.dump(stats, f, indent=4)
        logger.info(f"Saved bench statistics to {stats_path}")
    return 0


def generate(n: int, output_path: PathLike, seed: Optional[int] = None, shape: str = 'uniform') -> int:
    ps = random_point_set(n, seed=seed, shape=shape)
    write_points(ps, output_path)
    logger.info(f"Wrote {ps.n} {shape} points to {output_path}")
    return 0


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {value}")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='hull', description="Parallel upper hull by pairwise hood merging")
    commands = parser.add_subparsers(dest='command', required=True)

    run_parser = commands.add_parser('run', help="Build the hood of a point file")
    run_parser.add_argument('input')
    run_parser.add_argument('--trace', help="Write intermediate hoods to this file")
    run_parser.add_argument('--mode', choices=['parallel', 'serial', 'both'], default='parallel')
    run_parser.add_argument('--svg', help="Render points and hood to this SVG file")
    run_parser.add_argument('--strict', action='store_true', help="Fail on any audit finding")
    run_parser.add_argument('--workers', type=_positive_int, help="Dispatch blocks to this many threads")
    run_parser.add_argument('--verbose', action='store_true', help="Dump scratch arrays as # comments")

    bench_parser = commands.add_parser('bench', help="Per-round step counts and audit findings")
    bench_parser.add_argument('input')
    bench_parser.add_argument('--workers', type=_positive_int)
    bench_parser.add_argument('--stats', help="Save totals as JSON")

    gen_parser = commands.add_parser('generate', help="Write a random valid point file")
    gen_parser.add_argument('n', type=int)
    gen_parser.add_argument('output')
    gen_parser.add_argument('--seed', type=int)
    gen_parser.add_argument('--shape', choices=['uniform', 'cap'], default='uniform')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the hull command."""
    args = build_parser().parse_args(argv)
    config = HullConfig.from_env()
    setup_loggers(config.log_dir, config.log_level)

    workers = getattr(args, 'workers', None) or config.workers
    try:
        if args.command == 'run':
            return run(args.input, trace_path=args.trace, mode=args.mode, svg_path=args.svg,
                       strict=args.strict or config.strict, workers=workers,
                       verbose=args.verbose, seed=config.validation_seed)
        if args.command == 'bench':
            return bench(args.input, workers=workers, stats_path=args.stats, seed=config.validation_seed)
        return generate(args.n, args.output, seed=args.seed, shape=args.shape)
    except (HullError, OSError) as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        return 1
