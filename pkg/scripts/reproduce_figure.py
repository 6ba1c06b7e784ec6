"""
Script to regenerate the 1024-point sample figure: random points, their hood
built by the simulated kernel, checked against the serial hull and rendered as SVG.
"""

import argparse
import logging
import sys
from pathlib import Path

# Add the src directory to the Python path
src_dir = Path(__file__).parent.parent / 'src'
sys.path.insert(0, str(src_dir))

from wagener_hull.cli import emit_svg, write_points
from wagener_hull.driver import build_hood
from wagener_hull.hoodbuf import random_point_set
from wagener_hull.oracle import oracle_upper_hull

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger('hull')


def main():
    """Build and render the sample figure."""
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument('--points', type=int, default=1024)
    parser.add_argument('--seed', type=int, default=1)
    parser.add_argument('--out-dir', type=Path, default=Path('figures'))
    args = parser.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    ps = random_point_set(args.points, seed=args.seed)
    write_points(ps, args.out_dir / f'points_{args.points}.txt')

    hood = build_hood(ps)
    if hood != oracle_upper_hull(ps.points):
        logger.error("Kernel hood differs from the serial hull")
        sys.exit(1)

    svg_path = args.out_dir / f'hood_{args.points}.svg'
    emit_svg(ps.points, hood, svg_path)
    logger.info(f"{len(hood)} corners out of {ps.n} points, figure at {svg_path}")


if __name__ == '__main__':
    main()
