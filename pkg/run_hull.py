#!/usr/bin/env python3
"""
Run the hood builder without installing the package.
This is a simple entry point script that puts src/ on the path and runs the CLI.
"""

import logging
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / 'src'))

try:
    from wagener_hull.cli import main

    if __name__ == '__main__':
        sys.exit(main())
except ImportError:
    logging.error("Failed to import the wagener_hull package. Make sure its dependencies are installed.")
    raise
