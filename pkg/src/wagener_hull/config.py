"""
Runtime configuration read from the environment (and a .env file, if present).
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger('hull')

_TRUE = {'1', 'true', 'yes', 'on'}


@dataclass
class HullConfig:
    log_dir: Path = Path('logs')
    log_level: str = 'INFO'
    strict: bool = False
    workers: Optional[int] = None
    validation_seed: int = 0

    @classmethod
    def from_env(cls) -> 'HullConfig':
        """Create a HullConfig from HULL_* environment variables."""
        load_dotenv()

        workers = None
        raw_workers = os.environ.get('HULL_WORKERS')
        if raw_workers:
            try:
                workers = int(raw_workers)
            except ValueError:
                logger.warning(f"Ignoring HULL_WORKERS={raw_workers!r}: not an integer")
            else:
                if workers < 1:
                    logger.warning(f"Ignoring HULL_WORKERS={workers}: must be positive")
                    workers = None

        raw_seed = os.environ.get('HULL_VALIDATION_SEED', '0')
        try:
            seed = int(raw_seed)
        except ValueError:
            logger.warning(f"Ignoring HULL_VALIDATION_SEED={raw_seed!r}: not an integer")
            seed = 0

        return cls(
            log_dir=Path(os.environ.get('HULL_LOG_DIR', 'logs')),
            log_level=os.environ.get('HULL_LOG_LEVEL', 'INFO').upper(),
            strict=os.environ.get('HULL_STRICT', 'false').strip().lower() in _TRUE,
            workers=workers,
            validation_seed=seed,
        )
