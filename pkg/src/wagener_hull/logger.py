"""
Logging configuration for the hood builder.
Provides separate loggers for the host side and the execution engine.
"""

import logging
from pathlib import Path
from typing import Union


def _reset(logger: logging.Logger) -> None:
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()


def setup_loggers(log_dir: Union[str, Path] = 'logs',
                  level: str = 'INFO') -> tuple[logging.Logger, logging.Logger]:
    """Configure and return the hull and psim loggers."""
    log_dir = Path(log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)

    detailed_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    # stdout carries the OUTPUT grammar, so the console handler stays on stderr
    console_formatter = logging.Formatter('%(levelname)s: %(message)s')

    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, level.upper(), logging.INFO))
    console_handler.setFormatter(console_formatter)

    loggers = []
    for name in ('hull', 'psim'):
        logger = logging.getLogger(name)
        logger.setLevel(logging.DEBUG)
        _reset(logger)

        file_handler = logging.FileHandler(log_dir / f'{name}.log', mode='w')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(detailed_formatter)
        logger.addHandler(file_handler)
        logger.addHandler(console_handler)
        loggers.append(logger)

    hull_logger, psim_logger = loggers
    return hull_logger, psim_logger
