"""Process-pool helpers for the exhaustive verification suites."""

import logging
from concurrent.futures import ProcessPoolExecutor
from functools import reduce
from typing import Callable, Iterable, Optional, TypeVar

import psutil

from .report import Report

logger = logging.getLogger(__name__)

T = TypeVar("T")


def resolve_jobs(jobs: Optional[int]) -> int:
    """Turn a --jobs value into a worker count.

    None or 0 means one worker per physical CPU.
    """
    if jobs is None or jobs <= 0:
        count = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
        logger.debug("Using %d workers", count)
        return count
    return jobs


def run_partitioned(
    suite: str,
    task: Callable[[T], Report],
    chunks: Iterable[T],
    jobs: Optional[int] = 1,
) -> Report:
    """Run task on every chunk and merge the reports.

    task must be a module-level function so it can be pickled.
    """
    chunks = list(chunks)
    workers = min(resolve_jobs(jobs), max(len(chunks), 1))
    if workers <= 1:
        reports = [task(chunk) for chunk in chunks]
    else:
        logger.info("Running %s over %d chunks on %d workers", suite, len(chunks), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(task, chunks))
    return reduce(Report.merge, reports, Report(suite=suite))
