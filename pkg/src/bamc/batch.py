"""Directory-level detection with a bounded worker pool."""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import imageio, pipeline

log = logging.getLogger(__name__)

THREADS_ENV = "BAMC_THREADS"


@dataclass(frozen=True)
class FileOutcome:
    source: Path
    output: Path | None
    error: str | None = None

    @property
    def ok(self):
        return self.error is None


def worker_count(requested=1):
    """Clamp the requested pool size to ``$BAMC_THREADS`` when that is set."""
    jobs = max(1, int(requested))
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            jobs = min(jobs, max(1, int(cap)))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, cap)
    return jobs


def _process_one(args):
    src, dst, config = args
    try:
        pipeline.detect_file(src, dst, config)
    except Exception as exc:  # noqa: BLE001 - one bad file must not abort the batch
        return FileOutcome(source=src, output=None, error=f"{type(exc).__name__}: {exc}")
    return FileOutcome(source=src, output=dst)


def run_batch(input_dir, output_dir, config=pipeline.PipelineConfig(), jobs=1):
    """Detect saliency for every PNG/JPEG in ``input_dir``.

    Outputs are written as ``<output_dir>/<stem>.png``. Results come back in
    sorted input order regardless of the pool size.
    """
    input_dir, output_dir = Path(input_dir), Path(output_dir)
    if not input_dir.is_dir():
        raise FileNotFoundError(f"input directory {input_dir} does not exist")
    output_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(src, output_dir / f"{src.stem}.png", config) for src in imageio.list_images(input_dir)]
    jobs = worker_count(jobs)
    if jobs == 1 or len(tasks) <= 1:
        return [_process_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_process_one, tasks, chunksize=1))
