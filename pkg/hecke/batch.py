# hecke/batch.py
# Reparto de trabajos independientes (clases por p, verificaciones por spec)
# entre hilos con un semáforo asyncio; los resultados vuelven en el orden de entrada.
from __future__ import annotations

import asyncio
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence

from .logs import log_json
from .settings import settings


@dataclass
class JobResult:
    key: Any
    value: Any = None
    error: Optional[BaseException] = None

    @property
    def ok(self) -> bool:
        return self.error is None


async def _run_jobs(fn: Callable[[Any], Any], keys: Sequence[Any], workers: int) -> List[JobResult]:
    sem = asyncio.Semaphore(workers)
    results: List[Optional[JobResult]] = [None] * len(keys)
    processed = 0

    async def worker(i: int, key: Any):
        nonlocal processed
        async with sem:
            try:
                value = await asyncio.to_thread(fn, key)
                results[i] = JobResult(key, value)
            except Exception as e:
                log_json(evt="job_error", key=key, error=str(e), type=type(e).__name__)
                results[i] = JobResult(key, error=e)
            processed += 1
            log_json(evt="batch_progress", processed=processed, of=len(keys))

    await asyncio.gather(*[worker(i, k) for i, k in enumerate(keys)])
    return [r for r in results if r is not None]


def run_jobs(fn: Callable[[Any], Any], keys: Sequence[Any],
             workers: Optional[int] = None) -> List[JobResult]:
    """Ejecuta fn(key) para cada key; nunca propaga excepciones (quedan en JobResult.error)."""
    if not keys:
        return []
    return asyncio.run(_run_jobs(fn, list(keys), max(1, workers or settings.MAX_CONCURRENCY)))
