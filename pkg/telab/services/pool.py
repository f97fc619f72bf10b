"""
Пул воркерів для незалежних задач (мода, k, область)

Задачі - це picklable функції верхнього рівня з picklable аргументами.
Результати повертаються в порядку задач, тому кількість воркерів ніколи не
впливає на вихідні файли.

Використання:
    async with WorkerPool(threads=4) as pool:
        results = await pool.map(locate_task, tasks)
"""
from __future__ import annotations

import asyncio
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, List, Optional, Sequence

from telab.config import settings
from telab.logger import logger


class WorkerPool:
    """
    threads == 1 - задачі виконуються в цьому процесі по черзі
    threads > 1  - ProcessPoolExecutor з threads процесами
    """

    def __init__(self, threads: Optional[int] = None):
        self.threads = max(1, threads or settings.THREADS)
        self._executor: Optional[ProcessPoolExecutor] = None

    async def __aenter__(self) -> "WorkerPool":
        if self.threads > 1:
            self._executor = ProcessPoolExecutor(max_workers=self.threads)
            logger.info(f"🧵 Пул воркерів: {self.threads} процесів")
        return self

    async def __aexit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True, cancel_futures=True)
            self._executor = None

    async def map(self, fn: Callable[[Any], Any], items: Sequence[Any]) -> List[Any]:
        """fn(item) для кожного item; результат у порядку items"""
        if not items:
            return []
        if self._executor is None:
            results = []
            for item in items:
                results.append(fn(item))
                # віддати керування циклу подій між задачами
                await asyncio.sleep(0)
            return results

        loop = asyncio.get_running_loop()
        futures = [loop.run_in_executor(self._executor, fn, item) for item in items]
        return list(await asyncio.gather(*futures))
