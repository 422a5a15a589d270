import asyncio
import functools
import logging
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor

logger = logging.getLogger(__name__)


class ScenarioRunner:
    """
    Runs independent jobs (scenarios or acceptance checks) on a pool of
    ``jobs`` worker processes.  With one job everything runs on a single
    worker thread, in order.  Results come back in submission order.
    """

    def __init__(self, jobs=1, *, loop=None):
        if jobs < 1:
            raise ValueError('jobs must be positive, got {}'.format(jobs))
        self.jobs = jobs
        self._loop = loop

    def _executor(self):
        if self.jobs == 1:
            return ThreadPoolExecutor(max_workers=1)
        return ProcessPoolExecutor(max_workers=self.jobs)

    async def map(self, function, items, *args):
        """``[function(item, *args) for item in items]``, concurrently."""
        loop = self._loop or asyncio.get_event_loop()
        semaphore = asyncio.Semaphore(self.jobs)

        async def submit(executor, item):
            async with semaphore:
                logger.debug('Starting %s(%r)', function.__name__, item)
                return await loop.run_in_executor(
                    executor, functools.partial(function, item, *args))

        with self._executor() as executor:
            return await asyncio.gather(
                *[submit(executor, item) for item in items])

    def run(self, function, items, *args):
        """Blocking form of :meth:`map` on a fresh event loop."""
        loop = asyncio.new_event_loop()
        self._loop = loop
        try:
            return loop.run_until_complete(self.map(function, items, *args))
        finally:
            self._loop = None
            loop.close()
