import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor

from ..constants import DEFAULT_CHUNK_SIZE
from .partial_results import PartialResultResolver


class SeedRangePool:
    """
    Runs `fn(chunk_start, chunk_count, *args)` over fixed-size chunks of a seed
    range and returns the chunk results in chunk order.

    `fn` must be a module-level function so the process pool can pickle it.
    Results do not depend on `workers`: chunk boundaries come from
    `chunk_size` alone and merging follows chunk index.
    """

    def __init__(self, workers=1, chunk_size=DEFAULT_CHUNK_SIZE, logger: logging.Logger = None):
        self.logger = logger.getChild(self.__class__.__name__) if logger else logging.getLogger(self.__class__.__name__)
        if workers < 1:
            raise ValueError("workers must be >= 1")
        if chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        self.workers = workers
        self.chunk_size = chunk_size
        self.resolver = PartialResultResolver()
        self._runs = 0

    def chunks(self, start, count):
        out = []
        offset = 0
        while offset < count:
            size = min(self.chunk_size, count - offset)
            out.append((len(out), start + offset, size))
            offset += size
        return out

    def run(self, fn, start, count, *args):
        chunks = self.chunks(start, count)
        if not chunks:
            raise ValueError("empty seed range")
        key = self._runs
        self._runs += 1
        self.resolver.open_run(key, len(chunks))

        if self.workers == 1 or len(chunks) == 1:
            self.logger.debug(f"Running {len(chunks)} chunk(s) inline")
            for index, chunk_start, chunk_count in chunks:
                self.resolver.save_chunk(key, index, fn(chunk_start, chunk_count, *args))
        else:
            asyncio.run(self._run_async(key, chunks, fn, args))
        return self.resolver.resolve(key)

    async def _run_async(self, key, chunks, fn, args):
        loop = asyncio.get_running_loop()
        self.logger.info(f"Dispatching {len(chunks)} chunks to {self.workers} workers")
        with ProcessPoolExecutor(max_workers=self.workers) as executor:
            futures = [
                loop.run_in_executor(executor, fn, chunk_start, chunk_count, *args)
                for _, chunk_start, chunk_count in chunks
            ]
            results = await asyncio.gather(*futures)
        for (index, _, _), result in zip(chunks, results):
            self.resolver.save_chunk(key, index, result)
