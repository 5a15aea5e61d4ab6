import math

import numpy as np


class PartialResultResolver:
    """
    Collects per-chunk results of a seed-range run and releases them, in
    chunk order, once every chunk has arrived.
    """

    def __init__(self):
        self.expected_chunks = {}
        self.chunk_data_storage = {}

    def open_run(self, key, total_chunks):
        if total_chunks is None or total_chunks == 0:
            raise ValueError("Total number of chunks cannot be zero")
        self.expected_chunks[key] = total_chunks
        self.chunk_data_storage[key] = {}

    def save_chunk(self, key, chunk_index, data):
        """Store one chunk. Returns True when the run is complete."""
        if key not in self.expected_chunks:
            raise ValueError(f"Unknown run {key!r}")
        if chunk_index is None:
            raise ValueError("Chunk index is missing")
        if not 0 <= chunk_index < self.expected_chunks[key]:
            raise ValueError(f"Chunk index {chunk_index} out of range")
        self.chunk_data_storage[key][chunk_index] = data
        return len(self.chunk_data_storage[key]) == self.expected_chunks[key]

    def is_complete(self, key):
        return len(self.chunk_data_storage.get(key, ())) == self.expected_chunks.get(key, -1)

    def resolve(self, key):
        """Chunk results in index order; clears the run."""
        if not self.is_complete(key):
            missing = self.expected_chunks[key] - len(self.chunk_data_storage[key])
            raise RuntimeError(f"Run {key!r} still waiting for {missing} chunk(s)")
        stored = self.chunk_data_storage.pop(key)
        del self.expected_chunks[key]
        return [stored[i] for i in range(len(stored))]


def merge_in_order(parts):
    merged = parts[0]
    for part in parts[1:]:
        merged = merged.merge(part)
    return merged


class MomentSums:
    """count, sum and sum of squares of a scalar sample."""

    def __init__(self, count=0, total=0.0, total_sq=0.0):
        self.count = count
        self.total = total
        self.total_sq = total_sq

    @classmethod
    def of(cls, values):
        values = np.asarray(values, dtype=np.float64)
        return cls(int(values.size), math.fsum(values), math.fsum(values * values))

    def merge(self, other):
        return MomentSums(self.count + other.count, self.total + other.total,
                          self.total_sq + other.total_sq)

    def mean(self):
        return self.total / self.count

    def variance(self):
        if self.count < 2:
            return 0.0
        mean = self.mean()
        return max(self.total_sq / self.count - mean * mean, 0.0) * self.count / (self.count - 1)

    def stderr(self):
        if self.count < 1:
            return math.nan
        return math.sqrt(self.variance() / self.count)


class LogMoments:
    """
    Running moments of exp(L) for log-values L, kept relative to the running
    maximum so nothing overflows: s1 = sum exp(L - max), s2 = sum exp(2(L - max)).
    """

    def __init__(self, count=0, log_max=-math.inf, s1=0.0, s2=0.0):
        self.count = count
        self.log_max = log_max
        self.s1 = s1
        self.s2 = s2

    @classmethod
    def of(cls, log_values):
        log_values = np.asarray(log_values, dtype=np.float64)
        if log_values.size == 0:
            return cls()
        log_max = float(np.max(log_values))
        scaled = np.exp(log_values - log_max)
        return cls(int(log_values.size), log_max, math.fsum(scaled), math.fsum(scaled * scaled))

    def merge(self, other):
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        log_max = max(self.log_max, other.log_max)
        a = math.exp(self.log_max - log_max)
        b = math.exp(other.log_max - log_max)
        return LogMoments(self.count + other.count, log_max,
                          self.s1 * a + other.s1 * b,
                          self.s2 * a * a + other.s2 * b * b)

    def log_mean(self):
        """log of the sample mean of exp(L)."""
        return self.log_max + math.log(self.s1 / self.count)

    def relative_stderr(self):
        """Standard error of the mean of exp(L), divided by that mean."""
        if self.count < 2:
            return math.nan
        mean = self.s1 / self.count
        second = self.s2 / self.count
        variance = max(second - mean * mean, 0.0) * self.count / (self.count - 1)
        return math.sqrt(variance / self.count) / mean
