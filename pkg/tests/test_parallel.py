import math

import numpy as np
import pytest

from finitary_beta.cocycle import CocycleContext, entropy_rate_estimate
from finitary_beta.parallel import LogMoments, MomentSums, PartialResultResolver, SeedRangePool, merge_in_order
from finitary_beta.prob import ProbVector


def _span(chunk_start, chunk_count):
    return list(range(chunk_start, chunk_start + chunk_count))


def test_resolver_releases_chunks_in_order():
    resolver = PartialResultResolver()
    resolver.open_run("run", 3)
    assert not resolver.save_chunk("run", 2, "c")
    assert not resolver.save_chunk("run", 0, "a")
    assert not resolver.is_complete("run")
    assert resolver.save_chunk("run", 1, "b")
    assert resolver.resolve("run") == ["a", "b", "c"]
    assert not resolver.is_complete("run")


def test_resolver_errors():
    resolver = PartialResultResolver()
    with pytest.raises(ValueError, match="cannot be zero"):
        resolver.open_run("run", 0)
    resolver.open_run("run", 2)
    with pytest.raises(ValueError, match="missing"):
        resolver.save_chunk("run", None, "x")
    with pytest.raises(ValueError):
        resolver.save_chunk("run", 5, "x")
    with pytest.raises(ValueError):
        resolver.save_chunk("other", 0, "x")
    resolver.save_chunk("run", 0, "x")
    with pytest.raises(RuntimeError):
        resolver.resolve("run")


def test_chunking_ignores_worker_count():
    assert SeedRangePool(1, chunk_size=4).chunks(10, 10) == [(0, 10, 4), (1, 14, 4), (2, 18, 2)]
    assert SeedRangePool(8, chunk_size=4).chunks(10, 10) == SeedRangePool(1, chunk_size=4).chunks(10, 10)


def test_inline_run_returns_chunk_results_in_order():
    parts = SeedRangePool(1, chunk_size=3).run(_span, 5, 7)
    assert parts == [[5, 6, 7], [8, 9, 10], [11]]
    with pytest.raises(ValueError):
        SeedRangePool(1).run(_span, 0, 0)
    with pytest.raises(ValueError):
        SeedRangePool(0)


def test_results_do_not_depend_on_workers():
    ctx = CocycleContext(ProbVector([0.5, 0.3, 0.2]))
    serial = entropy_rate_estimate(ctx, 3, 10_000, seed=2, workers=1)
    pooled = entropy_rate_estimate(ctx, 3, 10_000, seed=2, workers=2)
    assert serial == pooled


def test_moment_sums_merge():
    values = np.linspace(-1.0, 2.0, 11)
    whole = MomentSums.of(values)
    merged = merge_in_order([MomentSums.of(values[:4]), MomentSums.of(values[4:])])
    assert merged.count == 11
    assert merged.mean() == pytest.approx(whole.mean())
    assert merged.variance() == pytest.approx(float(np.var(values, ddof=1)))
    assert merged.stderr() == pytest.approx(math.sqrt(np.var(values, ddof=1) / 11))


def test_log_moments_merge_without_overflow():
    logs = np.array([0.0, math.log(2.0)])
    assert LogMoments.of(logs).log_mean() == pytest.approx(math.log(1.5))
    big = np.array([800.0, 801.0, 799.0, 800.5])
    merged = LogMoments.of(big[:1]).merge(LogMoments.of(big[1:]))
    expected = 800.0 + math.log(np.mean(np.exp(big - 800.0)))
    assert merged.log_mean() == pytest.approx(expected)
    assert math.isfinite(merged.relative_stderr())
    assert LogMoments().merge(merged) is merged
