import numpy as np
import pytest

from core.moments import MomentAccumulator


def _population_moments(values):
    x = np.asarray(values, dtype=float)
    d = x - x.mean()
    return x.mean(), (d ** 2).mean(), (d ** 3).mean(), (d ** 4).mean()


def test_single_value():
    acc = MomentAccumulator()
    acc.add(7)
    assert acc.mean == 7
    assert acc.central_moments() == (0.0, 0.0, 0.0)
    assert acc.standard_error == 0.0


def test_streaming_matches_direct(rng):
    values = rng.integers(1, 30, size=2000)
    acc = MomentAccumulator()
    for v in values:
        acc.add(int(v))
    mean, c2, c3, c4 = _population_moments(values)
    assert acc.mean == pytest.approx(mean)
    assert acc.central_moments() == pytest.approx((c2, c3, c4))


def test_batches_and_merge_match_direct(rng):
    values = rng.integers(1, 30, size=3000)
    parts = [MomentAccumulator() for _ in range(3)]
    for part, chunk in zip(parts, np.array_split(values, 3)):
        part.add_batch(chunk)
    total = MomentAccumulator()
    for part in parts:
        total.merge(part)
    mean, c2, c3, c4 = _population_moments(values)
    assert total.count == 3000
    assert total.mean == pytest.approx(mean)
    assert total.central_moments() == pytest.approx((c2, c3, c4))


def test_merge_with_empty():
    acc = MomentAccumulator()
    acc.add_batch([1, 2, 3])
    acc.merge(MomentAccumulator())
    empty = MomentAccumulator().merge(acc)
    assert empty.mean == acc.mean == 2
    acc.add_batch([])
    assert acc.count == 3
