import math
from collections import Counter

import numpy as np
import pytest

from core.enum_oracle import EnumerationOracle
from core.errors import InvalidParams
from core.exact_engine import EULER_GAMMA, VARIANCE_CONSTANT
from core.mc_engine import (
    RunConfig,
    chi_square_test,
    default_tail_thresholds,
    run_mc,
    sample_cycles,
    component_counts,
    cycle_counts,
    sample_cycles_batch,
    sample_surfaces_batch,
)
from core.surface import invariants_from_cycles, validate_params


@pytest.fixture(scope="module")
def exact_12_3():
    dist, _ = EnumerationOracle().exact_ab_distribution(12, 3)
    return dist


def test_sample_cycles_parity(rng):
    for n, k in [(6, 3), (12, 3), (8, 4), (30, 5)]:
        parities = {(n - sample_cycles(n, k, rng)) % 2 for _ in range(200)}
        assert len(parities) == 1
        batch = sample_cycles_batch(n, k, rng, 200)
        assert {(n - int(t)) % 2 for t in batch} == parities


def test_sample_cycles_six_three(rng):
    draws = 15000
    hits = sum(sample_cycles(6, 3, rng) == 3 for _ in range(draws))
    p = 0.8
    assert abs(hits / draws - p) <= 3 * math.sqrt(p * (1 - p) / draws)


def test_sample_cycles_mean_twelve(rng, exact_12_3):
    draws = np.array([sample_cycles(12, 3, rng) for _ in range(20000)])
    se = draws.std() / math.sqrt(draws.size)
    assert abs(draws.mean() - float(exact_12_3.mean())) <= 4 * se


def test_batch_matches_exact_distribution(rng, exact_12_3):
    counts = sample_cycles_batch(12, 3, rng, 200000)
    observed = Counter(int(c) for c in counts)
    assert chi_square_test(observed, exact_12_3.probs).p_value > 1e-3


def test_sequential_matches_exact_distribution(rng, exact_12_3):
    observed = Counter(sample_cycles(12, 3, rng) for _ in range(30000))
    assert chi_square_test(observed, exact_12_3.probs).p_value > 1e-3


def test_chi_square_flags_impossible_values(exact_12_3):
    assert chi_square_test({3: 10, 5: 5}, exact_12_3.probs).p_value == 0.0
    assert chi_square_test({2: 400, 4: 500, 5: 1}, exact_12_3.probs).p_value == 0.0
    assert chi_square_test({2: 4390, 4: 5195, 6: 415}, exact_12_3.probs).p_value > 1e-3


def test_run_config_validation():
    with pytest.raises(InvalidParams):
        RunConfig(n=8, k=3, samples=10)
    with pytest.raises(InvalidParams):
        RunConfig(n=6, k=3, samples=0)
    with pytest.raises(InvalidParams):
        RunConfig(n=6, k=3, samples=10, seed=-1)
    assert RunConfig(n=600, k=3, samples=1).tail_thresholds == default_tail_thresholds(600)
    assert default_tail_thresholds(600) == (7, 12, 17, 22, 27, 32)


def test_single_sample():
    result = run_mc(RunConfig(n=60, k=3, samples=1, seed=3))
    assert result.moments.central2 == 0
    assert result.moments.mean == next(iter(result.surface.cycle_histogram))
    assert result.moments.standard_error_mean == 0


def test_run_mc_deterministic_with_threads():
    config = RunConfig(n=60, k=3, samples=5000, seed=9, threads=3)
    assert run_mc(config) == run_mc(config)


def test_run_mc_report_shape():
    result = run_mc(RunConfig(n=12, k=3, samples=4000, seed=1, threads=2, tail_thresholds=(1, 3, 5, 7)))
    emp = [result.tails.empirical[t] for t in result.tails.thresholds]
    assert emp == sorted(emp, reverse=True)
    assert emp[0] == 1.0
    assert result.tails.dominated()
    assert result.moments.exact_reference is not None
    assert result.moments.standard_error_mean == pytest.approx(math.sqrt(result.moments.central2 / 4000))
    assert sum(result.surface.genus_histogram.values()) == 4000
    expected_chi = result.moments.mean - 6 + 4
    assert result.surface.mean_euler_characteristic == pytest.approx(expected_chi)


@pytest.mark.slow
def test_large_n_asymptotics():
    n = 6000
    result = run_mc(RunConfig(n=n, k=3, samples=200000, seed=7, threads=4, tail_thresholds=(20, 30, 40)))
    assert abs(result.moments.mean - (math.log(n) + EULER_GAMMA)) <= 0.05
    assert abs(result.moments.central2 - (math.log(n) + VARIANCE_CONSTANT)) <= 0.10
    assert result.tails.dominated()


def _components_by_union_find(partner, k):
    parent = list(range(len(partner) // k))

    def find(f):
        while parent[f] != f:
            parent[f] = parent[parent[f]]
            f = parent[f]
        return f

    for i, j in enumerate(partner):
        a, b = find(i // k), find(int(j) // k)
        if a != b:
            parent[max(a, b)] = min(a, b)
    return sum(1 for f in range(len(parent)) if find(f) == f)


def test_two_pillows_are_two_components():
    partner = np.array([[5, 4, 3, 2, 1, 0, 11, 10, 9, 8, 7, 6]])
    assert cycle_counts(partner, 3).tolist() == [6]
    assert component_counts(partner, 3).tolist() == [2]
    torus = np.array([[3, 4, 5, 0, 1, 2]])
    assert cycle_counts(torus, 3).tolist() == [1]
    assert component_counts(torus, 3).tolist() == [1]


@pytest.mark.parametrize("n,k", [(12, 3), (24, 4), (60, 6)])
def test_component_counts_match_union_find(n, k, rng):
    order = rng.permuted(np.tile(np.arange(n), (300, 1)), axis=1)
    partner = np.empty_like(order)
    rows = np.arange(300)[:, None]
    partner[rows, order[:, 0::2]] = order[:, 1::2]
    partner[rows, order[:, 1::2]] = order[:, 0::2]
    expected = [_components_by_union_find(row, k) for row in partner]
    assert component_counts(partner, k).tolist() == expected


def test_sampled_surfaces_are_consistent(rng):
    params = validate_params(12, 3)
    cycles, components = sample_surfaces_batch(12, 3, rng, 20000)
    assert (components[cycles == 6] == 2).all()
    for v, c in set(zip(cycles.tolist(), components.tolist())):
        invariants_from_cycles(params, v, c)


def test_run_mc_handles_disconnected_surfaces():
    result = run_mc(RunConfig(n=12, k=3, samples=4000, seed=1))
    surface = result.surface
    assert surface.cycle_histogram.get(6, 0) > 0
    assert surface.component_histogram.get(2, 0) >= surface.cycle_histogram[6]
    assert surface.euler_histogram[4] == surface.cycle_histogram[6]
    assert sum(surface.genus_histogram.values()) == 4000
    assert sum(surface.component_histogram.values()) == 4000
