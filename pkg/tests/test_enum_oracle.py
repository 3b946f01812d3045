from fractions import Fraction

import pytest

from core.enum_oracle import (
    ClassDistribution,
    CycleDistribution,
    EnumerationOracle,
    brute_moments,
    tail_probabilities,
)
from core.errors import CapExceeded, InternalInconsistency, InvalidParams, RegimeMismatch
from core.exact_engine import (
    factorial_moments_tau,
    gf_domination_holds,
    moment_set_from_factorial,
    tail_bound_ab,
    tail_bound_ab_squared,
)
from core.permutation import CycleType, compose, conjugate, count_cycles, make_beta, random_permutation


@pytest.fixture(scope="module")
def oracle():
    return EnumerationOracle()


@pytest.mark.parametrize("n,count", [(2, 1), (4, 3), (6, 15), (12, 10395)])
def test_matching_counts(oracle, n, count):
    assert sum(1 for _ in oracle.enumerate_matchings(n)) == count


def test_matching_cap(oracle):
    with pytest.raises(CapExceeded) as excinfo:
        next(oracle.enumerate_matchings(16))
    assert excinfo.value.required == 2027025
    assert excinfo.value.exit_code == 3


def test_ab_distribution_six_three(oracle):
    dist, classes = oracle.exact_ab_distribution(6, 3)
    assert dist.support() == [1, 3]
    assert dist.probs[1] == Fraction(1, 5)
    assert dist.probs[3] == Fraction(4, 5)
    assert classes.sign == -1
    assert classes.probs[CycleType((6,))] == Fraction(1, 5)

    beta = make_beta(6, 3)
    brute = Fraction(sum(count_cycles((0,) + compose(a, beta).image) for a in oracle.enumerate_matchings(6)), 15)
    assert dist.mean() == brute


def test_ab_distribution_twelve_three(oracle):
    dist, classes = oracle.exact_ab_distribution(12, 3)
    assert sum(dist.probs.values()) == 1
    assert classes.sign == 1
    assert classes.marginal(3).probs == dist.probs
    for t, p in tail_probabilities(dist).items():
        assert p * p <= tail_bound_ab_squared(12, t)
        assert p <= tail_bound_ab(12, t)


@pytest.mark.parametrize("n,k", [(6, 3), (8, 4), (12, 3), (12, 6)])
def test_tail_and_generating_function_dominance(oracle, n, k):
    dist, _ = oracle.exact_ab_distribution(n, k)
    for t, p in tail_probabilities(dist).items():
        assert p * p <= tail_bound_ab_squared(n, t)
    for x in (1, Fraction(5, 4), Fraction(3, 2), 2):
        assert gf_domination_holds(n, dist.probs, x)


def test_parity_of_support(oracle):
    for n, k in [(6, 3), (8, 4), (12, 3), (12, 6)]:
        dist, classes = oracle.exact_ab_distribution(n, k)
        assert len({(n - t) % 2 for t in dist.support()}) == 1


def test_conjugation_invariance(oracle, rng):
    for n in (6, 12):
        beta = make_beta(n, 3)
        _, base = oracle.exact_ab_distribution(n, 3)
        for _ in range(3):
            other_beta = conjugate(beta, random_permutation(n, rng))
            _, other = oracle.exact_ab_distribution(n, 3, beta=other_beta)
            assert other.probs == base.probs


def test_explicit_beta_must_have_right_type(oracle):
    with pytest.raises(InvalidParams):
        oracle.exact_ab_distribution(6, 3, beta=make_beta(6, 6))


def test_tau_distribution(oracle):
    dist, _ = oracle.exact_tau_distribution(3)
    assert dist.probs[1] == Fraction(2, 3) and dist.probs[3] == Fraction(1, 3)

    dist, classes = oracle.exact_tau_distribution(4)
    assert classes.probs[CycleType((1, 1, 1, 1))] == Fraction(1, 12)
    assert classes.probs[CycleType((2, 2))] == Fraction(3, 12)
    assert classes.probs[CycleType((3, 1))] == Fraction(8, 12)
    assert classes.marginal().probs == dist.probs


def test_tau_distribution_moments_agree(oracle):
    dist, _ = oracle.exact_tau_distribution(8, with_classes=False)
    brute = brute_moments(dist, 4)
    formula = moment_set_from_factorial(factorial_moments_tau(8, 4), 4)
    assert brute == formula


def test_sigma_distribution(oracle):
    dist, classes = oracle.exact_sigma_distribution(4)
    assert dist.mean() == Fraction(25, 12)
    assert len(classes.probs) == 5
    assert classes.sign == 0
    assert classes.marginal().probs == dist.probs


def test_mixed_sign_classes_need_opt_out():
    mixed = {CycleType((2, 1)): Fraction(1, 2), CycleType((1, 1, 1)): Fraction(1, 2)}
    with pytest.raises(InternalInconsistency):
        ClassDistribution(3, mixed)
    assert ClassDistribution(3, mixed, single_coset=False).sign == 0


def test_point_mass_moments():
    dist = CycleDistribution(5, {3: Fraction(1)})
    ms = brute_moments(dist, 2)
    assert ms.mean == 3 and ms.central[1] == 0


def test_tv_distance(oracle):
    tv = oracle.tv_distance(12, 3)
    assert tv == Fraction(89869709, 239500800)
    assert 0 <= tv <= 1
    with pytest.raises(RegimeMismatch):
        oracle.tv_distance(6, 3)


def test_moment_transfer_gap(oracle):
    gaps = oracle.moment_transfer_gap(12, 3, 2)
    assert len(gaps) == 2 and all(g >= 0 for g in gaps)


def test_json_shapes(oracle):
    dist, classes = oracle.exact_ab_distribution(6, 3)
    assert dist.to_json_dict() == {"n": 6, "k": 3, "probs": {"1": "1/5", "3": "4/5"}}
    assert classes.to_json_dict(3)["classes"]["6"] == "1/5"
