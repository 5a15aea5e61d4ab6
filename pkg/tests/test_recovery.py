from fractions import Fraction

import numpy as np
import pytest

from finitary_beta.errors import InconsistentPowerSums, NumericFailure, ValidationError
from finitary_beta.prob import ProbVector
from finitary_beta.recovery import (
    PowerSums,
    characteristic_polynomial,
    distinguish,
    durand_kerner,
    newton_to_elementary,
    permutation_equivalent,
    power_sums,
    power_sums_agree,
    recover_vector,
    square_free_factors,
)

UNIFORM4 = ProbVector([0.25] * 4)
HALF_EIGHTHS = ProbVector([0.5, 0.125, 0.125, 0.125, 0.125])


def test_recover_two_symbols():
    recovered = recover_vector(PowerSums(["1", "0.625"]), 2)
    assert recovered.to_list() == pytest.approx([0.75, 0.25], abs=1e-12)


def test_newton_identities_exact():
    ps = power_sums(ProbVector([0.5, 0.3, 0.2]), 3)
    assert ps.to_list() == pytest.approx([1.0, 0.38, 0.16])
    assert newton_to_elementary(ps, 3) == [1, Fraction(31, 100), Fraction(3, 100)]
    assert characteristic_polynomial([1, Fraction(31, 100), Fraction(3, 100)]) == [
        1, -1, Fraction(31, 100), Fraction(-3, 100)]


def test_square_free_factors():
    poly = [Fraction(c) for c in (1, -4, 5, -2)]
    factors = {(tuple(f), k) for f, k in square_free_factors(poly)}
    assert factors == {((1, -2), 1), ((1, -1), 2)}


def test_durand_kerner_simple_roots():
    roots, converged, _ = durand_kerner([1, -3, 2])
    assert converged
    assert sorted(r.real for r in roots) == pytest.approx([1.0, 2.0], abs=1e-10)


def _well_separated(rng, m, gap=1e-3):
    while True:
        v = rng.dirichlet(np.ones(m))
        if m == 1 or np.min(np.diff(np.sort(v))) >= gap:
            return v.tolist()


def test_round_trip_random_vectors():
    rng = np.random.default_rng(5)
    for _ in range(200):
        m = int(rng.integers(1, 9))
        p = ProbVector(_well_separated(rng, m))
        recovered = recover_vector(power_sums(p, m), m)
        assert np.max(np.abs(np.array(recovered.to_list()) - np.sort(p.weights)[::-1])) < 1e-8


@pytest.mark.parametrize("weights", [
    [0.25, 0.25, 0.25, 0.25],
    [0.4, 0.2, 0.2, 0.1, 0.1],
    [0.3, 0.3, 0.3, 0.1],
    [0.5, 0.5],
])
def test_repeated_entries(weights):
    p = ProbVector(weights)
    recovered = recover_vector(power_sums(p, p.m), p.m)
    assert recovered.to_list() == pytest.approx(sorted(weights, reverse=True), abs=1e-6)


def test_extra_power_sums_are_checked():
    p = ProbVector([0.6, 0.4])
    assert recover_vector(power_sums(p, 4), 2).to_list() == pytest.approx([0.6, 0.4])
    bad = PowerSums(["1", "0.52", "0.28", "0.1"])
    with pytest.raises(InconsistentPowerSums):
        recover_vector(bad, 2)


@pytest.mark.parametrize("values", [["1", "1.5"], ["1", "0.3"], ["0.9", "0.5"], ["1", "-0.2"]])
def test_inconsistent_power_sums(values):
    with pytest.raises(NumericFailure):
        recover_vector(PowerSums(values), 2)


def test_too_few_power_sums():
    with pytest.raises(ValidationError):
        recover_vector(PowerSums(["1"]), 2)
    with pytest.raises(ValidationError):
        PowerSums(["1", "abc"])


def test_distinguish_equal_entropy_pair():
    report = distinguish(UNIFORM4, HALF_EIGHTHS)
    assert report["entropy_equal"]
    assert report["entropy_p"] == pytest.approx(np.log(4), abs=1e-12)
    assert report["witness_t"] == 2
    assert report["beta_p"] == 0.25
    assert report["beta_q"] == 0.3125
    assert not report["permutation_equivalent"]
    assert report["summary"] == (
        "entropy equal (ln 4), beta differs at t=2: 0.25 vs 0.3125 → NOT permutation-equivalent")


def test_distinguish_permuted_vectors():
    p = ProbVector([0.5, 0.3, 0.2])
    report = distinguish(p, p.permuted([2, 3, 1]))
    assert report["permutation_equivalent"]
    assert report["witness_t"] is None
    assert permutation_equivalent(p, p.permuted([3, 1, 2]))
    assert power_sums_agree(p, p.permuted([3, 1, 2]))
    assert not permutation_equivalent(UNIFORM4, HALF_EIGHTHS)
    assert not power_sums_agree(UNIFORM4, HALF_EIGHTHS)


def _expand_product(roots):
    """Coefficients of prod (x - r), leading first."""
    poly = [Fraction(1)]
    for r in roots:
        poly = [a - r * b for a, b in zip(poly + [Fraction(0)], [Fraction(0)] + poly)]
    return poly


def test_newton_identities_match_the_expanded_product():
    rng = np.random.default_rng(17)
    for _ in range(50):
        m = int(rng.integers(1, 7))
        p = ProbVector(rng.dirichlet(np.ones(m)).tolist())
        elementary = newton_to_elementary(power_sums(p, m), m)
        assert characteristic_polynomial(elementary) == _expand_product(p.fractions)
        assert [float(c) for c in characteristic_polynomial(elementary)] == pytest.approx(
            np.poly(p.weights), abs=1e-12)


def test_equivalence_routes_agree_on_random_pairs():
    rng = np.random.default_rng(23)
    for _ in range(100):
        m = int(rng.integers(1, 6))
        p = ProbVector(rng.dirichlet(np.ones(m)).tolist())
        if rng.random() < 0.5:
            q = ProbVector(p.weights[rng.permutation(m)].tolist())
        else:
            q = ProbVector(rng.dirichlet(np.ones(int(rng.integers(1, 6)))).tolist())
        assert permutation_equivalent(p, p)
        assert power_sums_agree(p, p)
        assert permutation_equivalent(p, q) == permutation_equivalent(q, p)
        assert power_sums_agree(p, q) == power_sums_agree(q, p)
        assert permutation_equivalent(p, q) == power_sums_agree(p, q)
