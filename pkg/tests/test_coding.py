import json

import numpy as np
import pytest

from finitary_beta.coding import (
    UNBOUNDED_BELOW,
    AdaptiveCode,
    FixedRadiusCode,
    a_phi_truncated,
    apply,
    builtin_code,
    check_past_locality,
    code_from_dict,
    code_radius,
    code_radius_checked,
    expected_code_length,
    invert_on_window,
    load_code,
    m_phi_truncated,
    pushforward_check,
    pushforward_frequencies,
    v_phi,
)
from finitary_beta.automorphism import LocalAutomorphism, act, build_weakmix_pair
from finitary_beta.errors import ResourceCapError, ValidationError
from finitary_beta.free_group import IDENTITY, ball, inverse, multiply, parse_word
from finitary_beta.prob import Configuration, Pattern, ProbVector, shift

P = ProbVector([0.5, 0.3, 0.2])
HALF = ProbVector([0.5, 0.5])
POINTS = [Configuration(seed, HALF) for seed in range(20)]


def test_identity_and_permutation_codes():
    ident = FixedRadiusCode.identity(2, 3)
    perm = FixedRadiusCode.symbol_permutation(2, [2, 3, 1])
    x = Configuration(4, P)
    for g in [IDENTITY, parse_word("a"), parse_word("bA")]:
        assert apply(ident, x, g) == x.value_at(g)
        assert apply(perm, x, g) == [2, 3, 1][x.value_at(g) - 1]


def test_parity_code_needs_the_full_ball():
    parity = FixedRadiusCode.parity(2, radius=1)
    for x in POINTS:
        assert code_radius_checked(parity, x) == (1, True)
        assert v_phi(parity, x) == 5


def test_declared_radius_is_not_minimal_radius():
    constant = FixedRadiusCode.constant(2, 2, 1, radius=1)
    assert all(code_radius(constant, x) == 0 for x in POINTS)


def test_m_phi_equals_radius_for_codes_using_the_whole_ball():
    for radius in (1, 2):
        parity = FixedRadiusCode.parity(2, radius)
        for x in POINTS[:5]:
            assert m_phi_truncated(parity, x, horizon=radius + 1) == radius
            assert a_phi_truncated(parity, x, horizon=radius + 1) == radius - 1


def test_radius_zero_extremal_values():
    perm = FixedRadiusCode.symbol_permutation(2, [2, 1])
    for x in POINTS[:5]:
        assert m_phi_truncated(perm, x, horizon=3) == 0
        assert a_phi_truncated(perm, x, horizon=3) == -1
        assert a_phi_truncated(perm, x, horizon=0) is UNBOUNDED_BELOW


def test_adaptive_code_radius_depends_on_point():
    code = AdaptiveCode.query_e_then_a(rank=1)
    for x in POINTS:
        expected = 0 if x.value_at(IDENTITY) == 1 else 1
        assert code_radius(code, x) == expected
        assert apply(code, x) == (1 if x.value_at(IDENTITY) == 1 else x.value_at(parse_word("a")))


@pytest.mark.parametrize("weights, mean", [([0.5, 0.5], 2.0), ([0.25, 0.75], 2.5)])
def test_adaptive_expected_length_exact(weights, mean):
    stats = expected_code_length(AdaptiveCode.query_e_then_a(rank=1), ProbVector(weights))
    assert stats.v_mean == pytest.approx(mean)
    assert stats.v_mean == pytest.approx(1 + stats.tail_sum())


def test_fixed_expected_length_exact():
    assert expected_code_length(FixedRadiusCode.majority(1), HALF).v_mean == pytest.approx(3.0)
    assert expected_code_length(FixedRadiusCode.identity(2, 3), P).v_mean == pytest.approx(1.0)
    stats = expected_code_length(FixedRadiusCode.parity(2, 1), HALF)
    assert stats.v_distribution == {5: pytest.approx(1.0)}
    assert stats.v_tail[4] == pytest.approx(1.0)


def test_monte_carlo_length_tracks_exact():
    code = AdaptiveCode.query_e_then_a(rank=1)
    stats = expected_code_length(code, HALF, mode="mc", samples=20_000, seed=1)
    assert stats.v_mean == pytest.approx(2.0, abs=0.05)
    again = expected_code_length(code, HALF, mode="mc", samples=20_000, seed=1)
    assert again.to_dict() == stats.to_dict()


def test_monte_carlo_histograms():
    parity = FixedRadiusCode.parity(2, 1)
    stats = expected_code_length(parity, HALF, mode="mc", samples=50, horizon=2)
    assert stats.m_phi_hist == {1: 50}
    assert stats.a_phi_hist == {0: 50}
    assert stats.to_dict()["m_phi_hist"] == {"1": 50}


def test_exact_length_respects_cap():
    with pytest.raises(ResourceCapError):
        expected_code_length(FixedRadiusCode.parity(2, 1), HALF, cap=10)


def test_symbol_count_must_match():
    with pytest.raises(ValidationError):
        expected_code_length(FixedRadiusCode.identity(2, 2), P)


def test_invert_on_window():
    perm = FixedRadiusCode.symbol_permutation(2, [2, 3, 1])
    assert invert_on_window(perm, Pattern({IDENTITY: 2}), 0) == {Pattern({IDENTITY: 1})}
    parity = FixedRadiusCode.parity(1, 1)
    preimages = invert_on_window(parity, Pattern({IDENTITY: 1}), 1)
    assert len(preimages) == 4
    with pytest.raises(ValidationError):
        invert_on_window(parity, Pattern({parse_word("a"): 1}), 1)


def test_pushforward_of_permutation_code():
    perm = [1, 3, 2]
    code = FixedRadiusCode.symbol_permutation(2, perm)
    report = pushforward_check(code, P, P.permuted(perm), samples=20_000, sigmas=5.0)
    assert report["ok"]
    assert report["frequencies"] == pytest.approx([0.5, 0.2, 0.3], abs=0.015)


def test_pushforward_is_equivariant():
    code = FixedRadiusCode.majority(2)
    g = parse_word("ba")
    at_e = pushforward_frequencies(code, HALF, 5000, seed=3)
    at_g = pushforward_frequencies(code, HALF, 5000, seed=3, g=g)
    assert at_e.tolist() == pytest.approx(at_g.tolist(), abs=0.04)


def test_code_json_files(tmp_path):
    tree = AdaptiveCode.query_e_then_a(rank=1)
    path = tmp_path / "tree.json"
    path.write_text(json.dumps(tree.to_dict()))
    loaded = load_code(str(path))
    for x in POINTS:
        assert apply(loaded, x) == apply(tree, x)
        assert code_radius(loaded, x) == code_radius(tree, x)

    majority = FixedRadiusCode.majority(1)
    rebuilt = code_from_dict(majority.to_dict())
    assert rebuilt.table == majority.table


@pytest.mark.parametrize("document", [
    {"kind": "sliding", "rank": 2, "m": 2},
    {"kind": "fixed", "m": 2},
    {"kind": "fixed", "rank": 1, "m": 2, "r": 1, "table": [[{"assign": [["e", 1]]}, 1]]},
    {"kind": "adaptive", "rank": 1, "m": 2, "n": 2, "tree": {"leaf": 3}},
    ["not", "a", "code"],
])
def test_code_json_rejects_malformed(document):
    with pytest.raises(ValidationError):
        code_from_dict(document)


def test_missing_table_entry():
    code = FixedRadiusCode(1, 2, 2, 0, {(1,): 2})
    x = Configuration(0, HALF).with_overrides(Pattern({IDENTITY: 2}))
    with pytest.raises(ValidationError):
        apply(code, x)


def test_builtin_codes():
    assert builtin_code("permutation", 2, 3, perm=[3, 2, 1]).table[(1,)] == 3
    assert builtin_code("e-then-a", 1, 2).max_radius == 1
    with pytest.raises(ValidationError):
        builtin_code("nope", 2, 2)


def test_equivariance_of_fixed_codes():
    code = FixedRadiusCode.majority(2)
    x = Configuration(9, HALF)
    g = parse_word("aB")
    for h in [IDENTITY, parse_word("b"), parse_word("Ab")]:
        assert apply(code, x, multiply(g, h)) == apply(code, shift(x, inverse(g)), h)
    assert np.isfinite(expected_code_length(code, HALF).v_mean)


def test_majority_window():
    code = FixedRadiusCode.majority(2)
    assert code.evaluate((1, 1, 2, 1, 2)) == 1
    assert code.evaluate((2, 1, 2, 2, 1)) == 2


def test_equivariance_over_random_points():
    rng = np.random.default_rng(11)
    code = FixedRadiusCode.majority(2)
    words = ball(2, 3).elements
    for _ in range(200):
        x = Configuration(int(rng.integers(0, 10**6)), HALF)
        g = words[int(rng.integers(len(words)))]
        h = words[int(rng.integers(len(words)))]
        assert apply(code, x, multiply(g, h)) == apply(code, shift(x, inverse(g)), h)


def test_radius_certification_ignores_call_history():
    # 2^17 windows: above the search cap, so the declared radius stands
    big = FixedRadiusCode.constant(2, 2, 1, radius=2)
    small = FixedRadiusCode.constant(2, 2, 1, radius=1)
    x = POINTS[0]
    assert not big.certifies_minimal_radius()
    assert small.certifies_minimal_radius()

    before = code_radius_checked(big, x)
    mc_before = expected_code_length(big, HALF, "mc", samples=9000).v_mean
    assert expected_code_length(big, HALF, "exact").v_mean == pytest.approx(17.0)
    assert code_radius_checked(big, x) == before == (2, False)
    assert expected_code_length(big, HALF, "mc", samples=9000).v_mean == mc_before == 17.0
    assert expected_code_length(big, HALF, "mc", samples=9000, workers=2).v_mean == 17.0

    assert expected_code_length(small, HALF, "exact").v_mean == pytest.approx(1.0)
    assert code_radius_checked(small, x) == (0, True)
    assert expected_code_length(small, HALF, "mc", samples=9000, workers=2).v_mean == 1.0


@pytest.mark.parametrize("horizon", [1, 2])
def test_swaps_beyond_the_fixed_ball_keep_both_sides(horizon):
    rng = np.random.default_rng(5 + horizon)
    code = FixedRadiusCode.parity(2)
    bound = 1
    fixed = bound + 2 * horizon
    h_plus, h_minus = build_weakmix_pair(2, fixed, fixed + 1)
    for _ in range(25):
        x = Configuration(int(rng.integers(0, 10**6)), HALF)
        past = check_past_locality(code, x, h_minus, bound, horizon)
        assert past["ok"] and past["future"] is None
        assert past["past"]["sup"] <= bound
        assert past["past"]["sites"] == (2 if horizon == 1 else 5)
        future = check_past_locality(code, x, h_plus, bound, horizon)
        assert future["ok"] and future["past"] is None
        assert future["future"]["sup"] == 0
        assert future["future"]["mismatches"] == []


def test_locality_needs_the_enlarged_ball():
    code = FixedRadiusCode.parity(2)
    _, h_minus = build_weakmix_pair(2, 1, 2)
    a = parse_word("a")
    changed = [seed for seed in range(40)
               if apply(code, act(h_minus, Configuration(seed, HALF)), a) != apply(code, Configuration(seed, HALF), a)]
    # phi(x)_a reads x at ab and aB, which h_minus moves
    assert changed
    with pytest.raises(ValidationError):
        check_past_locality(code, Configuration(changed[0], HALF), h_minus, 1, 1)
    with pytest.raises(ValidationError):
        check_past_locality(code, POINTS[0], h_minus, -1, 1)


def test_identity_automorphism_satisfies_both_parts():
    code = FixedRadiusCode.majority(2)
    report = check_past_locality(code, POINTS[1], LocalAutomorphism.identity(), 1, 1)
    assert report["past"] is not None and report["future"] is not None
    assert report["ok"]
