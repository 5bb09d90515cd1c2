"""Total-variation and Kullback-Leibler distances, closest-local searches,
and projection onto the facet a violating matrix crosses."""

import math
from fractions import Fraction

import numpy as np
import pytest

import bellpoly as bp
from bellpoly import NotApplicableError, PreconditionError
from conftest import random_local_222, random_nonlocal_222, random_nonsignaling_222
import oracles

F = Fraction

SATURATING = tuple(sorted(bp.SATURATING_SET_1))
UNIFORM_SETTINGS = bp.SettingsDistribution.uniform(bp.SCENARIO_222)


def first_symmetry_violation(rng):
    while True:
        dm, index, pr_weight, ld_weights = random_nonlocal_222(rng)
        if index == 1:
            return dm, pr_weight, ld_weights


# ---------------------------------------------------------------------------
# Total variation
# ---------------------------------------------------------------------------


def test_tv_identity_and_reference_value():
    pr1 = bp.as_matrix(bp.pr_box(1))
    assert bp.tv_distance(pr1, pr1) == 0
    assert bp.tv_distance(pr1, bp.as_matrix(bp.ld_box(1))) == F(5, 2)


def test_tv_agrees_with_cellwise_arithmetic(rng):
    for _ in range(30):
        a = random_nonsignaling_222(rng)
        b = random_nonsignaling_222(rng)
        assert bp.tv_distance(a, b) == oracles.tv_direct(a, b)


def test_tv_is_a_metric(rng):
    for _ in range(20):
        a = random_nonsignaling_222(rng)
        b = random_nonsignaling_222(rng)
        c = random_nonsignaling_222(rng)
        assert bp.tv_distance(a, b) >= 0
        assert bp.tv_distance(a, b) == bp.tv_distance(b, a)
        assert bp.tv_distance(a, c) <= bp.tv_distance(a, b) + bp.tv_distance(b, c)
        assert (bp.tv_distance(a, b) == 0) == (a.entries == b.entries)


def test_tv_is_affine_along_segments(rng):
    for _ in range(10):
        a = random_nonsignaling_222(rng)
        b = random_nonsignaling_222(rng)
        lam = F(rng.randint(0, 12), 12)
        point = bp.mix([(a, lam), (b, 1 - lam)])
        assert bp.tv_distance(point, b) == lam * bp.tv_distance(a, b)


def test_tv_rejects_mismatched_scenarios():
    with pytest.raises(PreconditionError):
        bp.tv_distance(
            bp.as_matrix(bp.pr_box(1)),
            bp.as_matrix(bp.canonical_gpr(bp.Scenario(3))),
        )


# ---------------------------------------------------------------------------
# Closest local matrix in total variation
# ---------------------------------------------------------------------------


def test_tv_closest_local_reference_example():
    dm = bp.mix([(bp.pr_box(1), F(4, 5)), (bp.ld_box(1), F(1, 5))])
    res = bp.tv_closest_local(dm)
    assert res.distance == F(4, 5)
    assert dict(res.weights) == {
        1: F(3, 10),
        4: F(1, 10),
        5: F(1, 10),
        8: F(1, 10),
        9: F(1, 10),
        12: F(1, 10),
        14: F(1, 10),
        15: F(1, 10),
    }
    assert bp.is_local_222(res.closest)
    assert bp.tv_distance(dm, res.closest) == res.distance


def test_tv_closest_local_distance_is_the_nonlocal_weight(rng):
    for _ in range(25):
        dm, _, pr_weight, _ = random_nonlocal_222(rng)
        res = bp.tv_closest_local(dm)
        assert res.distance == pr_weight
        assert bp.is_local_222(res.closest)
        assert bp.tv_distance(dm, res.closest) == res.distance


def test_tv_closest_local_weights_mix_to_the_closest_point(rng):
    for _ in range(10):
        dm, _, _, _ = random_nonlocal_222(rng)
        res = bp.tv_closest_local(dm)
        remixed = bp.mix([(bp.ld_box(i), w) for i, w in res.weights.items()])
        assert remixed.entries == res.closest.entries


def test_tv_closest_local_spreads_weight_over_the_saturating_set(rng):
    for _ in range(10):
        dm, pr_weight, ld_weights = first_symmetry_violation(rng)
        res = bp.tv_closest_local(dm)
        for i in SATURATING:
            assert res.weights[i] == ld_weights.get(i, F(0)) + pr_weight / 8


def test_tv_closest_local_minimum_is_not_unique(rng):
    # Concentrating the redistributed weight on a complementary pair of
    # saturating boxes reaches the same distance.
    for _ in range(10):
        dm, pr_weight, ld_weights = first_symmetry_violation(rng)
        terms = [(bp.ld_box(i), w) for i, w in ld_weights.items()]
        terms.append((bp.ld_box(1), pr_weight / 2))
        terms.append((bp.ld_box(4), pr_weight / 2))
        alternative = bp.mix(terms)
        assert bp.is_local_222(alternative)
        assert bp.tv_distance(dm, alternative) == pr_weight


def test_tv_closest_local_agrees_with_linear_program(rng):
    for _ in range(10):
        dm, _, _, _ = random_nonlocal_222(rng)
        assert bp.tv_closest_local(dm).distance == oracles.tv_lp_oracle(dm)


def test_tv_closest_local_on_local_input(rng):
    dm = random_local_222(rng)
    res = bp.tv_closest_local(dm)
    assert res.distance == 0
    assert res.closest.entries == dm.entries


# ---------------------------------------------------------------------------
# Kullback-Leibler divergence
# ---------------------------------------------------------------------------


def test_kl_identity_and_reference_value():
    pr1 = bp.as_matrix(bp.pr_box(1))
    assert bp.kl_divergence(pr1, pr1, UNIFORM_SETTINGS) == 0.0
    uniform_cells = bp.DistributionMatrix(
        bp.SCENARIO_222, ((F(1, 4),) * 4,) * 4
    )
    assert bp.kl_divergence(pr1, uniform_cells, UNIFORM_SETTINGS) == pytest.approx(
        1.0, abs=1e-12
    )


def test_kl_is_infinite_off_support():
    pr1 = bp.as_matrix(bp.pr_box(1))
    assert bp.kl_divergence(pr1, bp.as_matrix(bp.ld_box(1)), UNIFORM_SETTINGS) == math.inf


def test_kl_agrees_with_direct_arithmetic(rng):
    probs = UNIFORM_SETTINGS.probs
    for _ in range(20):
        q = random_nonsignaling_222(rng)
        s = random_nonsignaling_222(rng)
        expected = oracles.kl_direct(q, s, probs)
        got = bp.kl_divergence(q, s, UNIFORM_SETTINGS)
        if math.isinf(expected):
            assert math.isinf(got)
        else:
            assert got == pytest.approx(expected, rel=1e-12)


def test_kl_weights_rows_by_the_settings_distribution(rng):
    skew = bp.SettingsDistribution(
        bp.SCENARIO_222, (F(7, 10), F(1, 10), F(1, 10), F(1, 10))
    )
    for _ in range(10):
        q = random_nonsignaling_222(rng)
        s = random_nonsignaling_222(rng)
        expected = oracles.kl_direct(q, s, skew.probs)
        got = bp.kl_divergence(q, s, skew)
        if math.isinf(expected):
            assert math.isinf(got)
        else:
            assert got == pytest.approx(expected, rel=1e-12)


def test_kl_rejects_mismatched_scenarios():
    with pytest.raises(PreconditionError):
        bp.kl_divergence(
            bp.as_matrix(bp.pr_box(1)),
            bp.as_matrix(bp.canonical_gpr(bp.Scenario(3))),
            UNIFORM_SETTINGS,
        )


# ---------------------------------------------------------------------------
# The parametrized objective and its gradient
# ---------------------------------------------------------------------------


def test_kl_objective_matches_divergence_of_the_mixture():
    pr1 = bp.as_matrix(bp.pr_box(1))
    weights = np.array([0.5, 0.125, 0.125, 0.125, 0.125, 0.0, 0.0, 0.0])
    obj = bp.kl_objective(pr1, UNIFORM_SETTINGS, SATURATING, weights)
    mixture = bp.mix(
        [
            (bp.ld_box(i), F(w).limit_denominator(1 << 40))
            for i, w in zip(SATURATING, weights)
            if w > 0
        ]
    )
    assert obj == pytest.approx(
        bp.kl_divergence(pr1, mixture, UNIFORM_SETTINGS), rel=1e-12
    )


def test_kl_gradient_matches_finite_differences(rng):
    pr1 = bp.as_matrix(bp.pr_box(1))
    step = 1e-7
    for _ in range(20):
        raw = [rng.randint(1, 20) for _ in SATURATING]
        weights = np.array([r / sum(raw) for r in raw])
        grad = bp.kl_gradient(pr1, UNIFORM_SETTINGS, SATURATING, weights)
        for i in range(len(SATURATING)):
            bumped = weights.copy()
            bumped[i] += step
            lowered = weights.copy()
            lowered[i] -= step
            fd = (
                bp.kl_objective(pr1, UNIFORM_SETTINGS, SATURATING, bumped)
                - bp.kl_objective(pr1, UNIFORM_SETTINGS, SATURATING, lowered)
            ) / (2 * step)
            assert grad[i] == pytest.approx(fd, rel=1e-5, abs=1e-7)


def test_kl_objective_is_convex_in_the_weights(rng):
    pr1 = bp.as_matrix(bp.pr_box(1))
    for _ in range(20):
        a = np.array([rng.random() + 0.05 for _ in SATURATING])
        b = np.array([rng.random() + 0.05 for _ in SATURATING])
        a /= a.sum()
        b /= b.sum()
        mid = (a + b) / 2
        left = bp.kl_objective(pr1, UNIFORM_SETTINGS, SATURATING, a)
        right = bp.kl_objective(pr1, UNIFORM_SETTINGS, SATURATING, b)
        middle = bp.kl_objective(pr1, UNIFORM_SETTINGS, SATURATING, mid)
        assert middle <= (left + right) / 2 + 1e-10


# ---------------------------------------------------------------------------
# Minimization
# ---------------------------------------------------------------------------


def test_kl_minimize_solves_the_reference_problem():
    pr1 = bp.as_matrix(bp.pr_box(1))
    weights, value, iterations = bp.kl_minimize(pr1, UNIFORM_SETTINGS, SATURATING)
    assert value == pytest.approx(math.log2(4 / 3), abs=1e-9)
    assert np.allclose(weights, 0.125, atol=1e-9)
    assert iterations <= 100000
    assert np.sum(weights) == pytest.approx(1.0, abs=1e-12)


def test_kl_minimize_is_start_independent():
    pr1 = bp.as_matrix(bp.pr_box(1))
    skewed = np.array([0.65, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05])
    _, from_uniform, _ = bp.kl_minimize(pr1, UNIFORM_SETTINGS, SATURATING)
    _, from_skewed, _ = bp.kl_minimize(
        pr1, UNIFORM_SETTINGS, SATURATING, start=skewed
    )
    assert from_skewed == pytest.approx(from_uniform, abs=1e-9)


def test_kl_minimize_never_beats_itself_with_more_boxes(rng):
    # Boxes saturating the violated inequality already span the optimum.
    full = tuple(range(1, 17))
    for _ in range(5):
        dm, index, _, _ = random_nonlocal_222(rng)
        facet = tuple(sorted(bp.chsh_symmetry(index).saturating_set))
        _, reduced, _ = bp.kl_minimize(dm, UNIFORM_SETTINGS, facet)
        _, complete, _ = bp.kl_minimize(dm, UNIFORM_SETTINGS, full)
        assert complete <= reduced + 1e-9
        assert reduced == pytest.approx(complete, abs=1e-8)


def test_kl_minimize_improves_on_arbitrary_starts(rng):
    for _ in range(10):
        dm, _, _ = first_symmetry_violation(rng)
        raw = [rng.randint(1, 9) for _ in SATURATING]
        start = np.array([r / sum(raw) for r in raw])
        before = bp.kl_objective(dm, UNIFORM_SETTINGS, SATURATING, start)
        _, value, _ = bp.kl_minimize(dm, UNIFORM_SETTINGS, SATURATING, start=start)
        assert value <= before + 1e-12


def test_kl_closest_local_matches_the_minimizer(rng):
    for _ in range(5):
        dm, _, _, _ = random_nonlocal_222(rng)
        res = bp.kl_closest_local(dm, UNIFORM_SETTINGS)
        _, value, _ = bp.kl_minimize(dm, UNIFORM_SETTINGS, tuple(range(1, 17)))
        assert res.distance == pytest.approx(value, abs=1e-9)
        assert bp.validate(res.closest) == []
        assert bp.kl_divergence(dm, res.closest, UNIFORM_SETTINGS) == pytest.approx(
            res.distance, abs=1e-9
        )


def test_kl_closest_local_agrees_with_a_grid_search():
    pr1 = bp.as_matrix(bp.pr_box(1))
    res = bp.kl_closest_local(pr1, UNIFORM_SETTINGS)
    grid_value = oracles.kl_grid_oracle(
        pr1, UNIFORM_SETTINGS.probs, SATURATING, denom=100
    )
    assert res.distance <= grid_value + 1e-9
    assert grid_value - res.distance <= 1e-3


def test_kl_closest_is_at_most_the_tv_closest(rng):
    for _ in range(10):
        dm, _, _, _ = random_nonlocal_222(rng)
        kl_res = bp.kl_closest_local(dm, UNIFORM_SETTINGS)
        tv_res = bp.tv_closest_local(dm)
        at_tv_point = bp.kl_divergence(dm, tv_res.closest, UNIFORM_SETTINGS)
        assert kl_res.distance <= at_tv_point + 1e-9


# ---------------------------------------------------------------------------
# Facet projection
# ---------------------------------------------------------------------------


def test_face_projection_reference_example():
    pr1 = bp.as_matrix(bp.pr_box(1))
    d16 = bp.as_matrix(bp.ld_box(16))
    lam, point = bp.face_projection(pr1, d16)
    assert lam == F(2, 3)
    assert bp.is_local_222(point)
    assert bp.chsh_value(point, bp.chsh_symmetry(1)) == 2
    assert point.entries == bp.mix([(pr1, lam), (d16, 1 - lam)]).entries


def test_face_projection_with_target_on_the_facet():
    pr1 = bp.as_matrix(bp.pr_box(1))
    facet_point = bp.mix([(bp.ld_box(i), F(1, 8)) for i in SATURATING])
    lam, point = bp.face_projection(pr1, facet_point)
    assert lam == 0
    assert point.entries == facet_point.entries


def test_face_projection_lands_on_the_violated_facet(rng):
    for _ in range(20):
        dm, index, _, _ = random_nonlocal_222(rng)
        target = random_local_222(rng)
        lam, point = bp.face_projection(dm, target)
        assert 0 <= lam < 1
        assert bp.is_local_222(point)
        assert bp.chsh_value(point, bp.chsh_symmetry(index)) == 2
        assert point.entries == bp.mix([(dm, lam), (target, 1 - lam)]).entries


def test_face_projection_rejects_local_first_argument(rng):
    with pytest.raises(NotApplicableError, match="violating"):
        bp.face_projection(
            random_local_222(rng), bp.as_matrix(bp.ld_box(16))
        )


def test_face_projection_rejects_nonlocal_target():
    with pytest.raises(PreconditionError, match="local"):
        bp.face_projection(
            bp.as_matrix(bp.pr_box(1)), bp.as_matrix(bp.pr_box(2))
        )
