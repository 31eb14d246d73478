import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasekit.cost import CostSpec, average_cost_fourier, average_costs_for_seeds, make_cost
from phasekit.povm import (
    DiscreteMeasurement,
    SeedMatrix,
    conditional_density,
    delta_identity_residual,
    discrete_measurement,
    discretization_check,
    optimal_seed,
    outcome_distribution,
    random_valid_seeds,
    validate_seed,
)
from phasekit.selftest import random_holevo_cost, random_model
from phasekit.spectrum import CanonicalModel, apply_phase

SINE3 = CanonicalModel([0.5, 2 ** -0.5, 0.5])
UNIFORM2 = CanonicalModel([2 ** -0.5] * 2)


def test_optimal_seed_holevo_is_all_ones():
    np.testing.assert_array_equal(optimal_seed(make_cost("variance"), 3).entries, np.ones((3, 3)))
    np.testing.assert_array_equal(optimal_seed(make_cost("variance"), 1).entries, [[1]])


def test_optimal_seed_sign_pattern_rank_one():
    # sign(c) = (+, -, +) gives v v^T with v = (1, -1, 1): feasible
    seed = optimal_seed(CostSpec([0, -1, 1]), 3)
    assert seed.entries[0, 1] == -1 and seed.entries[0, 2] == 1
    report = validate_seed(seed)
    assert report.ok
    np.testing.assert_allclose(np.linalg.eigvalsh(seed.entries), [0, 0, 3], atol=1e-12)


def test_optimal_seed_infeasible_sign_pattern():
    report = validate_seed(optimal_seed(CostSpec([0, 1, -1]), 3))
    assert not report.ok
    assert report.min_eigenvalue == pytest.approx(-1.0, abs=1e-12)
    assert any("semidefinite" in v for v in report.violations)


def test_sign_zero_counts_as_positive():
    np.testing.assert_array_equal(optimal_seed(CostSpec([1, 0, 0]), 3).entries, np.ones((3, 3)))


def test_validate_seed_cases():
    ones = validate_seed(SeedMatrix.ones(4))
    assert ones.ok
    np.testing.assert_allclose(np.linalg.eigvalsh(np.ones((4, 4))), [0, 0, 0, 4], atol=1e-12)
    assert validate_seed(SeedMatrix(np.eye(4))).ok
    bad = np.eye(3)
    bad[0, 1] = bad[1, 0] = 2
    report = validate_seed(SeedMatrix(bad))
    assert not report.ok and any("modulus" in v for v in report.violations)
    asym = np.eye(2, dtype=complex)
    asym[0, 1] = 0.5j
    asym[1, 0] = 0.5j
    assert any("Hermitian" in v for v in validate_seed(SeedMatrix(asym)).violations)
    assert any("diagonal" in v for v in validate_seed(SeedMatrix(2 * np.eye(2))).violations)


def test_random_valid_seeds_are_valid(rng):
    for chi in random_valid_seeds(5, 50, rng):
        assert validate_seed(SeedMatrix(chi)).ok


def test_seed_json_roundtrip():
    seed = SeedMatrix(np.array([[1, 0.5j], [-0.5j, 1]]))
    back = SeedMatrix.from_json_obj(json.loads(json.dumps(seed.to_json_obj())))
    np.testing.assert_array_equal(back.entries, seed.entries)


def test_discrete_measurement_examples():
    m2 = discrete_measurement(2).states
    np.testing.assert_allclose(m2, np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(discrete_measurement(1).states, [[1]])
    np.testing.assert_allclose(discrete_measurement(4).states[1], np.array([1, 1j, -1, -1j]) / 2, atol=1e-15)
    with pytest.raises(ValueError):
        discrete_measurement(0)


@pytest.mark.parametrize("q", [1, 2, 3, 7, 16, 31, 64])
def test_measurement_resolves_identity(q):
    meas = discrete_measurement(q)
    v = meas.states
    np.testing.assert_allclose(v @ v.conj().T, np.eye(q), atol=1e-12)
    np.testing.assert_allclose(meas.projectors().sum(axis=0), np.eye(q), atol=1e-12)


def test_delta_identity():
    assert max(delta_identity_residual(q) for q in range(1, 65)) <= 1e-14


def test_outcome_distribution_examples():
    np.testing.assert_allclose(outcome_distribution(UNIFORM2, 0.0), [1, 0], atol=1e-15)
    np.testing.assert_allclose(outcome_distribution(UNIFORM2, np.pi / 2), [0.5, 0.5], atol=1e-15)
    for phi in (0.0, 1.0, 5.0):
        np.testing.assert_allclose(outcome_distribution(CanonicalModel([1, 0, 0]), phi), [1 / 3] * 3, atol=1e-15)


def test_outcome_distribution_matches_explicit_born_rule(rng):
    for _ in range(10):
        q = int(rng.integers(1, 12))
        model = random_model(q, rng)
        phi = rng.uniform(0, 2 * np.pi)
        states = discrete_measurement(q).states
        born = np.abs(states.conj() @ apply_phase(model, phi)) ** 2
        probs = outcome_distribution(model, phi)
        np.testing.assert_allclose(probs, born, atol=1e-12)
        assert probs.sum() == pytest.approx(1, abs=1e-12)


def test_conditional_density_examples():
    assert conditional_density(UNIFORM2, 0.0) == pytest.approx(1 / np.pi)
    assert conditional_density(UNIFORM2, np.pi) == pytest.approx(0, abs=1e-15)
    assert conditional_density(CanonicalModel([1.0]), 2.3) == pytest.approx(1 / (2 * np.pi))


def test_conditional_density_normalized(rng):
    model = random_model(9, rng)
    grid = 2 * np.pi * np.arange(64) / 64
    assert 2 * np.pi * np.mean(conditional_density(model, grid)) == pytest.approx(1, abs=1e-12)
    assert np.all(conditional_density(model, grid) >= 0)


def test_discretization_examples():
    for model, expected in ((UNIFORM2, 1.0), (SINE3, 2 - np.sqrt(2))):
        cont, disc = discretization_check(model, make_cost("variance", model.q))
        assert cont == pytest.approx(expected, abs=1e-12)
        assert disc == pytest.approx(expected, abs=1e-12)
    cost = make_cost("window", 1, epsilon=0.3)
    cont, disc = discretization_check(CanonicalModel([1.0]), cost)
    assert cont == pytest.approx(-cost.coefficients[0]) and disc == pytest.approx(-cost.coefficients[0])


def test_discretization_randomized(rng):
    for _ in range(30):
        q = int(rng.integers(1, 40))
        cont, disc = discretization_check(random_model(q, rng), random_holevo_cost(q, rng))
        assert cont == pytest.approx(disc, abs=1e-9)


def test_all_ones_dominates_random_seeds(rng):
    for _ in range(20):
        q = int(rng.integers(2, 9))
        model, cost = random_model(q, rng, sparsity=0.0), random_holevo_cost(q, rng)
        best = average_cost_fourier(model, SeedMatrix.ones(q), cost)
        others = average_costs_for_seeds(model, random_valid_seeds(q, 1000, rng), cost)
        assert np.all(others >= best - 1e-12)
        if np.any(cost.coefficients[1:q] > 0):
            assert np.all(others > best)  # strict for generic seeds


def test_vectorised_seed_costs_match_scalar(rng):
    model, cost = random_model(6, rng), random_holevo_cost(6, rng)
    seeds = random_valid_seeds(6, 5, rng)
    np.testing.assert_allclose(average_costs_for_seeds(model, seeds, cost),
                               [average_cost_fourier(model, s, cost) for s in seeds], atol=1e-14)
