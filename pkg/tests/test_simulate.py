import numpy as np
import pytest
from scipy import stats

from phasekit.cost import make_cost
from phasekit.optstate import closed_form_state
from phasekit.povm import outcome_distribution
from phasekit.simulate import (
    PriorSpec,
    TRACE_HEADER,
    analytic_uniform_cost,
    monte_carlo,
    pointwise_cost,
    sample_outcome,
    uniformized_estimate,
)
from phasekit.spectrum import CanonicalModel

SINE3 = CanonicalModel(closed_form_state("sine", 3))
UNIFORM2 = CanonicalModel([2 ** -0.5] * 2)


def test_sample_outcome_deterministic_distribution():
    rng = np.random.default_rng(0)
    assert all(sample_outcome(UNIFORM2, 0.0, rng) == 0 for _ in range(200))


def test_sample_outcome_uniform_when_no_phase_information():
    rng = np.random.default_rng(1)
    draws = [sample_outcome(CanonicalModel([1, 0, 0]), 0.7, rng) for _ in range(30_000)]
    counts = np.bincount(draws, minlength=3)
    sigma = np.sqrt(30_000 * (1 / 3) * (2 / 3))
    assert np.all(np.abs(counts - 10_000) <= 3 * sigma)


def test_sample_outcome_reproducible():
    a = [sample_outcome(SINE3, 1.0, np.random.default_rng(5)) for _ in range(3)]
    r1, r2 = np.random.default_rng(9), np.random.default_rng(9)
    assert [sample_outcome(SINE3, 1.0, r1) for _ in range(50)] == [sample_outcome(SINE3, 1.0, r2) for _ in range(50)]
    assert len(set(a)) == 1


@pytest.mark.parametrize("q", [2, 5, 8])
def test_histogram_chi_square(q):
    model = CanonicalModel(closed_form_state("sine", q))
    phi = 2.1
    rep = monte_carlo(model, make_cost("variance", q), PriorSpec.point_mass(phi), 100_000, seed=q)
    expected = 100_000 * outcome_distribution(model, phi)
    assert stats.chisquare(rep.outcome_histogram, expected).pvalue > 0.001


@pytest.mark.parametrize("model, target", [(UNIFORM2, 1.0), (SINE3, 2 - np.sqrt(2))])
def test_monte_carlo_matches_analytic(model, target):
    rep = monte_carlo(model, make_cost("variance", model.q), PriorSpec(), 100_000, seed=11)
    assert abs(rep.mean_cost - target) <= 3 * rep.std_error
    assert sum(rep.outcome_histogram) == rep.trials


def test_monte_carlo_single_level_model():
    cost = make_cost("variance", 1)
    rep = monte_carlo(CanonicalModel([1.0]), cost, PriorSpec(), 50_000, seed=3)
    # every estimate is 0, so the mean is the uniform average of C
    assert abs(rep.mean_cost - 2.0) <= 3 * rep.std_error


def test_monte_carlo_window_scoring_matches_series():
    q, eps = 6, 0.4
    model = CanonicalModel(closed_form_state("sine", q))
    cost = make_cost("window", q, epsilon=eps)
    rep = monte_carlo(model, cost, PriorSpec(), 100_000, seed=17)
    assert abs(rep.mean_cost - analytic_uniform_cost(model, cost)) <= 3 * rep.std_error


def test_likelihood_cannot_be_simulated():
    with pytest.raises(ValueError):
        pointwise_cost(make_cost("likelihood", 3))
    with pytest.raises(ValueError):
        monte_carlo(SINE3, make_cost("variance"), trials=0)


def test_reports_bit_identical_for_seed_and_thread_count():
    cost = make_cost("variance", 3)
    a = monte_carlo(SINE3, cost, PriorSpec(), 40_000, seed=42)
    b = monte_carlo(SINE3, cost, PriorSpec(), 40_000, seed=42, threads=4)
    assert a.to_json() == b.to_json()
    c = monte_carlo(SINE3, cost, PriorSpec(), 40_000, seed=43)
    assert c.to_json() != a.to_json()


def test_uniformized_with_zero_offset_is_plain_sampling():
    r1, r2 = np.random.default_rng(4), np.random.default_rng(4)
    for phi in np.linspace(0, 6, 25):
        est = uniformized_estimate(SINE3, phi, r1, phi_r=0.0)
        s = sample_outcome(SINE3, phi, r2)
        assert est == 2 * np.pi * s / 3


def test_uniformized_estimate_range():
    rng = np.random.default_rng(2)
    ests = [uniformized_estimate(SINE3, 1.0, rng) for _ in range(200)]
    assert all(0 <= e < 2 * np.pi for e in ests)
    # estimates come off the outcome grid once an offset is applied
    assert len(set(ests)) > 3


@pytest.mark.parametrize("mesh", [None, 1 << 20])
def test_uniformization_flattens_point_masses(mesh):
    cost = make_cost("variance", 3)
    target = analytic_uniform_cost(SINE3, cost)
    reps = [monte_carlo(SINE3, cost, PriorSpec.point_mass(phi), 100_000, seed=i, uniformize=True, mesh=mesh)
            for i, phi in enumerate((0.0, 1.234))]
    for rep in reps:
        assert abs(rep.mean_cost - target) <= 3 * rep.std_error
    a, b = reps
    assert abs(a.mean_cost - b.mean_cost) <= 3 * np.hypot(a.std_error, b.std_error)


def test_point_mass_without_uniformization_is_biased():
    # on-grid phase: always estimated exactly for the uniform q=2 state
    rep = monte_carlo(UNIFORM2, make_cost("variance", 2), PriorSpec.point_mass(0.0), 1000, seed=0)
    assert rep.mean_cost == 0.0


def test_discrete_prior_uniformized():
    cost = make_cost("variance", 3)
    prior = PriorSpec("discrete", ((0.3, 0.25), (2.0, 0.75)))
    rep = monte_carlo(SINE3, cost, prior, 100_000, seed=8, uniformize=True)
    assert abs(rep.mean_cost - analytic_uniform_cost(SINE3, cost)) <= 3 * rep.std_error


@pytest.mark.parametrize("args", [("bogus", ()), ("uniform", ((1.0, 1.0),)), ("point_mass", ()),
                                  ("discrete", ((0.0, 0.5), (1.0, 0.4))), ("discrete", ((0.0, -0.5), (1.0, 1.5)))])
def test_prior_validation(args):
    with pytest.raises(ValueError):
        PriorSpec(*args)


def test_trace_csv():
    rep = monte_carlo(SINE3, make_cost("variance", 3), PriorSpec(), 5, seed=1, trace=True)
    lines = rep.trace_csv().strip().split("\n")
    assert lines[0] == ",".join(TRACE_HEADER)
    assert len(lines) == 6
    phi, s, phi_s, c = lines[1].split(",")
    assert float(phi_s) == pytest.approx(2 * np.pi * int(s) / 3)
    assert float(c) == pytest.approx(make_cost("variance").evaluate(float(phi_s) - float(phi)))
