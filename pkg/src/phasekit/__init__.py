"""Optimal phase estimation for networks of single-qubit phase gates."""

from .applications import (
    DihedralInstance,
    GateList,
    dihedral_estimate_experiment,
    dihedral_model,
    phase_circuit,
    product_state_cost,
    shor_multipliers,
    symmetric_model,
)
from .cost import (
    CostSpec,
    average_cost_fourier,
    average_cost_quadrature,
    evaluate,
    is_holevo,
    make_cost,
)
from .optstate import (
    CostOperator,
    NumericalError,
    OptimalStateResult,
    closed_form_min_cost,
    closed_form_state,
    cost_operator,
    optimal_state,
)
from .povm import (
    DiscreteMeasurement,
    SeedMatrix,
    conditional_density,
    discrete_measurement,
    discretization_check,
    optimal_seed,
    outcome_distribution,
    validate_seed,
)
from .simulate import PriorSpec, TrialReport, monte_carlo, sample_outcome, uniformized_estimate
from .spectrum import (
    CanonicalModel,
    PhaseNetwork,
    SpectrumTable,
    apply_phase,
    canonicalize,
    subset_sum_spectrum,
)

__version__ = "0.1.0"
