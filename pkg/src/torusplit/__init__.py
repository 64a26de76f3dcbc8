"""Fourier-spectral splitting integrators for the linear Schrodinger
equation on the torus, with a modified-energy engine built from the
Bernoulli/commutator expansion of the midpoint-resolvent splitting."""

from .grids import (
    FourierField,
    PotentialSpec,
    SpectralGrid,
    builtin_potential,
    from_physical,
    l2_norm,
    make_grid,
    sobolev_norm,
    synthesize_initial,
    to_physical,
    truncated_h1_norm,
)
from .operators import (
    BranchCutError,
    DiagonalOperator,
    SpectralOperator,
    alpha_norm,
    apply,
    collocation_potential_operator,
    commutator,
    compose,
    identity,
    operator_norm,
    quadratic_form,
    toeplitz_from_potential,
    unitary_log_generator,
)
from .schemes import (
    Scheme,
    Stage,
    StageKind,
    builtin_scheme,
    evolve,
    scheme_matrix,
    scheme_names,
    stability_function,
    step,
)
from .modified_energy import (
    assemble_modified_energy,
    bernoulli_numbers,
    composition_phase_fn,
    energy_gap,
    exact_energy,
    h0_estimate,
    z0_composition,
    z0_diagonal,
    z1_closed_form,
    z1_series,
    z_ell_recursion,
)
from .experiments import (
    BoundReport,
    SweepResult,
    SweepRow,
    TimeSeries,
    convergence_order,
    default_h_grid,
    energy_drift_series,
    frequency_split,
    oscillation_sweep,
    reference_propagator,
    resonance_predict,
    resonant_stepsizes,
    uniform_bound_check,
)

__version__ = "0.1.0"
