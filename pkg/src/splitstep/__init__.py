"""Split-step walks on the integer lattice: operators, indices, bound states."""

from .errors import (
    CaseBoundary,
    ConfigError,
    DimensionMismatch,
    DomainError,
    EnvelopeViolation,
    EpsilonOutOfRange,
    GapBoundViolation,
    GapClosed,
    InconclusiveClassification,
    ModelValidationError,
    NonIntegerTrace,
    NormalizationError,
    NotSquareSummable,
    SplitStepError,
    StructureError,
    WindowTooSmallForDecay,
)
from .params import (
    PeriodicModel,
    PhaseLimits,
    SiteCoeffs,
    TabulatedModel,
    TwoPhaseModel,
    asymptotic_limits,
    coeffs,
    dump_model_toml,
    load_model_toml,
    log_mobius_weight,
    mobius_weight,
    model_from_dict,
    model_to_dict,
    site_coeffs,
    site_coeffs_arrays,
    support_radius,
    validate_model,
)
from .chiral import (
    ChiralPair,
    NegationChecks,
    SquareIndices,
    StandardRep,
    TraceIndex,
    conjugated_pair,
    grading,
    index_via_blocks,
    index_via_trace,
    kernel_basis,
    kernel_dim,
    negation_identities,
    offdiag_kernel_index,
    prime_pair,
    random_chiral_pair,
    random_involution,
    random_unitary,
    square_indices,
    standard_representation,
    validate_pair,
    witten_index,
    witten_index_prime,
)
from .walk import (
    State,
    WalkOperators,
    Window,
    apply,
    apply_power,
    build_alternating_walk,
    build_coin,
    build_shift_factor,
    build_walk,
    chiral_residual,
    component_swap,
    delta_state,
    equivalence_residual,
    load_state_csv,
    rotation_to_split_step,
    save_state_csv,
    state_to_vector,
    translation_matrix,
    unitarity_residual,
    vector_to_state,
)
from .indices import (
    CaseRow,
    ClassifiedIndex,
    DeltaSequence,
    SeriesVerdict,
    classify_index,
    constant_model,
    delta_at,
    delta_log_abs2,
    delta_series,
    index_report,
    representative_limits,
    sixteen_case_row,
    two_phase_index,
    witten_formulas,
)
from .eigenstates import (
    DecayRates,
    EigenstateBundle,
    EnvelopeReport,
    ShiftKernelSolution,
    build_eigenstate,
    decay_rates,
    eigen_residual,
    eigenstate_report,
    empirical_onset,
    envelope_check,
    lift_to_eigenstate,
    onset_site,
    solve_shift_kernel,
    tau_values,
)
from .spectrum import (
    Interval,
    SpectralBands,
    SpectralPoint,
    classified_spectrum,
    essential_bands,
    expected_isolated,
    model_bands,
    save_spectrum_csv,
    truncated_spectrum,
)

__version__ = "0.1.0"
