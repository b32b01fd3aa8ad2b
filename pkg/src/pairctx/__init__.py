"""Adaptive input-state-control protocol for a two-photon paradox experiment.

The package models a tunable-entanglement polarization source, locates each
setting's balanced analyzer angle, generates Poisson-fluctuating coincidence
counts, and reduces raw count tables (simulated or measured) to visibilities,
an entanglement witness, suppressed probabilities, and a contrast ratio.
"""

__version__ = "0.1.0"

from .control import (
    DEFAULT_GRID_DEG,
    DegenerateStateError,
    ExtrapolationWarning,
    FitIntersectionError,
    ProbeResult,
    ProtocolReport,
    SweepRow,
    balance_phi_m_exact,
    balance_phi_m_for_state,
    balance_phi_m_probed,
    expected_counts_probe,
    ideal_phi_s_star,
    sampled_counts_probe,
    simulated_raw_counts,
    sweep_phi_s,
)
from .counting import AcquisitionPlan, angle_key, derive_rng, run_plan, sample_context
from .dataio import (
    A1_COLUMNS,
    A2_COLUMNS,
    AnalysisReport,
    AnalysisRow,
    ParseError,
    RawCountsFile,
    RawCountsRow,
    SCHEMAS,
    analyze,
    emit_report,
    load_bundled,
    load_raw_counts,
    parse_raw_counts,
    serialize_raw_counts,
    write_report,
)
from .metrics import (
    ContextCounts,
    Estimate,
    ProbabilityEstimate,
    VisibilityRecord,
    contrast_k,
    error_floor,
    inequality_margin,
    local_visibility,
    probability_estimate,
    probabilities_to_estimates,
    purity_length,
    record_from_counts,
    record_from_state,
    visibility,
    witness,
)
from .optics import (
    Angle,
    ContextProbabilities,
    FIRST_BASIS,
    MeasurementContext,
    UNBIASED_BASIS,
    context_probabilities,
    hardy_target_state,
    joint_probability,
    outcome_state,
    rotation,
    standard_contexts,
)
from .qstate import (
    DensityMatrix2Q,
    FrameMismatchError,
    PureState1Q,
    PureState2Q,
    Unitary1Q,
    apply_local,
    inner_product,
    pure_to_density,
    schmidt_coefficients,
    tensor,
)
from .source import SourceConfig, calibrate_noise, ideal_state, noisy_state
from .verify import CheckResult, REFERENCE_NOISE, run_checks

__all__ = [
    "__version__",
    "A1_COLUMNS",
    "A2_COLUMNS",
    "AcquisitionPlan",
    "AnalysisReport",
    "AnalysisRow",
    "Angle",
    "CheckResult",
    "ContextCounts",
    "ContextProbabilities",
    "DEFAULT_GRID_DEG",
    "DegenerateStateError",
    "DensityMatrix2Q",
    "Estimate",
    "ExtrapolationWarning",
    "FIRST_BASIS",
    "FitIntersectionError",
    "FrameMismatchError",
    "MeasurementContext",
    "ParseError",
    "ProbabilityEstimate",
    "ProbeResult",
    "ProtocolReport",
    "PureState1Q",
    "PureState2Q",
    "RawCountsFile",
    "RawCountsRow",
    "REFERENCE_NOISE",
    "SCHEMAS",
    "SourceConfig",
    "SweepRow",
    "UNBIASED_BASIS",
    "Unitary1Q",
    "VisibilityRecord",
    "analyze",
    "angle_key",
    "apply_local",
    "balance_phi_m_exact",
    "balance_phi_m_for_state",
    "balance_phi_m_probed",
    "calibrate_noise",
    "context_probabilities",
    "contrast_k",
    "derive_rng",
    "emit_report",
    "error_floor",
    "expected_counts_probe",
    "hardy_target_state",
    "ideal_phi_s_star",
    "ideal_state",
    "inequality_margin",
    "inner_product",
    "joint_probability",
    "load_bundled",
    "load_raw_counts",
    "local_visibility",
    "noisy_state",
    "outcome_state",
    "parse_raw_counts",
    "probabilities_to_estimates",
    "probability_estimate",
    "pure_to_density",
    "purity_length",
    "record_from_counts",
    "record_from_state",
    "rotation",
    "run_checks",
    "run_plan",
    "sample_context",
    "sampled_counts_probe",
    "schmidt_coefficients",
    "serialize_raw_counts",
    "simulated_raw_counts",
    "standard_contexts",
    "sweep_phi_s",
    "tensor",
    "visibility",
    "witness",
    "write_report",
]
