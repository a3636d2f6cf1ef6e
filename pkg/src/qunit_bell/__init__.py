"""Bell violations of spin-s singlets over diagonal parity-bit observables."""

from .spinrep import (
    SpinLabel,
    RotationTable,
    cg_coefficient,
    unique_element_count,
    wigner_d,
    wigner_d_squared,
)
from .parityobs import (
    CanonicalMask,
    ParityMask,
    canonicalize,
    enumerate_independent,
    identity_overlap,
    mask_from_integer,
    tensor_overlap,
)
from .correlator import (
    CosPoly,
    CorrelationFingerprint,
    NumericalGuardError,
    correlation,
    correlation_poly,
    distinct_correlations,
    fingerprint,
)
from .bellscan import (
    BellResult,
    bell_max,
    bell_value,
    bell_value_general,
    classical_limit_scan,
    family_mask,
)
from .surveyor import SampleSpec, SurveyReport, emit, load_report, sample_survey, survey

__version__ = "0.1.0"

__all__ = [
    "SpinLabel", "RotationTable", "cg_coefficient", "unique_element_count",
    "wigner_d", "wigner_d_squared",
    "CanonicalMask", "ParityMask", "canonicalize", "enumerate_independent",
    "identity_overlap", "mask_from_integer", "tensor_overlap",
    "CosPoly", "CorrelationFingerprint", "NumericalGuardError", "correlation",
    "correlation_poly", "distinct_correlations", "fingerprint",
    "BellResult", "bell_max", "bell_value", "bell_value_general",
    "classical_limit_scan", "family_mask",
    "SampleSpec", "SurveyReport", "emit", "load_report", "sample_survey", "survey",
]
