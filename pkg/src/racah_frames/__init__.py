"""Racah unit tensors, exact Wigner symbols, and SIC/MUB frame checks."""

from .frame import (
    FrameVector,
    TensorCoefficients,
    check_informational_completeness,
    expand,
    gram,
    reconstruct,
    structural_battery,
)
from .mub import MubSet, build_prime_mubs, mub_battery, verify_mubs
from .report import Check, Report
from .sic import SearchConfig, SicCandidate, search_fiducial, sic_battery, verify_sic, wh_orbit
from .tensor import couple, unit_tensor, unit_tensor_matrix
from .wigner import HalfInt, QuantumNumberError, SignedSqrtRational, six_j, three_jm

__version__ = "0.1.0"

__all__ = [
    "Check",
    "FrameVector",
    "HalfInt",
    "MubSet",
    "QuantumNumberError",
    "Report",
    "SearchConfig",
    "SicCandidate",
    "SignedSqrtRational",
    "TensorCoefficients",
    "build_prime_mubs",
    "check_informational_completeness",
    "couple",
    "expand",
    "gram",
    "mub_battery",
    "reconstruct",
    "search_fiducial",
    "sic_battery",
    "six_j",
    "structural_battery",
    "three_jm",
    "unit_tensor",
    "unit_tensor_matrix",
    "verify_mubs",
    "verify_sic",
    "wh_orbit",
]
