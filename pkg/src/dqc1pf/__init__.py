"""Classical simulation of one-clean-qubit partition function estimation for binary MRFs."""

__version__ = "0.1.0"

from .chebyshev import (
    ChebyshevBudget,
    assemble_trace,
    bessel_i,
    chebyshev_T,
    make_budget,
    sample_budget,
    truncation_order,
)
from .errors import CapacityError, ModelFormatError
from .estimator import EstimatorConfig, EstimateReport, estimate_chi, estimate_partition, run_cell
from .lcu import Lcu, SignedZTerm, amplitudes, decompose, diagonal, term_eigenvalue
from .mrf import MrfModel, energy, normalize, parse_model, random_model, serialize_model
from .oracle import exact_chi, exact_partition, exact_sk_trace, spectrum, truncation_error
from .statevector import RegisterLayout, StateVector, WalkContext, projected_chi

__all__ = [
    "CapacityError",
    "ChebyshevBudget",
    "EstimateReport",
    "EstimatorConfig",
    "Lcu",
    "ModelFormatError",
    "MrfModel",
    "RegisterLayout",
    "SignedZTerm",
    "StateVector",
    "WalkContext",
    "amplitudes",
    "assemble_trace",
    "bessel_i",
    "chebyshev_T",
    "decompose",
    "diagonal",
    "energy",
    "estimate_chi",
    "estimate_partition",
    "exact_chi",
    "exact_partition",
    "exact_sk_trace",
    "make_budget",
    "normalize",
    "parse_model",
    "projected_chi",
    "random_model",
    "run_cell",
    "sample_budget",
    "serialize_model",
    "spectrum",
    "term_eigenvalue",
    "truncation_error",
    "truncation_order",
]
