"""Gaussian quantum-illumination hypothesis testing with a Fock-space oracle."""

__version__ = "0.1.0"

from .errors import GaussQIError, NumericalError, ValidationError  # noqa: E402
from .gaussian import GaussianState, symplectic_eigenvalues, williamson  # noqa: E402
from .scenario import (  # noqa: E402
    ChannelSpec,
    HypothesisPair,
    LinkBudget,
    SourceSpec,
    c_quantum,
    c_separable,
    hypothesis_pair_coherent,
    hypothesis_pair_generic,
)
from .symmetric import qbb, qcb, s_overlap  # noqa: E402
from .asymmetric import stein_quantities_exact  # noqa: E402

__all__ = [
    "__version__", "GaussQIError", "NumericalError", "ValidationError",
    "GaussianState", "symplectic_eigenvalues", "williamson",
    "ChannelSpec", "HypothesisPair", "LinkBudget", "SourceSpec",
    "c_quantum", "c_separable", "hypothesis_pair_coherent", "hypothesis_pair_generic",
    "qbb", "qcb", "s_overlap", "stein_quantities_exact",
]
