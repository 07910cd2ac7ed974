"""Error bounds and gap optimization for perturbative gadget Hamiltonians."""

__version__ = "0.1.0"

from .combinatorics import monomial_symmetric, enumerate_partitions_of_walk
from .gadget import (GadgetModel, build_gadget, normalize_couplings, v_norm_upper,
                     check_gap_precondition, default_z_star)
from .pauli import PauliTerm, TargetHamiltonian, TargetSyntaxError, parse_target, terms_commute
from .walks import (BoundReport, GapTooSmall, ReducedConfig, perturb_bound, total_error_bound,
                    walk_bound)
from .dense import DenseGadget, SpectralReport, materialize, spectral_report
from .sw import compute_R, fd_sw_compare, super_K, sw_effective
from .optimize import OptimizeRequest, alpha_sweep, optimize_delta

__all__ = [
    "PauliTerm", "TargetHamiltonian", "TargetSyntaxError", "parse_target", "terms_commute",
    "GadgetModel", "build_gadget", "normalize_couplings", "v_norm_upper",
    "check_gap_precondition", "default_z_star",
    "monomial_symmetric", "enumerate_partitions_of_walk",
    "ReducedConfig", "BoundReport", "GapTooSmall", "walk_bound", "perturb_bound", "total_error_bound",
    "DenseGadget", "SpectralReport", "materialize", "spectral_report",
    "super_K", "compute_R", "sw_effective", "fd_sw_compare",
    "OptimizeRequest", "optimize_delta", "alpha_sweep",
]
