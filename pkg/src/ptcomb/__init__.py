"""Band spectra of PT-symmetric periodic Dirac-comb potentials."""

__version__ = "0.1.0"

from .analysis import (
    Decomposition,
    EnvelopeDomainError,
    Extremum,
    find_extrema,
    n2_decompose,
    n2_envelope,
    n2_envelope_limit_small_r,
    n2_envelope_limit_small_s,
    n2_large_s_approx,
    n3_decompose,
)
from .bloch import BandEdgeDegeneracy, BlochState, bloch_state, localization_metrics, psi_profile
from .condition import BandConditionValue, alternating_subsets, big_b, big_b_derivative, big_b_oracle
from .lattice import CellError, Coupling, UnitCell, check_pt, load_cell, make_pt_cell, save_cell
from .spectra import (
    BandInterval,
    DispersionPoint,
    DosPoint,
    OutOfBandError,
    allowed_bands,
    band_table,
    dispersion,
    dos,
)
from .transfer import CellMatrix, cell_matrix

__all__ = [
    "BandConditionValue", "BandEdgeDegeneracy", "BandInterval", "BlochState", "CellError",
    "CellMatrix", "Coupling", "Decomposition", "DispersionPoint", "DosPoint",
    "EnvelopeDomainError", "Extremum", "OutOfBandError", "UnitCell", "allowed_bands",
    "alternating_subsets", "band_table", "big_b", "big_b_derivative", "big_b_oracle",
    "bloch_state", "cell_matrix", "check_pt", "dispersion", "dos", "find_extrema",
    "load_cell", "localization_metrics", "make_pt_cell", "n2_decompose", "n2_envelope",
    "n2_envelope_limit_small_r", "n2_envelope_limit_small_s", "n2_large_s_approx",
    "n3_decompose", "psi_profile", "save_cell",
]
