"""Numerical verification of an equivariant index theorem for Toeplitz operators on odd-dimensional spaces."""
from .circle import CircleModel, MatrixLoop, d_path, equivariant_index, kernel_cokernel, p_path, winding_number
from .clifford import CliffordAlgebra, build_algebra, spin_rep, symbol, trace_spin_via_symbol
from .equispec import GroupAction, RepElement, character_trace, equivariant_eigendecompose
from .errors import OddIndexError
from .eta import alpha_form, eta_invariant, eta_truncated, heat_index_integral, heat_index_traces
from .specflow import OperatorFamily, spectral_flow, spectral_flow_per_character

__version__ = "0.1.0"
