"""Exact-diagonalization workbench for quantum energy teleportation on a
four-spin Heisenberg chain, plus the two-qubit minimal model."""

from .chain import GroundState, build_hamiltonian, solve_ground_state, validate_calibration
from .protocol import run_protocol, optimal_theta
from .sweep import analyze_point

__all__ = [
    "GroundState",
    "analyze_point",
    "build_hamiltonian",
    "optimal_theta",
    "run_protocol",
    "solve_ground_state",
    "validate_calibration",
]
__version__ = "0.1.0"
