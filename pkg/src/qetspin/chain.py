"""Four-spin Heisenberg chain with edge fields, and its calibrated ground state.

``H = H_A + H_B + V`` with

    H_A = h S_1^z + S_1.S_2 + eta
    H_B = h S_4^z + S_3.S_4 + eta
    V   = S_2.S_3 + xi

where ``eta`` and ``xi`` are chosen so that each part has zero ground-state
expectation. The ground state for ``0 <= h < 1`` lives in the six-state
``S_tot^z = 0`` sector and has the form

    a(|udud> + |dudu>) - b(|uudd> + |dduu>) - c|uddu> - d|duud>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CalibrationFailure, DegenerateGroundState, DomainError, SectorViolation
from .linalg import eig_hermitian, embed_site_operator, expectation, heisenberg_bond, total_sz

N_SITES = 4
DIM = 2**N_SITES
TOL = 1e-10


def basis_index(label: str) -> int:
    """Index of a basis label such as ``"udud"`` (``u``/``d`` or arrows)."""
    bits = {"u": "0", "d": "1", "↑": "0", "↓": "1"}
    return int("".join(bits[ch] for ch in label), 2)


A_STATES = (basis_index("udud"), basis_index("dudu"))
B_STATES = (basis_index("uudd"), basis_index("dduu"))
C_STATE = basis_index("uddu")
D_STATE = basis_index("duud")
SECTOR_STATES = tuple(sorted(A_STATES + B_STATES + (C_STATE, D_STATE)))


@lru_cache(maxsize=None)
def _static_operators() -> dict[str, np.ndarray]:
    ops = {
        "S1z": embed_site_operator("z", 1, N_SITES),
        "S4z": embed_site_operator("z", 4, N_SITES),
        "S12": heisenberg_bond(1, 2, N_SITES),
        "S23": heisenberg_bond(2, 3, N_SITES),
        "S34": heisenberg_bond(3, 4, N_SITES),
        "Sz": total_sz(N_SITES),
    }
    for op in ops.values():
        op.setflags(write=False)
    return ops


def spin_operators() -> dict[str, np.ndarray]:
    """Read-only cached building blocks: ``S1z, S4z, S12, S23, S34, Sz``."""
    return _static_operators()


@dataclass(frozen=True)
class HamiltonianParts:
    H_A: np.ndarray
    H_B: np.ndarray
    V: np.ndarray
    H: np.ndarray
    h: float
    eta: float
    xi: float


def check_field(h: float) -> float:
    h = float(h)
    if not (0.0 <= h < 1.0) or not np.isfinite(h):
        raise DomainError(f"magnetic field h={h} outside the supported range [0, 1)")
    return h


def build_hamiltonian(h: float, eta: float = 0.0, xi: float = 0.0) -> HamiltonianParts:
    ops = spin_operators()
    eye = np.eye(DIM)
    H_A = h * ops["S1z"] + ops["S12"] + eta * eye
    H_B = h * ops["S4z"] + ops["S34"] + eta * eye
    V = ops["S23"] + xi * eye
    return HamiltonianParts(H_A=H_A, H_B=H_B, V=V, H=H_A + H_B + V, h=h, eta=eta, xi=xi)


def eta_closed_form(h: float, a: float, b: float, c: float, d: float) -> float:
    return 0.25 * (1 - 4 * b * b - 2 * h * (c * c - d * d) + 4 * a * (c + d))


def xi_closed_form(a: float, b: float, c: float, d: float) -> float:
    """``-<S_2.S_3>`` in terms of the ansatz coefficients.

    The ``8ab`` term comes from the spin-flip part of ``S_2.S_3`` connecting
    ``|udud>`` with ``|uudd>`` (and their reflections).
    """
    return 0.25 * (2 * a * a + 2 * b * b - c * c - d * d + 8 * a * b)


@dataclass(frozen=True)
class GroundState:
    h: float
    energy: float
    """Lowest eigenvalue of the uncalibrated Hamiltonian (eta = xi = 0)."""
    psi: np.ndarray
    a: float
    b: float
    c: float
    d: float
    eta: float
    xi: float
    gap: float
    parts: HamiltonianParts = field(repr=False)

    @property
    def rho(self) -> np.ndarray:
        return np.outer(self.psi, self.psi.conj())

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return self.a, self.b, self.c, self.d

    @property
    def min_coefficient(self) -> float:
        return min(self.coefficients)


def ansatz_state(a: float, b: float, c: float, d: float) -> np.ndarray:
    psi = np.zeros(DIM, dtype=complex)
    psi[list(A_STATES)] = a
    psi[list(B_STATES)] = -b
    psi[C_STATE] = -c
    psi[D_STATE] = -d
    return psi


def ansatz_residual(psi: np.ndarray) -> float:
    """Max deviation of ``psi`` from the ansatz amplitude pattern."""
    a = psi[A_STATES[0]]
    b = -psi[B_STATES[0]]
    c, d = -psi[C_STATE], -psi[D_STATE]
    return float(np.max(np.abs(psi - ansatz_state(a, b, c, d))))


def solve_ground_state(h: float) -> GroundState:
    """Diagonalize the full 16-dimensional Hamiltonian and calibrate it.

    Raises ``DegenerateGroundState`` when the two lowest levels are within
    1e-10 and ``SectorViolation`` when the ground state leaks out of the
    ``S_tot^z = 0`` sector or breaks the ansatz amplitude pattern.
    """
    h = check_field(h)
    bare = build_hamiltonian(h)
    w, v = eig_hermitian(bare.H)
    gap = float(w[1] - w[0])
    if gap < TOL:
        raise DegenerateGroundState(f"ground state degenerate at h={h} (gap {gap:.2e})")
    psi = v[:, 0].copy()

    outside = np.delete(psi, SECTOR_STATES)
    leak = float(np.sum(np.abs(outside) ** 2))
    if leak > TOL:
        raise SectorViolation(f"ground state weight {leak:.2e} outside S_tot^z = 0 at h={h}")

    pivot = A_STATES[0] if abs(psi[A_STATES[0]]) > TOL else C_STATE
    phase = psi[pivot] / abs(psi[pivot])
    if pivot == C_STATE:
        phase = -phase
    psi = psi / phase
    psi[np.abs(psi) < 1e-15] = 0.0
    residual = ansatz_residual(psi)
    if residual > TOL or float(np.max(np.abs(psi.imag))) > TOL:
        raise SectorViolation(f"ground state breaks the ansatz pattern at h={h} ({residual:.2e})")
    psi = psi.real.astype(complex)

    a = float(psi[A_STATES[0]].real)
    b = float(-psi[B_STATES[0]].real)
    c = float(-psi[C_STATE].real)
    d = float(-psi[D_STATE].real)

    rho = np.outer(psi, psi.conj())
    ops = spin_operators()
    eta = -expectation(rho, h * ops["S1z"] + ops["S12"])
    eta_b = -expectation(rho, h * ops["S4z"] + ops["S34"])
    xi = -expectation(rho, ops["S23"])
    checks = {
        "eta (H_B trace condition)": (eta_b, eta),
        "eta (closed form)": (eta_closed_form(h, a, b, c, d), eta),
        "xi (closed form)": (xi_closed_form(a, b, c, d), xi),
    }
    for name, (value, ref) in checks.items():
        if abs(value - ref) > TOL:
            raise CalibrationFailure(f"{name} = {value!r} disagrees with {ref!r} at h={h}")

    return GroundState(
        h=h, energy=float(w[0]), psi=psi, a=a, b=b, c=c, d=d, eta=eta, xi=xi, gap=gap,
        parts=build_hamiltonian(h, eta, xi),
    )


@dataclass(frozen=True)
class CalibrationReport:
    H_A: float
    H_B: float
    V: float
    total: float

    def max_abs(self) -> float:
        return max(abs(self.H_A), abs(self.H_B), abs(self.V), abs(self.total))


def validate_calibration(gs: GroundState, tol: float = TOL) -> CalibrationReport:
    rho = gs.rho
    report = CalibrationReport(
        H_A=expectation(rho, gs.parts.H_A),
        H_B=expectation(rho, gs.parts.H_B),
        V=expectation(rho, gs.parts.V),
        total=expectation(rho, gs.parts.H),
    )
    for name in ("H_A", "H_B", "V", "total"):
        value = getattr(report, name)
        if abs(value) > tol:
            raise CalibrationFailure(f"tr(rho_g {name}) = {value!r} at h={gs.h}")
    return report
