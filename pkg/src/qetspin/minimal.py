"""Two-qubit minimal QET model.

``H = h s_A^z + h s_B^z + 2k s_A^x s_B^x + 2 sqrt(h^2 + k^2)`` (Pauli
matrices ``s``), with the constant chosen so the ground-state energy is
zero. Alice measures ``s_A^x``; Bob applies
``cos(theta) + i (-1)^mu s_B^y sin(theta)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, InvariantViolation
from .linalg import SIGMA, eig_hermitian, entropy_from_spectrum, expectation, partial_trace
from .thermo import proportionality_fit

H_MAX = 1.99


def _check(h: float, k: float) -> None:
    if k <= 0 or h < 0 or not (np.isfinite(h) and np.isfinite(k)):
        raise DomainError(f"minimal model needs k > 0 and h >= 0, got h={h}, k={k}")


@dataclass(frozen=True)
class MinimalResult:
    h: float
    k: float
    a: float
    b: float
    theta: float
    EB_max: float
    rhoB_g: np.ndarray
    rhoB_f: np.ndarray
    SB_g: float
    SB_f: float
    SB_f_tilde: float

    @property
    def dSB(self) -> float:
        return self.SB_f - self.SB_g

    @property
    def dSB_tilde(self) -> float:
        return self.SB_f_tilde - self.SB_g


def minimal_closed_forms(h: float, k: float = 1.0) -> MinimalResult:
    _check(h, k)
    R = np.hypot(h, k)
    a = np.sqrt(1 - h / R) / np.sqrt(2)
    b = np.sqrt(1 + h / R) / np.sqrt(2)
    w = h * h + 2 * k * k
    EB_max = w / R * (np.sqrt(1 + (h * k / w) ** 2) - 1)
    cos2 = (h * h + k * k) / np.sqrt(w * w + (h * k) ** 2)
    theta = 0.5 * np.arccos(np.clip(cos2, -1.0, 1.0))
    ct, st = np.cos(theta) ** 2, np.sin(theta) ** 2
    g = np.array([a * a, b * b])
    f = np.array([a * a * ct + b * b * st, b * b * ct + a * a * st])
    # Both states are diagonal in the same basis, so -tr(rho_f ln rho_g) is elementwise.
    cross = float(-np.sum(f * np.log(g)))
    return MinimalResult(
        h=float(h), k=float(k), a=float(a), b=float(b), theta=float(theta), EB_max=float(EB_max),
        rhoB_g=np.diag(g), rhoB_f=np.diag(f),
        SB_g=entropy_from_spectrum(g), SB_f=entropy_from_spectrum(f), SB_f_tilde=cross,
    )


def minimal_hamiltonian(h: float, k: float = 1.0) -> np.ndarray:
    I = np.eye(2)
    return (
        h * np.kron(SIGMA["z"], I) + h * np.kron(I, SIGMA["z"])
        + 2 * k * np.kron(SIGMA["x"], SIGMA["x"]) + 2 * np.hypot(h, k) * np.eye(4)
    )


@dataclass
class MinimalCrosscheck:
    h: float
    k: float
    ground_energy: float
    rhoB_g: np.ndarray
    rhoB_f: np.ndarray
    theta_numeric: float
    EB_numeric: float
    EB_closed: float
    rho_g_error: float
    rho_f_error: float

    @property
    def EB_error(self) -> float:
        return abs(self.EB_numeric - self.EB_closed)


def minimal_numeric_crosscheck(h: float, k: float = 1.0, rho_tol: float = 1e-10, eb_tol: float = 1e-8) -> MinimalCrosscheck:
    """Run the full two-qubit protocol numerically and compare with closed forms.

    Bob's angle is optimized numerically. The mismatch with the closed
    forms is checked against ``rho_tol`` (reduced states) and ``eb_tol``
    (extracted energy); a failure raises :class:`InvariantViolation`
    quoting both values.
    """
    closed = minimal_closed_forms(h, k)
    H = minimal_hamiltonian(h, k)
    w, v = eig_hermitian(H)
    psi = v[:, 0]
    ground = v[:, np.abs(w - w[0]) < 1e-10]
    if ground.shape[1] > 1:
        # At h = 0 both parity sectors share the ground level; take the even
        # one (s_A^z s_B^z = +1), which is the h -> 0+ limit.
        parity = np.kron(SIGMA["z"], SIGMA["z"])
        pw, pv = eig_hermitian(ground.conj().T @ parity @ ground)
        psi = ground @ pv[:, -1]
    rho = np.outer(psi, psi.conj())
    I = np.eye(2)
    P = [0.5 * (np.eye(4) + (-1) ** mu * np.kron(SIGMA["x"], I)) for mu in (0, 1)]
    branches = [p @ rho @ p for p in P]
    rho_m = branches[0] + branches[1]
    E_m = expectation(rho_m, H)

    def final_state(theta):
        out = np.zeros((4, 4), dtype=complex)
        for mu, br in enumerate(branches):
            U = np.cos(theta) * np.eye(4) + 1j * (-1) ** mu * np.sin(theta) * np.kron(I, SIGMA["y"])
            out += U @ br @ U.conj().T
        return out

    def extracted(theta):
        return E_m - expectation(final_state(theta), H)

    grid = np.linspace(-np.pi / 2, np.pi / 2, 721)
    values = np.array([extracted(t) for t in grid])
    i = int(np.argmax(values))
    step = grid[1] - grid[0]
    res = minimize_scalar(lambda t: -extracted(t), bounds=(grid[i] - step, grid[i] + step),
                          method="bounded", options={"xatol": 1e-12})
    theta_num = float(res.x) if -res.fun >= values[i] else float(grid[i])
    EB_num = extracted(theta_num)

    rB_g = partial_trace(rho, (2,))
    rB_f = partial_trace(final_state(theta_num), (2,))
    report = MinimalCrosscheck(
        h=float(h), k=float(k), ground_energy=float(w[0]), rhoB_g=rB_g, rhoB_f=rB_f,
        theta_numeric=theta_num, EB_numeric=float(EB_num), EB_closed=closed.EB_max,
        rho_g_error=float(np.max(np.abs(rB_g - closed.rhoB_g))),
        rho_f_error=float(np.max(np.abs(rB_f - closed.rhoB_f))),
    )
    if report.rho_g_error > rho_tol:
        raise InvariantViolation(f"rho_B^g numeric {np.diag(rB_g).real} vs closed {np.diag(closed.rhoB_g)}")
    if report.EB_error > eb_tol:
        raise InvariantViolation(f"E_B^max numeric {EB_num!r} vs closed {closed.EB_max!r}")
    return report


@dataclass
class MinimalFit:
    k: float
    h: np.ndarray
    results: list[MinimalResult]
    beta: float
    beta_tilde: float
    slope: float
    slope_tilde: float
    max_rel_deviation: float
    max_rel_deviation_tilde: float

    def curves(self) -> dict[str, np.ndarray]:
        EB = np.array([r.EB_max for r in self.results])
        dSB = np.array([r.dSB for r in self.results])
        dSBt = np.array([r.dSB_tilde for r in self.results])
        return {
            "h": self.h, "EB_max": EB, "dSB": dSB, "dSB_tilde": dSBt,
            "two_thirds_dSB": 2 * dSB / 3, "half_dSB_tilde": dSBt / 2,
        }


def minimal_fits(k: float = 1.0, h_grid: Sequence[float] | None = None) -> MinimalFit:
    """Through-origin fits ``E_B^max = -dS / beta`` for both entropy changes."""
    if h_grid is None:
        h_grid = np.linspace(0.0, H_MAX, 100)
    h_grid = np.asarray(h_grid, dtype=float)
    if h_grid.size and (h_grid.min() < 0 or h_grid.max() >= 2):
        raise DomainError("h grid must lie within [0, 2)")
    results = [minimal_closed_forms(h, k) for h in h_grid]
    EB = np.array([r.EB_max for r in results])
    dS = np.array([r.dSB for r in results])
    dSt = np.array([r.dSB_tilde for r in results])
    if EB.size < 2:
        # The origin lies on every through-origin fit; padding lets one-point grids through.
        EB, dS, dSt = np.append(EB, 0.0), np.append(dS, 0.0), np.append(dSt, 0.0)
    slope, dev = proportionality_fit(dS, EB)
    slope_t, dev_t = proportionality_fit(dSt, EB)
    return MinimalFit(
        k=float(k), h=h_grid, results=results, beta=-1 / slope, beta_tilde=-1 / slope_t,
        slope=slope, slope_tilde=slope_t, max_rel_deviation=dev, max_rel_deviation_tilde=dev_t,
    )
