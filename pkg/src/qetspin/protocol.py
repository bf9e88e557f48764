"""Measurement, classical communication and feedback on the four-spin chain.

Alice projects spin 1 onto ``+-x``; Bob rotates spin 4 about ``y`` by an
outcome-dependent angle, ``U_4(mu) = cos(theta) + i (-1)^mu sigma_4^y sin(theta)``.
Energies are computed twice: by density-matrix algebra and by closed forms
in the ground-state ansatz coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chain import DIM, N_SITES, GroundState, spin_operators
from .errors import DegenerateObjective, DomainError, ZeroProbability
from .linalg import bloch_operator, expectation, pauli_operator

PROB_FLOOR = 1e-12
X_AXIS = (1.0, 0.0, 0.0)


@dataclass(frozen=True)
class MeasurementOutcome:
    mu: int
    probability: float
    projector: np.ndarray
    post_state: np.ndarray


def projector(mu: int, axis: Sequence[float] = X_AXIS) -> np.ndarray:
    """``P_1(mu) = (1 + (-1)^mu r.sigma_1) / 2``."""
    return 0.5 * (np.eye(DIM) + (-1) ** mu * bloch_operator(axis, 1, N_SITES))


def measure_along(rho: np.ndarray, axis: Sequence[float]) -> list[MeasurementOutcome]:
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1) > 1e-12:
        raise DomainError(f"measurement axis must be a real unit 3-vector, got {axis}")
    outcomes = []
    for mu in (0, 1):
        P = projector(mu, axis)
        p = expectation(rho, P)
        if p < PROB_FLOOR:
            raise ZeroProbability(f"outcome mu={mu} has probability {p:.3e}")
        outcomes.append(MeasurementOutcome(mu, p, P, P @ rho @ P / p))
    return outcomes


def measure(gs: GroundState) -> list[MeasurementOutcome]:
    return measure_along(gs.rho, X_AXIS)


def averaged_state(outcomes: Sequence[MeasurementOutcome]) -> np.ndarray:
    return sum(o.probability * o.post_state for o in outcomes)


def infused_energy(gs: GroundState, outcomes: Sequence[MeasurementOutcome]) -> float:
    """``E_A = sum_mu p_mu tr(rho_m(mu) H)``."""
    return sum(o.probability * expectation(o.post_state, gs.parts.H) for o in outcomes)


def closed_form_EA(gs: GroundState) -> float:
    a, b, c, d = gs.coefficients
    h = gs.h
    return 0.25 * (1 - 4 * b * b - 2 * h * (c * c - d * d) + 2 * a * (c + d))


def measurement_interaction_energy(gs: GroundState, outcomes: Sequence[MeasurementOutcome]) -> float:
    """Part of ``E_A`` carried by the ``S_1.S_2`` bond."""
    bond = spin_operators()["S12"]
    after = sum(o.probability * expectation(o.post_state, bond) for o in outcomes)
    return after - expectation(gs.rho, bond)


def feedback_unitary(mu: int, theta: float) -> np.ndarray:
    return np.cos(theta) * np.eye(DIM) + 1j * (-1) ** mu * np.sin(theta) * pauli_operator("y", 4, N_SITES)


def apply_feedback(outcomes: Sequence[MeasurementOutcome], unitaries: Sequence[np.ndarray]) -> np.ndarray:
    """``sum_mu U(mu) P(mu) rho P(mu) U(mu)^dagger`` (unnormalized branches recombined)."""
    rho_f = np.zeros((DIM, DIM), dtype=complex)
    for o, U in zip(outcomes, unitaries):
        rho_f += o.probability * (U @ o.post_state @ U.conj().T)
    return rho_f


def feedback(outcomes: Sequence[MeasurementOutcome], theta: float) -> np.ndarray:
    return apply_feedback(outcomes, [feedback_unitary(o.mu, theta) for o in outcomes])


def extracted_energy(gs: GroundState, rho_f: np.ndarray) -> float:
    """``E_B = -tr(rho_f H_B)``."""
    return -expectation(rho_f, gs.parts.H_B)


def xy_coefficients(gs: GroundState) -> tuple[float, float]:
    a, b, c, d = gs.coefficients
    h = gs.h
    X = 2 - 8 * b * b + 4 * a * (c + d) - 4 * h * (c * c - d * d)
    Y = 4 * b * (4 * h * a + c - d)
    return X, Y


def closed_form_EB(gs: GroundState, theta: float) -> float:
    X, Y = xy_coefficients(gs)
    return (X * np.cos(2 * theta) + Y * np.sin(2 * theta) - X) / 8


def optimal_theta(gs: GroundState) -> tuple[float, float]:
    """Feedback angle maximizing ``E_B`` and the maximum ``E_B^max``.

    Uses ``2 theta* = atan2(Y, X)`` so the maximizer is selected for either
    sign of ``X``. A flat objective raises :class:`DegenerateObjective`;
    its ``theta`` and ``value`` attributes hold the fallback ``(0, 0)``.
    """
    X, Y = xy_coefficients(gs)
    if X * X + Y * Y < 1e-20:
        raise DegenerateObjective(f"X = Y = 0 at h={gs.h}")
    theta = 0.5 * np.arctan2(Y, X)
    return float(theta), float((np.hypot(X, Y) - X) / 8)


@dataclass(frozen=True)
class EnergyBreakdown:
    E12_int: float
    E4_h: float
    E34_int: float


def extraction_breakdown(gs: GroundState, rho_f: np.ndarray) -> tuple[float, float]:
    """``(E_4^h, E_34^int)``: field and bond pieces of ``E_B`` at site 4."""
    ops = spin_operators()
    field = gs.h * ops["S4z"]
    bond = ops["S34"]
    E4_h = -expectation(rho_f, field) + expectation(gs.rho, field)
    E34_int = -expectation(rho_f, bond) + expectation(gs.rho, bond)
    return E4_h, E34_int


@dataclass(frozen=True)
class ProtocolRun:
    gs: GroundState
    outcomes: list[MeasurementOutcome]
    theta: float
    E_A: float
    E_B: float
    theta_star: float
    E_B_max: float
    X: float
    Y: float
    rho_f: np.ndarray
    breakdown: EnergyBreakdown


def run_protocol(gs: GroundState, theta: float | None = None) -> ProtocolRun:
    """Full protocol at ``theta`` (the optimal angle when ``None``)."""
    outcomes = measure(gs)
    X, Y = xy_coefficients(gs)
    try:
        theta_star, E_B_max = optimal_theta(gs)
    except DegenerateObjective as exc:
        theta_star, E_B_max = exc.theta, exc.value
    if theta is None:
        theta = theta_star
    rho_f = feedback(outcomes, theta)
    E4_h, E34_int = extraction_breakdown(gs, rho_f)
    return ProtocolRun(
        gs=gs,
        outcomes=outcomes,
        theta=float(theta),
        E_A=infused_energy(gs, outcomes),
        E_B=extracted_energy(gs, rho_f),
        theta_star=theta_star,
        E_B_max=E_B_max,
        X=X,
        Y=Y,
        rho_f=rho_f,
        breakdown=EnergyBreakdown(measurement_interaction_energy(gs, outcomes), E4_h, E34_int),
    )
