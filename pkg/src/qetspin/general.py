"""Generalized protocol: arbitrary measurement axis and feedback unitaries.

Alice measures ``r.sigma_1`` for a unit vector ``r``; for outcome ``mu`` Bob
applies ``U_4(mu) = cos(omega_mu) + i n_mu.sigma_4 sin(omega_mu)``. The
extracted energy has the form

    E_B = (1/16) sum_mu [x(mu) cos(2 omega_mu) + y(mu) sin(2 omega_mu) + z(mu)]

with ``x, y, z`` polynomial in the ansatz coefficients, ``r`` and ``n_mu``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .chain import DIM, N_SITES, GroundState
from .errors import DomainError
from .linalg import bloch_operator, expectation
from .protocol import MeasurementOutcome, apply_feedback, measure_along, optimal_theta

UNIT_TOL = 1e-12


def _unit(v: Sequence[float], name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1) > UNIT_TOL:
        raise DomainError(f"{name} must be a real unit 3-vector, got {v}")
    return v


def sphere_point(polar: float, azimuth: float) -> np.ndarray:
    return np.array([np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth), np.cos(polar)])


@dataclass(frozen=True)
class GeneralProtocolParams:
    r: np.ndarray
    n0: np.ndarray
    n1: np.ndarray
    omega0: float
    omega1: float

    def __post_init__(self):
        object.__setattr__(self, "r", _unit(self.r, "r"))
        object.__setattr__(self, "n0", _unit(self.n0, "n0"))
        object.__setattr__(self, "n1", _unit(self.n1, "n1"))

    @property
    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return self.n0, self.n1

    @property
    def angles(self) -> tuple[float, float]:
        return self.omega0, self.omega1

    @classmethod
    def family(cls, t: float, N0: int, N1: int, omega0: float = 0.0, omega1: float = 0.0):
        """Member of the maximizing family ``r = (cos t, sin t, 0)``,
        ``n_mu = ((-1)^N_mu sin t, (-1)^(N_mu+1) cos t, 0)``."""
        r = (np.cos(t), np.sin(t), 0.0)

        def n(N):
            return ((-1) ** N * np.sin(t), (-1) ** (N + 1) * np.cos(t), 0.0)

        return cls(r, n(N0), n(N1), omega0, omega1)


def general_measure(gs: GroundState, r: Sequence[float]) -> list[MeasurementOutcome]:
    return measure_along(gs.rho, _unit(r, "r"))


def general_EA(gs: GroundState, r: Sequence[float]) -> float:
    """Infused energy by direct evaluation."""
    outcomes = general_measure(gs, r)
    return sum(o.probability * expectation(o.post_state, gs.parts.H) for o in outcomes)


def closed_form_general_EA(gs: GroundState, r: Sequence[float]) -> float:
    rz = _unit(r, "r")[2]
    a, b, c, d = gs.coefficients
    h = gs.h
    base = 1 - 4 * b * b - 2 * h * (c * c - d * d)
    return 0.25 * (-rz * rz * (base - 2 * a * (c + d)) + base + 2 * a * (c + d))


def general_unitary(n: Sequence[float], omega: float) -> np.ndarray:
    return np.cos(omega) * np.eye(DIM) + 1j * np.sin(omega) * bloch_operator(n, 4, N_SITES)


def general_feedback(gs: GroundState, params: GeneralProtocolParams) -> np.ndarray:
    outcomes = general_measure(gs, params.r)
    unitaries = [general_unitary(n, w) for n, w in zip(params.axes, params.angles)]
    return apply_feedback(outcomes, unitaries)


def general_EB(gs: GroundState, params: GeneralProtocolParams) -> float:
    """Extracted energy ``-tr(rho_f H_B)`` by direct evaluation."""
    return -expectation(general_feedback(gs, params), gs.parts.H_B)


def xyz_coefficients(gs: GroundState, r, n, mu: int):
    """``(x(mu), y(mu), z(mu))``; ``n`` may be a (..., 3) array for vectorized use."""
    a, b, c, d = gs.coefficients
    h, eta = gs.h, gs.eta
    r = np.asarray(r, dtype=float)
    n = np.asarray(n, dtype=float)
    rx, ry, rz = r
    nx, ny, nz = n[..., 0], n[..., 1], n[..., 2]
    s = (-1) ** mu

    field = 2 * h * (c * c - d * d)
    stay = 1 + 2 * a * (c + d) - 4 * b * b - field
    flip = 1 - 2 * a * (c + d) - 4 * b * b - field
    g = c * c - d * d + 2 * h - 4 * h * (c * c + d * d)
    nz2 = nz * nz
    inplane = nx * rx + ny * ry
    bend = 2 * b * nz * inplane * (c - d - 4 * a * h)

    x = 2 * (stay - nz2 * flip + s * (bend + rz * (2 * a * (c - d) * (1 + nz2) + (1 - nz2) * g)))
    y = s * 4 * b * (rx * ny - ry * nx) * (4 * h * a + c - d)
    z = 2 * (
        2 * a * (c + d) - 4 * eta + nz2 * flip
        + s * (-bend + rz * (2 * a * (c - d) * (1 - nz2) - 4 * eta * (c * c - d * d) + nz2 * g))
    )
    return x, y, z


def closed_form_general_EB(gs: GroundState, params: GeneralProtocolParams) -> float:
    total = 0.0
    for mu, (n, w) in enumerate(zip(params.axes, params.angles)):
        x, y, z = xyz_coefficients(gs, params.r, n, mu)
        total += x * np.cos(2 * w) + y * np.sin(2 * w) + z
    return float(total / 16)


def optimal_omegas(gs: GroundState, r, n0, n1) -> tuple[float, float]:
    """Per-outcome angles with ``2 omega_mu = atan2(y(mu), x(mu))``."""
    out = []
    for mu, n in enumerate((n0, n1)):
        x, y, _ = xyz_coefficients(gs, r, n, mu)
        out.append(float(0.5 * np.arctan2(y, x)))
    return out[0], out[1]


def best_branch_value(gs: GroundState, r, n, mu: int):
    """``(sqrt(x^2 + y^2) + z) / 16``: branch-``mu`` energy at its optimal angle."""
    x, y, z = xyz_coefficients(gs, r, n, mu)
    return (np.hypot(x, y) + z) / 16


@dataclass
class OptimalityReport:
    h: float
    resolution: int
    main_EB_max: float
    grid_max: float
    grid_argmax: dict
    refined_max: float
    refined_argmax: dict
    family: list[dict] = field(default_factory=list)

    @property
    def family_spread(self) -> float:
        values = [f["E_B"] for f in self.family]
        return max(values) - min(values) if values else 0.0


def _sphere_grid(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    polar = np.linspace(0, np.pi, resolution)
    azimuth = np.linspace(0, 2 * np.pi, resolution, endpoint=False)
    P, A = np.meshgrid(polar, azimuth, indexing="ij")
    angles = np.stack([P.ravel(), A.ravel()], axis=1)
    points = np.stack([np.sin(P) * np.cos(A), np.sin(P) * np.sin(A), np.cos(P)], axis=-1).reshape(-1, 3)
    return angles, points


def optimality_scan(
    gs: GroundState,
    resolution: int = 32,
    t_samples: Sequence[float] = (0.0, np.pi / 6, np.pi / 4, np.pi / 3),
    refine: bool = True,
) -> OptimalityReport:
    """Exhaustive grid over ``r``, ``n_0``, ``n_1`` on the sphere.

    The feedback angles are eliminated analytically (per-outcome optimum),
    and the branches ``mu = 0, 1`` are maximized over ``n`` independently
    since the objective separates once ``r`` is fixed.
    """
    if resolution < 2:
        raise DomainError("resolution must be at least 2")
    try:
        _, main = optimal_theta(gs)
    except DomainError:
        main = 0.0

    angles, points = _sphere_grid(resolution)
    best = (-np.inf, None)
    for k, r in enumerate(points):
        parts = []
        for mu in (0, 1):
            values = best_branch_value(gs, r, points, mu)
            j = int(np.argmax(values))
            parts.append((values[j], j))
        total = parts[0][0] + parts[1][0]
        if total > best[0]:
            best = (total, (k, parts[0][1], parts[1][1]))
    grid_max = float(best[0])
    k, j0, j1 = best[1]
    start = np.concatenate([angles[k], angles[j0], angles[j1]])

    def objective(q):
        r, n0, n1 = sphere_point(*q[0:2]), sphere_point(*q[2:4]), sphere_point(*q[4:6])
        return -(best_branch_value(gs, r, n0, 0) + best_branch_value(gs, r, n1, 1))

    q_best = start
    refined = grid_max
    if refine:
        res = minimize(objective, start, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000})
        if -res.fun > refined:
            refined, q_best = float(-res.fun), res.x

    def describe(q):
        return {"r": sphere_point(*q[0:2]).tolist(), "n0": sphere_point(*q[2:4]).tolist(),
                "n1": sphere_point(*q[4:6]).tolist()}

    family = []
    for t in t_samples:
        for N0 in (0, 1):
            for N1 in (0, 1):
                p = GeneralProtocolParams.family(t, N0, N1)
                w0, w1 = optimal_omegas(gs, p.r, p.n0, p.n1)
                p = GeneralProtocolParams.family(t, N0, N1, w0, w1)
                family.append({"t": float(t), "N0": N0, "N1": N1, "omega0": w0, "omega1": w1,
                               "E_B": general_EB(gs, p)})

    return OptimalityReport(
        h=gs.h, resolution=resolution, main_EB_max=main, grid_max=grid_max,
        grid_argmax=describe(start), refined_max=refined, refined_argmax=describe(q_best),
        family=family,
    )
