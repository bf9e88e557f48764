"""Entropies and effective ("entanglement") Hamiltonians of Bob's subsystem.

The reduced state of sites 3 and 4 is written as ``rho34 = exp(-beta H34)``;
``beta H34 = -ln rho34`` is decomposed in the operator basis

    J2 (S3+ S4+ + S3- S4-) + J1 (S3+ S4- + S3- S4+) + J0 S3z S4z
    + Bp (S3z + S4z) + Bm (S3z - S4z) + C

which is block diagonal in ``{uu, dd}`` (block 1) and ``{ud, du}`` (block 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AllZero, BlockViolation, DomainError
from .linalg import eig_hermitian, embed_site_operator, expectation, matrix_log, partial_trace, von_neumann_entropy

BETA_DEFAULT = -1 / 0.446
BLOCK_TOL = 1e-9
FIT_FLOOR = 1e-6

# Two-site basis indices for sites (3, 4): uu=0, ud=1, du=2, dd=3.
BLOCK1 = (0, 3)
BLOCK0 = (1, 2)


def _two_site_ops() -> dict[str, np.ndarray]:
    S = {a: (embed_site_operator(a, 1, 2), embed_site_operator(a, 2, 2)) for a in "z+-"}
    (z3, z4), (p3, p4), (m3, m4) = S["z"], S["+"], S["-"]
    return {
        "J2": p3 @ p4 + m3 @ m4,
        "J1": p3 @ m4 + m3 @ p4,
        "J0": z3 @ z4,
        "Bp": z3 + z4,
        "Bm": z3 - z4,
        "C": np.eye(4, dtype=complex),
    }


TWO_SITE_OPS = _two_site_ops()
COEFFICIENTS = ("J0", "J1", "J2", "Bp", "Bm", "C")


@dataclass(frozen=True)
class EntropyLedger:
    S34_g: float
    S34_f: float
    S4_g: float
    S4_f: float
    I_QC: float
    dS34: float
    dS4: float


def entropy_ledger(rho_g: np.ndarray, outcomes, rho_f: np.ndarray) -> EntropyLedger:
    """Bob-side entropies before and after the protocol, in nats."""
    S34_g = von_neumann_entropy(partial_trace(rho_g, (3, 4)))
    S34_f = von_neumann_entropy(partial_trace(rho_f, (3, 4)))
    S4_g = von_neumann_entropy(partial_trace(rho_g, (4,)))
    S4_f = von_neumann_entropy(partial_trace(rho_f, (4,)))
    conditional = sum(o.probability * von_neumann_entropy(partial_trace(o.post_state, (3, 4))) for o in outcomes)
    return EntropyLedger(
        S34_g=S34_g, S34_f=S34_f, S4_g=S4_g, S4_f=S4_f,
        I_QC=S34_g - conditional, dS34=S34_f - S34_g, dS4=S4_f - S4_g,
    )


@dataclass(frozen=True)
class EffectiveHamiltonian:
    beta: float
    betaH: np.ndarray
    J0: float
    J1: float
    J2: float
    Bp: float
    Bm: float
    C: float
    offblock_residual: float

    @property
    def H34(self) -> np.ndarray:
        return self.betaH / self.beta

    def coefficients(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in COEFFICIENTS}

    def assemble(self) -> np.ndarray:
        return sum(getattr(self, name) * TWO_SITE_OPS[name] for name in COEFFICIENTS)


def effective_hamiltonian(rho34: np.ndarray, beta: float = BETA_DEFAULT, tol: float = BLOCK_TOL) -> EffectiveHamiltonian:
    """Extract the six coefficients of ``-ln rho34``.

    The six independent entries of the two real symmetric blocks determine
    the coefficients exactly; everything else (inter-block couplings and
    imaginary parts) is reported as ``offblock_residual`` and must be
    below ``tol``.
    """
    if beta == 0 or not np.isfinite(beta):
        raise DomainError("beta must be finite and nonzero")
    M = -matrix_log(rho34)
    d1 = np.real([M[0, 0], M[3, 3]])
    d0 = np.real([M[1, 1], M[2, 2]])
    J2 = float(np.real(M[0, 3] + M[3, 0]) / 2)
    J1 = float(np.real(M[1, 2] + M[2, 1]) / 2)
    Bp = float((d1[0] - d1[1]) / 2)
    Bm = float((d0[0] - d0[1]) / 2)
    C = float((d1.sum() + d0.sum()) / 4)
    J0 = float(2 * (d1.mean() - d0.mean()))
    eff = EffectiveHamiltonian(beta, M, J0, J1, J2, Bp, Bm, C, 0.0)
    residual = float(np.max(np.abs(eff.assemble() - M)))
    eff = EffectiveHamiltonian(beta, M, J0, J1, J2, Bp, Bm, C, residual)
    if residual >= tol:
        raise BlockViolation(f"-ln rho34 has off-block residual {residual:.2e}")
    return eff


@dataclass(frozen=True)
class BlockSpectrum:
    delta1: np.ndarray
    delta0: np.ndarray
    lam: tuple[np.ndarray, np.ndarray]
    """``lam[j][i]``: ascending eigenvalues of block ``j`` (0 = {ud, du}, 1 = {uu, dd})."""
    vecs: tuple[np.ndarray, np.ndarray]
    """``vecs[j][:, i]``: eigenvector in the block's own 2-dim basis."""

    def weights(self, j: int) -> np.ndarray:
        return np.exp(-self.lam[j])


def block_spectrum(eff: EffectiveHamiltonian) -> BlockSpectrum:
    delta1 = np.array([[eff.C + eff.J0 / 4 + eff.Bp, eff.J2], [eff.J2, eff.C + eff.J0 / 4 - eff.Bp]])
    delta0 = np.array([[eff.C - eff.J0 / 4 + eff.Bm, eff.J1], [eff.J1, eff.C - eff.J0 / 4 - eff.Bm]])
    w0, v0 = eig_hermitian(delta0)
    w1, v1 = eig_hermitian(delta1)
    return BlockSpectrum(delta1, delta0, (w0, w1), (v0.real, v1.real))


@dataclass(frozen=True)
class EntropyDecomposition:
    ds: np.ndarray
    """``ds[j, i]`` for block ``j`` and ascending eigenvalue index ``i``."""
    dJ0: float
    dJ1: float
    dJ2: float
    dBp: float
    dBm: float
    dC: float
    dC_j: tuple[float, float]
    dJ0_j: tuple[float, float]

    @property
    def operator_total(self) -> float:
        return self.dJ0 + self.dJ1 + self.dJ2 + self.dBp + self.dBm + self.dC

    @property
    def block_ratio(self) -> float:
        """``sum_i ds[1, i] / sum_i ds[0, i]``."""
        return float(self.ds[1].sum() / self.ds[0].sum())


def entropy_decomposition(
    eff_g: EffectiveHamiltonian,
    eff_f: EffectiveHamiltonian,
    spect_g: BlockSpectrum,
    spect_f: BlockSpectrum,
    rho34_g: np.ndarray,
    rho34_f: np.ndarray,
) -> EntropyDecomposition:
    if eff_g.beta != eff_f.beta:
        raise DomainError("ground and final effective Hamiltonians must share beta")
    ds = np.array([
        spect_f.weights(j) * spect_f.lam[j] - spect_g.weights(j) * spect_g.lam[j] for j in (0, 1)
    ])

    def term(name: str) -> float:
        op = TWO_SITE_OPS[name]
        return getattr(eff_f, name) * expectation(rho34_f, op) - getattr(eff_g, name) * expectation(rho34_g, op)

    # S3z S4z is +1/4 on block 1 and -1/4 on block 0.
    zz = (-0.25, 0.25)
    dC_j = tuple(float(np.sum(eff_f.C * spect_f.weights(j) - eff_g.C * spect_g.weights(j))) for j in (0, 1))
    dJ0_j = tuple(
        float(zz[j] * (eff_f.J0 * spect_f.weights(j).sum() - eff_g.J0 * spect_g.weights(j).sum())) for j in (0, 1)
    )
    return EntropyDecomposition(
        ds=ds,
        dJ0=term("J0"), dJ1=term("J1"), dJ2=term("J2"),
        dBp=term("Bp"), dBm=term("Bm"), dC=float(eff_f.C - eff_g.C),
        dC_j=dC_j, dJ0_j=dJ0_j,
    )


def proportionality_fit(xs: Sequence[float], ys: Sequence[float], floor: float = FIT_FLOOR) -> tuple[float, float]:
    """Least-squares slope of ``y = slope * x`` through the origin.

    Returns ``(slope, max_rel_deviation)`` where the deviation
    ``|y - slope x| / |y|`` is taken over points with ``|y| > floor``.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.size < 2:
        raise DomainError("proportionality_fit needs two equal-length sequences of length >= 2")
    sxx = float(np.dot(xs, xs))
    if sxx < 1e-20:
        raise AllZero("abscissa vanishes identically; slope undefined")
    slope = float(np.dot(xs, ys) / sxx)
    mask = np.abs(ys) > floor
    dev = float(np.max(np.abs(ys[mask] - slope * xs[mask]) / np.abs(ys[mask]))) if mask.any() else 0.0
    return slope, dev
