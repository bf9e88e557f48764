"""Dense linear algebra on small spin-1/2 Hilbert spaces.

Conventions used throughout the package:

* site 1 is the most significant qubit of the computational basis index;
* spin up maps to bit 0 and spin down to bit 1, so ``|s1 s2 ... sn>`` has
  index ``sum_k s_k 2**(n-k)``;
* spin operators are ``S^a = sigma^a / 2`` and ``S^+- = S^x +- i S^y``.

Operators are plain ``numpy`` arrays of dtype ``complex128``.
"""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, RankDeficient

HERMITIAN_TOL = 1e-10
LOG_FLOOR = 1e-12
ENTROPY_CUTOFF = 1e-14

IDENTITY = np.eye(2, dtype=complex)
SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
SPIN = {
    "x": SIGMA["x"] / 2,
    "y": SIGMA["y"] / 2,
    "z": SIGMA["z"] / 2,
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
}
_ALIASES = {"−": "-", "plus": "+", "minus": "-"}


def site_count(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if n < 1 or 2**n != dim:
        raise DomainError(f"dimension {dim} is not a power of two")
    return n


def embed(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Embed a single-site 2x2 operator at ``site`` (1-based) of an n-site chain."""
    if not 1 <= site <= n:
        raise DomainError(f"site {site} out of range 1..{n}")
    left = np.eye(2 ** (site - 1), dtype=complex)
    right = np.eye(2 ** (n - site), dtype=complex)
    return np.kron(np.kron(left, op), right)


def embed_site_operator(pauli: str, site: int, n: int) -> np.ndarray:
    """Spin operator ``S_site^pauli`` on an ``n``-site chain.

    ``pauli`` is one of ``x, y, z, +, -``; the Cartesian components carry
    the factor 1/2 (``S = sigma/2``), the ladder operators are
    ``S^x +- i S^y``.
    """
    key = _ALIASES.get(pauli, pauli)
    if key not in SPIN:
        raise DomainError(f"unknown spin component {pauli!r}")
    return embed(SPIN[key], site, n)


def pauli_operator(axis: str, site: int, n: int) -> np.ndarray:
    """Pauli matrix ``sigma_site^axis`` (no factor 1/2)."""
    return embed(SIGMA[axis], site, n)


def bloch_operator(vector: Iterable[float], site: int, n: int) -> np.ndarray:
    """``v . sigma`` at ``site`` for a real 3-vector ``v``."""
    vx, vy, vz = vector
    return embed(vx * SIGMA["x"] + vy * SIGMA["y"] + vz * SIGMA["z"], site, n)


def heisenberg_bond(i: int, j: int, n: int) -> np.ndarray:
    """``S_i . S_j`` on an n-site chain."""
    return sum(embed_site_operator(a, i, n) @ embed_site_operator(a, j, n) for a in "xyz")


def total_sz(n: int) -> np.ndarray:
    return sum(embed_site_operator("z", i, n) for i in range(1, n + 1))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def hermitian_defect(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def expectation(rho: np.ndarray, op: np.ndarray) -> float:
    """Real part of ``tr(rho op)``; callers pass Hermitian ``op``."""
    return float(np.real(np.einsum("ij,ji->", rho, op)))


def check_density_matrix(rho: np.ndarray, atol: float = 1e-10) -> None:
    """Raise :class:`DomainError` unless ``rho`` is Hermitian, unit trace and PSD."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DomainError(f"density matrix must be square, got shape {rho.shape}")
    site_count(rho.shape[0])
    if hermitian_defect(rho) > atol:
        raise DomainError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > atol:
        raise DomainError(f"density matrix trace is {tr}, expected 1")
    lowest = np.linalg.eigvalsh(rho)[0]
    if lowest < -atol:
        raise DomainError(f"density matrix has negative eigenvalue {lowest}")


def partial_trace(rho: np.ndarray, keep: Iterable[int], n: int | None = None) -> np.ndarray:
    """Reduce ``rho`` to the sites in ``keep`` (1-based), tracing out the rest.

    The kept sites appear in ascending order in the result.
    """
    rho = np.asarray(rho)
    if n is None:
        n = site_count(rho.shape[0])
    keep = sorted(set(int(k) for k in keep))
    if not keep or len(keep) == n:
        raise DomainError("keep must be a nonempty proper subset of the sites")
    if keep[0] < 1 or keep[-1] > n:
        raise DomainError(f"keep sites {keep} out of range 1..{n}")
    traced = [k for k in range(1, n + 1) if k not in keep]
    tensor = rho.reshape([2] * (2 * n))
    # Trace from the highest site down so remaining axis numbers stay valid.
    for count, site in enumerate(reversed(traced)):
        m = n - count
        tensor = np.trace(tensor, axis1=site - 1, axis2=site - 1 + m)
    d = 2 ** len(keep)
    return tensor.reshape(d, d)


def _reorthonormalize(w: np.ndarray, v: np.ndarray, tol: float) -> np.ndarray:
    start = 0
    for stop in range(1, len(w) + 1):
        if stop == len(w) or w[stop] - w[stop - 1] > tol:
            if stop - start > 1:
                q, _ = np.linalg.qr(v[:, start:stop])
                v[:, start:stop] = q
            start = stop
    return v


def eig_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""
    a = np.asarray(a)
    if hermitian_defect(a) > tol:
        raise DomainError("eig_hermitian requires a Hermitian matrix")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return w, _reorthonormalize(w, v, tol)


def spectral_function(a: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply ``f`` to a Hermitian matrix through its eigendecomposition."""
    w, v = eig_hermitian(a)
    return (v * f(w)) @ v.conj().T


def matrix_exp(a: np.ndarray) -> np.ndarray:
    """Exponential of a Hermitian matrix."""
    return spectral_function(a, np.exp)


def matrix_log(rho: np.ndarray, floor: float = LOG_FLOOR) -> np.ndarray:
    """Natural matrix logarithm of a full-rank density matrix.

    Raises
    ------
    RankDeficient
        If any eigenvalue is ``<= floor``.
    """
    w, v = eig_hermitian(rho)
    if w[0] <= floor:
        raise RankDeficient(f"smallest eigenvalue {w[0]:.3e} <= floor {floor:.0e}")
    return (v * np.log(w)) @ v.conj().T


def entropy_from_spectrum(w: np.ndarray) -> float:
    w = np.asarray(w, dtype=float)
    w = w[w > ENTROPY_CUTOFF]
    return float(-np.sum(w * np.log(w)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """``-tr(rho ln rho)`` in nats."""
    return entropy_from_spectrum(eig_hermitian(rho)[0])


def relative_entropy_cross(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Cross entropy ``-tr(rho ln sigma)``."""
    return -expectation(rho, matrix_log(sigma))
