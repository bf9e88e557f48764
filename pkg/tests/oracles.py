"""Independent reference computations used to check the package.

Nothing here imports the operator builders or solvers under test: the
Hamiltonian is assembled from bit manipulations on basis labels, partial
traces are explicit index loops, and eigenvalues come from power iteration.
"""

from __future__ import annotations

import itertools

import numpy as np

N = 4


def bits(index: int, n: int = N) -> list[int]:
    """Spin labels (0 = up, 1 = down) of a basis index, site 1 first."""
    return [(index >> (n - 1 - k)) & 1 for k in range(n)]


def sz(bit: int) -> float:
    return 0.5 if bit == 0 else -0.5


def chain_matrix(h: float, states=None, n: int = N) -> tuple[np.ndarray, list[int]]:
    """Open Heisenberg chain with field h on both edge sites, by matrix elements."""
    if states is None:
        states = list(range(2**n))
    pos = {s: i for i, s in enumerate(states)}
    M = np.zeros((len(states), len(states)))
    for s in states:
        b = bits(s, n)
        i = pos[s]
        M[i, i] += h * (sz(b[0]) + sz(b[n - 1]))
        for k in range(n - 1):
            M[i, i] += sz(b[k]) * sz(b[k + 1])
            if b[k] != b[k + 1]:
                t = s ^ (1 << (n - 1 - k)) ^ (1 << (n - 2 - k))
                if t in pos:
                    M[pos[t], i] += 0.5
    return M, states


def sector_states() -> list[int]:
    return [s for s in range(16) if sum(bits(s)) == 2]


def sector_ground_state(h: float) -> tuple[float, np.ndarray]:
    """Ground state from the 6x6 S_tot^z = 0 block, embedded in 16 dims, with a > 0."""
    M, states = chain_matrix(h, sector_states())
    w, v = np.linalg.eigh(M)
    psi = np.zeros(16)
    psi[states] = v[:, 0]
    if psi[0b0101] < 0:
        psi = -psi
    return float(w[0]), psi


def sector_coefficients(h: float) -> dict[str, float]:
    _, psi = sector_ground_state(h)
    return {"a": psi[0b0101], "b": -psi[0b0011], "c": -psi[0b0110], "d": -psi[0b1001]}


def power_iteration_ground_energy(M: np.ndarray, iters: int = 200000, tol: float = 1e-15) -> float:
    """Lowest eigenvalue of a real symmetric matrix via power iteration on c I - M."""
    c = np.max(np.sum(np.abs(M), axis=1)) + 1.0
    A = c * np.eye(len(M)) - M
    rng = np.random.default_rng(0)
    x = rng.normal(size=len(M))
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(iters):
        y = A @ x
        new = float(x @ y)
        x = y / np.linalg.norm(y)
        if abs(new - lam) < tol:
            break
        lam = new
    # Rayleigh quotient on the converged vector.
    return float(c - x @ A @ x)


def partial_trace_loops(rho: np.ndarray, keep: list[int], n: int = N) -> np.ndarray:
    keep = sorted(keep)
    traced = [k for k in range(1, n + 1) if k not in keep]
    dk = 2 ** len(keep)
    out = np.zeros((dk, dk), dtype=complex)
    for kin in range(dk):
        for kout in range(dk):
            total = 0.0
            for t in itertools.product((0, 1), repeat=len(traced)):
                row = [0] * n
                col = [0] * n
                for site, bit in zip(keep, bits(kin, len(keep))):
                    row[site - 1] = bit
                for site, bit in zip(keep, bits(kout, len(keep))):
                    col[site - 1] = bit
                for site, bit in zip(traced, t):
                    row[site - 1] = bit
                    col[site - 1] = bit
                r = int("".join(map(str, row)), 2)
                c = int("".join(map(str, col)), 2)
                total += rho[r, c]
            out[kin, kout] = total
    return out


def single_site(op: np.ndarray, site: int, n: int = N) -> np.ndarray:
    """Embedding by explicit matrix elements rather than Kronecker products."""
    dim = 2**n
    M = np.zeros((dim, dim), dtype=complex)
    for r in range(dim):
        for c in range(dim):
            br, bc = bits(r, n), bits(c, n)
            if all(br[k] == bc[k] for k in range(n) if k != site - 1):
                M[r, c] = op[br[site - 1], bc[site - 1]]
    return M


SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def bond(i: int, j: int) -> np.ndarray:
    return sum(single_site(s / 2, i) @ single_site(s / 2, j) for s in (SX, SY, SZ))


def calibrated_parts(h: float):
    """(H_A, H_B, V, rho_g) built from oracle operators and the sector ground state."""
    _, psi = sector_ground_state(h)
    rho = np.outer(psi, psi).astype(complex)
    HA0 = h * single_site(SZ / 2, 1) + bond(1, 2)
    HB0 = h * single_site(SZ / 2, 4) + bond(3, 4)
    V0 = bond(2, 3)
    eta = -np.trace(rho @ HA0).real
    xi = -np.trace(rho @ V0).real
    E = np.eye(16)
    return HA0 + eta * E, HB0 + eta * E, V0 + xi * E, rho


def protocol_oracle(h: float, theta: float):
    """Brute-force E_A, E_B and rho_f by explicit operator sandwiches."""
    HA, HB, V, rho = calibrated_parts(h)
    H = HA + HB + V
    E = np.eye(16)
    X1 = single_site(SX, 1)
    Y4 = single_site(SY, 4)
    EA = 0.0
    rho_f = np.zeros((16, 16), dtype=complex)
    for mu in (0, 1):
        P = (E + (-1) ** mu * X1) / 2
        branch = P @ rho @ P
        EA += np.trace(branch @ H).real
        U = np.cos(theta) * E + 1j * (-1) ** mu * np.sin(theta) * Y4
        rho_f += U @ branch @ U.conj().T
    EB = -np.trace(rho_f @ HB).real
    return EA, EB, rho_f


def entropy_oracle(rho: np.ndarray) -> float:
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-14]
    return float(-np.sum(w * np.log(w)))
