"""Reference computations built on the full 3x3 density matrix.

Nothing here touches the eight-component bookkeeping of ``model``: the
generator is assembled from the rotating-frame Hamiltonian and a
cross-damped dissipator, so it serves as an independent check of
``build_liouvillian`` and of the steady-state solver.
"""
import numpy as np

from .model import SIGMA, SystemParams

_IDX = {"a": 0, "b": 1, "c": 2}


def _ketbra(m, n):
    op = np.zeros((3, 3), dtype=np.complex128)
    op[_IDX[m], _IDX[n]] = 1.0
    return op


def hamiltonian(params: SystemParams) -> np.ndarray:
    """Rotating-frame Hamiltonian in units of hbar*gamma1."""
    H = (
        -params.detuning * _ketbra("a", "a")
        + params.splitting * _ketbra("b", "b")
        - params.splitting * _ketbra("c", "c")
    )
    H -= params.omega1 * (_ketbra("a", "b") + _ketbra("b", "a"))
    H -= params.omega2 * (_ketbra("a", "c") + _ketbra("c", "a"))
    return H


def lindblad_rhs(params: SystemParams, rho: np.ndarray) -> np.ndarray:
    H = hamiltonian(params)
    jumps = (_ketbra("b", "a"), _ketbra("c", "a"))
    q = params.cross_damping
    rates = np.array([[params.gamma1, q], [q, params.gamma2]])
    out = -1j * (H @ rho - rho @ H)
    for i in range(2):
        for j in range(2):
            si, sj = jumps[i], jumps[j]
            sjd = sj.conj().T
            out += rates[i, j] * (si @ rho @ sjd - 0.5 * (sjd @ si @ rho + rho @ sjd @ si))
    return out


def superoperator(params: SystemParams) -> np.ndarray:
    """9x9 matrix acting on row-major vec(rho)."""
    L = np.zeros((9, 9), dtype=np.complex128)
    for k in range(9):
        basis = np.zeros(9, dtype=np.complex128)
        basis[k] = 1.0
        L[:, k] = lindblad_rhs(params, basis.reshape(3, 3)).ravel()
    return L


def vector_to_matrix(x) -> np.ndarray:
    """3x3 density matrix from the eight tracked values (rho_bb restored)."""
    rho = np.zeros((3, 3), dtype=np.complex128)
    for value, op in zip(x, SIGMA):
        rho[_IDX[op.ket], _IDX[op.bra]] = value
    rho[1, 1] = 1.0 - x[0] - x[1]
    return rho


def matrix_to_vector(rho) -> np.ndarray:
    return np.array([rho[_IDX[op.ket], _IDX[op.bra]] for op in SIGMA])


def nullspace_steady_state(params: SystemParams) -> np.ndarray:
    """Steady state from the smallest singular vector of the full superoperator."""
    _, _, vh = np.linalg.svd(superoperator(params))
    rho = vh[-1].conj().reshape(3, 3)
    rho = rho / np.trace(rho)
    return matrix_to_vector(rho)


def qrt_spectrum(params: SystemParams, grid) -> np.ndarray:
    """Absolute incoherent spectrum from the full superoperator.

    Sum over decay channels i, j of gamma_ij * Re Tr[S_i^dag (-i w - L)^-1 (dS_j rho)],
    with S_1 = |b><a|, S_2 = |c><a| and gamma_12 the cross-damping rate.  The
    projector term makes the shifted superoperator invertible at w = 0 without
    changing its action on traceless operators.
    """
    L = superoperator(params)
    rho = vector_to_matrix(nullspace_steady_state(params))
    jumps = (_ketbra("b", "a"), _ketbra("c", "a"))
    q = params.cross_damping
    rates = np.array([[params.gamma1, q], [q, params.gamma2]])
    fluct = [(s @ rho - np.trace(s @ rho) * rho).ravel() for s in jumps]
    shift = np.outer(rho.ravel(), np.eye(3).ravel())
    out = np.empty(len(grid))
    for k, w in enumerate(grid):
        M = -1j * w * np.eye(9) - L + shift
        ys = [np.linalg.solve(M, f).reshape(3, 3) for f in fluct]
        total = sum(
            rates[i, j] * np.trace(jumps[i].conj().T @ ys[j]) for i in range(2) for j in range(2)
        )
        out[k] = total.real
    return out
