"""Dense complex linear algebra helpers used by the propagators.

Thin wrappers over LAPACK-backed numpy routines; dimensions here never
exceed ~49 so dense is fine.
"""

import numpy as np

HERMITICITY_TOL = 1e-10


def is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T)) <= tol


def hermitian_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian m."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(np.max(np.abs(m)), 1.0)
    if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    w, v = np.linalg.eigh(m)
    return w, v


def expm_unitary(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian h, via eigendecomposition."""
    w, v = hermitian_eig(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def partial_trace_ancilla(rho: np.ndarray, dim_s: int, dim_a: int) -> np.ndarray:
    """Trace out the second (ancilla) tensor factor of a joint operator."""
    rho = np.asarray(rho)
    if rho.shape != (dim_s * dim_a, dim_s * dim_a):
        raise ValueError(
            f"rho has shape {rho.shape}, expected {(dim_s * dim_a, dim_s * dim_a)}"
        )
    return np.einsum("ijkj->ik", rho.reshape(dim_s, dim_a, dim_s, dim_a))
