"""Closed-form tunneling probabilities for the analytically solvable
scenarios. Implemented as direct scalar formulas, independent of the
simulator, so they serve as ground truth in tests."""

import numpy as np


def normalized_amplitudes(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    n = np.linalg.norm(c)
    if abs(n - 1.0) > 1e-12:
        raise ValueError(f"amplitudes must be normalized, got norm {n}")
    return c


def p_two_level(delta: float, gamma: float, t: float) -> float:
    """Single boson in an asymmetric well: P = (gamma^2/omega^2) sin^2(omega t)
    with omega = sqrt(delta^2 + gamma^2)."""
    omega2 = delta * delta + gamma * gamma
    if omega2 == 0.0:
        return 0.0
    s = np.sin(np.sqrt(omega2) * t)
    return float(gamma * gamma / omega2 * s * s)


def p_asymmetric_with_ancilla(
    gamma: float, alpha: float, n_a: int, psi, t: float
) -> float:
    """Asymmetric well (delta_S = delta_A = 1 units) coupled to a
    non-tunneling N_A-boson ancilla in pure state psi:

        P(t) = sum_k |<k|psi>|^2 (gamma^2/omega_k^2) sin^2(omega_k t),
        omega_k = sqrt((1 - alpha (N - 2k)/2)^2 + gamma^2).
    """
    c = normalized_amplitudes(psi)
    if len(c) != n_a + 1:
        raise ValueError(f"psi must have {n_a + 1} amplitudes, got {len(c)}")
    total = 0.0
    for k in range(n_a + 1):
        w = abs(c[k]) ** 2
        if w == 0.0:
            continue
        omega2 = (1.0 - alpha * (n_a - 2 * k) / 2.0) ** 2 + gamma * gamma
        if omega2 == 0.0:
            continue
        s = np.sin(np.sqrt(omega2) * t)
        total += w * gamma * gamma / omega2 * s * s
    return float(total)


def p_symmetric_with_ancilla(alpha: float, n_a: int, psi, t: float) -> float:
    """Symmetric well (gamma_S = 1 units) with the tunneling-axis coupling:

        P(t) = sum_k |<k|psi>|^2 sin^2(omega_k t),
        omega_k = |1 - alpha (N - 2k)/2|.
    """
    c = normalized_amplitudes(psi)
    if len(c) != n_a + 1:
        raise ValueError(f"psi must have {n_a + 1} amplitudes, got {len(c)}")
    total = 0.0
    for k in range(n_a + 1):
        w = abs(c[k]) ** 2
        if w == 0.0:
            continue
        omega = abs(1.0 - alpha * (n_a - 2 * k) / 2.0)
        s = np.sin(omega * t)
        total += w * s * s
    return float(total)


def optimal_coupling_asymmetric(n_a: int, k: int) -> float:
    """Coupling strength that cancels the effective asymmetry on ancilla
    branch |k>: alpha = 2/(N - 2k). Undefined on the balanced branch."""
    if n_a == 2 * k:
        raise ValueError(
            f"no finite coupling cancels the asymmetry for N={n_a}, k={k}"
        )
    return 2.0 / (n_a - 2 * k)


def stationary_probability(n_s: int) -> float:
    """Asymptotic tunneling probability under dephasing: the completely
    mixed state gives <0|rho_mix|0> = 1/(N_S + 1)."""
    if n_s < 1:
        raise ValueError(f"n_s must be >= 1, got {n_s}")
    return 1.0 / (n_s + 1)
