"""Density-matrix propagation: exact unitary evolution and RK4 integration
of the dephasing master equation, both reporting the left-to-right
tunneling probability along the way."""

from dataclasses import dataclass

import numpy as np

from .linalg import hermitian_eig, partial_trace_ancilla

TRACE_TOL = 1e-9
HERM_TOL = 1e-9
PSD_TOL = 1e-8


@dataclass(frozen=True)
class NoiseParams:
    """Dephasing strengths of system and ancilla (dimensionless)."""

    lambda_s: float = 0.0
    lambda_a: float = 0.0

    def __post_init__(self):
        if self.lambda_s < 0 or self.lambda_a < 0:
            raise ValueError("dephasing strengths must be non-negative")

    @property
    def is_noisy(self) -> bool:
        return self.lambda_s > 0 or self.lambda_a > 0


@dataclass
class Trajectory:
    """Time grid plus tunneling probability, with optional state snapshots."""

    times: np.ndarray
    prob: np.ndarray
    states: list[np.ndarray] | None = None
    snapshot_stride: int = 1

    def __post_init__(self):
        if len(self.times) != len(self.prob):
            raise ValueError("times and prob must have equal length")

    @property
    def max_prob(self) -> float:
        return float(np.max(self.prob))

    def first_passage(self, level: float) -> float | None:
        """Earliest grid time at which prob reaches `level`, or None."""
        idx = np.nonzero(self.prob >= level)[0]
        return float(self.times[idx[0]]) if idx.size else None


def number_state(dim: int, k: int) -> np.ndarray:
    """Projector |k><k| in the left-occupation basis."""
    rho = np.zeros((dim, dim), dtype=complex)
    rho[k, k] = 1.0
    return rho


def all_left_state(n_bosons: int) -> np.ndarray:
    return number_state(n_bosons + 1, n_bosons)


def all_right_state(n_bosons: int) -> np.ndarray:
    return number_state(n_bosons + 1, 0)


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex) / dim


def pure_state(coeffs: np.ndarray) -> np.ndarray:
    """|psi><psi| from amplitudes, normalizing defensively."""
    c = np.asarray(coeffs, dtype=complex)
    c = c / np.linalg.norm(c)
    return np.outer(c, c.conj())


def check_density_matrix(rho: np.ndarray, name: str = "rho") -> None:
    if np.max(np.abs(rho - rho.conj().T)) > HERM_TOL:
        raise ValueError(f"{name} is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > TRACE_TOL:
        raise ValueError(f"{name} has trace {np.trace(rho).real}, expected 1")
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if w[0] < -PSD_TOL:
        raise ValueError(f"{name} has negative eigenvalue {w[0]}")


def tunneling_probability(rho_s: np.ndarray) -> float:
    """P_{L->R} = <0|rho_s|0>: population of the all-bosons-right state."""
    p = float(rho_s[0, 0].real)
    if p < 0:
        if p < -1e-9:
            raise ValueError(f"tunneling probability {p} below round-off floor")
        p = 0.0
    return p


def _reduce(rho: np.ndarray, dim_s: int, dim_a: int | None) -> np.ndarray:
    if dim_a is None or dim_a == 1:
        return rho
    return partial_trace_ancilla(rho, dim_s, dim_a)


def evolve_unitary(
    h_sa: np.ndarray,
    rho0: np.ndarray,
    times: np.ndarray,
    dim_s: int | None = None,
    dim_a: int | None = None,
    keep_states: bool = False,
) -> Trajectory:
    """Exact closed-system evolution rho(t) = U(t) rho0 U(t)^dag.

    A single eigendecomposition of h_sa serves the whole time grid. When
    dim_a is given, the ancilla factor is traced out before reading off the
    tunneling probability.
    """
    times = np.asarray(times, dtype=float)
    if times.size and (np.any(np.diff(times) < 0) or times[0] < 0):
        raise ValueError("times must be ascending and start at t >= 0")
    if h_sa.shape != rho0.shape:
        raise ValueError(f"shape mismatch: H {h_sa.shape} vs rho {rho0.shape}")
    if dim_s is None:
        dim_s = rho0.shape[0] if dim_a is None else rho0.shape[0] // dim_a

    w, v = hermitian_eig(h_sa)
    rho0_eig = v.conj().T @ rho0 @ v
    prob = np.empty(times.shape)
    states = [] if keep_states else None
    for i, t in enumerate(times):
        phase = np.exp(-1j * w * t)
        rho_t = v @ (np.outer(phase, phase.conj()) * rho0_eig) @ v.conj().T
        rho_s = _reduce(rho_t, dim_s, dim_a)
        prob[i] = tunneling_probability(rho_s)
        if keep_states:
            states.append(rho_s)
    return Trajectory(times=times, prob=prob, states=states)


def dissipator(l_op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """D[L](rho) = L rho L - (L^2 rho + rho L^2)/2 for Hermitian L."""
    l2 = l_op @ l_op
    return l_op @ rho @ l_op - 0.5 * (l2 @ rho + rho @ l2)


def gksl_rhs(
    rho: np.ndarray,
    h: np.ndarray,
    jz_s_embedded: np.ndarray | None,
    jz_a_embedded: np.ndarray | None,
    noise: NoiseParams,
) -> np.ndarray:
    """Generator of the dephasing master equation applied to rho.

    -i[H, rho] + lambda_a D[I (x) Jz] + lambda_s D[Jz (x) I]. Either
    dissipator is skipped when its operator is None or its strength zero.
    """
    out = -1j * (h @ rho - rho @ h)
    if noise.lambda_a > 0 and jz_a_embedded is not None:
        out = out + noise.lambda_a * dissipator(jz_a_embedded, rho)
    if noise.lambda_s > 0 and jz_s_embedded is not None:
        out = out + noise.lambda_s * dissipator(jz_s_embedded, rho)
    return out


def evolve_rk4(
    rho0: np.ndarray,
    h: np.ndarray,
    noise: NoiseParams,
    t_final: float,
    dt: float,
    jz_s_embedded: np.ndarray | None = None,
    jz_a_embedded: np.ndarray | None = None,
    t_mask: float | None = None,
    dim_s: int | None = None,
    dim_a: int | None = None,
    keep_states: bool = False,
    snapshot_stride: int | None = None,
) -> Trajectory:
    """Classical RK4 integration of the master equation up to t_final.

    With t_mask set, updates at step j with j*dt > t_mask are suppressed
    entirely (the state freezes), so the effective evolution stops at the
    mask time while the grid keeps running. The state is re-symmetrized
    after every step to stop Hermiticity drift.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_final < 0:
        raise ValueError(f"t_final must be non-negative, got {t_final}")
    n_steps = int(round(t_final / dt))
    if dim_s is None:
        dim_s = rho0.shape[0] if dim_a is None else rho0.shape[0] // dim_a
    if snapshot_stride is None:
        snapshot_stride = 1 if t_final <= 50 else 10

    def rhs(r):
        return gksl_rhs(r, h, jz_s_embedded, jz_a_embedded, noise)

    rho = np.array(rho0, dtype=complex)
    times = np.arange(n_steps + 1) * dt
    prob = np.empty(n_steps + 1)
    prob[0] = tunneling_probability(_reduce(rho, dim_s, dim_a))
    states = [_reduce(rho, dim_s, dim_a)] if keep_states else None
    frozen = False
    for j in range(1, n_steps + 1):
        if not frozen and (t_mask is None or j * dt <= t_mask):
            k1 = rhs(rho)
            k2 = rhs(rho + 0.5 * dt * k1)
            k3 = rhs(rho + 0.5 * dt * k2)
            k4 = rhs(rho + dt * k3)
            rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            rho = 0.5 * (rho + rho.conj().T)
            tr = np.trace(rho).real
            if abs(tr - 1.0) > 1e-6:
                raise RuntimeError(
                    f"trace drifted to {tr} at step {j} (t={j * dt}); reduce dt"
                )
        else:
            frozen = True
        rho_s = _reduce(rho, dim_s, dim_a)
        prob[j] = tunneling_probability(rho_s)
        if keep_states and j % snapshot_stride == 0:
            states.append(rho_s)
    return Trajectory(
        times=times, prob=prob, states=states,
        snapshot_stride=snapshot_stride if keep_states else 1,
    )
