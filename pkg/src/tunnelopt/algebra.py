"""Number-state basis and collective spin operators for two-mode bosons.

N bosons shared between a left and a right well live in an (N+1)-dimensional
space spanned by |k>, k = 0..N, where k counts the bosons in the *left* well.
The two bosonic modes map onto su(2) generators jx, jy, jz acting on that
space; jz is diagonal with eigenvalue (N - 2k)/2 on |k>, so "all left"
(k = N) sits at jz = -N/2 and "all right" (k = 0) at jz = +N/2.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class SpinScale(Enum):
    """Whether single-particle operators enter as J (eigenvalues +-1/2) or
    as Pauli matrices sigma = 2J (eigenvalues +-1)."""

    J = "J"
    PAULI = "PAULI"


class UnitSystem(Enum):
    """Which energy scale is set to 1 (hbar = 1 always)."""

    DELTA_S_UNITS = "delta_s"
    GAMMA_S_UNITS = "gamma_s"


@dataclass(frozen=True)
class ConventionFlags:
    spin_scale: SpinScale = SpinScale.J
    unit_system: UnitSystem = UnitSystem.DELTA_S_UNITS


@dataclass(frozen=True)
class HamiltonianParams:
    """Energy coefficients of a single two-mode well.

    eta: boson-boson interaction; gamma: tunneling; delta: well asymmetry.
    All signed reals.
    """

    eta: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("eta", "gamma", "delta"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")


@dataclass(frozen=True)
class OperatorSet:
    """The su(2) generators for N two-mode bosons."""

    n_bosons: int
    jx: np.ndarray = field(repr=False)
    jy: np.ndarray = field(repr=False)
    jz: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.n_bosons + 1


def build_operators(n_bosons: int) -> OperatorSet:
    """Build jx, jy, jz in the left-well occupation basis |k>, k = 0..N.

    Matrix elements:
        <j|jx|k> = (sqrt((k+1)(N-k)) d_{j,k+1} + sqrt(k(N-k+1)) d_{j,k-1}) / 2
        <j|jy|k> = (sqrt(k(N-k+1)) d_{j,k-1} - sqrt((k+1)(N-k)) d_{j,k+1}) / (2i)
        <j|jz|k> = ((N - 2k)/2) d_{j,k}
    """
    if n_bosons < 0:
        raise ValueError(f"n_bosons must be >= 0, got {n_bosons}")
    n = n_bosons
    dim = n + 1
    jx = np.zeros((dim, dim), dtype=complex)
    jy = np.zeros((dim, dim), dtype=complex)
    for k in range(n):
        # raising in k: a^dag b |k> = sqrt((k+1)(N-k)) |k+1>
        c = 0.5 * np.sqrt((k + 1) * (n - k))
        jx[k + 1, k] = c
        jx[k, k + 1] = c
        jy[k + 1, k] = 1j * c
        jy[k, k + 1] = -1j * c
    jz = np.diag([(n - 2 * k) / 2 for k in range(dim)]).astype(complex)
    return OperatorSet(n_bosons=n, jx=jx, jy=jy, jz=jz)


def _scaled(ops: OperatorSet, conv: ConventionFlags) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if conv.spin_scale is SpinScale.PAULI:
        if ops.n_bosons != 1:
            raise ValueError(
                f"PAULI convention requires a single boson, got N={ops.n_bosons}"
            )
        return 2 * ops.jx, 2 * ops.jy, 2 * ops.jz
    return ops.jx, ops.jy, ops.jz


def scaled_axis_operator(ops: OperatorSet, axis: str, conv: ConventionFlags) -> np.ndarray:
    """The generator along `axis` ('x'|'y'|'z'), scaled per convention."""
    gx, gy, gz = _scaled(ops, conv)
    try:
        return {"x": gx, "y": gy, "z": gz}[axis]
    except KeyError:
        raise ValueError(f"axis must be one of 'x', 'y', 'z', got {axis!r}") from None


def build_local_hamiltonian(
    ops: OperatorSet, p: HamiltonianParams, conv: ConventionFlags = ConventionFlags()
) -> np.ndarray:
    """H = eta * Gz^2 - gamma * Gx - delta * Gz with G = J or sigma = 2J."""
    gx, _, gz = _scaled(ops, conv)
    return p.eta * (gz @ gz) - p.gamma * gx - p.delta * gz


def build_joint_hamiltonian(
    hs: np.ndarray,
    ha: np.ndarray,
    ops_s: OperatorSet,
    ops_a: OperatorSet,
    alpha: float,
    conv_s: ConventionFlags = ConventionFlags(),
    conv_a: ConventionFlags = ConventionFlags(),
    axis_s: str = "z",
    axis_a: str = "z",
) -> np.ndarray:
    """H_SA = hs (x) I + I (x) ha + alpha * G_s (x) G_a, system factor first.

    The default axes give the density-density coupling Gz (x) Gz; other axis
    pairs realize single-term couplings of the general bilinear form.
    """
    if hs.shape != (ops_s.dim, ops_s.dim):
        raise ValueError(f"hs has shape {hs.shape}, expected {(ops_s.dim, ops_s.dim)}")
    if ha.shape != (ops_a.dim, ops_a.dim):
        raise ValueError(f"ha has shape {ha.shape}, expected {(ops_a.dim, ops_a.dim)}")
    gs = scaled_axis_operator(ops_s, axis_s, conv_s)
    ga = scaled_axis_operator(ops_a, axis_a, conv_a)
    eye_s = np.eye(ops_s.dim)
    eye_a = np.eye(ops_a.dim)
    return np.kron(hs, eye_a) + np.kron(eye_s, ha) + alpha * np.kron(gs, ga)


def build_general_coupling(
    ops_s: OperatorSet, ops_a: OperatorSet, alpha_matrix: np.ndarray
) -> np.ndarray:
    """Sum_{ij} alpha_ij J_i (x) J_j over i,j in {x,y,z}, symmetrized to be
    Hermitian."""
    alpha_matrix = np.asarray(alpha_matrix, dtype=float)
    if alpha_matrix.shape != (3, 3):
        raise ValueError(f"alpha_matrix must be 3x3, got {alpha_matrix.shape}")
    if not np.all(np.isfinite(alpha_matrix)):
        raise ValueError("alpha_matrix entries must be finite")
    js = (ops_s.jx, ops_s.jy, ops_s.jz)
    ja = (ops_a.jx, ops_a.jy, ops_a.jz)
    m = np.zeros((ops_s.dim * ops_a.dim,) * 2, dtype=complex)
    for i in range(3):
        for j in range(3):
            if alpha_matrix[i, j] != 0.0:
                m += alpha_matrix[i, j] * np.kron(js[i], ja[j])
    return 0.5 * (m + m.conj().T)


def default_convention(n_bosons: int, is_system: bool) -> ConventionFlags:
    """PAULI for a one-boson system (reproducing the two-level formulas),
    plain J otherwise; ancillas always use J."""
    if is_system and n_bosons == 1:
        return ConventionFlags(spin_scale=SpinScale.PAULI)
    return ConventionFlags(spin_scale=SpinScale.J)
