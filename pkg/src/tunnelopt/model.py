"""Physical scenario description: system and ancilla sizes, Hamiltonian
coefficients (fixed or learnable), coupling, noise, and initial states."""

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    ConventionFlags,
    HamiltonianParams,
    OperatorSet,
    UnitSystem,
    build_joint_hamiltonian,
    build_local_hamiltonian,
    build_operators,
    default_convention,
)
from .dynamics import NoiseParams, all_left_state, check_density_matrix

LEARNABLE = "learnable"


@dataclass(frozen=True)
class Param:
    """A scalar model parameter: either fixed at `value` or learnable with
    `value` as its initialization."""

    value: float
    learnable: bool = False

    @staticmethod
    def fixed(v: float) -> "Param":
        return Param(float(v), False)

    @staticmethod
    def free(init: float = 1.0) -> "Param":
        return Param(float(init), True)


@dataclass
class ModelConfig:
    """Everything that defines one physical scenario."""

    n_s: int
    system: HamiltonianParams
    n_a: int = 0
    eta_a: Param = field(default_factory=lambda: Param.free())
    gamma_a: Param = field(default_factory=lambda: Param.free())
    delta_a: Param = field(default_factory=lambda: Param.free())
    alpha: Param = field(default_factory=lambda: Param.free())
    axis_s: str = "z"
    axis_a: str = "z"
    noise: NoiseParams = field(default_factory=NoiseParams)
    ancilla_init: np.ndarray | str = LEARNABLE
    rho_s0: np.ndarray | None = None
    ancilla_learn_start: np.ndarray | None = None
    unit_system: UnitSystem = UnitSystem.DELTA_S_UNITS
    conv_s: ConventionFlags | None = None
    conv_a: ConventionFlags | None = None

    def __post_init__(self):
        if self.n_s < 1:
            raise ValueError(f"n_s must be >= 1, got {self.n_s}")
        if self.n_a < 0:
            raise ValueError(f"n_a must be >= 0, got {self.n_a}")
        if self.conv_s is None:
            self.conv_s = default_convention(self.n_s, is_system=True)
        if self.conv_a is None:
            self.conv_a = default_convention(self.n_a, is_system=False)
        if self.rho_s0 is None:
            self.rho_s0 = all_left_state(self.n_s)
        else:
            self.rho_s0 = np.asarray(self.rho_s0, dtype=complex)
            check_density_matrix(self.rho_s0, "rho_s0")
        if isinstance(self.ancilla_init, np.ndarray):
            check_density_matrix(self.ancilla_init, "ancilla_init")
        elif self.ancilla_init != LEARNABLE:
            raise ValueError(
                "ancilla_init must be a density matrix or 'learnable'"
            )
        if self.ancilla_learn_start is not None:
            self.ancilla_learn_start = np.asarray(self.ancilla_learn_start, dtype=complex)
            check_density_matrix(self.ancilla_learn_start, "ancilla_learn_start")
        self._ops_s = build_operators(self.n_s)
        self._ops_a = build_operators(self.n_a) if self.n_a > 0 else None

    @property
    def has_ancilla(self) -> bool:
        return self.n_a > 0

    @property
    def ancilla_learnable(self) -> bool:
        return self.has_ancilla and isinstance(self.ancilla_init, str)

    @property
    def dim_s(self) -> int:
        return self.n_s + 1

    @property
    def dim_a(self) -> int:
        return self.n_a + 1 if self.has_ancilla else 1

    @property
    def ops_s(self) -> OperatorSet:
        return self._ops_s

    @property
    def ops_a(self) -> OperatorSet | None:
        return self._ops_a

    def system_hamiltonian(self) -> np.ndarray:
        return build_local_hamiltonian(self._ops_s, self.system, self.conv_s)

    def ancilla_hamiltonian(self, eta_a: float, gamma_a: float, delta_a: float) -> np.ndarray:
        if not self.has_ancilla:
            raise ValueError("scenario has no ancilla")
        return build_local_hamiltonian(
            self._ops_a, HamiltonianParams(eta_a, gamma_a, delta_a), self.conv_a
        )

    def joint_hamiltonian(
        self, eta_a: float, gamma_a: float, delta_a: float, alpha: float
    ) -> np.ndarray:
        """Full Hamiltonian at the given (possibly learned) ancilla values;
        reduces to the bare system Hamiltonian when there is no ancilla."""
        hs = self.system_hamiltonian()
        if not self.has_ancilla:
            return hs
        ha = self.ancilla_hamiltonian(eta_a, gamma_a, delta_a)
        return build_joint_hamiltonian(
            hs, ha, self._ops_s, self._ops_a, alpha,
            self.conv_s, self.conv_a, self.axis_s, self.axis_a,
        )

    def jz_embeddings(self) -> tuple[np.ndarray, np.ndarray | None]:
        """(Jz (x) I, I (x) Jz) noise operators on the joint space, or the
        bare system Jz when there is no ancilla."""
        jz_s = self._ops_s.jz
        if not self.has_ancilla:
            return jz_s, None
        eye_s = np.eye(self.dim_s)
        eye_a = np.eye(self.dim_a)
        return np.kron(jz_s, eye_a), np.kron(eye_s, self._ops_a.jz)
