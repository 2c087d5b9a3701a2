"""Two-mode bosonic tunneling with a learnable ancilla.

Simulates N-boson double-well systems coupled to an auxiliary spin system
and optimizes the ancilla Hamiltonian, coupling, evolution time, and
initial state to steer the left-to-right tunneling probability, in both
closed (unitary) and dephasing (GKSL) dynamics.
"""

from .algebra import (
    ConventionFlags,
    HamiltonianParams,
    OperatorSet,
    SpinScale,
    UnitSystem,
    build_joint_hamiltonian,
    build_local_hamiltonian,
    build_operators,
)
from .dynamics import (
    NoiseParams,
    Trajectory,
    all_left_state,
    all_right_state,
    evolve_rk4,
    evolve_unitary,
    maximally_mixed,
    pure_state,
    tunneling_probability,
)
from .experiments import (
    ConfigError,
    ScenarioResult,
    ScenarioSpec,
    export,
    load_result,
    load_scenario,
    run_scenario,
    run_sweep,
)
from .model import LEARNABLE, ModelConfig, Param
from .optimize import OptConfig, OptResult, OptState, optimize
from .oracle import (
    optimal_coupling_asymmetric,
    p_asymmetric_with_ancilla,
    p_symmetric_with_ancilla,
    p_two_level,
    stationary_probability,
)

__all__ = [
    "ConventionFlags",
    "HamiltonianParams",
    "OperatorSet",
    "SpinScale",
    "UnitSystem",
    "build_joint_hamiltonian",
    "build_local_hamiltonian",
    "build_operators",
    "NoiseParams",
    "Trajectory",
    "all_left_state",
    "all_right_state",
    "evolve_rk4",
    "evolve_unitary",
    "maximally_mixed",
    "pure_state",
    "tunneling_probability",
    "ConfigError",
    "ScenarioResult",
    "ScenarioSpec",
    "export",
    "load_result",
    "load_scenario",
    "run_scenario",
    "run_sweep",
    "LEARNABLE",
    "ModelConfig",
    "Param",
    "OptConfig",
    "OptResult",
    "OptState",
    "optimize",
    "optimal_coupling_asymmetric",
    "p_asymmetric_with_ancilla",
    "p_symmetric_with_ancilla",
    "p_two_level",
    "stationary_probability",
]

__version__ = "0.1.0"
