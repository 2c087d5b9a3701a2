"""Gradient-based learning of the ancilla Hamiltonian, coupling strength,
evolution time, and ancilla initial state.

The loss is L = 1 - P (or P in minimize mode) plus an optional time
penalty. Gradients come from reverse-mode differentiation (torch) through
the same forward model implemented here in numpy; Adam does the updates.
The evolution time stays positive through t_hat = softplus(t_raw), and the
hard time mask of the noisy evolution is smoothed to a sigmoid during
learning so its gradient is informative.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .model import ModelConfig

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

N_SCALARS = 5  # eta_a, gamma_a, delta_a, alpha, t_raw


@dataclass
class OptConfig:
    learning_rate: float = 0.01
    max_iters: int = 5000
    time_penalty: float = 0.0
    diagonal_ancilla: bool = False
    minimize_probability: bool = False
    dt: float = 0.01
    t_window: float = 12.0
    seed: int = 0
    plateau_tol: float = 1e-10
    plateau_window: int = 200
    mask_temp_factor: float = 5.0
    minimize_grid_points: int = 200
    t_init: float = 1.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.dt <= 0 or self.t_window <= 0:
            raise ValueError("dt and t_window must be positive")
        if self.time_penalty < 0:
            raise ValueError("time_penalty must be non-negative")


@dataclass
class OptState:
    """Learnable parameters plus Adam accumulators."""

    eta_a: float
    gamma_a: float
    delta_a: float
    alpha: float
    t_raw: float
    factor: np.ndarray  # complex (dim_a, dim_a), parameterizes rho_A
    adam_m: np.ndarray
    adam_v: np.ndarray
    step: int = 0

    @property
    def t_hat(self) -> float:
        return softplus(self.t_raw)

    @property
    def n_params(self) -> int:
        return N_SCALARS + 2 * self.factor.size


@dataclass
class LearningRecord:
    iteration: int
    loss: float
    prob: float
    eta_a: float
    gamma_a: float
    delta_a: float
    alpha: float
    t_hat: float
    trace_rho_a: float


@dataclass
class OptResult:
    state: OptState
    curve: list[LearningRecord] = field(default_factory=list)
    converged: bool = False
    aborted: bool = False


def softplus(x: float) -> float:
    return float(np.logaddexp(0.0, x))


def softplus_inverse(y: float) -> float:
    if y <= 0:
        raise ValueError(f"softplus inverse needs y > 0, got {y}")
    return float(y + np.log(-np.expm1(-y)))


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def ancilla_state(factor: np.ndarray) -> np.ndarray:
    """rho_A = F F^dag / tr(F F^dag): Hermitian, PSD, unit trace for any
    nonzero factor."""
    f = np.asarray(factor, dtype=complex)
    g = f @ f.conj().T
    tr = np.trace(g).real
    if tr <= 0:
        raise ValueError("factor matrix must be nonzero")
    return g / tr


def project_diagonal(rho: np.ndarray) -> np.ndarray:
    """Keep only the diagonal of rho and renormalize to unit trace."""
    d = np.diag(rho).real
    tr = d.sum()
    if tr <= 0:
        raise ValueError("density matrix has non-positive diagonal sum")
    return np.diag(d / tr).astype(complex)


# ---------------------------------------------------------------------------
# Parameter vector packing


def pack_state(state: OptState) -> np.ndarray:
    return np.concatenate(
        [
            [state.eta_a, state.gamma_a, state.delta_a, state.alpha, state.t_raw],
            state.factor.real.ravel(),
            state.factor.imag.ravel(),
        ]
    )


def unpack_state(vec: np.ndarray, template: OptState) -> OptState:
    d = template.factor.shape[0]
    n = d * d
    re = vec[N_SCALARS : N_SCALARS + n].reshape(d, d)
    im = vec[N_SCALARS + n :].reshape(d, d)
    return replace(
        template,
        eta_a=float(vec[0]),
        gamma_a=float(vec[1]),
        delta_a=float(vec[2]),
        alpha=float(vec[3]),
        t_raw=float(vec[4]),
        factor=re + 1j * im,
    )


def learnable_mask(model: ModelConfig, dim_a: int) -> np.ndarray:
    mask = np.zeros(N_SCALARS + 2 * dim_a * dim_a, dtype=bool)
    if model.has_ancilla:
        mask[0] = model.eta_a.learnable
        mask[1] = model.gamma_a.learnable
        mask[2] = model.delta_a.learnable
        mask[3] = model.alpha.learnable
        mask[N_SCALARS:] = model.ancilla_learnable
    mask[4] = True  # evolution time is always learned
    return mask


def initial_state(cfg: OptConfig, model: ModelConfig, rng=None) -> OptState:
    rng = rng or np.random.default_rng(cfg.seed)
    d = model.dim_a
    if model.ancilla_learn_start is not None:
        # start the learnable ancilla at a prescribed state: F = sqrt(rho)
        w, v = np.linalg.eigh(model.ancilla_learn_start)
        factor = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    else:
        factor = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    n = N_SCALARS + 2 * d * d
    return OptState(
        eta_a=model.eta_a.value,
        gamma_a=model.gamma_a.value,
        delta_a=model.delta_a.value,
        alpha=model.alpha.value,
        t_raw=softplus_inverse(cfg.t_init),
        factor=factor,
        adam_m=np.zeros(n),
        adam_v=np.zeros(n),
    )


# ---------------------------------------------------------------------------
# Loss (numpy forward model; the finite-difference reference)


def derived_ancilla_state(state: OptState, model: ModelConfig) -> np.ndarray | None:
    if not model.has_ancilla:
        return None
    if isinstance(model.ancilla_init, np.ndarray):
        return model.ancilla_init
    return ancilla_state(state.factor)


def _expm_factors(h: np.ndarray, t: float):
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def _prob_from_matrix(rho: np.ndarray, dim_a: int) -> float:
    return float(np.diag(rho).real[:dim_a].sum())


def dephasing_mask(model: ModelConfig) -> np.ndarray:
    """Entrywise decay rates of the dephasing channels in the product
    basis: entry (a, b) decays at sum_channels lambda/2 (z[a] - z[b])^2."""
    dim = model.dim_s * model.dim_a
    jz_s_emb, jz_a_emb = model.jz_embeddings()
    deph = np.zeros((dim, dim))
    for z, lam in ((jz_s_emb, model.noise.lambda_s), (jz_a_emb, model.noise.lambda_a)):
        if z is None or lam == 0:
            continue
        zd = np.diag(z).real
        deph -= 0.5 * lam * (zd[:, None] - zd[None, :]) ** 2
    return deph


def loss_and_probability(
    state: OptState, cfg: OptConfig, model: ModelConfig
) -> tuple[float, float]:
    t_hat = state.t_hat
    h = model.joint_hamiltonian(state.eta_a, state.gamma_a, state.delta_a, state.alpha)
    rho_a = derived_ancilla_state(state, model)
    rho0 = model.rho_s0 if rho_a is None else np.kron(model.rho_s0, rho_a)
    dim_a = model.dim_a

    if model.noise.is_noisy:
        deph = dephasing_mask(model)
        n_steps = int(round(cfg.t_window / cfg.dt))
        dt = cfg.dt
        tau = cfg.mask_temp_factor * dt
        weights = sigmoid((t_hat - np.arange(1, n_steps + 1) * dt) / tau)

        def rhs(r):
            return -1j * (h @ r - r @ h) + deph * r

        rho = rho0
        total = _prob_from_matrix(rho, dim_a)
        for j in range(n_steps):
            k1 = rhs(rho)
            k2 = rhs(rho + (0.5 * dt) * k1)
            k3 = rhs(rho + (0.5 * dt) * k2)
            k4 = rhs(rho + dt * k3)
            rho = rho + weights[j] * (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            total += _prob_from_matrix(rho, dim_a)
        if cfg.minimize_probability:
            prob = total / (n_steps + 1)
        else:
            prob = _prob_from_matrix(rho, dim_a)
    elif cfg.minimize_probability:
        n = cfg.minimize_grid_points
        u = _expm_factors(h, cfg.t_window / n)
        rho = rho0
        total = _prob_from_matrix(rho, dim_a)
        for _ in range(n):
            rho = u @ rho @ u.conj().T
            total += _prob_from_matrix(rho, dim_a)
        prob = total / (n + 1)
    else:
        u = _expm_factors(h, t_hat)
        rho_t = u @ rho0 @ u.conj().T
        prob = _prob_from_matrix(rho_t, dim_a)

    penalty = cfg.time_penalty * t_hat * t_hat
    if cfg.minimize_probability:
        return prob + penalty, prob
    return (1.0 - prob) + penalty, prob


def loss(state: OptState, cfg: OptConfig, model: ModelConfig) -> float:
    return loss_and_probability(state, cfg, model)[0]


def gradient(state: OptState, cfg: OptConfig, model: ModelConfig) -> np.ndarray:
    """d(loss)/d(packed parameters) by reverse-mode differentiation."""
    from .autograd import TorchProblem

    value, _, grad = TorchProblem(cfg, model).value_and_grad(state)
    if not np.isfinite(value) or not np.all(np.isfinite(grad)):
        raise FloatingPointError("non-finite loss or gradient")
    return grad


def finite_difference_gradient(
    state: OptState, cfg: OptConfig, model: ModelConfig, h: float = 1e-5
) -> np.ndarray:
    """Central finite differences of the numpy loss; the independent check
    for `gradient`."""
    theta = pack_state(state)
    grad = np.empty_like(theta)
    for i in range(len(theta)):
        up, down = theta.copy(), theta.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (
            loss(unpack_state(up, state), cfg, model)
            - loss(unpack_state(down, state), cfg, model)
        ) / (2 * h)
    return grad


def adam_step(
    state: OptState, grad: np.ndarray, cfg: OptConfig, mask: np.ndarray | None = None
) -> OptState:
    """One Adam update (bias-corrected moments); entries outside `mask`
    keep their values and accumulate no momentum."""
    theta = pack_state(state)
    if mask is None:
        mask = np.ones_like(theta, dtype=bool)
    g = np.where(mask, grad, 0.0)
    t = state.step + 1
    m = ADAM_BETA1 * state.adam_m + (1 - ADAM_BETA1) * g
    v = ADAM_BETA2 * state.adam_v + (1 - ADAM_BETA2) * g * g
    m_hat = m / (1 - ADAM_BETA1**t)
    v_hat = v / (1 - ADAM_BETA2**t)
    theta = theta - np.where(
        mask, cfg.learning_rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS), 0.0
    )
    new = unpack_state(theta, state)
    new.adam_m = m
    new.adam_v = v
    new.step = t
    return new


def _project_factor(state: OptState) -> OptState:
    """Constrain the learnable ancilla to be diagonal in the number basis:
    replace the factor by the square root of its diagonal populations."""
    rho = ancilla_state(state.factor)
    return replace(state, factor=np.diag(np.sqrt(np.diag(rho).real)).astype(complex))


def _record(i, value, prob, state, model) -> LearningRecord:
    rho_a = derived_ancilla_state(state, model)
    return LearningRecord(
        iteration=i,
        loss=value,
        prob=prob,
        eta_a=state.eta_a,
        gamma_a=state.gamma_a,
        delta_a=state.delta_a,
        alpha=state.alpha,
        t_hat=state.t_hat,
        trace_rho_a=1.0 if rho_a is None else float(np.trace(rho_a).real),
    )


def optimize(cfg: OptConfig, model: ModelConfig, rng=None) -> OptResult:
    """Run Adam on the scenario's learnable parameters.

    Scalars start at their configured values (1 by default), the time at
    t_init through its softplus parameterization, and the ancilla factor at
    seeded complex normals. Stops early once the loss has moved less than
    plateau_tol over plateau_window iterations.
    """
    from .autograd import TorchProblem

    state = initial_state(cfg, model, rng)
    if cfg.diagonal_ancilla and model.ancilla_learnable:
        state = _project_factor(state)
    problem = TorchProblem(cfg, model)
    mask = learnable_mask(model, model.dim_a)
    curve: list[LearningRecord] = []
    losses: list[float] = []
    converged = False
    for i in range(cfg.max_iters):
        value, prob, grad = problem.value_and_grad(state)
        if not np.isfinite(value) or not np.all(np.isfinite(grad)):
            return OptResult(state=state, curve=curve, aborted=True)
        curve.append(_record(i, value, prob, state, model))
        losses.append(value)
        state = adam_step(state, grad, cfg, mask)
        if cfg.diagonal_ancilla and model.ancilla_learnable:
            state = _project_factor(state)
        w = cfg.plateau_window
        if cfg.plateau_tol > 0 and i >= w and abs(losses[-1] - losses[-1 - w]) < cfg.plateau_tol:
            converged = True
            break
    value, prob, _ = problem.value_and_grad(state)
    curve.append(_record(len(curve), value, prob, state, model))
    return OptResult(state=state, curve=curve, converged=converged)
