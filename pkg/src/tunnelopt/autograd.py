"""Reverse-mode gradients of the tunneling loss via torch.

The forward model here mirrors the numpy loss in `optimize` exactly: same
parameterization (softplus time, factor-product ancilla state), same
sigmoid-smoothed time mask, and the same one-step RK4 matrix for the noisy
generator. The numpy side stays the finite-difference reference."""

import numpy as np
import torch

from .algebra import scaled_axis_operator
from .model import ModelConfig

_CDT = torch.complex128
_RDT = torch.float64


def _t(a: np.ndarray) -> torch.Tensor:
    return torch.as_tensor(np.asarray(a, dtype=complex), dtype=_CDT)


class TorchProblem:
    """Differentiable tunneling loss for one scenario.

    Constant operator blocks are precomputed so that each evaluation only
    assembles H = H_S(x)I + eta_a*K_eta - gamma_a*K_gamma - delta_a*K_delta
    + alpha*K_coupling from five scalars plus the ancilla factor matrix.
    """

    def __init__(self, cfg, model: ModelConfig):
        self.cfg = cfg
        self.model = model
        self.dim = model.dim_s * model.dim_a
        hs = model.system_hamiltonian()
        eye_a = np.eye(model.dim_a)
        eye_s = np.eye(model.dim_s)
        if model.has_ancilla:
            gz_a = scaled_axis_operator(model.ops_a, "z", model.conv_a)
            gx_a = scaled_axis_operator(model.ops_a, "x", model.conv_a)
            gs_ax = scaled_axis_operator(model.ops_s, model.axis_s, model.conv_s)
            ga_ax = scaled_axis_operator(model.ops_a, model.axis_a, model.conv_a)
            self.k_eta = _t(np.kron(eye_s, gz_a @ gz_a))
            self.k_gamma = _t(np.kron(eye_s, gx_a))
            self.k_delta = _t(np.kron(eye_s, gz_a))
            self.k_coupling = _t(np.kron(gs_ax, ga_ax))
        self.h_s_embedded = _t(np.kron(hs, eye_a))
        self.rho_s0 = _t(model.rho_s0)
        if isinstance(model.ancilla_init, np.ndarray):
            self.rho_a_fixed = _t(model.ancilla_init)
        else:
            self.rho_a_fixed = None
        # Dephasing acts entrywise in the product basis: the (a, b) matrix
        # entry decays at rate sum_over_channels lambda/2 (z[a] - z[b])^2.
        jz_s_emb, jz_a_emb = model.jz_embeddings()
        deph = np.zeros((self.dim, self.dim))
        for z, lam in ((jz_s_emb, model.noise.lambda_s), (jz_a_emb, model.noise.lambda_a)):
            if z is None or lam == 0:
                continue
            zd = np.diag(z).real
            deph -= 0.5 * lam * (zd[:, None] - zd[None, :]) ** 2
        self.dephasing_mask = torch.as_tensor(deph, dtype=_RDT).to(_CDT)

    def _hamiltonian(self, eta_a, gamma_a, delta_a, alpha):
        h = self.h_s_embedded
        if self.model.has_ancilla:
            h = (
                h
                + eta_a * self.k_eta
                - gamma_a * self.k_gamma
                - delta_a * self.k_delta
                + alpha * self.k_coupling
            )
        return h

    def _rho0(self, factor_re, factor_im):
        if not self.model.has_ancilla:
            return self.rho_s0
        if self.rho_a_fixed is not None:
            rho_a = self.rho_a_fixed
        else:
            f = torch.complex(factor_re, factor_im)
            g = f @ f.conj().T
            rho_a = g / torch.real(torch.diagonal(g).sum())
        return torch.kron(self.rho_s0, rho_a)

    def _prob_from_matrix(self, rho):
        d = torch.real(torch.diagonal(rho))
        return d[: self.model.dim_a].sum()

    def loss(self, eta_a, gamma_a, delta_a, alpha, t_raw, factor_re, factor_im):
        """Returns (loss, probability) as scalar tensors."""
        cfg = self.cfg
        t_hat = torch.nn.functional.softplus(t_raw)
        h = self._hamiltonian(eta_a, gamma_a, delta_a, alpha)
        rho0 = self._rho0(factor_re, factor_im)
        if self.model.noise.is_noisy:
            prob = self._noisy_probability(h, rho0, t_hat)
        else:
            prob = self._noiseless_probability(h, rho0, t_hat)
        if cfg.minimize_probability:
            value = prob + cfg.time_penalty * t_hat * t_hat
        else:
            value = 1.0 - prob + cfg.time_penalty * t_hat * t_hat
        return value, prob

    def _noiseless_probability(self, h, rho0, t_hat):
        if self.cfg.minimize_probability:
            n = self.cfg.minimize_grid_points
            step = self.cfg.t_window / n
            u = torch.matrix_exp(-1j * step * h)
            rho = rho0
            total = self._prob_from_matrix(rho)
            for _ in range(n):
                rho = u @ rho @ u.conj().T
                total = total + self._prob_from_matrix(rho)
            return total / (n + 1)
        u = torch.matrix_exp(-1j * t_hat * h)
        rho_t = u @ rho0 @ u.conj().T
        return self._prob_from_matrix(rho_t)

    def _noisy_probability(self, h, rho0, t_hat):
        cfg = self.cfg
        dt = cfg.dt
        n_steps = int(round(cfg.t_window / dt))
        tau = cfg.mask_temp_factor * dt
        steps = torch.arange(1, n_steps + 1, dtype=_RDT) * dt
        weights = torch.sigmoid((t_hat - steps) / tau).to(_CDT)

        def rhs(r):
            return -1j * (h @ r - r @ h) + self.dephasing_mask * r

        rho = rho0
        total = self._prob_from_matrix(rho) if cfg.minimize_probability else None
        for j in range(n_steps):
            k1 = rhs(rho)
            k2 = rhs(rho + (0.5 * dt) * k1)
            k3 = rhs(rho + (0.5 * dt) * k2)
            k4 = rhs(rho + dt * k3)
            rho = rho + weights[j] * (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if cfg.minimize_probability:
                total = total + self._prob_from_matrix(rho)
        if cfg.minimize_probability:
            return total / (n_steps + 1)
        return self._prob_from_matrix(rho)

    def value_and_grad(self, state) -> tuple[float, float, np.ndarray]:
        """Loss, probability, and d(loss)/d(packed parameters) at `state`."""
        leaves = {
            "eta_a": torch.tensor(state.eta_a, dtype=_RDT, requires_grad=True),
            "gamma_a": torch.tensor(state.gamma_a, dtype=_RDT, requires_grad=True),
            "delta_a": torch.tensor(state.delta_a, dtype=_RDT, requires_grad=True),
            "alpha": torch.tensor(state.alpha, dtype=_RDT, requires_grad=True),
            "t_raw": torch.tensor(state.t_raw, dtype=_RDT, requires_grad=True),
            "factor_re": torch.tensor(
                state.factor.real.copy(), dtype=_RDT, requires_grad=True
            ),
            "factor_im": torch.tensor(
                state.factor.imag.copy(), dtype=_RDT, requires_grad=True
            ),
        }
        value, prob = self.loss(**leaves)
        value.backward()

        def g(t):
            return t.grad.numpy() if t.grad is not None else np.zeros(t.shape)

        grad = np.concatenate(
            [
                np.array(
                    [
                        float(g(leaves["eta_a"])),
                        float(g(leaves["gamma_a"])),
                        float(g(leaves["delta_a"])),
                        float(g(leaves["alpha"])),
                        float(g(leaves["t_raw"])),
                    ]
                ),
                g(leaves["factor_re"]).ravel(),
                g(leaves["factor_im"]).ravel(),
            ]
        )
        return float(value.detach()), float(prob.detach()), grad
