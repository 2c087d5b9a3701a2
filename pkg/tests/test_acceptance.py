"""End-to-end acceptance suite.

Each test covers one headline requirement, prints a single PASS/FAIL line
with the measured numbers, and asserts at the stated tolerance. Some tests
run full optimizations and take on the order of a minute each.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from tunnelopt.algebra import (
    HamiltonianParams,
    UnitSystem,
    build_operators,
)
from tunnelopt.dynamics import (
    NoiseParams,
    all_left_state,
    all_right_state,
    check_density_matrix,
    evolve_rk4,
    evolve_unitary,
    pure_state,
)
from tunnelopt.experiments import load_scenario, run_scenario
from tunnelopt.model import ModelConfig, Param
from tunnelopt.optimize import (
    OptConfig,
    derived_ancilla_state,
    finite_difference_gradient,
    gradient,
    initial_state,
    optimize,
    pack_state,
    unpack_state,
)
from tunnelopt.oracle import (
    p_asymmetric_with_ancilla,
    p_symmetric_with_ancilla,
    p_two_level,
)

CONFIG_DIR = Path(__file__).resolve().parents[1] / "src" / "tunnelopt" / "configs"


def report(name: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def random_pure(rng, dim):
    c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return c / np.linalg.norm(c)


# ---------------------------------------------------------------------------


def test_oracle_equivalence():
    """Simulated probabilities match all three closed forms to 1e-8."""
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst = 0.0

    # Bare two-level well.
    for _ in range(10):
        gamma = rng.uniform(0.1, 1.5)
        delta = rng.uniform(-1.5, 1.5)
        model = ModelConfig(n_s=1, system=HamiltonianParams(gamma=gamma, delta=delta))
        times = np.linspace(0.0, 12.0, 20)
        traj = evolve_unitary(model.system_hamiltonian(), model.rho_s0, times)
        expected = [p_two_level(delta, gamma, t) for t in times]
        worst = max(worst, np.max(np.abs(traj.prob - expected)))

    # Asymmetric well with a non-tunneling ancilla.
    for _ in range(10):
        gamma = rng.uniform(0.1, 1.0)
        alpha = rng.uniform(-2.0, 2.0)
        n_a = int(rng.integers(1, 5))
        psi = random_pure(rng, n_a + 1)
        model = ModelConfig(
            n_s=1, system=HamiltonianParams(gamma=gamma, delta=1.0), n_a=n_a,
            ancilla_init=pure_state(psi),
        )
        h = model.joint_hamiltonian(0.0, 0.0, 1.0, alpha)
        rho0 = np.kron(model.rho_s0, pure_state(psi))
        times = np.linspace(0.0, 12.0, 20)
        traj = evolve_unitary(h, rho0, times, dim_s=2, dim_a=n_a + 1)
        expected = [p_asymmetric_with_ancilla(gamma, alpha, n_a, psi, t) for t in times]
        worst = max(worst, np.max(np.abs(traj.prob - expected)))

    # Symmetric well with the coupling along the tunneling axis.
    for _ in range(10):
        alpha = rng.uniform(-2.0, 2.0)
        n_a = int(rng.integers(1, 5))
        psi = random_pure(rng, n_a + 1)
        model = ModelConfig(
            n_s=1, system=HamiltonianParams(gamma=1.0), n_a=n_a,
            axis_s="x", unit_system=UnitSystem.GAMMA_S_UNITS,
            ancilla_init=pure_state(psi),
        )
        h = model.joint_hamiltonian(0.0, 0.0, 0.0, alpha)
        rho0 = np.kron(model.rho_s0, pure_state(psi))
        times = np.linspace(0.0, 12.0, 20)
        traj = evolve_unitary(h, rho0, times, dim_s=2, dim_a=n_a + 1)
        expected = [p_symmetric_with_ancilla(alpha, n_a, psi, t) for t in times]
        worst = max(worst, np.max(np.abs(traj.prob - expected)))

    elapsed = time.perf_counter() - t0
    report(
        "oracle equivalence", worst <= 1e-8 and elapsed < 5.0,
        f"max |P_sim - P_closed| = {worst:.3e} (tol 1e-8), {elapsed:.2f}s (< 5s)",
    )


def test_operator_algebra():
    """su(2) commutation, Casimir, and Hermiticity hold to 1e-12 for N <= 8."""
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(1, 9):
        ops = build_operators(n)
        j = n / 2
        eye = np.eye(n + 1)
        worst = max(
            worst,
            np.max(np.abs(ops.jx @ ops.jy - ops.jy @ ops.jx - 1j * ops.jz)),
            np.max(np.abs(ops.jy @ ops.jz - ops.jz @ ops.jy - 1j * ops.jx)),
            np.max(np.abs(ops.jz @ ops.jx - ops.jx @ ops.jz - 1j * ops.jy)),
            np.max(np.abs(
                ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
                - j * (j + 1) * eye
            )),
            *(np.max(np.abs(g - g.conj().T)) for g in (ops.jx, ops.jy, ops.jz)),
        )
    elapsed = time.perf_counter() - t0
    report(
        "operator algebra", worst <= 1e-12 and elapsed < 1.0,
        f"max invariant violation = {worst:.3e} (tol 1e-12), {elapsed:.3f}s (< 1s)",
    )


def test_rk4_validity():
    """RK4: matches unitary evolution at lambda = 0, converges at order
    >= 3.5, and preserves density-matrix invariants with noise on."""
    model = ModelConfig(
        n_s=1, system=HamiltonianParams(gamma=0.5, delta=1.0), n_a=1,
        delta_a=Param.fixed(1.0), ancilla_init=all_left_state(1),
    )
    h = model.joint_hamiltonian(0.0, 0.0, 1.0, -2.0)
    rho0 = np.kron(model.rho_s0, all_left_state(1))

    # (a) noiseless agreement with the exact propagator
    traj = evolve_rk4(rho0, h, NoiseParams(), t_final=20.0, dt=1e-3, dim_s=2, dim_a=2)
    exact = evolve_unitary(h, rho0, traj.times, dim_s=2, dim_a=2)
    err_unitary = np.max(np.abs(traj.prob - exact.prob))

    # (b) convergence order from dt halving against a fine reference
    noise = NoiseParams(lambda_s=0.01, lambda_a=0.01)
    jz_s, jz_a = model.jz_embeddings()

    def final_prob(dt):
        return evolve_rk4(
            rho0, h, noise, t_final=2.0, dt=dt, jz_s_embedded=jz_s,
            jz_a_embedded=jz_a, dim_s=2, dim_a=2,
        ).prob[-1]

    reference = final_prob(1e-4)
    e_coarse = abs(final_prob(0.02) - reference)
    e_fine = abs(final_prob(0.01) - reference)
    order = np.log2(e_coarse / e_fine)

    # (c) invariants along a noisy trajectory
    traj_noisy = evolve_rk4(
        rho0, h, noise, t_final=10.0, dt=0.01, jz_s_embedded=jz_s,
        jz_a_embedded=jz_a, dim_s=2, dim_a=2, keep_states=True, snapshot_stride=100,
    )
    for rho in traj_noisy.states:
        check_density_matrix(rho)

    ok = err_unitary <= 1e-6 and order >= 3.5
    report(
        "rk4 validity", ok,
        f"|dP| vs exact = {err_unitary:.3e} (tol 1e-6), observed order = "
        f"{order:.2f} (>= 3.5), invariants hold on all snapshots",
    )


def test_stationary_state():
    """Dephasing drives N_S = 4 to P = 1/5, with and without an ancilla."""
    system = HamiltonianParams(gamma=0.5, delta=1.0)

    bare = ModelConfig(n_s=4, system=system, noise=NoiseParams(lambda_s=0.01))
    jz_s, _ = bare.jz_embeddings()
    traj = evolve_rk4(
        bare.rho_s0, bare.system_hamiltonian(), bare.noise, t_final=6000.0,
        dt=0.1, jz_s_embedded=jz_s, dim_s=5,
    )
    p_bare = traj.prob[-1]

    rng = np.random.default_rng(11)
    coupled = ModelConfig(
        n_s=4, system=system, n_a=4,
        noise=NoiseParams(lambda_s=0.01, lambda_a=0.01),
        ancilla_init=all_left_state(4),
    )
    h = coupled.joint_hamiltonian(*rng.uniform(-1.0, 1.0, size=4))
    jz_s, jz_a = coupled.jz_embeddings()
    rho0 = np.kron(coupled.rho_s0, all_left_state(4))
    traj_c = evolve_rk4(
        rho0, h, coupled.noise, t_final=6000.0, dt=0.1,
        jz_s_embedded=jz_s, jz_a_embedded=jz_a, dim_s=5, dim_a=5,
    )
    p_coupled = traj_c.prob[-1]

    ok = abs(p_bare - 0.2) <= 0.01 and abs(p_coupled - 0.2) <= 0.01
    report(
        "stationary state", ok,
        f"P(T) bare = {p_bare:.4f}, with random fixed ancilla = {p_coupled:.4f} "
        f"(target 0.200 +/- 0.01)",
    )


def test_single_boson_learned_coupling():
    """Learned coupling hits alpha = -2 / +2 with unit-probability transfer
    at t = pi, against the 0.2 uncoupled ceiling."""
    t0 = time.perf_counter()
    results = {}
    for label, init in (("left", all_left_state(1)), ("right", all_right_state(1))):
        model = ModelConfig(
            n_s=1, system=HamiltonianParams(gamma=0.5, delta=1.0), n_a=1,
            eta_a=Param.fixed(0.0), gamma_a=Param.fixed(0.0),
            delta_a=Param.fixed(1.0), alpha=Param.free(1.0),
            ancilla_init=init,
        )
        result = optimize(OptConfig(max_iters=3000, plateau_tol=1e-12), model)
        state = result.state
        h = model.joint_hamiltonian(0.0, 0.0, 1.0, state.alpha)
        rho0 = np.kron(model.rho_s0, init)
        times = np.linspace(0.0, 12.0, 24001)
        traj = evolve_unitary(h, rho0, times, dim_s=2, dim_a=2)
        t_peak = times[np.argmax(traj.prob)]
        results[label] = (state.alpha, traj.max_prob, t_peak)

    baseline = ModelConfig(n_s=1, system=HamiltonianParams(gamma=0.5, delta=1.0))
    base_traj = evolve_unitary(
        baseline.system_hamiltonian(), baseline.rho_s0, np.linspace(0, 12, 24001)
    )
    elapsed = time.perf_counter() - t0

    a_l, p_l, t_l = results["left"]
    a_r, p_r, t_r = results["right"]
    ok = (
        abs(a_l + 2.0) <= 0.05 and abs(a_r - 2.0) <= 0.05
        and p_l >= 0.999 and p_r >= 0.999
        and abs(t_l - np.pi) <= 0.05 and abs(t_r - np.pi) <= 0.05
        and abs(base_traj.max_prob - 0.2) <= 1e-3
        and elapsed < 120.0
    )
    report(
        "single-boson learned coupling", ok,
        f"alpha = {a_l:+.4f}/{a_r:+.4f} (target -2/+2 +/- 0.05), "
        f"max P = {p_l:.5f}/{p_r:.5f} at t = {t_l:.4f}/{t_r:.4f} "
        f"(pi +/- 0.05), baseline {base_traj.max_prob:.4f} (0.200 +/- 0.001), "
        f"{elapsed:.1f}s (< 120s)",
    )


def test_time_minimization():
    """A quadratic time penalty pushes the transfer time below pi/2 while
    keeping near-unit probability."""
    model = ModelConfig(
        n_s=1, system=HamiltonianParams(gamma=1.0), n_a=1,
        axis_s="x", unit_system=UnitSystem.GAMMA_S_UNITS,
    )
    result = optimize(OptConfig(max_iters=3000, time_penalty=0.1, plateau_tol=1e-12), model)
    t_hat = result.state.t_hat
    prob = result.curve[-1].prob
    ok = t_hat < np.pi / 2 and prob >= 0.99
    report(
        "time minimization", ok,
        f"t_hat = {t_hat:.4f} (< pi/2 = {np.pi / 2:.4f}), P = {prob:.5f} (>= 0.99)",
    )


def test_multiparticle_noiseless_grid():
    """Every (N_S, N_A) cell of the noiseless grid learns near-unit
    transfer."""
    rows = []
    ok = True
    for n_s in (3, 4, 5, 6):
        for n_a in (2, 3, 4, 5, 6):
            t0 = time.perf_counter()
            model = ModelConfig(
                n_s=n_s, system=HamiltonianParams(gamma=0.5, delta=1.0), n_a=n_a
            )
            cfg = OptConfig(max_iters=5000, seed=100 * n_s + n_a)
            result = optimize(cfg, model)
            prob = result.curve[-1].prob
            elapsed = time.perf_counter() - t0
            rows.append(f"({n_s},{n_a})={prob:.4f}")
            ok = ok and prob >= 0.98 and elapsed < 600.0
    report(
        "multi-particle noiseless grid", ok,
        "max P per cell (>= 0.98): " + " ".join(rows),
    )


def _noisy_transient_model():
    return ModelConfig(
        n_s=4, system=HamiltonianParams(gamma=0.5, delta=1.0), n_a=4,
        noise=NoiseParams(lambda_s=0.01, lambda_a=0.01),
        ancilla_learn_start=all_left_state(4),
    )


def _noisy_opt_config(**overrides):
    return OptConfig(
        max_iters=500, dt=0.05, t_window=12.0, plateau_tol=1e-12, **overrides
    )


def _evaluate_noisy(model, state, t_final=30.0, dt=0.01):
    h = model.joint_hamiltonian(
        state.eta_a, state.gamma_a, state.delta_a, state.alpha
    )
    rho_a = derived_ancilla_state(state, model)
    rho0 = np.kron(model.rho_s0, rho_a)
    jz_s, jz_a = model.jz_embeddings()
    return evolve_rk4(
        rho0, h, model.noise, t_final, dt, jz_s, jz_a, dim_s=5, dim_a=5
    )


def _unoptimized_noisy_run():
    model = ModelConfig(
        n_s=4, system=HamiltonianParams(gamma=0.5, delta=1.0), n_a=4,
        noise=NoiseParams(lambda_s=0.01, lambda_a=0.01),
        ancilla_init=all_left_state(4),
    )
    h = model.joint_hamiltonian(0.7, 0.3, -0.5, 0.4)
    rho0 = np.kron(model.rho_s0, all_left_state(4))
    jz_s, jz_a = model.jz_embeddings()
    return evolve_rk4(
        rho0, h, model.noise, 6000.0, 0.1, jz_s, jz_a, dim_s=5, dim_a=5
    )


def test_noisy_optimized_transient():
    """With dephasing on, the learned ancilla lifts the transient far above
    the 0.2 asymptote and reaches it orders of magnitude sooner than the
    unoptimized coupled run."""
    model = _noisy_transient_model()
    result = optimize(_noisy_opt_config(), model)
    traj = _evaluate_noisy(model, result.state)
    unopt = _unoptimized_noisy_run()

    level = 0.19
    t_opt = traj.first_passage(level)
    # The unoptimized run creeps toward its 0.2 asymptote; if it has not
    # crossed the level by the end of its (long) window, the whole window is
    # a lower bound on its passage time.
    t_unopt = unopt.first_passage(level)
    t_unopt_bound = t_unopt if t_unopt is not None else float(unopt.times[-1])
    ok = (
        traj.max_prob > 0.2
        and traj.max_prob > unopt.max_prob
        and t_opt is not None
        and t_opt * 10.0 <= t_unopt_bound
    )
    report(
        "noisy optimized transient", ok,
        f"optimized max P = {traj.max_prob:.4f} (> 0.2 and > unoptimized "
        f"{unopt.max_prob:.4f}), first passage to {level}: "
        f"{'none' if t_opt is None else f'{t_opt:.2f}'} vs "
        f"{'> ' if t_unopt is None else ''}{t_unopt_bound:.0f} (>= 10x earlier)",
    )


def test_diagonal_ancilla_mode():
    """The diagonal-constrained ancilla still beats the asymptote and
    concentrates on a single number state."""
    model = _noisy_transient_model()
    result = optimize(_noisy_opt_config(diagonal_ancilla=True), model)
    rho_a = derived_ancilla_state(result.state, model)
    traj = _evaluate_noisy(model, result.state)
    top = float(np.max(np.diag(rho_a).real))
    ok = traj.max_prob > 0.2 and top >= 0.9
    report(
        "diagonal ancilla mode", ok,
        f"max P = {traj.max_prob:.4f} (> 0.2), largest number-state "
        f"population = {top:.4f} (>= 0.9)",
    )


def test_probability_decrease():
    """Learning can also suppress tunneling: the optimized window maximum
    drops strictly below the uncoupled value of 1."""
    model = ModelConfig(
        n_s=1, system=HamiltonianParams(gamma=1.0), n_a=6,
        unit_system=UnitSystem.GAMMA_S_UNITS,
    )
    cfg = OptConfig(
        max_iters=1500, minimize_probability=True, t_window=10.0, plateau_tol=1e-12
    )
    result = optimize(cfg, model)
    state = result.state
    h = model.joint_hamiltonian(state.eta_a, state.gamma_a, state.delta_a, state.alpha)
    rho0 = np.kron(model.rho_s0, derived_ancilla_state(state, model))
    traj = evolve_unitary(
        h, rho0, np.linspace(0.0, 10.0, 2000), dim_s=2, dim_a=7
    )
    ok = traj.max_prob < 1.0
    report(
        "probability decrease", ok,
        f"optimized max-over-window P = {traj.max_prob:.4f} (< 1.0, "
        f"uncoupled max is 1.0)",
    )


def test_gradient_contract():
    """Reverse-mode gradients agree with central finite differences on 10
    random states in both noiseless and noisy modes."""
    rng = np.random.default_rng(3)
    worst = 0.0
    for noisy in (False, True):
        if noisy:
            model = ModelConfig(
                n_s=1, system=HamiltonianParams(gamma=0.5, delta=1.0), n_a=1,
                noise=NoiseParams(lambda_s=0.01, lambda_a=0.01),
            )
            cfg = OptConfig(dt=0.05, t_window=2.0)
        else:
            model = ModelConfig(
                n_s=1, system=HamiltonianParams(gamma=0.5, delta=1.0), n_a=1
            )
            cfg = OptConfig()
        template = initial_state(cfg, model)
        for _ in range(5):
            vec = rng.standard_normal(template.n_params)
            state = unpack_state(vec, template)
            g = gradient(state, cfg, model)
            fd = finite_difference_gradient(state, cfg, model)
            scale = np.maximum(np.maximum(np.abs(fd), np.abs(g)), 1e-6)
            worst = max(worst, float(np.max(np.abs(g - fd) / scale)))
    ok = worst <= 1e-4
    report(
        "gradient contract", ok,
        f"max componentwise relative error = {worst:.3e} (tol 1e-4) over 10 "
        f"random states",
    )


def test_determinism(tmp_path):
    """Identical config and seed produce bitwise-identical exports."""
    spec_path = CONFIG_DIR / "fig1_asymmetric.toml"
    outputs = []
    for run in ("a", "b"):
        spec = load_scenario(spec_path)
        spec.opt.max_iters = 300
        run_scenario(spec, out_dir=tmp_path / run)
        outputs.append({
            name: (tmp_path / run / name).read_bytes()
            for name in ("trajectory.csv", "learning_curve.csv", "result.json")
        })
    ok = outputs[0] == outputs[1]
    report(
        "determinism", ok,
        "repeated runs produced bitwise-identical trajectory.csv, "
        "learning_curve.csv and result.json"
        if ok else "outputs differ between repeated runs",
    )
