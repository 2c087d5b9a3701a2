"""Config-driven scenario runner: parse a TOML scenario, optionally learn
the ancilla, evaluate coupled and baseline trajectories, and persist
everything as CSV/JSON."""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import HamiltonianParams, UnitSystem
from .dynamics import (
    NoiseParams,
    Trajectory,
    all_left_state,
    all_right_state,
    evolve_rk4,
    evolve_unitary,
    pure_state,
)
from .model import LEARNABLE, ModelConfig, Param
from .optimize import (
    OptConfig,
    OptResult,
    derived_ancilla_state,
    initial_state,
    optimize,
)

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

TIME_UNIT_NOTE = "1 time unit ~ 10 ms (ultracold dipolar gas estimate)"


class ConfigError(ValueError):
    """A scenario file failed validation; message names the offending key."""


@dataclass
class EvolutionSpec:
    dt: float = 0.01
    t_window: float = 12.0
    report_window: float | None = None
    report_points: int = 2000

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("[evolution].dt must be positive")
        if self.t_window <= 0:
            raise ConfigError("[evolution].t_window must be positive")
        if self.report_window is None:
            self.report_window = self.t_window
        if self.report_points < 2:
            raise ConfigError("[evolution].report_points must be >= 2")


@dataclass
class ScenarioSpec:
    model: ModelConfig
    opt: OptConfig
    evolution: EvolutionSpec
    optimize_enabled: bool = True
    restarts: int = 1
    title: str = ""


@dataclass
class ScenarioResult:
    trajectory: Trajectory
    baseline_trajectory: Trajectory
    learned: dict
    learning_curve: list[dict]
    metadata: dict


# ---------------------------------------------------------------------------
# TOML parsing


def _param(section: dict, key: str, section_name: str, default: float) -> Param:
    raw = section.get(key, default)
    if isinstance(raw, str):
        if raw != LEARNABLE:
            raise ConfigError(f"[{section_name}].{key}: expected a number or 'learnable'")
        return Param.free(1.0)
    if isinstance(raw, dict):
        if not raw.get("learnable", False):
            raise ConfigError(f"[{section_name}].{key}: table form requires learnable = true")
        return Param.free(float(raw.get("init", 1.0)))
    if isinstance(raw, (int, float)):
        return Param.fixed(float(raw))
    raise ConfigError(f"[{section_name}].{key}: unsupported value {raw!r}")


def _state_from_spec(raw, n_bosons: int, where: str) -> np.ndarray:
    if isinstance(raw, str):
        if raw == "left":
            return all_left_state(n_bosons)
        if raw == "right":
            return all_right_state(n_bosons)
        raise ConfigError(f"{where}: unknown state {raw!r}")
    if isinstance(raw, list):
        amps = []
        for entry in raw:
            if isinstance(entry, list):
                if len(entry) != 2:
                    raise ConfigError(f"{where}: complex amplitude needs [re, im]")
                amps.append(complex(entry[0], entry[1]))
            else:
                amps.append(complex(entry))
        if len(amps) != n_bosons + 1:
            raise ConfigError(f"{where}: expected {n_bosons + 1} amplitudes, got {len(amps)}")
        return pure_state(np.array(amps))
    raise ConfigError(f"{where}: unsupported state spec {raw!r}")


def scenario_from_dict(data: dict) -> ScenarioSpec:
    sys_sec = data.get("system")
    if not isinstance(sys_sec, dict):
        raise ConfigError("[system] section is required")
    try:
        n_s = int(sys_sec["n_bosons"])
    except KeyError:
        raise ConfigError("[system].n_bosons is required") from None
    if n_s < 1:
        raise ConfigError(f"[system].n_bosons must be >= 1, got {n_s}")
    system = HamiltonianParams(
        eta=float(sys_sec.get("eta", 0.0)),
        gamma=float(sys_sec.get("gamma", 0.0)),
        delta=float(sys_sec.get("delta", 0.0)),
    )
    rho_s0 = _state_from_spec(sys_sec.get("initial", "left"), n_s, "[system].initial")

    anc_sec = data.get("ancilla", {})
    n_a = int(anc_sec.get("n_bosons", 0))
    if n_a < 0:
        raise ConfigError(f"[ancilla].n_bosons must be >= 0, got {n_a}")
    ancilla_init: np.ndarray | str = LEARNABLE
    learn_start = None
    if n_a > 0:
        raw_init = anc_sec.get("initial", LEARNABLE)
        if raw_init == LEARNABLE:
            start = anc_sec.get("learn_start")
            if start is not None:
                learn_start = _state_from_spec(start, n_a, "[ancilla].learn_start")
        else:
            ancilla_init = _state_from_spec(raw_init, n_a, "[ancilla].initial")

    coup_sec = data.get("coupling", {})
    axis_s = coup_sec.get("axis_system", "z")
    axis_a = coup_sec.get("axis_ancilla", "z")
    if axis_s not in ("x", "y", "z") or axis_a not in ("x", "y", "z"):
        raise ConfigError("[coupling] axes must be 'x', 'y' or 'z'")

    noise_sec = data.get("noise", {})
    noise = NoiseParams(
        lambda_s=float(noise_sec.get("lambda_system", 0.0)),
        lambda_a=float(noise_sec.get("lambda_ancilla", 0.0)),
    )

    units = data.get("units", {}).get("system", "delta_s")
    try:
        unit_system = UnitSystem(units)
    except ValueError:
        raise ConfigError(f"[units].system: unknown unit system {units!r}") from None

    try:
        model = ModelConfig(
            n_s=n_s,
            system=system,
            n_a=n_a,
            eta_a=_param(anc_sec, "eta", "ancilla", 0.0) if n_a else Param.fixed(0.0),
            gamma_a=_param(anc_sec, "gamma", "ancilla", 0.0) if n_a else Param.fixed(0.0),
            delta_a=_param(anc_sec, "delta", "ancilla", 0.0) if n_a else Param.fixed(0.0),
            alpha=_param(coup_sec, "alpha", "coupling", 0.0),
            axis_s=axis_s,
            axis_a=axis_a,
            noise=noise,
            ancilla_init=ancilla_init,
            ancilla_learn_start=learn_start,
            rho_s0=rho_s0,
            unit_system=unit_system,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e

    evo_sec = data.get("evolution", {})
    evolution = EvolutionSpec(
        dt=float(evo_sec.get("dt", 0.01)),
        t_window=float(evo_sec.get("t_window", 12.0)),
        report_window=evo_sec.get("report_window"),
        report_points=int(evo_sec.get("report_points", 2000)),
    )

    opt_sec = data.get("optimize", {})
    try:
        opt = OptConfig(
            learning_rate=float(opt_sec.get("learning_rate", 0.01)),
            max_iters=int(opt_sec.get("max_iters", 5000)),
            time_penalty=float(opt_sec.get("time_penalty", 0.0)),
            diagonal_ancilla=bool(opt_sec.get("diagonal_ancilla", False)),
            minimize_probability=bool(opt_sec.get("minimize_probability", False)),
            dt=float(opt_sec.get("dt", evo_sec.get("dt", 0.01))),
            t_window=float(opt_sec.get("t_window", evolution.t_window)),
            seed=int(opt_sec.get("seed", 0)),
            plateau_tol=float(opt_sec.get("plateau_tol", 1e-10)),
        )
    except ValueError as e:
        raise ConfigError(f"[optimize]: {e}") from e

    return ScenarioSpec(
        model=model,
        opt=opt,
        evolution=evolution,
        optimize_enabled=bool(opt_sec.get("enabled", True)),
        restarts=int(opt_sec.get("restarts", 1)),
        title=str(data.get("title", "")),
    )


def load_scenario(path: str | Path) -> ScenarioSpec:
    path = Path(path)
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e
    return scenario_from_dict(data)


# ---------------------------------------------------------------------------
# Evaluation with (possibly learned) parameter values


def _report_times(evolution: EvolutionSpec) -> np.ndarray:
    return np.linspace(0.0, evolution.report_window, evolution.report_points)


def _evaluate(model: ModelConfig, values: dict, rho_a: np.ndarray | None,
              evolution: EvolutionSpec) -> Trajectory:
    h = model.joint_hamiltonian(
        values["eta_a"], values["gamma_a"], values["delta_a"], values["alpha"]
    )
    rho0 = model.rho_s0 if rho_a is None else np.kron(model.rho_s0, rho_a)
    if model.noise.is_noisy:
        jz_s, jz_a = model.jz_embeddings()
        traj = evolve_rk4(
            rho0, h, model.noise, evolution.report_window, evolution.dt,
            jz_s, jz_a, dim_s=model.dim_s, dim_a=model.dim_a,
        )
        stride = max(1, len(traj.times) // evolution.report_points)
        return Trajectory(times=traj.times[::stride], prob=traj.prob[::stride])
    return evolve_unitary(
        h, rho0, _report_times(evolution), dim_s=model.dim_s, dim_a=model.dim_a
    )


def _baseline_model(model: ModelConfig) -> ModelConfig:
    return ModelConfig(
        n_s=model.n_s,
        system=model.system,
        n_a=0,
        noise=NoiseParams(lambda_s=model.noise.lambda_s),
        rho_s0=model.rho_s0,
        unit_system=model.unit_system,
        conv_s=model.conv_s,
    )


def run_scenario(
    spec: ScenarioSpec | str | Path,
    out_dir: str | Path | None = None,
    seed: int | None = None,
    fmt: str = "both",
) -> ScenarioResult:
    if not isinstance(spec, ScenarioSpec):
        spec = load_scenario(spec)
    model, opt_cfg = spec.model, spec.opt
    if seed is not None:
        opt_cfg.seed = seed

    curve: list[dict] = []
    if spec.optimize_enabled and _has_learnables(model):
        result = _optimize_with_restarts(spec)
        state = result.state
        curve = [vars(r).copy() for r in result.curve]
        rho_a = derived_ancilla_state(state, model)
        values = {
            "eta_a": state.eta_a, "gamma_a": state.gamma_a,
            "delta_a": state.delta_a, "alpha": state.alpha,
            "t_hat": state.t_hat,
        }
    else:
        state = initial_state(opt_cfg, model)
        rho_a = derived_ancilla_state(state, model)
        values = {
            "eta_a": model.eta_a.value, "gamma_a": model.gamma_a.value,
            "delta_a": model.delta_a.value, "alpha": model.alpha.value,
            "t_hat": state.t_hat,
        }

    trajectory = _evaluate(model, values, rho_a, spec.evolution)
    baseline = _evaluate(
        _baseline_model(model),
        {"eta_a": 0.0, "gamma_a": 0.0, "delta_a": 0.0, "alpha": 0.0},
        None,
        spec.evolution,
    )

    learned = dict(values)
    learned["max_prob"] = trajectory.max_prob
    learned["baseline_max_prob"] = baseline.max_prob
    learned["rho_a"] = rho_a
    result = ScenarioResult(
        trajectory=trajectory,
        baseline_trajectory=baseline,
        learned=learned,
        learning_curve=curve,
        metadata={
            "title": spec.title,
            "n_s": model.n_s,
            "n_a": model.n_a,
            "unit_system": model.unit_system.value,
            "time_unit_note": TIME_UNIT_NOTE,
            "seed": opt_cfg.seed,
        },
    )
    if out_dir is not None:
        export(result, out_dir, fmt)
    return result


def _has_learnables(model: ModelConfig) -> bool:
    return model.ancilla_learnable or any(
        p.learnable
        for p in (model.eta_a, model.gamma_a, model.delta_a, model.alpha)
    )


def _optimize_with_restarts(spec: ScenarioSpec) -> OptResult:
    best = None
    for r in range(max(1, spec.restarts)):
        cfg = spec.opt if r == 0 else _reseeded(spec.opt, spec.opt.seed + 1000 * r)
        result = optimize(cfg, spec.model)
        if result.aborted and best is not None:
            continue
        score = result.curve[-1].prob if result.curve else -np.inf
        if spec.opt.minimize_probability:
            score = -score
        if best is None or score > best[0]:
            best = (score, result)
    return best[1]


def _reseeded(cfg: OptConfig, seed: int) -> OptConfig:
    from dataclasses import replace

    return replace(cfg, seed=seed)


# ---------------------------------------------------------------------------
# Sweeps


def run_sweep(
    grid_spec: dict | str | Path, out_dir: str | Path, fmt: str = "both"
) -> list[dict]:
    """Run one scenario per (n_s, n_a) grid cell and write a summary CSV.

    The grid config is a scenario file plus a [sweep] section with n_s and
    n_a lists; each cell gets a deterministic per-cell seed."""
    if not isinstance(grid_spec, dict):
        path = Path(grid_spec)
        try:
            with open(path, "rb") as f:
                grid_spec = tomllib.load(f)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{path}: {e}") from e
    sweep_sec = grid_spec.get("sweep")
    if not isinstance(sweep_sec, dict):
        raise ConfigError("[sweep] section is required for sweeps")
    ns_list = [int(v) for v in sweep_sec.get("n_s", [])]
    na_list = [int(v) for v in sweep_sec.get("n_a", [])]
    if not ns_list or not na_list:
        raise ConfigError("[sweep].n_s and [sweep].n_a must be nonempty lists")
    base_seed = int(sweep_sec.get("base_seed", 0))

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows, failures = [], []
    for n_s in ns_list:
        for n_a in na_list:
            cell = dict(grid_spec)
            cell.pop("sweep", None)
            cell = json.loads(json.dumps(cell))  # deep copy
            cell.setdefault("system", {})["n_bosons"] = n_s
            cell.setdefault("ancilla", {})["n_bosons"] = n_a
            cell.setdefault("optimize", {})["seed"] = base_seed + 100 * n_s + n_a
            try:
                spec = scenario_from_dict(cell)
                result = run_scenario(spec, out_dir / f"ns{n_s}_na{n_a}", fmt=fmt)
            except Exception as e:  # noqa: BLE001 - cells fail independently
                failures.append({"n_s": n_s, "n_a": n_a, "error": str(e)})
                continue
            rows.append(
                {
                    "n_s": n_s,
                    "n_a": n_a,
                    "max_P": result.learned["max_prob"],
                    "eta_a": result.learned["eta_a"],
                    "gamma_a": result.learned["gamma_a"],
                    "delta_a": result.learned["delta_a"],
                    "alpha": result.learned["alpha"],
                    "t_star": result.learned["t_hat"],
                }
            )
    _write_csv(
        out_dir / "summary.csv",
        ["n_s", "n_a", "max_P", "eta_a", "gamma_a", "delta_a", "alpha", "t_star"],
        rows,
    )
    if failures:
        _write_csv(out_dir / "failures.csv", ["n_s", "n_a", "error"], failures)
    return rows


# ---------------------------------------------------------------------------
# Export / reload


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow(
                [row[k] if isinstance(row[k], (str, int)) else _fmt(row[k]) for k in header]
            )


def _interleaved(rho: np.ndarray | None) -> list[float]:
    if rho is None:
        return []
    flat = np.asarray(rho).ravel()
    out = []
    for z in flat:
        out.extend([float(z.real), float(z.imag)])
    return out


def export(result: ScenarioResult, out_dir: str | Path, fmt: str = "both") -> list[Path]:
    """Persist a scenario result.

    csv: trajectory.csv (t, prob, prob_baseline) and learning_curve.csv;
    json: result.json with metadata, learned parameters (rho_A row-major,
    re/im interleaved), and both curves. Field order is fixed so identical
    results serialize identically.
    """
    if fmt not in ("csv", "json", "both"):
        raise ValueError(f"format must be csv, json or both, got {fmt!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if result.baseline_trajectory.times.size:
        baseline = np.interp(
            result.trajectory.times,
            result.baseline_trajectory.times,
            result.baseline_trajectory.prob,
        )
    else:
        baseline = np.zeros_like(np.asarray(result.trajectory.times))
    if fmt in ("csv", "both"):
        path = out_dir / "trajectory.csv"
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["t", "prob", "prob_baseline"])
            for t, p, b in zip(result.trajectory.times, result.trajectory.prob, baseline):
                w.writerow([_fmt(t), _fmt(p), _fmt(b)])
        written.append(path)
        path = out_dir / "learning_curve.csv"
        cols = ["iter", "loss", "prob", "eta_a", "gamma_a", "delta_a", "alpha", "t_hat", "trace_rho_a"]
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(cols)
            for rec in result.learning_curve:
                w.writerow(
                    [rec["iteration"]] + [_fmt(rec[k]) for k in cols[1:]]
                )
        written.append(path)
    if fmt in ("json", "both"):
        path = out_dir / "result.json"
        payload = {
            "metadata": result.metadata,
            "learned": {
                "eta_a": result.learned["eta_a"],
                "gamma_a": result.learned["gamma_a"],
                "delta_a": result.learned["delta_a"],
                "alpha": result.learned["alpha"],
                "t_hat": result.learned["t_hat"],
                "max_prob": result.learned["max_prob"],
                "baseline_max_prob": result.learned["baseline_max_prob"],
                "rho_a_dim": 0 if result.learned["rho_a"] is None else result.learned["rho_a"].shape[0],
                "rho_a_interleaved": _interleaved(result.learned["rho_a"]),
            },
            "trajectory": {
                "t": [float(t) for t in result.trajectory.times],
                "prob": [float(p) for p in result.trajectory.prob],
                "prob_baseline": [float(b) for b in baseline],
            },
            "learning_curve": [
                {k: rec[k] for k in
                 ("iteration", "loss", "prob", "eta_a", "gamma_a", "delta_a",
                  "alpha", "t_hat", "trace_rho_a")}
                for rec in result.learning_curve
            ],
        }
        with open(path, "w") as f:
            json.dump(payload, f, indent=1)
        written.append(path)
    return written


def load_result(path: str | Path) -> ScenarioResult:
    """Rebuild a ScenarioResult from a result.json written by `export`."""
    with open(path) as f:
        payload = json.load(f)
    traj = payload["trajectory"]
    learned = dict(payload["learned"])
    d = learned.pop("rho_a_dim")
    inter = learned.pop("rho_a_interleaved")
    if d:
        flat = np.array(inter).reshape(-1, 2)
        learned["rho_a"] = (flat[:, 0] + 1j * flat[:, 1]).reshape(d, d)
    else:
        learned["rho_a"] = None
    times = np.array(traj["t"])
    return ScenarioResult(
        trajectory=Trajectory(times=times, prob=np.array(traj["prob"])),
        baseline_trajectory=Trajectory(
            times=times, prob=np.array(traj["prob_baseline"])
        ),
        learned=learned,
        learning_curve=payload["learning_curve"],
        metadata=payload["metadata"],
    )
