"""Command-line interface: plan, solve, oracle, sample.

Configuration is one JSON file (nested key-value); results are JSON on
stdout (and optionally a file); optimization traces are CSV.  A run is
reproducible from its config plus seed alone: identical inputs give
byte-identical JSON except for the ``wall_time_ms`` field, and
byte-identical sampled counts.

Exit codes: 0 success, 2 configuration error, 3 resource-cap violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import gaussian, models, planner, simulator, vqe

SCHEMA_VERSION = 1

_MODEL_BASE_KEYS = {"kind", "n", "rows", "cols", "boundary", "pad"}
_OBJECTIVE_KEYS = {"mode", "ansatz", "custom_layout", "shots", "parity",
                   "allocation", "spsa_a", "spsa_c", "spsa_stability",
                   "restarts", "jitter"}
_OPTIMIZER_KEYS = {"name", "budget"}
_CAP_KEYS = {"max_width", "brute_force_max_n", "spectral_max_n", "dense_check_max_m"}
_TOP_KEYS = {"model", "objective", "optimizer", "seed", "params", "caps",
             "output", "trace"}


class ConfigError(Exception):
    pass


class CapError(Exception):
    pass


@dataclass(frozen=True)
class Caps:
    max_width: int = 25
    brute_force_max_n: int = 12
    spectral_max_n: int = 4096
    dense_check_max_m: int = 6


@dataclass(frozen=True)
class RunConfig:
    model: models.ModelSpec
    objective: vqe.ObjectiveConfig
    optimizer: str = "coordinate_descent"
    budget: int = 200_000
    seed: int = 0
    params: tuple[float, ...] | None = None
    caps: Caps = field(default_factory=Caps)
    output: str | None = None
    trace: str | None = None
    raw_model: dict = field(default_factory=dict)


def _require_keys(section: dict, allowed: set, where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _parse_model(section: dict) -> models.ModelSpec:
    if "kind" not in section:
        raise ConfigError("model.kind is required")
    kind = section["kind"]
    if kind not in models.MODEL_KINDS:
        raise ConfigError(f"unknown model kind {kind!r}; choose from {models.MODEL_KINDS}")
    allowed = _MODEL_BASE_KEYS | models._ALLOWED_COUPLINGS[kind]
    _require_keys(section, allowed, "model")
    couplings = {key: float(section[key])
                 for key in models._ALLOWED_COUPLINGS[kind] if key in section}
    try:
        return models.ModelSpec(
            kind=kind, couplings=couplings,
            n=section.get("n"), rows=section.get("rows"), cols=section.get("cols"),
            boundary=section.get("boundary", "open"), pad=bool(section.get("pad", False)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_objective(section: dict, caps: Caps) -> vqe.ObjectiveConfig:
    _require_keys(section, _OBJECTIVE_KEYS, "objective")
    kwargs = dict(section)
    if "custom_layout" in kwargs:
        kwargs["custom_layout"] = tuple(tuple(pair) for pair in kwargs["custom_layout"])
    try:
        return vqe.ObjectiveConfig(max_width=caps.max_width, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str, overrides: argparse.Namespace) -> RunConfig:
    try:
        with open(path) as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    _require_keys(data, _TOP_KEYS, "config")
    if "model" not in data:
        raise ConfigError("config needs a 'model' section")

    caps_section = data.get("caps", {})
    _require_keys(caps_section, _CAP_KEYS, "caps")
    caps = Caps(**{key: int(value) for key, value in caps_section.items()})

    model = _parse_model(data["model"])
    objective = _parse_objective(data.get("objective", {}), caps)

    optimizer_section = data.get("optimizer", {})
    _require_keys(optimizer_section, _OPTIMIZER_KEYS, "optimizer")
    optimizer = optimizer_section.get("name", "coordinate_descent")
    if optimizer not in vqe.OPTIMIZERS:
        raise ConfigError(f"unknown optimizer {optimizer!r}; choose from {vqe.OPTIMIZERS}")
    budget = int(optimizer_section.get("budget", 200_000))
    if budget < 1:
        raise ConfigError("optimizer.budget must be >= 1")

    seed = int(data.get("seed", 0))
    if overrides.seed is not None:
        seed = overrides.seed
    objective = replace(objective, base_seed=seed)
    if overrides.shots is not None:
        objective = replace(objective, shots=overrides.shots)
    if overrides.mode is not None:
        if overrides.mode not in vqe.MODES:
            raise ConfigError(f"unknown mode {overrides.mode!r}; choose from {vqe.MODES}")
        objective = replace(objective, mode=overrides.mode)

    params = data.get("params")
    if params is not None:
        params = tuple(float(p) for p in params)
    output = overrides.out if overrides.out is not None else data.get("output")
    return RunConfig(model=model, objective=objective, optimizer=optimizer,
                     budget=budget, seed=seed, params=params, caps=caps,
                     output=output, trace=data.get("trace"),
                     raw_model=dict(data["model"]))


def _build(config: RunConfig) -> models.QuadraticHamiltonian:
    try:
        return models.build_model(config.model)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _check_width(config: RunConfig, ham: models.QuadraticHamiltonian) -> None:
    if config.objective.mode == "matrix":
        return
    width = max(1, 2 * ham.m - 1)
    if width > config.caps.max_width:
        raise CapError(
            f"purified register needs {width} qubits but caps.max_width is "
            f"{config.caps.max_width}; raise the cap or use matrix mode")


def _result_header(config: RunConfig, ham: models.QuadraticHamiltonian,
                   command: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "model": config.raw_model,
        "n": ham.n,
        "m": ham.m,
        "seed": config.seed,
    }


def cmd_plan(config: RunConfig) -> dict:
    ham = _build(config)
    result = _result_header(config, ham, "plan")
    result.update(planner.plan_to_json(planner.build_plan(ham)))
    return result


def cmd_oracle(config: RunConfig) -> dict:
    ham = _build(config)
    if ham.n > config.caps.spectral_max_n:
        raise CapError(f"n={ham.n} exceeds caps.spectral_max_n={config.caps.spectral_max_n}")
    energy, modes = gaussian.spectral_ground_energy(ham)
    result = _result_header(config, ham, "oracle")
    result["spectral_energy"] = energy
    result["mode_energies"] = [float(e) for e in modes]
    if ham.n <= config.caps.brute_force_max_n:
        result["brute_force_energy"] = models.brute_force_ground_energy(
            ham, max_n=config.caps.brute_force_max_n)
    return result


def cmd_solve(config: RunConfig) -> dict:
    ham = _build(config)
    _check_width(config, ham)
    start = time.perf_counter()
    outcome = vqe.optimize(ham, config.objective, optimizer=config.optimizer,
                           budget=config.budget)
    wall_ms = (time.perf_counter() - start) * 1000.0
    plan = planner.build_plan(ham)
    result = _result_header(config, ham, "solve")
    result.update({
        "mode": config.objective.mode,
        "ansatz": config.objective.ansatz,
        "optimizer": config.optimizer,
        "budget": config.budget,
        "energy": outcome.best_energy,
        "stderr": outcome.best_stderr,
        "groups_used": len(plan.groups),
        "shots": config.objective.shots if config.objective.mode == "circuit_sampled" else None,
        "parity_flip": outcome.parity_flip,
        "evaluations": outcome.evaluations,
        "budget_exhausted": outcome.budget_exhausted,
        "best_params": [float(p) for p in outcome.best_params],
    })
    if ham.n <= config.caps.spectral_max_n:
        oracle_energy, _ = gaussian.spectral_ground_energy(ham)
        result["oracle_energy"] = oracle_energy
        result["gap"] = outcome.best_energy - oracle_energy
    else:
        result["oracle_energy"] = None
        result["gap"] = None
    if config.trace:
        with open(config.trace, "w") as handle:
            handle.write("iteration,energy,stderr\n")
            for point in outcome.trace:
                handle.write(f"{point.iteration},{point.energy!r},{point.stderr!r}\n")
    result["wall_time_ms"] = wall_ms
    return result


def cmd_sample(config: RunConfig) -> dict:
    ham = _build(config)
    objective = replace(config.objective, mode="circuit_sampled")
    config = replace(config, objective=objective)
    _check_width(config, ham)
    obj = vqe.Objective(ham, objective, parity_flip=objective.parity == "odd")
    params = np.zeros(obj.num_params) if config.params is None else np.asarray(config.params)
    if params.shape != (obj.num_params,):
        raise ConfigError(f"params must have length {obj.num_params}, got {params.shape[0]}")
    state = simulator.run(obj.ansatz_circuit(params).widened(obj._width),
                          initial=obj._prep_state, max_width=objective.max_width)
    groups = []
    for index, diag in enumerate(obj._diagonalizers):
        measured = simulator.run(diag, initial=state, max_width=objective.max_width)
        probs = simulator.system_probabilities(measured, obj.m)
        counts = simulator.sample(probs, obj._group_shots[index],
                                  (objective.base_seed, 0, index, 0))
        groups.append({
            "pattern": obj.plan.groups[index].pattern.axes,
            "shots": counts.shots,
            "counts": {str(outcome): count for outcome, count in sorted(counts.counts.items())},
        })
    result = _result_header(config, ham, "sample")
    result["params"] = [float(p) for p in params]
    result["groups"] = groups
    return result


_COMMANDS = {"plan": cmd_plan, "solve": cmd_solve, "oracle": cmd_oracle,
             "sample": cmd_sample}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermicompress",
        description="Compressed free-fermion simulation: measurement plans, "
                    "oracles, sampling and VQE ground-state searches.")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="path to the JSON run configuration")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--shots", type=int, default=None, help="override shots per group")
    parser.add_argument("--mode", default=None, help="override the objective mode")
    parser.add_argument("--out", default=None, help="write the result JSON here as well")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, args)
        result = _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    text = json.dumps(result, indent=2, sort_keys=True)
    print(text)
    if config.output:
        with open(config.output, "w") as handle:
            handle.write(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
