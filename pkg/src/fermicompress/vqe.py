"""Objective evaluation and classical optimization over Givens parameters.

Three objective modes, all measuring the same quantity:

* ``matrix``         - compose the parametrized rotation, conjugate the
                       vacuum covariance matrix, contract with h.
* ``circuit_exact``  - simulate prep + compiled ansatz on the purified
                       register, read exact system-register probabilities
                       through each measurement group's diagonalizer.
* ``circuit_sampled``- same, with seeded multinomial shot noise.

Ansatz families: ``full`` (all n(2n-1) Givens planes), ``restricted``
(one rotation angle per qubit, expanding to 2^(m-1) disjoint-plane Givens
rotations each; compiled as a single uncontrolled RY per qubit), and
``custom`` (an explicit plane layout).  Proper rotations keep the even
fermion-parity sector of the vacuum; the odd sector is reached through an
appended parity flip.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from . import circuits, planner, simulator
from .gaussian import (ENERGY_CONSTANT, energy_from_covariance,
                       rotate_covariance, vacuum_covariance)
from .models import QuadraticHamiltonian
from .sogroup import (GivensRotation, RotationPlan, compose_rotation,
                      full_parameter_layout, parity_flip_matrix,
                      ry_givens_decomposition)

MODES = ("matrix", "circuit_exact", "circuit_sampled")
OPTIMIZERS = ("coordinate_descent", "spsa", "nelder_mead_like")

SWEEP_TOL = 1e-9  # stop when a full sweep improves energy by less than this

# seed stream tags (first element of the spawn key after the base seed)
_STREAM_SAMPLE = 0
_STREAM_SPSA = 1
_STREAM_JITTER = 2


@dataclass(frozen=True)
class AnsatzSpec:
    """A parameter layout over Givens planes."""

    kind: str  # full | restricted | custom
    m: int
    pairs: tuple[tuple[int, int], ...] = ()

    @property
    def num_params(self) -> int:
        return self.m if self.kind == "restricted" else len(self.pairs)

    def rotation_plan(self, params: Sequence[float], parity_flip: bool) -> RotationPlan:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.num_params,):
            raise ValueError(f"expected {self.num_params} parameters, got {params.shape}")
        if self.kind == "restricted":
            rotations: list[GivensRotation] = []
            for k, theta in enumerate(params):
                rotations.extend(ry_givens_decomposition(k, self.m, float(theta)))
            return RotationPlan(tuple(rotations), parity_flip)
        rotations = [GivensRotation(i, j, float(t))
                     for (i, j), t in zip(self.pairs, params)]
        return RotationPlan(tuple(rotations), parity_flip)


def full_ansatz(m: int) -> AnsatzSpec:
    return AnsatzSpec("full", m, full_parameter_layout(m))


def build_restricted_ansatz(m: int) -> AnsatzSpec:
    """One rotation angle per qubit: m parameters, m * 2^(m-1) Givens rotations."""
    if m < 1:
        raise ValueError("qubit count must be >= 1")
    return AnsatzSpec("restricted", m)


def custom_ansatz(m: int, pairs: Sequence[tuple[int, int]]) -> AnsatzSpec:
    return AnsatzSpec("custom", m, tuple((int(i), int(j)) for i, j in pairs))


@dataclass(frozen=True)
class ObjectiveConfig:
    mode: str = "matrix"
    ansatz: str = "full"  # full | restricted | custom
    custom_layout: tuple[tuple[int, int], ...] = ()
    shots: int = 10_000  # per measurement group (circuit_sampled only)
    base_seed: int = 0
    parity: str = "auto"  # even | odd | auto (optimize searches both)
    allocation: str = "uniform"  # uniform | weighted shot allocation
    max_width: int = 25
    spsa_a: float = 0.2
    spsa_c: float = 0.15
    spsa_stability: float | None = None  # default: 10% of the iteration count
    restarts: int = 3
    jitter: float = 0.1

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {MODES}")
        if self.ansatz not in ("full", "restricted", "custom"):
            raise ValueError(f"unknown ansatz {self.ansatz!r}")
        if self.parity not in ("even", "odd", "auto"):
            raise ValueError(f"parity must be even/odd/auto, got {self.parity!r}")
        if self.allocation not in ("uniform", "weighted"):
            raise ValueError(f"unknown allocation {self.allocation!r}")
        if self.mode == "circuit_sampled" and self.shots < 1:
            raise ValueError("sampled mode needs shots >= 1")


def _ansatz_for(config: ObjectiveConfig, m: int) -> AnsatzSpec:
    if config.ansatz == "full":
        return full_ansatz(m)
    if config.ansatz == "restricted":
        return build_restricted_ansatz(m)
    return custom_ansatz(m, config.custom_layout)


class Objective:
    """Callable energy objective with per-instance precomputation.

    Evaluations are pure given (params, eval_index); the index feeds the
    derived sampling seeds so repeated calls can draw fresh shot noise
    deterministically.
    """

    def __init__(self, ham: QuadraticHamiltonian, config: ObjectiveConfig,
                 parity_flip: bool = False):
        self.ham = ham
        self.config = config
        self.parity_flip = parity_flip
        self.m = ham.m
        self.ansatz = _ansatz_for(config, self.m)
        self._vacuum = vacuum_covariance(ham.n)
        if config.mode != "matrix":
            self.plan = planner.build_plan(ham)
            prep = circuits.prep_purified_vacuum(self.m)
            self._width = prep.width
            self._prep_state = simulator.run(prep, max_width=config.max_width)
            self._diagonalizers = tuple(
                group.circuit.widened(self._width) for group in self.plan.groups)
            self._group_shots = self._allocate_shots()
        else:
            self.plan = None

    @property
    def num_params(self) -> int:
        return self.ansatz.num_params

    def _allocate_shots(self) -> tuple[int, ...]:
        groups = self.plan.groups
        if not groups:
            return ()
        if self.config.allocation == "uniform":
            return tuple(self.config.shots for _ in groups)
        total = self.config.shots * len(groups)
        loads = np.array([sum(abs(e.weight) for e in g.entries) for g in groups])
        shares = loads / loads.sum() if loads.sum() > 0 else np.full(len(groups), 1.0 / len(groups))
        return tuple(max(1, int(round(total * share))) for share in shares)

    def rotation_matrix(self, params: Sequence[float]) -> np.ndarray:
        """The composed 2n x 2n orthogonal matrix for the parameters."""
        if self.ansatz.kind == "restricted":
            params = np.asarray(params, dtype=float)
            if params.shape != (self.m,):
                raise ValueError(f"expected {self.m} parameters, got {params.shape}")
            blocks = [np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
                      for t in params]
            rot = reduce(np.kron, blocks)
            if self.parity_flip:
                rot = parity_flip_matrix(rot.shape[0]) @ rot
            return rot
        plan = self.ansatz.rotation_plan(params, self.parity_flip)
        return compose_rotation(plan, 2 * self.ham.n)

    def ansatz_circuit(self, params: Sequence[float]) -> circuits.Circuit:
        if self.ansatz.kind == "restricted":
            params = np.asarray(params, dtype=float)
            if params.shape != (self.m,):
                raise ValueError(f"expected {self.m} parameters, got {params.shape}")
            gates = [circuits.ry(k, 2.0 * float(t)) for k, t in enumerate(params)]
            if self.parity_flip:
                gates.append(circuits.controlled_x(tuple(range(self.m - 1)), self.m - 1))
            return circuits.Circuit(self.m, tuple(gates))
        plan = self.ansatz.rotation_plan(params, self.parity_flip)
        return circuits.compile_ansatz(plan, self.m)

    def parameter_planes(self, params: Sequence[float]) -> list[tuple[np.ndarray, np.ndarray, float]]:
        """Per parameter: (row indices, partner indices, angle) of the
        disjoint planes that parameter rotates (a single plane for the
        full/custom layouts, 2^(m-1) planes for the restricted ansatz)."""
        params = np.asarray(params, dtype=float)
        blocks = []
        if self.ansatz.kind == "restricted":
            for k, theta in enumerate(params):
                rotations = ry_givens_decomposition(k, self.m, float(theta))
                blocks.append((np.array([r.i for r in rotations]),
                               np.array([r.j for r in rotations]), float(theta)))
        else:
            for (i, j), theta in zip(self.ansatz.pairs, params):
                blocks.append((np.array([i]), np.array([j]), float(theta)))
        return blocks

    def evaluate(self, params: Sequence[float], eval_index: int = 0) -> tuple[float, float]:
        if self.config.mode == "matrix":
            gamma = rotate_covariance(self._vacuum, self.rotation_matrix(params))
            return energy_from_covariance(self.ham, gamma), 0.0
        state = simulator.run(self.ansatz_circuit(params).widened(self._width),
                              initial=self._prep_state, max_width=self.config.max_width)
        results: list[planner.GroupResult] = []
        for index, diag in enumerate(self._diagonalizers):
            measured = simulator.run(diag, initial=state, max_width=self.config.max_width)
            probs = simulator.system_probabilities(measured, self.m)
            if self.config.mode == "circuit_exact":
                results.append(probs)
            else:
                seed = (self.config.base_seed, _STREAM_SAMPLE, index, eval_index)
                results.append(simulator.sample(probs, self._group_shots[index], seed))
        return planner.estimate_energy(self.ham, self.plan, results)

    def __call__(self, params: Sequence[float], eval_index: int = 0) -> tuple[float, float]:
        return self.evaluate(params, eval_index)


def evaluate_objective(ham: QuadraticHamiltonian, params: Sequence[float],
                       config: ObjectiveConfig) -> tuple[float, float]:
    """One-shot evaluation; parity 'auto' falls back to the even sector."""
    parity_flip = config.parity == "odd"
    return Objective(ham, config, parity_flip).evaluate(params)


@dataclass(frozen=True)
class TracePoint:
    iteration: int
    energy: float
    step: float
    stderr: float = 0.0


@dataclass(frozen=True)
class OptimizationResult:
    best_params: np.ndarray
    best_energy: float
    best_stderr: float
    trace: tuple[TracePoint, ...]
    evaluations: int
    budget_exhausted: bool
    parity_flip: bool
    optimizer: str


class _BudgetExceeded(Exception):
    pass


class _Budget:
    """Shared evaluation counter; raises once the limit is hit."""

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0
        self.exhausted = False

    def tick(self) -> None:
        if self.used >= self.limit:
            self.exhausted = True
            raise _BudgetExceeded
        self.used += 1


def _plane_rotate(matrix: np.ndarray, rows_i: np.ndarray, rows_j: np.ndarray,
                  theta: float) -> np.ndarray:
    """G M G^T for the (possibly multi-plane) rotation G over disjoint planes."""
    c, s = np.cos(theta), np.sin(theta)
    out = matrix.copy()
    ri, rj = out[rows_i, :].copy(), out[rows_j, :]
    out[rows_i, :] = c * ri - s * rj
    out[rows_j, :] = s * ri + c * rj
    ci, cj = out[:, rows_i].copy(), out[:, rows_j]
    out[:, rows_i] = c * ci - s * cj
    out[:, rows_j] = s * ci + c * cj
    return out


# fast coordinate sweeps are skipped above this dimension to bound the
# memory of the per-parameter suffix-product table
_SWEEP_DIM_CAP = 64


class _MatrixSweep:
    """Incremental state for one coordinate-descent sweep in matrix mode.

    With R = S_k G_k(theta) P_k split around parameter k, the energy is
    (c/2) <S_k^T h S_k, G_k (P_k Gamma P_k^T) G_k^T>, so a line evaluation
    only rotates the cached prefix covariance in the parameter's planes.
    Suffix products are tabulated once per sweep (parameters after k still
    hold their sweep-start values); the prefix advances via commit().
    Indices must therefore be visited in order, committing each one
    (possibly with its unchanged angle) before moving to the next.
    """

    def __init__(self, objective: "Objective", params: np.ndarray):
        self.h = objective.ham.h
        dim = 2 * objective.ham.n
        self.blocks = objective.parameter_planes(params)
        suffix = parity_flip_matrix(dim) if objective.parity_flip else np.eye(dim)
        self.suffixes = [None] * len(self.blocks)
        for k in range(len(self.blocks) - 1, -1, -1):
            self.suffixes[k] = suffix
            rows_i, rows_j, theta = self.blocks[k]
            c, s = np.cos(theta), np.sin(theta)
            # append G_k on the right: rotate columns of the running product
            suffix = suffix.copy()
            ci, cj = suffix[:, rows_i].copy(), suffix[:, rows_j]
            suffix[:, rows_i] = c * ci + s * cj
            suffix[:, rows_j] = -s * ci + c * cj
        self.gamma_prefix = vacuum_covariance(objective.ham.n)

    def line(self, index: int) -> Callable[[float], float]:
        suffix = self.suffixes[index]
        h_rotated = suffix.T @ self.h @ suffix
        rows_i, rows_j, _ = self.blocks[index]
        gamma = self.gamma_prefix

        def fn1d(theta: float) -> float:
            rotated = _plane_rotate(gamma, rows_i, rows_j, theta)
            return float(0.5 * ENERGY_CONSTANT * np.sum(h_rotated * rotated))

        return fn1d

    def commit(self, index: int, theta: float) -> None:
        rows_i, rows_j, _ = self.blocks[index]
        self.gamma_prefix = _plane_rotate(self.gamma_prefix, rows_i, rows_j, theta)


_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_section(fn: Callable[[float], float], lo: float, hi: float,
                    tol: float) -> tuple[float, float]:
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = fn(c), fn(d)
    while (hi - lo) > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = fn(d)
    return (c, fc) if fc <= fd else (d, fd)


def _coordinate_descent(fn, x0: np.ndarray, budget: _Budget,
                        trace: list[TracePoint], iteration_base: int,
                        angle_tol: float = 1e-6,
                        sweep_factory=None) -> tuple[np.ndarray, float]:
    """Cyclic line searches; each 1-D subproblem is bracketed by a coarse
    scan over one 2*pi period and then refined by golden-section search.

    When the objective provides an incremental sweep context, line
    evaluations go through it (every such call still counts against the
    budget); otherwise the full objective is evaluated per trial angle.
    """
    x = x0.copy()
    energy = fn(x)
    sweep = 0
    try:
        while True:
            previous = energy
            max_step = 0.0
            context = sweep_factory(x) if sweep_factory is not None else None
            for index in range(x.size):
                theta0 = x[index]
                if context is not None:
                    line = context.line(index)

                    def fn1d(theta: float) -> float:
                        budget.tick()
                        return line(theta)
                else:
                    def fn1d(theta: float) -> float:
                        trial = x.copy()
                        trial[index] = theta
                        return fn(trial)

                try:
                    best_theta, best_value = theta0, energy
                    for offset in np.arange(-4, 4) * (np.pi / 4.0):
                        if offset == 0.0:
                            continue
                        value = fn1d(theta0 + offset)
                        if value < best_value:
                            best_theta, best_value = theta0 + offset, value
                    theta, value = _golden_section(
                        fn1d, best_theta - np.pi / 4.0, best_theta + np.pi / 4.0,
                        angle_tol)
                    if value < energy:
                        max_step = max(max_step, abs(theta - theta0))
                        x[index] = theta
                        energy = value
                finally:
                    if context is not None:
                        context.commit(index, float(x[index]))
            sweep += 1
            trace.append(TracePoint(iteration_base + sweep, energy, max_step))
            if previous - energy < SWEEP_TOL:
                break
    except _BudgetExceeded:
        pass
    return x, energy


def _nelder_mead(fn, x0: np.ndarray, budget: _Budget, trace: list[TracePoint],
                 iteration_base: int, scale: float = 0.1) -> tuple[np.ndarray, float]:
    """Standard reflect/expand/contract/shrink simplex."""
    dim = x0.size
    points = [x0.copy()] + [x0 + scale * basis for basis in np.eye(dim)]
    values = [fn(p) for p in points]
    iteration = 0
    try:
        while True:
            order = np.argsort(values)
            points = [points[i] for i in order]
            values = [values[i] for i in order]
            iteration += 1
            trace.append(TracePoint(iteration_base + iteration, values[0],
                                    float(np.linalg.norm(points[-1] - points[0]))))
            if values[-1] - values[0] < 1e-12:
                break
            centroid = np.mean(points[:-1], axis=0)
            reflected = centroid + (centroid - points[-1])
            f_reflected = fn(reflected)
            if f_reflected < values[0]:
                expanded = centroid + 2.0 * (centroid - points[-1])
                f_expanded = fn(expanded)
                if f_expanded < f_reflected:
                    points[-1], values[-1] = expanded, f_expanded
                else:
                    points[-1], values[-1] = reflected, f_reflected
            elif f_reflected < values[-2]:
                points[-1], values[-1] = reflected, f_reflected
            else:
                contracted = centroid + 0.5 * (points[-1] - centroid)
                f_contracted = fn(contracted)
                if f_contracted < values[-1]:
                    points[-1], values[-1] = contracted, f_contracted
                else:
                    points = [points[0]] + [points[0] + 0.5 * (p - points[0])
                                            for p in points[1:]]
                    values = [values[0]] + [fn(p) for p in points[1:]]
    except _BudgetExceeded:
        pass
    best = int(np.argmin(values))
    return points[best], values[best]


def _spsa(fn, x0: np.ndarray, budget: _Budget, trace: list[TracePoint],
          iteration_base: int, rng: np.random.Generator,
          a: float, c: float, stability: float,
          noisy: bool) -> tuple[np.ndarray, float]:
    """Simultaneous-perturbation steps with the standard decaying gains
    a_k = a / (k + 1 + A)^0.602 and c_k = c / (k + 1)^0.101.

    For noisy objectives the final iterate is returned (picking the
    minimum of noisy evaluations would be biased); for exact objectives
    the best evaluated point is returned.
    """
    x = x0.copy()
    best_x, best_f = x.copy(), np.inf
    last = np.inf
    k = 0
    try:
        while True:
            a_k = a / (k + 1.0 + stability) ** 0.602
            c_k = c / (k + 1.0) ** 0.101
            delta = rng.integers(0, 2, size=x.size) * 2.0 - 1.0
            f_plus = fn(x + c_k * delta)
            f_minus = fn(x - c_k * delta)
            gradient = (f_plus - f_minus) / (2.0 * c_k) * delta
            if f_plus < best_f:
                best_x, best_f = x + c_k * delta, f_plus
            if f_minus < best_f:
                best_x, best_f = x - c_k * delta, f_minus
            last = min(f_plus, f_minus)
            x = x - a_k * gradient
            k += 1
            trace.append(TracePoint(iteration_base + k, last,
                                    float(a_k * np.linalg.norm(gradient))))
    except _BudgetExceeded:
        pass
    if noisy:
        return x, last
    return best_x, best_f


def optimize(ham: QuadraticHamiltonian, config: ObjectiveConfig,
             optimizer: str = "coordinate_descent",
             budget: int = 200_000) -> OptimizationResult:
    """Minimize the objective; deterministic given (config, base_seed).

    With parity 'auto' the even and odd sectors are optimized separately
    (half the budget each) and the better result is returned.  Restarts
    reuse whatever budget remains, jittering the zero start uniformly in
    (-jitter, +jitter).
    """
    if optimizer not in OPTIMIZERS:
        raise ValueError(f"unknown optimizer {optimizer!r}; choose from {OPTIMIZERS}")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    sectors = (False, True) if config.parity == "auto" else (config.parity == "odd",)

    sampled = config.mode == "circuit_sampled"
    overall = None
    trace: list[TracePoint] = []
    evaluations = 0
    exhausted = False

    for sector_index, parity_flip in enumerate(sectors):
        # an early-converging sector hands its leftover budget to the next
        sector_budget = max(1, (budget - evaluations) // (len(sectors) - sector_index))
        objective = Objective(ham, config, parity_flip)
        budget_counter = _Budget(sector_budget)
        eval_counter = [0]
        best_seen: list = [None, np.inf]

        def fn(params: np.ndarray) -> float:
            budget_counter.tick()
            eval_counter[0] += 1
            value = objective.evaluate(params, eval_index=eval_counter[0])[0]
            if not sampled and value < best_seen[1]:
                best_seen[0], best_seen[1] = np.array(params, dtype=float), value
            return value

        zeros = np.zeros(objective.num_params)
        attempt = 0
        while True:
            if attempt == 0:
                x0 = zeros
            else:
                jitter_rng = simulator.rng_for(
                    (config.base_seed, _STREAM_JITTER, sector_index, attempt))
                x0 = jitter_rng.uniform(-config.jitter, config.jitter,
                                        size=objective.num_params)
            sweep_factory = None
            if (optimizer == "coordinate_descent" and config.mode == "matrix"
                    and 2 * ham.n <= _SWEEP_DIM_CAP):
                sweep_factory = lambda params: _MatrixSweep(objective, params)  # noqa: E731
            start = len(trace)
            try:
                if optimizer == "coordinate_descent":
                    x, value = _coordinate_descent(fn, x0, budget_counter, trace, start,
                                                   sweep_factory=sweep_factory)
                elif optimizer == "nelder_mead_like":
                    x, value = _nelder_mead(fn, x0, budget_counter, trace, start)
                else:
                    spsa_rng = simulator.rng_for(
                        (config.base_seed, _STREAM_SPSA, sector_index, attempt))
                    iterations = max(1, (sector_budget - budget_counter.used) // 2)
                    stability = (config.spsa_stability if config.spsa_stability is not None
                                 else 0.1 * iterations)
                    x, value = _spsa(fn, x0, budget_counter, trace, start, spsa_rng,
                                     config.spsa_a, config.spsa_c, stability, sampled)
            except _BudgetExceeded:
                x, value = x0, np.inf
            if not sampled and best_seen[0] is not None and best_seen[1] < value:
                x, value = best_seen[0], best_seen[1]
            if overall is None or value < overall[1]:
                overall = (x, value, parity_flip)
            attempt += 1
            if budget_counter.exhausted or attempt > config.restarts:
                break
        evaluations += budget_counter.used
        exhausted = exhausted or budget_counter.exhausted

    best_x, best_value, best_parity = overall
    best_stderr = 0.0
    if sampled:
        # re-estimate at the final point so the reported value carries its
        # own fresh shot noise and standard error
        final = Objective(ham, config, best_parity)
        best_value, best_stderr = final.evaluate(best_x, eval_index=evaluations + 1)
        evaluations += 1
    return OptimizationResult(
        best_params=np.asarray(best_x), best_energy=float(best_value),
        best_stderr=float(best_stderr), trace=tuple(trace),
        evaluations=evaluations, budget_exhausted=exhausted,
        parity_flip=best_parity, optimizer=optimizer)
