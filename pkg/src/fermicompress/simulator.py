"""Deterministic statevector engine with seeded shot sampling.

Amplitude indexing follows the package convention: qubit 0 is the most
significant bit of the basis-state index, so the system register (qubits
0..m-1) occupies the leading bits and marginal probabilities over it are
contiguous block sums.

Randomness comes exclusively from numpy's Philox counter-based generator
(``numpy.random.Philox``), seeded through ``SeedSequence``; identical
(probabilities, shots, seed) triples give identical counts on every
platform.  Reference outputs are pinned in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .circuits import Circuit, Gate, base_matrix

DEFAULT_MAX_WIDTH = 24
NORM_TOL = 1e-10

Seed = Union[int, Sequence[int]]


def rng_for(seed: Seed) -> np.random.Generator:
    """Philox generator for an integer seed or a (seed, stream...) tuple."""
    if isinstance(seed, (int, np.integer)):
        sequence = np.random.SeedSequence(int(seed))
    else:
        parts = [int(p) for p in seed]
        sequence = np.random.SeedSequence(parts[0], spawn_key=tuple(parts[1:]))
    return np.random.Generator(np.random.Philox(sequence))


def zero_state(width: int) -> np.ndarray:
    state = np.zeros(1 << width, dtype=complex)
    state[0] = 1.0
    return state


def _apply_gate(state: np.ndarray, gate: Gate, width: int) -> None:
    """In-place application of a (possibly controlled) one-target gate."""
    view = state.reshape((2,) * width)
    selector = [slice(None)] * width
    for c in gate.controls:
        selector[c] = 1
    sub = view[tuple(selector)]
    target = gate.targets[0]
    axis = target - sum(1 for c in gate.controls if c < target)
    lead = (slice(None),) * axis
    s0 = sub[lead + (0,)]
    s1 = sub[lead + (1,)]
    u = base_matrix(gate)
    new0 = u[0, 0] * s0 + u[0, 1] * s1
    new1 = u[1, 0] * s0 + u[1, 1] * s1
    sub[lead + (0,)] = new0
    sub[lead + (1,)] = new1


def run(circuit: Circuit, initial: np.ndarray | None = None,
        max_width: int = DEFAULT_MAX_WIDTH) -> np.ndarray:
    """Apply the circuit's gates in order; returns a fresh state vector."""
    if circuit.width > max_width:
        raise ValueError(f"circuit width {circuit.width} exceeds cap {max_width}")
    if initial is None:
        state = zero_state(circuit.width)
    else:
        state = np.asarray(initial, dtype=complex)
        if state.shape != (1 << circuit.width,):
            raise ValueError(f"initial state has {state.shape[0]} amplitudes, "
                             f"expected {1 << circuit.width}")
        state = state.copy()
    for gate in circuit.gates:
        _apply_gate(state, gate, circuit.width)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > NORM_TOL:
        raise RuntimeError(f"norm drifted to {norm!r} after {len(circuit.gates)} gates")
    return state


def circuit_unitary(circuit: Circuit, max_width: int = 6) -> np.ndarray:
    """Dense unitary, column by column (test utility for small widths)."""
    if circuit.width > max_width:
        raise ValueError(f"dense unitary capped at width {max_width}")
    dim = 1 << circuit.width
    out = np.empty((dim, dim), dtype=complex)
    for col in range(dim):
        basis = np.zeros(dim, dtype=complex)
        basis[col] = 1.0
        out[:, col] = run(circuit, initial=basis, max_width=max_width)
    return out


def system_probabilities(state: np.ndarray, m: int) -> np.ndarray:
    """Marginal outcome probabilities on the system register (qubits 0..m-1)."""
    total = state.shape[0]
    dim = 1 << m
    if total % dim:
        raise ValueError(f"state of {total} amplitudes has no {m}-qubit system register")
    probs = np.abs(state) ** 2
    return probs.reshape(dim, total // dim).sum(axis=1)


def reduced_system_density(state: np.ndarray, m: int) -> np.ndarray:
    """Exact reduced density matrix of the system register (ancillas traced)."""
    total = state.shape[0]
    dim = 1 << m
    if total % dim:
        raise ValueError(f"state of {total} amplitudes has no {m}-qubit system register")
    block = state.reshape(dim, total // dim)
    return block @ block.conj().T


@dataclass(frozen=True)
class ShotCounts:
    """Multinomial outcome counts keyed by basis-state index."""

    counts: dict[int, int]
    shots: int

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts must sum to shots")

    def probabilities(self, dim: int) -> np.ndarray:
        probs = np.zeros(dim)
        for outcome, count in self.counts.items():
            probs[outcome] = count / self.shots
        return probs


def sample(probabilities: np.ndarray, shots: int, seed: Seed) -> ShotCounts:
    """Seeded multinomial draw from the given outcome distribution."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = np.asarray(probabilities, dtype=float)
    total = probs.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"probabilities sum to {total!r}, not 1")
    if probs.min() < -1e-12:
        raise ValueError("negative probability")
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    drawn = rng_for(seed).multinomial(shots, probs)
    counts = {int(i): int(c) for i, c in enumerate(drawn) if c > 0}
    return ShotCounts(counts, shots)
