"""Measurement planning and the covariance-entry estimator.

A plan assigns every nonzero strictly-upper entry of h to the unique
commuting set whose support contains it, yielding one measurement group
per distinct axis pattern.  Each group carries its diagonalizer circuit
and, per entry, the weight h[k, l] and the conjugation sign, so that a
single outcome distribution per group estimates all of the group's
covariance entries via ``gamma[k, l] = sign * n * (P(l) - P(k))``.

Groups are derived from the actual sparsity of h, never from the model's
name; the logarithmic group counts for nearest-neighbour models are
checked as theorems in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import circuits
from .gaussian import ENERGY_CONSTANT
from .models import QuadraticHamiltonian
from .pauli import AxisPattern, set_of_element, support_of_set
from .simulator import ShotCounts


@dataclass(frozen=True)
class PlanEntry:
    k: int
    l: int
    weight: float
    sign: int


@dataclass(frozen=True)
class PlanGroup:
    pattern: AxisPattern
    circuit: circuits.Circuit
    entries: tuple[PlanEntry, ...]


@dataclass(frozen=True)
class MeasurementPlan:
    groups: tuple[PlanGroup, ...]
    includes_diagonal_set: bool


@dataclass(frozen=True)
class EntryEstimate:
    k: int
    l: int
    value: float
    stderr: float = 0.0


GroupResult = Union[np.ndarray, ShotCounts]


def _pattern_order_key(pattern: AxisPattern) -> int:
    return sum(1 << i for i, ax in enumerate(pattern.axes) if ax == "A")


def build_plan(ham: QuadraticHamiltonian) -> MeasurementPlan:
    """One group per distinct pattern among the nonzero upper entries of h."""
    m = ham.m
    by_pattern: dict[str, list[PlanEntry]] = {}
    rows, cols = np.nonzero(np.triu(ham.h, 1))
    for k, l in zip(rows.tolist(), cols.tolist()):
        pattern = set_of_element(k, l, m)
        sign = circuits.diagonalizer_sign(pattern, k, l)
        by_pattern.setdefault(pattern.axes, []).append(
            PlanEntry(k, l, float(ham.h[k, l]), sign))
    diagonal_axes = "D" * (m - 1) + "A"
    groups = []
    for axes in sorted(by_pattern, key=lambda a: _pattern_order_key(AxisPattern(a))):
        pattern = AxisPattern(axes)
        entries = tuple(sorted(by_pattern[axes], key=lambda e: (e.k, e.l)))
        groups.append(PlanGroup(pattern, circuits.diagonalizer(pattern), entries))
    return MeasurementPlan(tuple(groups), diagonal_axes in by_pattern)


def _distribution(group: PlanGroup, result: GroupResult) -> tuple[np.ndarray, int]:
    """Normalize a group result to (probability vector, shots); shots=0 is exact."""
    dim = 1 << len(group.pattern)
    if isinstance(result, ShotCounts):
        return result.probabilities(dim), result.shots
    probs = np.asarray(result, dtype=float)
    if probs.shape != (dim,):
        raise ValueError(f"expected {dim} outcome probabilities, got shape {probs.shape}")
    if abs(probs.sum() - 1.0) > 1e-8:
        raise ValueError(f"probabilities sum to {probs.sum()!r}")
    return probs, 0


def estimate_entries(group: PlanGroup, result: GroupResult) -> list[EntryEstimate]:
    """Covariance estimates gamma[k, l] = sign * n * (P(l) - P(k)).

    With shot counts, each estimate carries the binomial standard error
    ``n * sqrt((P(l)(1-P(l)) + P(k)(1-P(k))) / shots)``.
    """
    probs, shots = _distribution(group, result)
    n = 1 << (len(group.pattern) - 1)
    out = []
    for entry in group.entries:
        pk, pl = probs[entry.k], probs[entry.l]
        value = entry.sign * n * (pl - pk)
        stderr = 0.0
        if shots:
            stderr = n * np.sqrt((pl * (1.0 - pl) + pk * (1.0 - pk)) / shots)
        out.append(EntryEstimate(entry.k, entry.l, float(value), float(stderr)))
    return out


def _entry_variance(pk: float, pl: float, n: int, shots: int) -> float:
    # multinomial: Var(P_l - P_k) = [pl(1-pl) + pk(1-pk) + 2 pk pl] / shots
    return n * n * (pl * (1.0 - pl) + pk * (1.0 - pk) + 2.0 * pk * pl) / shots


def estimate_energy(ham: QuadraticHamiltonian, plan: MeasurementPlan,
                    results: Sequence[GroupResult]) -> tuple[float, float]:
    """Energy from one outcome distribution per plan group.

    Exact probability vectors reproduce the covariance-matrix energy;
    shot counts additionally propagate per-entry multinomial variances in
    quadrature (entries treated as independent across and within groups,
    except for the P(k)/P(l) covariance inside one entry).
    """
    if len(results) != len(plan.groups):
        raise ValueError(f"plan has {len(plan.groups)} groups, got {len(results)} results")
    energy = 0.0
    variance = 0.0
    for group, result in zip(plan.groups, results):
        probs, shots = _distribution(group, result)
        n = 1 << (len(group.pattern) - 1)
        for entry in group.entries:
            pk, pl = probs[entry.k], probs[entry.l]
            gamma_hat = entry.sign * n * (pl - pk)
            energy += ENERGY_CONSTANT * entry.weight * gamma_hat
            if shots:
                variance += (ENERGY_CONSTANT * entry.weight) ** 2 * \
                    _entry_variance(pk, pl, n, shots)
    return float(energy), float(np.sqrt(variance))


def plan_to_json(plan: MeasurementPlan) -> dict:
    """JSON-ready summary: pattern strings, entries, signs and weights."""
    return {
        "group_count": len(plan.groups),
        "includes_diagonal_set": plan.includes_diagonal_set,
        "groups": [
            {
                "pattern": group.pattern.axes,
                "entries": [
                    {"k": e.k, "l": e.l, "weight": e.weight, "sign": e.sign}
                    for e in group.entries
                ],
            }
            for group in plan.groups
        ],
    }
