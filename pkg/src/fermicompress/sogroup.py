"""Givens rotations and their composition into SO(2n) elements.

A rotation plan lists Givens rotations in *application order*: the
composed matrix is ``R = G_last ... G_first``.  Proper rotations
(det +1) preserve fermion parity; flipping parity appends one improper
factor, realized as the permutation that swaps the last two basis
indices (compiled to a fully-controlled X in circuit form).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GivensRotation:
    """Planar rotation by theta in the (i, j) coordinate plane, i < j."""

    i: int
    j: int
    theta: float

    def __post_init__(self) -> None:
        if not (0 <= self.i < self.j):
            raise ValueError(f"need 0 <= i < j, got ({self.i}, {self.j})")


@dataclass(frozen=True)
class RotationPlan:
    rotations: tuple[GivensRotation, ...]
    parity_flip: bool = False


def givens_matrix(i: int, j: int, theta: float, dim: int) -> np.ndarray:
    """Identity except rows/columns i, j carrying [[cos, -sin], [sin, cos]]."""
    if not (0 <= i < j < dim):
        raise ValueError(f"need 0 <= i < j < {dim}, got ({i}, {j})")
    out = np.eye(dim)
    c, s = np.cos(theta), np.sin(theta)
    out[i, i] = c
    out[i, j] = -s
    out[j, i] = s
    out[j, j] = c
    return out


def parity_flip_matrix(dim: int) -> np.ndarray:
    """The improper (det -1) factor: swap of the last two basis indices."""
    if dim < 2:
        raise ValueError("parity flip needs dim >= 2")
    out = np.eye(dim)
    out[dim - 2:, dim - 2:] = [[0.0, 1.0], [1.0, 0.0]]
    return out


def compose_rotation(plan: RotationPlan, dim: int) -> np.ndarray:
    """Ordered product of the plan's rotations (first rotation acts first)."""
    out = np.eye(dim)
    for rot in plan.rotations:
        if rot.j >= dim:
            raise ValueError(f"rotation ({rot.i}, {rot.j}) out of dimension {dim}")
        c, s = np.cos(rot.theta), np.sin(rot.theta)
        rows = out[[rot.i, rot.j], :]
        out[rot.i, :] = c * rows[0] - s * rows[1]
        out[rot.j, :] = s * rows[0] + c * rows[1]
    if plan.parity_flip:
        out[[dim - 2, dim - 1], :] = out[[dim - 1, dim - 2], :]
    return out


def full_parameter_layout(m: int) -> tuple[tuple[int, int], ...]:
    """All n(2n-1) planes (i, j), i < j, over dim 2n = 2^m, lexicographic."""
    if m < 1:
        raise ValueError("qubit count must be >= 1")
    dim = 1 << m
    return tuple((i, j) for i in range(dim) for j in range(i + 1, dim))


def ry_rotation_matrix(k: int, m: int, theta: float) -> np.ndarray:
    """Kronecker-product matrix of the rotation [[cos,-sin],[sin,cos]] on qubit k."""
    if not (0 <= k < m):
        raise ValueError(f"qubit index {k} out of range for m={m}")
    c, s = np.cos(theta), np.sin(theta)
    r2 = np.array([[c, -s], [s, c]])
    return np.kron(np.kron(np.eye(1 << k), r2), np.eye(1 << (m - k - 1)))


def ry_givens_decomposition(k: int, m: int, theta: float) -> tuple[GivensRotation, ...]:
    """The 2^(m-1) disjoint-plane Givens rotations equal to an RY on qubit k.

    A rotation by theta of qubit k mixes every basis-index pair that
    differs only in bit k, i.e. the planes (x, x + 2^(m-k-1)) for all x
    with that bit clear.  The rotations commute, so their product in any
    order reproduces the Kronecker matrix exactly.
    """
    if not (0 <= k < m):
        raise ValueError(f"qubit index {k} out of range for m={m}")
    step = 1 << (m - k - 1)
    rotations = []
    for i in range(1 << k):
        for j in range(step):
            base = i * (step << 1) + j
            rotations.append(GivensRotation(base, base + step, theta))
    return tuple(rotations)
