"""Pauli-word algebra for antisymmetric operators on a compressed register.

A real antisymmetric 2^m x 2^m matrix expands over Pauli words with an odd
number of Y letters.  Grouping the letters per qubit into D = {I, Z}
(diagonal) and A = {X, Y} (antidiagonal) splits those words into 2^m - 1
mutually commuting sets of 2^(m-1) words each, one set per *axis pattern*:
a length-m string over {D, A} with at least one A position.

Index convention, used package-wide: qubit 0 is the most significant bit
of matrix row/column indices.  A word whose pattern is p then has nonzero
matrix entries exactly at index pairs (k, l) whose bits agree at the D
positions of p and differ at the A positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Union

import numpy as np

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

DEFAULT_DENSE_QUBIT_CAP = 6


@dataclass(frozen=True)
class PauliWord:
    """An m-qubit Pauli word, e.g. ``PauliWord("XY")``."""

    letters: str

    def __post_init__(self) -> None:
        if len(self.letters) < 1:
            raise ValueError("Pauli word must have at least one letter")
        bad = set(self.letters) - set("IXYZ")
        if bad:
            raise ValueError(f"invalid Pauli letters: {sorted(bad)!r}")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return self.letters

    @property
    def y_count(self) -> int:
        return self.letters.count("Y")


@dataclass(frozen=True)
class AxisPattern:
    """A length-m string over {D, A} naming one commuting set, e.g. "AD"."""

    axes: str

    def __post_init__(self) -> None:
        if len(self.axes) < 1:
            raise ValueError("axis pattern must have at least one position")
        bad = set(self.axes) - set("DA")
        if bad:
            raise ValueError(f"invalid axis labels: {sorted(bad)!r}")
        if "A" not in self.axes:
            raise ValueError("all-D pattern contains no antisymmetric word")

    def __len__(self) -> int:
        return len(self.axes)

    def __str__(self) -> str:
        return self.axes

    @property
    def a_positions(self) -> tuple[int, ...]:
        return tuple(i for i, ax in enumerate(self.axes) if ax == "A")


@dataclass(frozen=True)
class CommutingSet:
    """One axis pattern together with its n = 2^(m-1) odd-Y words."""

    pattern: AxisPattern
    words: tuple[PauliWord, ...]


WordLike = Union[PauliWord, str]
PatternLike = Union[AxisPattern, str]


def _letters(word: WordLike) -> str:
    return word.letters if isinstance(word, PauliWord) else PauliWord(word).letters


def _axes(pattern: PatternLike) -> str:
    return pattern.axes if isinstance(pattern, AxisPattern) else AxisPattern(pattern).axes


def commutes(p: WordLike, q: WordLike) -> bool:
    """True iff the two equal-length words commute.

    Two words commute exactly when the number of positions where the
    single-qubit letters anticommute (both non-identity and different)
    is even.
    """
    a, b = _letters(p), _letters(q)
    if len(a) != len(b):
        raise ValueError(f"word lengths differ: {len(a)} vs {len(b)}")
    odd_sites = sum(1 for x, y in zip(a, b) if x != "I" and y != "I" and x != y)
    return odd_sites % 2 == 0


def pattern_of_word(word: WordLike) -> AxisPattern:
    """The axis pattern a word belongs to (I, Z -> D; X, Y -> A)."""
    return AxisPattern("".join("D" if c in "IZ" else "A" for c in _letters(word)))


def words_of_set(pattern: PatternLike) -> tuple[PauliWord, ...]:
    """All odd-Y words matching the pattern.

    Words are ordered by the integer encoding of their letter choices
    (D site: I=0, Z=1; A site: X=0, Y=1; position 0 most significant).
    """
    axes = _axes(pattern)
    m = len(axes)
    out = []
    for choice in range(1 << m):
        letters = []
        y_count = 0
        for pos, ax in enumerate(axes):
            bit = (choice >> (m - 1 - pos)) & 1
            if ax == "D":
                letters.append("Z" if bit else "I")
            else:
                letters.append("Y" if bit else "X")
                y_count += bit
        if y_count % 2 == 1:
            out.append(PauliWord("".join(letters)))
    return tuple(out)


def enumerate_commuting_sets(m: int) -> tuple[CommutingSet, ...]:
    """The 2^m - 1 commuting sets on m qubits, one per axis pattern."""
    if m < 1:
        raise ValueError("qubit count must be >= 1")
    sets = []
    for mask in range(1, 1 << m):
        axes = "".join("A" if (mask >> i) & 1 else "D" for i in range(m))
        pattern = AxisPattern(axes)
        sets.append(CommutingSet(pattern, words_of_set(pattern)))
    return tuple(sets)


def support_of_set(pattern: PatternLike) -> tuple[tuple[int, int], ...]:
    """Strictly-upper matrix positions populated by the pattern's words.

    Reading the pattern left to right selects diagonal (D) or antidiagonal
    (A) subblocks of the 2^m x 2^m matrix, starting from the outermost
    2x2 block structure.  Equivalently: indices k and l pair up when they
    agree at D bit-positions and differ at A bit-positions, i.e.
    l = k XOR mask(A).  Returns the n pairs with k < l, sorted by k.
    """
    axes = _axes(pattern)
    m = len(axes)
    amask = 0
    for pos, ax in enumerate(axes):
        if ax == "A":
            amask |= 1 << (m - 1 - pos)
    return tuple((k, k ^ amask) for k in range(1 << m) if k < (k ^ amask))


def set_of_element(k: int, l: int, m: int) -> AxisPattern:
    """The unique pattern whose support contains matrix position (k, l).

    Inverse of :func:`support_of_set`: the path through the subblock
    recursion is read off the bits where k and l differ.
    """
    dim = 1 << m
    if not (0 <= k < l < dim):
        raise ValueError(f"need 0 <= k < l < {dim}, got ({k}, {l})")
    diff = k ^ l
    axes = "".join("A" if (diff >> (m - 1 - pos)) & 1 else "D" for pos in range(m))
    return AxisPattern(axes)


def word_matrix(word: WordLike, max_qubits: int = DEFAULT_DENSE_QUBIT_CAP) -> np.ndarray:
    """Dense matrix of a word (Kronecker product, qubit 0 leftmost)."""
    letters = _letters(word)
    if len(letters) > max_qubits:
        raise ValueError(f"dense matrix capped at {max_qubits} qubits, got {len(letters)}")
    return reduce(np.kron, (PAULI_MATRICES[c] for c in letters))
