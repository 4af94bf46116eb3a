"""Quadratic fermionic Hamiltonians and the exact-diagonalization oracle.

Every model is stored as ``H = i * sum_{j != k} h[j, k] g_j g_k`` where the
``g``'s are Majorana operators ({g_j, g_k} = 2 delta_{jk}) and ``h`` is a
real antisymmetric 2n x 2n matrix.  Conventions fixed here and validated
against the brute-force oracle:

* fermionic modes: ``c_j = (g_{2j} + i g_{2j+1}) / 2``
* Jordan-Wigner:   ``g_{2j} = Z^(j) X_j``, ``g_{2j+1} = Z^(j) Y_j``
  (Z string on sites 0..j-1, then X or Y on site j)
* the qubit |0> of site j is the empty orbital, so |0...0> is the Fock
  vacuum and its covariance matrix has <i g_{2j} g_{2j+1}> = +1.

2D models use row-major indexing: the orbital at grid cell (r, c) of a
p x q grid is ``r*q + c``.  With p and q powers of two the row and column
bits of an orbital index occupy separate bit fields, which is what keeps
the number of measurement groups logarithmic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .pauli import PauliWord

TIGHT_BINDING_1D = "tight_binding_1d"
TIGHT_BINDING_2D = "tight_binding_2d"
KITAEV_WIRE = "kitaev_wire"
TRANSVERSE_ISING = "transverse_ising"

MODEL_KINDS = (TIGHT_BINDING_1D, TIGHT_BINDING_2D, KITAEV_WIRE, TRANSVERSE_ISING)

_ALLOWED_COUPLINGS = {
    TIGHT_BINDING_1D: {"t", "mu"},
    TIGHT_BINDING_2D: {"t", "mu"},
    KITAEV_WIRE: {"t", "delta", "mu"},
    TRANSVERSE_ISING: {"j", "g"},
}

DEFAULT_BRUTE_FORCE_MAX_N = 12


def _is_power_of_two(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """n orbitals plus the real antisymmetric coefficient matrix h (2n x 2n)."""

    n: int
    h: np.ndarray

    def __post_init__(self) -> None:
        if not _is_power_of_two(self.n):
            raise ValueError(f"orbital count must be a power of two, got {self.n}")
        h = np.asarray(self.h, dtype=float)
        if h.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"h must be {2 * self.n}x{2 * self.n}, got {h.shape}")
        if not np.array_equal(h, -h.T):
            raise ValueError("h must be exactly antisymmetric")
        h = h.copy()
        h.flags.writeable = False
        object.__setattr__(self, "h", h)

    @property
    def m(self) -> int:
        """Compressed qubit count: 2n = 2^m."""
        return self.n.bit_length()  # n = 2^(m-1)


@dataclass(frozen=True)
class ModelSpec:
    """Named model family, couplings, geometry and boundary condition."""

    kind: str
    couplings: Mapping[str, float] = field(default_factory=dict)
    n: int | None = None
    rows: int | None = None
    cols: int | None = None
    boundary: str = "open"
    pad: bool = False

    def __post_init__(self) -> None:
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; choose from {MODEL_KINDS}")
        unknown = set(self.couplings) - _ALLOWED_COUPLINGS[self.kind]
        if unknown:
            raise ValueError(f"unknown couplings for {self.kind}: {sorted(unknown)}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")
        if self.kind == TIGHT_BINDING_2D:
            if self.rows is None or self.cols is None:
                raise ValueError("2D model needs rows and cols")
        elif self.n is None:
            raise ValueError(f"{self.kind} needs an orbital count n")


def _acc(h: np.ndarray, a: int, b: int, value: float) -> None:
    """Accumulate h[a, b] += value antisymmetrically."""
    h[a, b] += value
    h[b, a] -= value


def _add_hopping(h: np.ndarray, j: int, k: int, t: float) -> None:
    """-t (c_j^+ c_k + c_k^+ c_j); symmetric in j <-> k."""
    _acc(h, 2 * j, 2 * k + 1, -t / 4.0)
    _acc(h, 2 * k, 2 * j + 1, -t / 4.0)


def _add_pairing(h: np.ndarray, j: int, k: int, delta: float) -> None:
    """delta (c_j c_k + c_k^+ c_j^+); antisymmetric in j <-> k."""
    _acc(h, 2 * j, 2 * k + 1, delta / 4.0)
    _acc(h, 2 * j + 1, 2 * k, delta / 4.0)


def _add_chemical(h: np.ndarray, j: int, mu: float) -> None:
    """-mu c_j^+ c_j, dropping the constant -mu/2."""
    _acc(h, 2 * j, 2 * j + 1, -mu / 4.0)


def _add_ising_bond(h: np.ndarray, j: int, k: int, coupling: float) -> None:
    """-J X_j X_k for adjacent sites: i J g_{2j+1} g_{2k}."""
    _acc(h, 2 * j + 1, 2 * k, coupling / 2.0)


def _add_ising_field(h: np.ndarray, j: int, g: float) -> None:
    """-g Z_j: i g g_{2j} g_{2j+1}."""
    _acc(h, 2 * j, 2 * j + 1, g / 2.0)


def _padded_size(n_phys: int, pad: bool, what: str) -> int:
    if _is_power_of_two(n_phys):
        return n_phys
    if not pad:
        raise ValueError(
            f"{what} {n_phys} is not a power of two; enable pad=True to add decoupled orbitals"
        )
    return 1 << (n_phys - 1).bit_length()


def build_model(spec: ModelSpec) -> QuadraticHamiltonian:
    """Construct the coefficient matrix h for a model specification."""
    c = dict(spec.couplings)
    periodic = spec.boundary == "periodic"

    if spec.kind == TIGHT_BINDING_2D:
        p_phys, q_phys = spec.rows, spec.cols
        if p_phys < 1 or q_phys < 1:
            raise ValueError("grid dimensions must be >= 1")
        p = _padded_size(p_phys, spec.pad, "row count")
        q = _padded_size(q_phys, spec.pad, "column count")
        n = p * q
        h = np.zeros((2 * n, 2 * n))
        t, mu = c.get("t", 1.0), c.get("mu", 0.0)

        def orb(r: int, col: int) -> int:
            return r * q + col

        for r in range(p_phys):
            for col in range(q_phys):
                if mu != 0.0:
                    _add_chemical(h, orb(r, col), mu)
                if col + 1 < q_phys:
                    _add_hopping(h, orb(r, col), orb(r, col + 1), t)
                if r + 1 < p_phys:
                    _add_hopping(h, orb(r, col), orb(r + 1, col), t)
        if periodic:
            if q_phys > 2:
                for r in range(p_phys):
                    _add_hopping(h, orb(r, q_phys - 1), orb(r, 0), t)
            if p_phys > 2:
                for col in range(q_phys):
                    _add_hopping(h, orb(p_phys - 1, col), orb(0, col), t)
        return QuadraticHamiltonian(n, h)

    n_phys = spec.n
    if n_phys < 1:
        raise ValueError("orbital count must be >= 1")
    n = _padded_size(n_phys, spec.pad, "orbital count")
    h = np.zeros((2 * n, 2 * n))
    bonds = [(j, j + 1) for j in range(n_phys - 1)]
    # a wrap bond on a 2-site ring would duplicate the (0, 1) bond; skip it
    if periodic and n_phys > 2:
        bonds.append((n_phys - 1, 0))

    if spec.kind == TIGHT_BINDING_1D:
        t, mu = c.get("t", 1.0), c.get("mu", 0.0)
        for j, k in bonds:
            _add_hopping(h, j, k, t)
        if mu != 0.0:
            for j in range(n_phys):
                _add_chemical(h, j, mu)
    elif spec.kind == KITAEV_WIRE:
        t, delta, mu = c.get("t", 1.0), c.get("delta", 1.0), c.get("mu", 0.0)
        for j, k in bonds:
            _add_hopping(h, j, k, t)
            _add_pairing(h, j, k, delta)
        if mu != 0.0:
            for j in range(n_phys):
                _add_chemical(h, j, mu)
    elif spec.kind == TRANSVERSE_ISING:
        jx, g = c.get("j", 1.0), c.get("g", 1.0)
        for j, k in bonds:
            _add_ising_bond(h, j, k, jx)
        if g != 0.0:
            for j in range(n_phys):
                _add_ising_field(h, j, g)
    else:  # pragma: no cover - guarded by ModelSpec
        raise ValueError(spec.kind)
    return QuadraticHamiltonian(n, h)


def tight_binding_1d(n: int, t: float = 1.0, mu: float = 0.0,
                     boundary: str = "open", pad: bool = False) -> QuadraticHamiltonian:
    return build_model(ModelSpec(TIGHT_BINDING_1D, {"t": t, "mu": mu}, n=n,
                                 boundary=boundary, pad=pad))


def tight_binding_2d(rows: int, cols: int, t: float = 1.0, mu: float = 0.0,
                     boundary: str = "open", pad: bool = False) -> QuadraticHamiltonian:
    return build_model(ModelSpec(TIGHT_BINDING_2D, {"t": t, "mu": mu},
                                 rows=rows, cols=cols, boundary=boundary, pad=pad))


def kitaev_wire(n: int, t: float = 1.0, delta: float = 1.0, mu: float = 0.0,
                boundary: str = "open", pad: bool = False) -> QuadraticHamiltonian:
    return build_model(ModelSpec(KITAEV_WIRE, {"t": t, "delta": delta, "mu": mu},
                                 n=n, boundary=boundary, pad=pad))


def transverse_ising(n: int, j: float = 1.0, g: float = 1.0,
                     boundary: str = "open", pad: bool = False) -> QuadraticHamiltonian:
    return build_model(ModelSpec(TRANSVERSE_ISING, {"j": j, "g": g},
                                 n=n, boundary=boundary, pad=pad))


def random_hamiltonian(n: int, seed: int, scale: float = 1.0) -> QuadraticHamiltonian:
    """Random dense antisymmetric instance (useful as a generic test model)."""
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    a = rng.normal(size=(2 * n, 2 * n), scale=scale)
    return QuadraticHamiltonian(n, np.triu(a, 1) - np.triu(a, 1).T)


def compressed_operator(ham: QuadraticHamiltonian) -> np.ndarray:
    """A = i h, the Hermitian compressed operator measured in the VQE."""
    return 1j * ham.h


def block(ham: QuadraticHamiltonian, j: int, k: int) -> np.ndarray:
    """The 2x2 block a_{j,k} = i h[2j:2j+2, 2k:2k+2] coupling orbitals j, k."""
    if not (0 <= j < ham.n and 0 <= k < ham.n):
        raise ValueError(f"orbital indices out of range: ({j}, {k})")
    return 1j * ham.h[2 * j:2 * j + 2, 2 * k:2 * k + 2]


def majorana_pair_word(k: int, l: int, n: int) -> tuple[PauliWord, complex]:
    """Jordan-Wigner image of g_k g_l (k < l) on n sites: (word, coefficient).

    The five cases, with a = k//2, b = l//2:
      same orbital            ->  i Z_a
      k, l both even          -> -i Y_a Z...Z X_b
      k even, l odd (a < b)   -> -i Y_a Z...Z Y_b
      k odd, l even           ->  i X_a Z...Z X_b
      k odd, l odd            ->  i X_a Z...Z Y_b
    with the Z string on sites a+1 .. b-1.
    """
    if not (0 <= k < l < 2 * n):
        raise ValueError(f"need 0 <= k < l < {2 * n}, got ({k}, {l})")
    a, b = k // 2, l // 2
    letters = ["I"] * n
    if a == b:
        letters[a] = "Z"
        coeff = 1j
    else:
        for site in range(a + 1, b):
            letters[site] = "Z"
        if k % 2 == 0:
            letters[a] = "Y"
            coeff = -1j
        else:
            letters[a] = "X"
            coeff = 1j
        letters[b] = "Y" if l % 2 == 1 else "X"
    return PauliWord("".join(letters)), coeff


def _jw_word_dense(word: PauliWord, weight: complex, out: np.ndarray) -> None:
    """Accumulate weight * (dense matrix of word) into out, via the fact that
    a Pauli word is a signed permutation: column c maps to row c ^ xmask."""
    n = len(word)
    xmask = 0
    zmask = 0
    y_count = 0
    for site, letter in enumerate(word.letters):
        bit = 1 << (n - 1 - site)
        if letter in "XY":
            xmask |= bit
        if letter in "ZY":
            zmask |= bit
        if letter == "Y":
            y_count += 1
    cols = np.arange(1 << n)
    parity = np.zeros(1 << n, dtype=bool)
    b = 0
    rest = zmask
    while rest:
        if rest & 1:
            parity ^= ((cols >> b) & 1).astype(bool)
        rest >>= 1
        b += 1
    values = weight * (1j ** y_count) * np.where(parity, -1.0, 1.0)
    out[cols ^ xmask, cols] += values


def brute_force_matrix(ham: QuadraticHamiltonian,
                       max_n: int = DEFAULT_BRUTE_FORCE_MAX_N) -> np.ndarray:
    """Dense 2^n x 2^n Jordan-Wigner matrix of H = i sum h_{jk} g_j g_k."""
    n = ham.n
    if n > max_n:
        raise ValueError(f"brute force capped at n <= {max_n}, got {n}")
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    rows, cols = np.nonzero(np.triu(ham.h, 1))
    for k, l in zip(rows.tolist(), cols.tolist()):
        word, coeff = majorana_pair_word(k, l, n)
        _jw_word_dense(word, 2j * ham.h[k, l] * coeff, out)
    return out


def brute_force_ground_energy(ham: QuadraticHamiltonian,
                              max_n: int = DEFAULT_BRUTE_FORCE_MAX_N) -> float:
    """Minimum eigenvalue of the Jordan-Wigner matrix."""
    return float(np.linalg.eigvalsh(brute_force_matrix(ham, max_n=max_n))[0])


def brute_force_parity_ground_energies(
        ham: QuadraticHamiltonian,
        max_n: int = DEFAULT_BRUTE_FORCE_MAX_N) -> tuple[float, float]:
    """Lowest eigenvalue in the (even, odd) fermion-parity sectors.

    Parity of basis state |b> is (-1)^popcount(b); the Hamiltonian is
    parity-block-diagonal, so sector minima come from masked diagonals.
    """
    mat = brute_force_matrix(ham, max_n=max_n)
    idx = np.arange(mat.shape[0])
    odd = np.array([bin(i).count("1") % 2 == 1 for i in idx])
    e_even = np.linalg.eigvalsh(mat[np.ix_(~odd, ~odd)])[0]
    e_odd = np.linalg.eigvalsh(mat[np.ix_(odd, odd)])[0]
    return float(e_even), float(e_odd)


def save_matrix_text(path: str, matrix: np.ndarray) -> None:
    """Plain-text dense export: one row per line, space-separated decimals."""
    np.savetxt(path, np.asarray(matrix, dtype=float), fmt="%.17g")


def load_matrix_text(path: str) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path))
