"""Chain layouts, coupling matrices and diagonal Ising evolution.

The Hamiltonian is ``H = sum_{i>j} J_ij sigma_z^i sigma_z^j`` with hbar = 1.
It is diagonal in the computational basis, so evolution multiplies every
amplitude by a phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .statevec import check_capacity, n_qubits_of


@dataclass(frozen=True)
class ChainLayout:
    """Partition of an N-qubit chain into source, medium and antenna."""

    n_qubits: int
    source: tuple[int, ...]
    antenna: int

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(int(q) for q in self.source))
        n, src = self.n_qubits, self.source
        if len(src) < 1:
            raise ValidationError("source must contain at least one qubit")
        if n < len(src) + 1:
            raise ValidationError(f"need N >= M+1, got N={n}, M={len(src)}")
        if len(set(src)) != len(src) or any(not 0 <= q < n for q in src):
            raise ValidationError(f"invalid source indices {src}")
        if not 0 <= self.antenna < n or self.antenna in src:
            raise ValidationError(f"invalid antenna index {self.antenna}")

    @classmethod
    def standard(cls, n: int, m: int) -> "ChainLayout":
        """Source on qubits ``0..m-1``, antenna on the last qubit."""
        return cls(n, tuple(range(m)), n - 1)

    @property
    def m(self) -> int:
        return len(self.source)

    @property
    def medium(self) -> tuple[int, ...]:
        skip = set(self.source) | {self.antenna}
        return tuple(q for q in range(self.n_qubits) if q not in skip)

    @property
    def mu(self) -> int:
        return self.n_qubits - self.m - 1


@dataclass(frozen=True)
class StarCouplings:
    """Uniform couplings: ``j1`` source-antenna, ``j2`` medium-antenna,
    ``u`` source-source, ``j_bg`` every other pair."""

    j1: float
    j2: float
    u: float = 0.0
    j_bg: float = 0.0


def expand_star(layout: ChainLayout, star: StarCouplings) -> np.ndarray:
    n = layout.n_qubits
    src = set(layout.source)
    J = np.full((n, n), float(star.j_bg))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if layout.antenna in (i, j):
                other = j if i == layout.antenna else i
                J[i, j] = star.j1 if other in src else star.j2
            elif i in src and j in src:
                J[i, j] = star.u
    np.fill_diagonal(J, 0.0)
    return J


def validate_couplings(J: np.ndarray) -> np.ndarray:
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ValidationError("coupling matrix must be square")
    if not np.array_equal(J, J.T):
        raise ValidationError("coupling matrix must be symmetric")
    if np.any(np.diag(J) != 0):
        raise ValidationError("coupling matrix must have zero diagonal")
    return J


def spin_values(n: int, qubit: int) -> np.ndarray:
    """``s_qubit`` (+1 or -1) for every basis index of an n-qubit register."""
    return 1 - 2 * ((np.arange(2**n) >> qubit) & 1).astype(np.int8)


def ising_energies(J: np.ndarray) -> np.ndarray:
    """Diagonal of ``sum_{i>j} J_ij s_i s_j`` over all basis indices."""
    J = validate_couplings(J)
    n = J.shape[0]
    check_capacity(n)
    energy = np.zeros(2**n)
    spins = [spin_values(n, q) for q in range(n)]
    for i in range(n):
        for j in range(i):
            if J[i, j] != 0.0:
                energy += J[i, j] * (spins[i] * spins[j])
    return energy


def basis_phase(J: np.ndarray, basis_index: int, t: float) -> float:
    """Phase angle ``t * sum_{i>j} J_ij s_i s_j`` accumulated by one basis state."""
    J = validate_couplings(J)
    n = J.shape[0]
    if not 0 <= basis_index < 2**n:
        raise ValidationError(f"basis index {basis_index} out of range")
    s = 1 - 2 * ((basis_index >> np.arange(n)) & 1)
    return float(t * np.sum(np.tril(J, -1) * np.outer(s, s)))


def evolve(state: np.ndarray, J: np.ndarray, t: float) -> np.ndarray:
    """Apply ``exp(-i H t)`` to a ket."""
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state.size)
    J = validate_couplings(J)
    if J.shape[0] != n:
        raise ValidationError(f"coupling matrix is {J.shape[0]}x{J.shape[0]}, state has {n} qubits")
    if not np.isfinite(t):
        raise ValidationError("time must be finite")
    return state * np.exp(-1j * t * ising_energies(J))


def phases_from_couplings(j1: float, j2: float, t: float) -> tuple[float, float]:
    """``(phi1, phi2) = (2 t J1, 2 t J2)``."""
    return 2 * t * j1, 2 * t * j2


def occupation_pair_energies(n: int, qubits: Sequence[int], u: float) -> np.ndarray:
    """Diagonal of ``2u sum_{i>j in qubits} n_i n_j`` with ``n = (1 - sigma_z)/2``.

    This is the one-axis-twisting generator used to prepare squeezed and GHZ
    sources; restricted to the symmetric sector it equals
    ``u (Jz^2 - (M-1) Jz)`` up to a constant.
    """
    check_capacity(n)
    occ = sum(((np.arange(2**n) >> q) & 1).astype(float) for q in qubits)
    return u * occ * (occ - 1)
