"""Dense state vectors and density matrices for small qubit registers.

Conventions used throughout the package:

* qubit ``q`` is bit ``q`` of the basis index (qubit 0 is least significant);
* bit 0 is the ``sigma_z = +1`` eigenstate, bit 1 is ``sigma_z = -1``;
* a reduced density matrix over ``keep`` uses ``keep[0]`` as its least
  significant qubit.

Kets are 1-D complex arrays, density matrices 2-D complex arrays.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np

from .errors import CapacityError, ValidationError

ATOL = 1e-10
PSD_TOL = 1e-9

DEFAULT_MAX_QUBITS = 24
HARD_MAX_QUBITS = 26

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": SX, "y": SY, "z": SZ}

_EIGENSTATES = {
    ("z", 1): np.array([1, 0], dtype=complex),
    ("z", -1): np.array([0, 1], dtype=complex),
    ("x", 1): np.array([1, 1], dtype=complex) / np.sqrt(2),
    ("x", -1): np.array([1, -1], dtype=complex) / np.sqrt(2),
    ("y", 1): np.array([1, 1j], dtype=complex) / np.sqrt(2),
    ("y", -1): np.array([1, -1j], dtype=complex) / np.sqrt(2),
}


def max_qubits() -> int:
    """Current qubit cap; ``QFI_CONVEYOR_MAX_QUBITS`` may override it up to 26."""
    raw = os.environ.get("QFI_CONVEYOR_MAX_QUBITS")
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"QFI_CONVEYOR_MAX_QUBITS={raw!r} is not an integer")
    return max(1, min(value, HARD_MAX_QUBITS))


def check_capacity(n: int, name: str = "n") -> None:
    cap = max_qubits()
    if not 1 <= n <= cap:
        raise CapacityError(f"{name}={n} outside supported range 1..{cap}")


def n_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise ValidationError(f"dimension {dim} is not a power of two")
    return n


def eigenstate(axis: str, sign: int = 1) -> np.ndarray:
    """Single-qubit Pauli eigenstate ``|sign>_axis``."""
    key = (axis.lower(), 1 if sign > 0 else -1)
    if key[0] not in PAULI:
        raise ValidationError(f"unknown axis {axis!r}")
    return _EIGENSTATES[key].copy()


def product_state(n: int, axis: str = "x", sign: int = 1) -> np.ndarray:
    """n-fold tensor power of a single-qubit Pauli eigenstate."""
    check_capacity(n)
    single = eigenstate(axis, sign)
    # amplitude of index k is prod_q single[bit_q(k)]
    bits = (np.arange(2**n)[:, None] >> np.arange(n)) & 1
    return np.prod(single[bits], axis=1)


def tensor_embed(parts: Sequence[tuple[np.ndarray, Sequence[int]]], n: int) -> np.ndarray:
    """Tensor product of kets living on disjoint qubit subsets.

    Each part is ``(ket, qubits)`` where ``qubits[0]`` is the least
    significant qubit of ``ket``. The subsets must cover ``range(n)``.
    """
    check_capacity(n)
    order: list[int] = []
    tensor = np.ones((), dtype=complex)
    for ket, qubits in parts:
        k = len(qubits)
        ket = np.asarray(ket, dtype=complex)
        if ket.shape != (2**k,):
            raise ValidationError(f"ket of length {ket.size} does not match {k} qubits")
        # C-order axes of a reshaped ket run from most to least significant
        tensor = np.multiply.outer(tensor, ket.reshape([2] * k)) if k else tensor
        order.extend(reversed(list(qubits)))
    if sorted(order) != list(range(n)):
        raise ValidationError("parts must partition the qubit register")
    # axis a of `tensor` holds qubit order[a]; target axis of qubit q is n-1-q
    perm = [order.index(q) for q in range(n - 1, -1, -1)]
    return np.ascontiguousarray(tensor.transpose(perm)).reshape(-1)


def is_unitary(u: np.ndarray, tol: float = ATOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u.conj().T @ u, np.eye(u.shape[0]), atol=tol, rtol=0
    )


def rotation(axis: str, angle: float) -> np.ndarray:
    """``exp(-i angle/2 sigma_axis)``."""
    return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * PAULI[axis.lower()]


def apply_single_qubit(state: np.ndarray, qubit: int, u: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state.size)
    if not 0 <= qubit < n:
        raise ValidationError(f"qubit index {qubit} out of range for {n} qubits")
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not is_unitary(u):
        raise ValidationError("single-qubit operator must be a 2x2 unitary")
    return _apply_1q(state, qubit, u, n)


def _apply_1q(state: np.ndarray, qubit: int, op: np.ndarray, n: int) -> np.ndarray:
    # no unitarity check: also used for Hermitian generators
    t = state.reshape(2 ** (n - 1 - qubit), 2, 2**qubit)
    return np.einsum("ab,xbz->xaz", op, t).reshape(-1)


def apply_pauli_sum(state: np.ndarray, qubits: Sequence[int], axis: str) -> np.ndarray:
    """``sum_q sigma_axis^(q) |state>`` (not unitary)."""
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state.size)
    out = np.zeros_like(state)
    for q in qubits:
        out += _apply_1q(state, q, PAULI[axis], n)
    return out


def _split(psi: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    n = n_qubits_of(psi.size)
    keep = list(keep)
    if not keep:
        raise ValidationError("keep must be non-empty")
    if len(set(keep)) != len(keep) or any(not 0 <= q < n for q in keep):
        raise ValidationError(f"invalid keep indices {keep} for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    axes = [n - 1 - q for q in reversed(keep)] + [n - 1 - q for q in reversed(traced)]
    return psi.reshape([2] * n).transpose(axes).reshape(2 ** len(keep), -1)


def partial_trace_outer(psi: np.ndarray, phi: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced operator ``Tr_rest |psi><phi|``."""
    psi = np.asarray(psi, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    if psi.shape != phi.shape:
        raise ValidationError("kets must have equal length")
    a = _split(psi, keep)
    b = _split(phi, keep)
    return a @ b.conj().T


def partial_trace(rho_or_psi: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on the qubits in ``keep``.

    Accepts a ket (1-D) or a density matrix (2-D).
    """
    x = np.asarray(rho_or_psi, dtype=complex)
    if x.ndim == 1:
        return partial_trace_outer(x, x, keep)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValidationError("expected a ket or a square matrix")
    n = n_qubits_of(x.shape[0])
    keep = list(keep)
    if not keep:
        raise ValidationError("keep must be non-empty")
    if len(set(keep)) != len(keep) or any(not 0 <= q < n for q in keep):
        raise ValidationError(f"invalid keep indices {keep} for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    axes = [n - 1 - q for q in reversed(keep)] + [n - 1 - q for q in reversed(traced)]
    t = x.reshape([2] * (2 * n)).transpose(axes + [n + a for a in axes])
    dk, dt = 2 ** len(keep), 2 ** len(traced)
    return np.einsum("ajbj->ab", t.reshape(dk, dt, dk, dt))


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def is_hermitian(m: np.ndarray, tol: float = ATOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, atol=tol, rtol=0)


def validate_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Return ``rho`` as a complex array after checking the density-matrix invariants."""
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho):
        raise ValidationError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > ATOL:
        raise ValidationError(f"density matrix trace {np.trace(rho).real:.3g} != 1")
    if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
        raise ValidationError("density matrix is not positive semidefinite")
    return rho


def validate_ket(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValidationError("ket must be one-dimensional")
    if abs(np.vdot(psi, psi).real - 1) > ATOL:
        raise ValidationError("ket is not normalized")
    return psi


def expectation(rho: np.ndarray, obs: np.ndarray) -> float:
    """``Tr[rho obs]`` for Hermitian ``obs``."""
    rho = np.asarray(rho, dtype=complex)
    obs = np.asarray(obs, dtype=complex)
    if rho.shape != obs.shape:
        raise ValidationError(f"shape mismatch {rho.shape} vs {obs.shape}")
    if not is_hermitian(obs):
        raise ValidationError("observable is not Hermitian")
    value = np.trace(rho @ obs)
    if abs(value.imag) > ATOL:
        raise ValidationError("expectation has a non-negligible imaginary part")
    return float(value.real)


def fidelity_pure(phi: np.ndarray, psi: np.ndarray) -> float:
    """``|<phi|psi>|``; equals 1 for states equal up to a global phase."""
    return float(abs(np.vdot(phi, psi)))
