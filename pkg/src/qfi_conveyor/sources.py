"""Theta-imprinted source states.

Symmetric (Dicke) states of M qubits are stored as ``M+1`` coefficients
``C_n`` where ``n`` counts qubits in ``|+1>_z`` (bit 0), so that
``Jz = n - M/2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import ValidationError
from .ising import ChainLayout
from .statevec import (
    ATOL,
    apply_pauli_sum,
    check_capacity,
    eigenstate,
    n_qubits_of,
    rotation,
    tensor_embed,
    _apply_1q,
)

SOURCE_KINDS = ("separable", "ghz", "oat")


@dataclass(frozen=True)
class SourceSpec:
    kind: str
    m: int
    oat_time: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValidationError(f"unknown source kind {self.kind!r}")
        if self.m < 1:
            raise ValidationError("source size must be >= 1")

    @property
    def flagged(self) -> bool:
        """True when the OAT time lies outside the ``[0, pi/2]`` sweep window."""
        return self.kind == "oat" and not 0 <= self.oat_time <= np.pi / 2


def imprint_phase(state: np.ndarray, layout: ChainLayout, theta: float) -> np.ndarray:
    """Rotate every source qubit by ``exp(-i theta/2 sigma_y)``."""
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state.size)
    if n != layout.n_qubits:
        raise ValidationError("layout does not match state size")
    u = rotation("y", theta)
    for q in layout.source:
        state = _apply_1q(state, q, u, n)
    return state


def imprint_generator(state: np.ndarray, layout: ChainLayout) -> np.ndarray:
    """``H_sr |state>`` with ``H_sr = 1/2 sum_src sigma_y``."""
    return 0.5 * apply_pauli_sum(state, layout.source, "y")


def log_binom(m: int, n: np.ndarray) -> np.ndarray:
    return gammaln(m + 1) - gammaln(n + 1) - gammaln(m - n + 1)


def jz_diag(m: int) -> np.ndarray:
    return np.arange(m + 1) - m / 2


@lru_cache(maxsize=64)
def jy_matrix(m: int) -> np.ndarray:
    """Tridiagonal ``Jy`` of spin ``M/2`` in the Dicke basis."""
    n = np.arange(m)
    jp = np.zeros((m + 1, m + 1))
    jp[n + 1, n] = np.sqrt((m - n) * (n + 1.0))
    jy = (jp - jp.T) / 2j
    jy.setflags(write=False)
    return jy


@lru_cache(maxsize=64)
def _jy_eig(m: int) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(jy_matrix(m))
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def rotate_y(coeffs: np.ndarray, theta: float) -> np.ndarray:
    """``exp(-i theta Jy)`` applied to symmetric-sector coefficients."""
    coeffs = np.asarray(coeffs, dtype=complex)
    w, v = _jy_eig(coeffs.size - 1)
    return v @ (np.exp(-1j * theta * w) * (v.conj().T @ coeffs))


def validate_symmetric(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 1 or coeffs.size < 2:
        raise ValidationError("symmetric state needs M+1 >= 2 coefficients")
    if abs(np.vdot(coeffs, coeffs).real - 1) > ATOL:
        raise ValidationError("symmetric state is not normalized")
    return coeffs


def coherent_x(m: int) -> np.ndarray:
    """``|+1>_x^{(x)M}`` in the Dicke basis."""
    n = np.arange(m + 1)
    return np.exp(0.5 * (log_binom(m, n) - m * np.log(2))).astype(complex)


def ghz_state(m: int, theta: float = 0.0) -> np.ndarray:
    """``exp(-i theta Jy) (|+>_y + i|->_y)/sqrt 2`` in the Dicke basis.

    ``|+->_y`` are the extremal ``Jy`` eigenstates (all qubits in
    ``|+-1>_y``); after the rotation the relative phase is ``i exp(i M theta)``.
    """
    if m < 1:
        raise ValidationError("GHZ source needs m >= 1")
    n = np.arange(m + 1)
    k = m - n
    mag = np.exp(0.5 * (log_binom(m, n) - m * np.log(2))) / np.sqrt(2)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    return mag * (1j**k) * np.exp(-0.5j * m * theta) * (1 + 1j * sign * np.exp(1j * m * theta))


def oat_phases(m: int, oat_time: float) -> np.ndarray:
    """Diagonal twisting phases ``exp(-i Ut (Jz^2 - (M-1) Jz))``."""
    jz = jz_diag(m)
    return np.exp(-1j * oat_time * (jz**2 - (m - 1) * jz))


def oat_state(m: int, oat_time: float, theta: float = 0.0) -> np.ndarray:
    """One-axis-twisted coherent state, then rotated by ``exp(-i theta Jy)``.

    At ``oat_time = pi/2`` this is ``ghz_state(m, theta)`` up to a global phase.
    """
    if m < 1:
        raise ValidationError("OAT source needs m >= 1")
    return rotate_y(coherent_x(m) * oat_phases(m, oat_time), theta)


def symmetric_derivative(coeffs: np.ndarray) -> np.ndarray:
    """theta-derivative of a ``Jy``-rotated symmetric state: ``-i Jy C``."""
    coeffs = np.asarray(coeffs, dtype=complex)
    return -1j * (jy_matrix(coeffs.size - 1) @ coeffs)


def symmetric_populations(coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(p_n, dp_n/dtheta)`` for a state rotated by ``exp(-i theta Jy)``."""
    coeffs = np.asarray(coeffs, dtype=complex)
    d = symmetric_derivative(coeffs)
    return np.abs(coeffs) ** 2, 2 * np.real(coeffs.conj() * d)


def source_state(spec: SourceSpec) -> np.ndarray:
    """Symmetric-sector coefficients of the imprinted source described by ``spec``."""
    if spec.kind == "ghz":
        return ghz_state(spec.m, spec.theta)
    if spec.kind == "oat":
        return oat_state(spec.m, spec.oat_time, spec.theta)
    return rotate_y(coherent_x(spec.m), spec.theta)


def dicke_to_qubits(coeffs: np.ndarray) -> np.ndarray:
    """Expand ``M+1`` Dicke coefficients to a ``2^M`` ket on the source qubits."""
    coeffs = np.asarray(coeffs, dtype=complex)
    m = coeffs.size - 1
    check_capacity(m, "m")
    ones = np.array([bin(k).count("1") for k in range(2**m)])
    n = m - ones
    return coeffs[n] * np.exp(-0.5 * log_binom(m, n))


def qubits_to_dicke(ket: np.ndarray) -> np.ndarray:
    """Project a permutation-symmetric source ket onto Dicke coefficients."""
    ket = np.asarray(ket, dtype=complex)
    m = n_qubits_of(ket.size)
    ones = np.array([bin(k).count("1") for k in range(2**m)])
    out = np.zeros(m + 1, dtype=complex)
    np.add.at(out, m - ones, ket)
    n = np.arange(m + 1)
    return out * np.exp(-0.5 * log_binom(m, n))


def embed_source(source_ket: np.ndarray, layout: ChainLayout) -> np.ndarray:
    """Source ket on the source qubits, ``|+1>_x`` on all others."""
    plus = eigenstate("x", 1)
    parts = [(source_ket, layout.source)]
    parts += [(plus, (q,)) for q in layout.medium + (layout.antenna,)]
    return tensor_embed(parts, layout.n_qubits)


def embed_symmetric(sym: np.ndarray, layout: ChainLayout) -> np.ndarray:
    sym = validate_symmetric(sym)
    if sym.size - 1 != layout.m:
        raise ValidationError(f"symmetric state has M={sym.size - 1}, layout has M={layout.m}")
    check_capacity(layout.n_qubits)
    return embed_source(dicke_to_qubits(sym), layout)
