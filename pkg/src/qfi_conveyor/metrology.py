"""Quantum and classical Fisher information, SLD, entanglement depth."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DivergenceError, NumericalDerivativeError, SingularityError, ValidationError
from .statevec import is_hermitian, projector

SUPPORT_CUTOFF = 1e-12
FD_STEP = 1e-5


@dataclass(frozen=True)
class ThetaFamily:
    """A one-parameter family of states.

    ``evaluate(theta)`` returns a ket or a density matrix. ``derivative``,
    if given, returns the matching analytic derivative (ket or matrix);
    otherwise a central difference with ``step`` is used on the density matrix.
    """

    evaluate: Callable[[float], np.ndarray]
    derivative: Optional[Callable[[float], np.ndarray]] = None
    step: float = FD_STEP

    def rho(self, theta: float) -> np.ndarray:
        x = np.asarray(self.evaluate(theta), dtype=complex)
        return projector(x) if x.ndim == 1 else x

    def drho(self, theta: float) -> np.ndarray:
        if self.derivative is None:
            h = self.step
            return (self.rho(theta + h) - self.rho(theta - h)) / (2 * h)
        d = np.asarray(self.derivative(theta), dtype=complex)
        if d.ndim == 2:
            return d
        psi = np.asarray(self.evaluate(theta), dtype=complex)
        outer = np.outer(d, psi.conj())
        return outer + outer.conj().T


@dataclass(frozen=True)
class AntennaOffDiag:
    """Coherence ``a = rho_an[+1, -1]``, its theta-derivative and population ``p``."""

    a: complex
    a_dot: complex
    p: float = 0.5

    def __post_init__(self):
        bound = math.sqrt(max(self.p * (1 - self.p), 0.0)) + 1e-9
        if abs(self.a) > bound:
            raise ValidationError(f"|a|={abs(self.a):.6g} exceeds PSD bound {bound:.6g}")

    def matrix(self) -> np.ndarray:
        return np.array([[self.p, self.a], [np.conj(self.a), 1 - self.p]], dtype=complex)

    def dmatrix(self) -> np.ndarray:
        return np.array([[0, self.a_dot], [np.conj(self.a_dot), 0]], dtype=complex)


def qfi_from_matrices(rho: np.ndarray, drho: np.ndarray) -> float:
    """``2 sum_ij |<i|drho|j>|^2 / (p_i + p_j)`` over the support."""
    if not is_hermitian(drho, 1e-8):
        raise NumericalDerivativeError("state derivative is not Hermitian")
    lam, vec = np.linalg.eigh(rho)
    d = vec.conj().T @ drho @ vec
    denom = lam[:, None] + lam[None, :]
    mask = denom > SUPPORT_CUTOFF
    return float(2 * np.sum(np.abs(d[mask]) ** 2 / denom[mask]))


def qfi_eigendecomp(family: ThetaFamily, theta: float = 0.0) -> float:
    return qfi_from_matrices(family.rho(theta), family.drho(theta))


def qfi_qubit(off: AntennaOffDiag) -> float:
    """Closed-form QFI of the antenna state ``[[1/2, a], [a*, 1/2]]``.

    Splits ``a_dot exp(-i arg a)`` into a radial part ``c`` and a tangential
    part ``s``; then ``QFI = 4 (c^2 / (1 - 4|a|^2) + s^2)``.
    """
    if abs(off.p - 0.5) > 1e-9:
        raise ValidationError("closed-form qubit QFI needs p = 1/2; use qfi_eigendecomp")
    r = abs(off.a)
    # arg(a) is undefined at a = 0; the result does not depend on it there
    phase = 1.0 if r < 1e-14 else np.conj(off.a) / r
    z = off.a_dot * phase
    c, s = z.real, z.imag
    denom = 1 - 4 * r * r
    if denom < 1e-12:
        if abs(c) > 1e-8:
            raise SingularityError("antenna state is pure but the radial derivative is nonzero")
        return float(4 * s * s)
    return float(4 * (c * c / denom + s * s))


def sigma_y_probabilities(a: complex) -> tuple[float, float]:
    """Outcome probabilities of ``|+1>_y`` and ``|-1>_y`` for a ``p = 1/2`` antenna."""
    return 0.5 - a.imag, 0.5 + a.imag


def cfi_sigma_y(
    a_of_theta: Callable[[float], complex],
    theta: float = 0.0,
    a_dot_of_theta: Optional[Callable[[float], complex]] = None,
    step: float = FD_STEP,
) -> float:
    """Classical Fisher information of a ``sigma_y`` readout of the antenna."""
    a = complex(a_of_theta(theta))
    if a_dot_of_theta is None:
        a_dot = (complex(a_of_theta(theta + step)) - complex(a_of_theta(theta - step))) / (2 * step)
    else:
        a_dot = complex(a_dot_of_theta(theta))
    probs = sigma_y_probabilities(a)
    grads = (-a_dot.imag, a_dot.imag)
    total = 0.0
    for p, g in zip(probs, grads):
        if p < -1e-12 or p > 1 + 1e-12:
            raise ValidationError(f"outcome probability {p:.6g} outside [0, 1]")
        if p < 1e-14:
            if abs(g) > 1e-8:
                raise DivergenceError("vanishing probability with nonzero derivative")
            continue
        total += g * g / p
    return float(total)


def sld(rho: np.ndarray, drho: np.ndarray) -> np.ndarray:
    """Symmetric logarithmic derivative, zero outside ``lambda_j + lambda_k > 1e-12``."""
    rho = np.asarray(rho, dtype=complex)
    drho = np.asarray(drho, dtype=complex)
    if not is_hermitian(rho, 1e-8) or not is_hermitian(drho, 1e-8):
        raise ValidationError("sld needs Hermitian rho and drho")
    if abs(np.trace(drho)) > 1e-8:
        raise ValidationError("state derivative must be traceless")
    lam, vec = np.linalg.eigh(rho)
    d = vec.conj().T @ drho @ vec
    denom = lam[:, None] + lam[None, :]
    mask = denom > SUPPORT_CUTOFF
    le = np.zeros_like(d)
    le[mask] = 2 * d[mask] / denom[mask]
    return vec @ le @ vec.conj().T


def qfi_pure(psi: np.ndarray, dpsi: np.ndarray) -> float:
    """``4 (<dpsi|dpsi> - |<psi|dpsi>|^2)`` for a normalized ket family."""
    psi = np.asarray(psi, dtype=complex)
    dpsi = np.asarray(dpsi, dtype=complex)
    if psi.shape != dpsi.shape:
        raise ValidationError("psi and dpsi must have equal shape")
    if abs(np.vdot(psi, psi).real - 1) > 1e-8:
        raise ValidationError("state norm drifted from 1")
    overlap = np.vdot(psi, dpsi)
    if abs(overlap.real) > 1e-8:
        raise ValidationError("derivative inconsistent with a normalized family")
    return float(4 * (np.vdot(dpsi, dpsi).real - abs(overlap) ** 2))


def entanglement_depth_bound(qfi: float, m: int) -> int:
    """Largest ``k`` with ``qfi / m >= k``, clamped to ``[0, m]``."""
    if m < 1 or qfi < 0:
        raise ValidationError("need qfi >= 0 and m >= 1")
    # small slack absorbs round-off in numerically computed QFI values
    return int(min(max(math.floor(qfi / m + 1e-9), 0), m))
