"""Readout miscalibration: a slipped ``sigma_y`` axis on the antenna vs GHZ parity.

A phase slip ``eps`` replaces ``sigma_y`` by ``cos(eps) sigma_y + sin(eps) sigma_x``.
"""

from __future__ import annotations

import math

import numpy as np

from .analytic import TransferSetting, offdiag_separable
from .errors import ValidationError
from .statevec import SX, SY, _apply_1q, check_capacity


def _check_eps(eps: float) -> None:
    if not abs(eps) < math.pi / 2:
        raise ValidationError("phase slip must satisfy |eps| < pi/2")


def slipped_sigma_y(eps: float) -> np.ndarray:
    return math.cos(eps) * SY + math.sin(eps) * SX


def cfi_single_miscal(eps: float) -> float:
    """``F_C / F_Q`` for the one-qubit antenna read out along the slipped axis."""
    _check_eps(eps)
    return math.cos(eps) ** 2


def _binary_cfi(mean: float, dmean: float) -> float:
    # outcomes +-1 with p = (1 +- mean)/2
    total = 0.0
    for sign in (1, -1):
        p = 0.5 * (1 + sign * mean)
        if p <= 0:
            raise ValidationError("outcome probability left (0, 1)")
        total += (0.5 * dmean) ** 2 / p
    return total


def cfi_single_explicit(eps: float, theta: float) -> float:
    """CFI from the outcome probabilities of the slipped readout of the lossless antenna.

    The antenna is the optimal one-qubit transfer (``phi1 = pi/2``, ``phi2 = pi``),
    whose own QFI is 1, so this is directly comparable with :func:`cfi_single_miscal`.
    """
    _check_eps(eps)
    off = offdiag_separable(TransferSetting(1, 0, math.pi / 2, math.pi, theta))
    # <sigma_x> = 2 Re a, <sigma_y> = -2 Im a for [[1/2, a], [a*, 1/2]]
    mean = math.cos(eps) * (-2 * off.a.imag) + math.sin(eps) * 2 * off.a.real
    dmean = math.cos(eps) * (-2 * off.a_dot.imag) + math.sin(eps) * 2 * off.a_dot.real
    return _binary_cfi(mean, dmean)


def cfi_single_linear(eps: float, theta: float) -> float:
    """Same with the linearized probabilities ``(1 +- cos(eps) theta)/2``."""
    _check_eps(eps)
    return _binary_cfi(math.cos(eps) * theta, math.cos(eps))


def cfi_ghz_miscal(m: int, eps: float) -> tuple[float, float]:
    """``(cos^{2M} eps, exp(-M eps^2))``: parity-readout ratio and its Gaussian form."""
    if m < 1:
        raise ValidationError("m must be >= 1")
    _check_eps(eps)
    return math.cos(eps) ** (2 * m), math.exp(-m * eps * eps)


def readout_ghz(m: int, theta: float) -> np.ndarray:
    """``(|0...0> + i^{M-1} e^{iM theta} |1...1>)/sqrt 2`` as a ``2^M`` ket."""
    check_capacity(m, "m")
    psi = np.zeros(2**m, dtype=complex)
    psi[0] = 1 / math.sqrt(2)
    psi[-1] = 1j ** (m - 1) * np.exp(1j * m * theta) / math.sqrt(2)
    return psi


def parity_expectation(m: int, theta: float, eps: float, method: str = "closed") -> float:
    """``<(sigma_{y,eps})^{(x)M}>`` on the readout GHZ state.

    ``method="tensor"`` applies the operator qubit by qubit (``m <= 24``);
    ``"closed"`` uses ``sin(M (theta + eps))``.
    """
    _check_eps(eps)
    if method == "closed":
        return math.sin(m * (theta + eps))
    if method != "tensor":
        raise ValidationError(f"unknown method {method!r}")
    psi = readout_ghz(m, theta)
    op = slipped_sigma_y(eps)
    out = psi
    for q in range(m):
        out = _apply_1q(out, q, op, m)
    return float(np.vdot(psi, out).real)


def parity_linear(m: int, theta: float, eps: float) -> float:
    """Small-theta form ``M theta cos^M eps``."""
    return m * theta * math.cos(eps) ** m


def parity_cfi(m: int, theta: float, eps: float) -> float:
    """Exact CFI of the +-1 parity outcomes; equals ``M^2`` wherever it is defined."""
    mean = parity_expectation(m, theta, eps)
    dmean = m * math.cos(m * (theta + eps))
    if 1 - mean * mean < 1e-14:
        # removable 0/0 at the turning points of the fringe
        return float(m * m)
    return dmean * dmean / (1 - mean * mean)


def parity_cfi_approx(m: int, eps: float) -> float:
    """``M^2 cos^{2M} eps``: slope of the linearized mean over a unit variance."""
    return m * m * cfi_ghz_miscal(m, eps)[0]


def settings_report(ms=(1, 2, 5, 10, 20, 50, 100), eps_deg: float = 1.0) -> str:
    """Plain-text comparison of readout costs and miscalibration sensitivity.

    Settings counts are scaling indicators (``M^2`` for GHZ tomography,
    3 Pauli expectations for a single qubit), not computed tomography costs.
    """
    eps = math.radians(eps_deg)
    lines = [
        f"# readout comparison, phase slip {eps_deg:g} deg",
        "m,settings_ghz,settings_antenna,settings_ratio,ratio_antenna,ratio_ghz_exact,ratio_ghz_gauss",
    ]
    single = cfi_single_miscal(eps)
    for m in ms:
        exact, gauss = cfi_ghz_miscal(m, eps)
        lines.append(f"{m},{m * m},3,{m * m / 3:.6g},{single:.6g},{exact:.6g},{gauss:.6g}")
    return "\n".join(lines) + "\n"
