"""Closed-form antenna coherences, QFI predictions and optimal settings.

The antenna starts in ``|+1>_x``, so its coherence carries a factor 1/2:
``a = 1/2 * (source factor) * (medium factor)``. Phases are
``phi1 = 2 t J1`` (source-antenna) and ``phi2 = 2 t J2`` (medium-antenna).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ValidationError
from .metrology import AntennaOffDiag, qfi_qubit

ANTENNA_COHERENCE = 0.5


@dataclass(frozen=True)
class TransferSetting:
    m: int
    mu: int
    phi1: float
    phi2: float
    theta: float = 0.0

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError("m must be >= 1")
        if self.mu < 0:
            raise ValidationError("mu must be >= 0")

    @classmethod
    def from_couplings(cls, m: int, mu: int, j1: float, j2: float, t: float, theta: float = 0.0):
        return cls(m, mu, 2 * t * j1, 2 * t * j2, theta)


@dataclass(frozen=True)
class MixtureTerm:
    weight: float
    f: complex
    g: complex


def f_separable(s: TransferSetting) -> complex:
    return complex((math.cos(s.phi1) + 1j * math.sin(s.theta) * math.sin(s.phi1)) ** s.m)


def _df_separable(s: TransferSetting) -> complex:
    base = math.cos(s.phi1) + 1j * math.sin(s.theta) * math.sin(s.phi1)
    return complex(s.m * base ** (s.m - 1) * 1j * math.cos(s.theta) * math.sin(s.phi1))


def g_medium(s: TransferSetting) -> float:
    # integer power keeps the sign of odd mu exact
    return math.cos(s.phi2) ** s.mu


def offdiag_separable(s: TransferSetting) -> AntennaOffDiag:
    g = g_medium(s)
    return AntennaOffDiag(
        ANTENNA_COHERENCE * f_separable(s) * g,
        ANTENNA_COHERENCE * _df_separable(s) * g,
    )


def offdiag_ghz(s: TransferSetting) -> AntennaOffDiag:
    """GHZ source with relative phase ``i exp(i M theta)`` between the ``Jy`` extremes."""
    m = s.m
    g = g_medium(s)
    sm = math.sin(s.phi1) ** m
    ph = (-1j) ** m
    a = 0.5 * (math.cos(s.phi1) ** m - ph * sm * math.sin(m * s.theta)) * g
    a_dot = -0.5 * ph * m * sm * math.cos(m * s.theta) * g
    return AntennaOffDiag(complex(a), complex(a_dot))


def offdiag_mixture(terms: Sequence[MixtureTerm], antenna_coherence: float = ANTENNA_COHERENCE) -> complex:
    """``antenna_coherence * sum_i p_i f_i g_i``; pass 1.0 to get the bare sum."""
    if not terms:
        raise ValidationError("mixture needs at least one term")
    w = np.array([t.weight for t in terms], dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1) > 1e-10:
        raise ValidationError("mixture weights must be non-negative and sum to 1")
    return complex(antenna_coherence * sum(t.weight * t.f * t.g for t in terms))


def phase_factors(m: int, phi1: float) -> np.ndarray:
    """``exp(-i phi1 (2n - M))`` for ``n = 0..M`` qubits in ``|+1>_z``."""
    return np.exp(-1j * phi1 * (2 * np.arange(m + 1) - m))


def _check_probs(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise ValidationError("populations must be a vector of length M+1")
    if np.any(p < -1e-12) or abs(p.sum() - 1) > 1e-9:
        raise ValidationError("populations must be non-negative and sum to 1")
    return p


def offdiag_collective(
    probs: Callable[[float], np.ndarray],
    phi1: float,
    mu: int,
    phi2: float,
    theta: float = 0.0,
    dprobs: Optional[Callable[[float], np.ndarray]] = None,
    step: float = 1e-5,
) -> AntennaOffDiag:
    """Antenna coherence from the source's ``Jz`` populations ``p_n(theta)``."""
    p = _check_probs(probs(theta))
    if dprobs is None:
        dp = (np.asarray(probs(theta + step)) - np.asarray(probs(theta - step))) / (2 * step)
    else:
        dp = np.asarray(dprobs(theta), dtype=float)
    if dp.shape != p.shape:
        raise ValidationError("population derivative has the wrong shape")
    m = p.size - 1
    ph = phase_factors(m, phi1)
    g = math.cos(phi2) ** mu
    return AntennaOffDiag(
        complex(ANTENNA_COHERENCE * g * np.dot(p, ph)),
        complex(ANTENNA_COHERENCE * g * np.dot(dp, ph)),
    )


def qfi_separable_closed(s: TransferSetting) -> float:
    """``M^2 sin^2 phi1 cos^{2(M-1)} phi1 cos^{2 mu} phi2`` (valid at theta = 0)."""
    return (
        s.m**2
        * math.sin(s.phi1) ** 2
        * math.cos(s.phi1) ** (2 * (s.m - 1))
        * math.cos(s.phi2) ** (2 * s.mu)
    )


def optimal_separable(m: int) -> tuple[float, float]:
    if m < 2:
        raise ValidationError("optimal_separable needs m >= 2; use optimal_single for m = 1")
    phi1 = math.atan((m - 1) ** -0.5)
    return phi1, m * (1 - 1 / m) ** (m - 1)


def optimal_single() -> tuple[float, float]:
    """``(J1/J2, t J2)`` giving ``phi1 = pi/2`` and ``phi2 = pi`` for a one-qubit source."""
    return 0.5, math.pi / 2


def literal_single_setting(k: int = 1) -> tuple[float, float]:
    """``(J1/J2, t J2) = (1/2, k pi)``: gives ``phi1 = k pi`` and a vanishing QFI."""
    return 0.5, k * math.pi


def single_setting_qfi(j_ratio: float, t_units: float, mu: int) -> float:
    """Antenna QFI for ``M = 1`` with ``J2 = 1`` and ``J1 = j_ratio``."""
    s = TransferSetting(1, mu, 2 * t_units * j_ratio, 2 * t_units)
    return qfi_qubit(offdiag_separable(s))


def finetune_envelope(mu: int, j2: float, t: float, m: int = 1) -> tuple[float, float]:
    """Medium attenuation ``cos^{2 mu}(2 J2 t)`` and its Gaussian ``exp(-mu d^2)``, ``d = 2 J2 t - m pi``.

    The Gaussian is the second-order expansion around the resonance.
    """
    if mu < 1:
        raise ValidationError("mu must be >= 1")
    x = 2 * j2 * t
    d = x - m * math.pi
    return math.cos(x) ** (2 * mu), math.exp(-mu * d * d)
