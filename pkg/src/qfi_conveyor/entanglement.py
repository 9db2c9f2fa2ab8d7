"""Source-antenna two-qubit state, partial transpose and negativity.

Two-qubit matrices here use the ordered basis ``|-1,-1>, |-1,+1>, |+1,-1>,
|+1,+1>`` (source first, antenna second). This is the reverse of the
package-wide index order, hence the ``[::-1, ::-1]`` in :func:`reduce_pair`.

The closed forms are pinned to ``J1 = 1/2``, ``J2 = 1`` with the other chain
pairs coupled by ``PINNED_J_BG``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedCaseError, ValidationError
from .ising import ChainLayout, StarCouplings, expand_star
from .statevec import is_hermitian, partial_trace, validate_density_matrix

PINNED_J1 = 0.5
PINNED_J2 = 1.0
PINNED_J_BG = -1.0
NEG_TOL = 1e-12


@dataclass(frozen=True)
class BipartiteState:
    rho: np.ndarray

    def __post_init__(self):
        rho = validate_density_matrix(self.rho)
        if rho.shape != (4, 4):
            raise ValidationError("bipartite state must be 4x4")
        object.__setattr__(self, "rho", rho)


def pinned_couplings(layout: ChainLayout) -> np.ndarray:
    return expand_star(layout, StarCouplings(PINNED_J1, PINNED_J2, 0.0, PINNED_J_BG))


def reduce_pair(state: np.ndarray, layout: ChainLayout) -> BipartiteState:
    if layout.m != 1:
        raise UnsupportedCaseError("source-antenna pair analysis needs a one-qubit source")
    rho = partial_trace(state, [layout.antenna, layout.source[0]])
    return BipartiteState(rho[::-1, ::-1].copy())


def partial_transpose(b: BipartiteState | np.ndarray, subsystem: str = "second") -> np.ndarray:
    rho = b.rho if isinstance(b, BipartiteState) else np.asarray(b, dtype=complex)
    t = rho.reshape(2, 2, 2, 2)  # (s, a, s', a')
    if subsystem == "second":
        out = t.transpose(0, 3, 2, 1)
    elif subsystem == "first":
        out = t.transpose(2, 1, 0, 3)
    else:
        raise ValidationError("subsystem must be 'first' or 'second'")
    return out.reshape(4, 4)


def negativity(b: BipartiteState | np.ndarray) -> float:
    pt = partial_transpose(b)
    if not is_hermitian(pt, 1e-9):
        raise ValidationError("partial transpose is not Hermitian")
    lam = np.linalg.eigvalsh(pt)
    return float(-lam[lam < -NEG_TOL].sum())


def pair_closed_params(t: float, n: int) -> tuple[complex, float]:
    """``(alpha, beta)`` entries of the pinned-coupling pair state at time ``t``."""
    if n < 2:
        raise ValidationError("need at least source and antenna")
    alpha = 0.25 * math.cos(2 * t) ** (n - 2) * complex(math.cos(t), -math.sin(t))
    beta = 0.25 * math.cos(4 * t) ** (n - 2)
    return alpha, beta


def pair_closed_matrix(t: float, n: int) -> np.ndarray:
    al, be = pair_closed_params(t, n)
    ac = al.conjugate()
    q = 0.25
    return np.array(
        [[q, al, al, q], [ac, q, be, ac], [ac, be, q, ac], [q, al, al, q]], dtype=complex
    )


def pair_closed_eigenvalues(t: float, n: int) -> np.ndarray:
    """Closed-form spectrum of the partial transpose, ``lambda_1..lambda_4``."""
    al, be = pair_closed_params(t, n)
    r = math.hypot(1 - 4 * be, 16 * al.real)
    i = math.hypot(1 - 4 * be, 16 * al.imag)
    return np.array(
        [(3 + 4 * be - r) / 8, (3 + 4 * be + r) / 8, (1 - 4 * be - i) / 8, (1 - 4 * be + i) / 8]
    )


def pinned_qfi_antenna(t: float, n: int) -> float:
    """Antenna QFI for the one-qubit source at the pinned couplings."""
    return math.sin(t) ** 2 * math.cos(2 * t) ** (2 * (n - 2))


def negativity_closed_form(t: float, n: int, qfi_an: float) -> float:
    alpha = 1 - math.cos(4 * t) ** (n - 2)
    return abs(alpha - math.sqrt(alpha * alpha + 16 * qfi_an)) / 8
