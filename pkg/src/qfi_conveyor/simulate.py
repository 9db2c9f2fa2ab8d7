"""Full-register brute force: prepare, imprint, evolve, reduce.

Used as an independent oracle for the closed forms. The theta derivative is
exact: imprinting is ``exp(-i theta H_sr)`` so ``d psi = -i H_sr psi``, and
the Ising evolution is applied to both ``psi`` and ``d psi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ising import ChainLayout, evolve, occupation_pair_energies
from .metrology import AntennaOffDiag, qfi_pure, qfi_qubit
from .sources import dicke_to_qubits, embed_source, imprint_generator, imprint_phase
from .statevec import check_capacity, partial_trace, partial_trace_outer


@dataclass(frozen=True)
class ChainResult:
    psi: np.ndarray
    dpsi: np.ndarray
    rho_an: np.ndarray
    drho_an: np.ndarray

    @property
    def offdiag(self) -> AntennaOffDiag:
        return AntennaOffDiag(complex(self.rho_an[0, 1]), complex(self.drho_an[0, 1]),
                              float(self.rho_an[0, 0].real))

    @property
    def qfi_antenna(self) -> float:
        return qfi_qubit(self.offdiag)

    @property
    def qfi_chain(self) -> float:
        return qfi_pure(self.psi, self.dpsi)


def prepare(layout: ChainLayout, source_ket: np.ndarray, oat_time: Optional[float] = None) -> np.ndarray:
    """Embed a source ket; optionally twist the source qubits on the full register."""
    check_capacity(layout.n_qubits)
    psi = embed_source(source_ket, layout)
    if oat_time is not None:
        energies = occupation_pair_energies(layout.n_qubits, layout.source, 1.0)
        psi = psi * np.exp(-1j * oat_time * energies)
    return psi


def run_chain(layout: ChainLayout, J: np.ndarray, t: float, psi0: np.ndarray, theta: float = 0.0) -> ChainResult:
    psi = imprint_phase(psi0, layout, theta)
    dpsi = -1j * imprint_generator(psi, layout)
    psi = evolve(psi, J, t)
    dpsi = evolve(dpsi, J, t)
    keep = [layout.antenna]
    rho = partial_trace(psi, keep)
    cross = partial_trace_outer(dpsi, psi, keep)
    return ChainResult(psi, dpsi, rho, cross + cross.conj().T)


def run_symmetric(layout: ChainLayout, J: np.ndarray, t: float, coeffs: np.ndarray, theta: float = 0.0) -> ChainResult:
    """Same as :func:`run_chain` for a source given by Dicke coefficients at theta = 0."""
    return run_chain(layout, J, t, prepare(layout, dicke_to_qubits(coeffs)), theta)
