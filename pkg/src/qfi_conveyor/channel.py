"""Single-qubit channels: the source-to-antenna conveyor, Choi states, fidelities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import CertificationError, InconclusiveFitError, UnsupportedCaseError, ValidationError
from .ising import ChainLayout, evolve, validate_couplings
from .metrology import ThetaFamily
from .sources import embed_source
from .statevec import (
    I2,
    PAULI,
    is_hermitian,
    partial_trace,
    partial_trace_outer,
    rotation,
    validate_density_matrix,
)

CHOI_TOL = 1e-9
CLAMP = 1e-12
S4_GRID = (0.0, 0.01, -0.01, 0.02, -0.02, 0.05, -0.05)

_E = [np.zeros((2, 2), dtype=complex) for _ in range(4)]
for _k, _e in enumerate(_E):
    _e[_k // 2, _k % 2] = 1.0


@dataclass(frozen=True)
class QubitChannel:
    apply: Callable[[np.ndarray], np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return self.apply(validate_density_matrix(rho))

    def on_operator(self, op: np.ndarray) -> np.ndarray:
        """Linear extension to an arbitrary 2x2 operator."""
        op = np.asarray(op, dtype=complex)
        # Hermitian and anti-Hermitian parts, each as a difference of PSD terms
        out = np.zeros((2, 2), dtype=complex)
        for part, coef in ((0.5 * (op + op.conj().T), 1.0), (0.5j * (op.conj().T - op), 1j)):
            lam, vec = np.linalg.eigh(part)
            for l, v in zip(lam, vec.T):
                if abs(l) > 0:
                    out += coef * l * self.apply(np.outer(v, v.conj()))
        return out


@dataclass(frozen=True)
class ChoiMatrix:
    """Normalized Choi state, output leg first: ``J = 1/2 sum_ij Phi(E_ij) (x) E_ij``."""

    j: np.ndarray

    def input_marginal(self) -> np.ndarray:
        return np.einsum("aiaj->ij", self.j.reshape(2, 2, 2, 2))

    def act(self, rho: np.ndarray) -> np.ndarray:
        """Recover ``Phi(rho) = 2 Tr_in[J (I (x) rho^T)]``."""
        m = self.j @ np.kron(I2, np.asarray(rho, dtype=complex).T)
        return 2 * np.einsum("aibi->ab", m.reshape(2, 2, 2, 2))


def conveyor(layout: ChainLayout, J: np.ndarray, t: float) -> QubitChannel:
    """Map from the source qubit's input state to the antenna's output state."""
    if layout.m != 1:
        raise UnsupportedCaseError("the conveyor channel is implemented for one-qubit sources only")
    J = validate_couplings(J)
    if J.shape[0] != layout.n_qubits:
        raise ValidationError("coupling matrix does not match the layout")

    def apply(rho: np.ndarray) -> np.ndarray:
        lam, vec = np.linalg.eigh(rho)
        out = np.zeros((2, 2), dtype=complex)
        for l, v in zip(lam, vec.T):
            if l <= CLAMP:
                continue
            psi = evolve(embed_source(v, layout), J, t)
            out += l * partial_trace(psi, [layout.antenna])
        return out

    return QubitChannel(apply, {"layout": layout, "couplings": J, "t": t})


def conveyor_blocks(layout: ChainLayout, J: np.ndarray, t: float) -> list[np.ndarray]:
    """``Phi(|i><j|)`` for the conveyor, from two evolved basis inputs."""
    if layout.m != 1:
        raise UnsupportedCaseError("the conveyor channel is implemented for one-qubit sources only")
    basis = [evolve(embed_source(np.eye(2, dtype=complex)[k], layout), J, t) for k in range(2)]
    return [partial_trace_outer(basis[k // 2], basis[k % 2], [layout.antenna]) for k in range(4)]


def _certify(j: np.ndarray) -> ChoiMatrix:
    if not is_hermitian(j, CHOI_TOL):
        raise CertificationError("Choi matrix is not Hermitian")
    if np.linalg.eigvalsh(j).min() < -CHOI_TOL:
        raise CertificationError("Choi matrix is not positive semidefinite: channel is not CP")
    c = ChoiMatrix(j)
    if np.abs(c.input_marginal() - I2 / 2).max() > CHOI_TOL:
        raise CertificationError("Choi input marginal is not I/2: channel is not trace preserving")
    return c


def choi_from_blocks(blocks: Sequence[np.ndarray]) -> ChoiMatrix:
    j = 0.5 * sum(np.kron(b, e) for b, e in zip(blocks, _E))
    return _certify(j)


def choi(ch: QubitChannel) -> ChoiMatrix:
    return choi_from_blocks([ch.on_operator(e) for e in _E])


def identity_channel() -> QubitChannel:
    return QubitChannel(lambda rho: rho.copy(), {"kind": "identity"})


def unitary_channel(u: np.ndarray) -> QubitChannel:
    u = np.asarray(u, dtype=complex)
    return QubitChannel(lambda rho: u @ rho @ u.conj().T, {"kind": "unitary"})


def depolarizing_channel(p: float = 1.0) -> QubitChannel:
    if not 0 <= p <= 1:
        raise ValidationError("depolarizing strength must be in [0, 1]")
    return QubitChannel(lambda rho: (1 - p) * rho + p * np.trace(rho) * I2 / 2, {"kind": "depolarizing", "p": p})


def dephasing_channel(axis: str) -> QubitChannel:
    """Complete dephasing that keeps only the Bloch component along ``axis``."""
    s = PAULI[axis]
    return QubitChannel(lambda rho: 0.5 * (rho + s @ rho @ s), {"kind": "dephasing", "axis": axis})


def _sqrtm_psd(m: np.ndarray) -> np.ndarray:
    lam, vec = np.linalg.eigh(m)
    lam = np.where(lam < CLAMP, 0.0, lam)
    return (vec * np.sqrt(lam)) @ vec.conj().T


def _check_psd(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, 1e-9) or np.linalg.eigvalsh(m).min() < -1e-9:
        raise ValidationError(f"{name} is not a PSD Hermitian matrix")
    return m


def uhlmann_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``(Tr |sqrt(rho) sqrt(sigma)|)^2``."""
    rho = _check_psd(rho, "rho")
    sigma = _check_psd(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise ValidationError("states must have equal dimensions")
    nuc = np.linalg.svd(_sqrtm_psd(rho) @ _sqrtm_psd(sigma), compute_uv=False).sum()
    return float(min(max(nuc * nuc, 0.0), 1.0))


def _euler(x: np.ndarray) -> np.ndarray:
    return rotation("z", x[0]) @ rotation("y", x[1]) @ rotation("z", x[2])


def process_fidelity(ch: QubitChannel | ChoiMatrix, target: Optional[QubitChannel] = None) -> float:
    """Choi-state fidelity to ``target`` (identity if omitted)."""
    j = ch if isinstance(ch, ChoiMatrix) else choi(ch)
    ref = choi(target or identity_channel())
    return uhlmann_fidelity(j.j, ref.j)


def process_fidelity_local_frame(ch: QubitChannel | ChoiMatrix, target: Optional[QubitChannel] = None):
    """Process fidelity maximized over a single-qubit unitary on the output.

    Returns ``(fidelity, u)``. Deterministic multi-start local optimization.
    """
    j = ch if isinstance(ch, ChoiMatrix) else choi(ch)
    ref = choi(target or identity_channel()).j

    def loss(x):
        w = np.kron(_euler(x), I2)
        return -uhlmann_fidelity(w @ j.j @ w.conj().T, ref)

    best = None
    for a in np.linspace(0, 2 * np.pi, 4, endpoint=False):
        for b in (0.0, np.pi / 2, np.pi):
            r = minimize(loss, np.array([a, b, 0.3]), method="Nelder-Mead",
                         options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
            if best is None or r.fun < best.fun:
                best = r
    return float(-best.fun), _euler(best.x)


@dataclass(frozen=True)
class GapFit:
    intercept: float
    coefficient: float
    residual: float


def qfi_fidelity_gap(
    family_in: ThetaFamily, family_out: ThetaFamily, theta_grid: Sequence[float] = S4_GRID
) -> GapFit:
    """Least-squares fit of ``1 - F(rho_in, rho_out) = c0 + c2 theta^2``.

    Raises :class:`InconclusiveFitError` when the RMS residual exceeds 10% of
    the quadratic term's largest value on the grid.
    """
    grid = np.asarray(theta_grid, dtype=float)
    if not np.any(grid == 0.0) or np.abs(grid).max() > 0.05 + 1e-15:
        raise ValidationError("theta grid must include 0 and stay within |theta| <= 0.05")
    y = np.array([1 - uhlmann_fidelity(family_in.rho(x), family_out.rho(x)) for x in grid])
    design = np.column_stack([np.ones_like(grid), grid**2])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    # compare against the size of the fitted quadratic term on this grid
    if residual > 0.1 * abs(coef[1]) * np.max(grid**2) + 1e-12:
        raise InconclusiveFitError(f"fit residual {residual:.3g} vs coefficient {coef[1]:.3g}")
    return GapFit(float(coef[0]), float(coef[1]), residual)


def channel_family(ch: QubitChannel, family: ThetaFamily) -> ThetaFamily:
    """Output family ``theta -> ch(rho(theta))`` (finite-difference derivative)."""
    return ThetaFamily(lambda th: ch(family.rho(th)), step=family.step)
