import math

import numpy as np
import pytest

from qfi_conveyor.analytic import TransferSetting, offdiag_separable
from qfi_conveyor.entanglement import (
    BipartiteState,
    pair_closed_eigenvalues,
    pair_closed_params,
    pair_closed_matrix,
    negativity,
    negativity_closed_form,
    partial_transpose,
    pinned_couplings,
    pinned_qfi_antenna,
    reduce_pair,
)
from qfi_conveyor.errors import UnsupportedCaseError, ValidationError
from qfi_conveyor.ising import ChainLayout, StarCouplings, evolve, expand_star
from qfi_conveyor.metrology import qfi_qubit
from qfi_conveyor.sources import embed_source
from qfi_conveyor.statevec import eigenstate, product_state

BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)
T_GRID = np.linspace(0, math.pi, 200)


def protocol_state(n, t, J=None):
    lay = ChainLayout.standard(n, 1)
    J = pinned_couplings(lay) if J is None else J
    return evolve(embed_source(eigenstate("x"), lay), J, t), lay


def test_reduce_pair_t0():
    psi, lay = protocol_state(4, 0.0)
    b = reduce_pair(psi, lay)
    plus = eigenstate("x")
    v = np.kron(plus, plus)
    assert np.allclose(b.rho, np.outer(v, v.conj()))


def test_reduce_pair_matches_closed_n4():
    psi, lay = protocol_state(4, math.pi / 2)
    assert np.allclose(reduce_pair(psi, lay).rho, pair_closed_matrix(math.pi / 2, 4), atol=1e-9)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_reduce_pair_matches_closed_grid(n):
    for t in T_GRID[::7]:
        psi, lay = protocol_state(n, t)
        assert np.allclose(reduce_pair(psi, lay).rho, pair_closed_matrix(t, n), atol=1e-9)


def test_background_sign_gives_same_negativity():
    n = 5
    lay = ChainLayout.standard(n, 1)
    Jp = expand_star(lay, StarCouplings(0.5, 1.0, 0.0, 1.0))
    for t in T_GRID[::11]:
        a = negativity(reduce_pair(protocol_state(n, t)[0], lay))
        b = negativity(reduce_pair(protocol_state(n, t, Jp)[0], lay))
        assert a == pytest.approx(b, abs=1e-12)


def test_optimal_time_is_bell_state():
    psi, lay = protocol_state(6, math.pi / 2)
    rho = reduce_pair(psi, lay).rho
    assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-9)
    assert negativity(rho) == pytest.approx(0.5, abs=1e-9)


def test_reduce_pair_needs_single_source():
    lay = ChainLayout.standard(4, 2)
    with pytest.raises(UnsupportedCaseError):
        reduce_pair(product_state(4), lay)


def test_partial_transpose_examples():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=2) + 1j * rng.normal(size=2), rng.normal(size=2) + 1j * rng.normal(size=2)
    v = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
    prod = np.outer(v, v.conj())
    for side in ("first", "second"):
        pt = partial_transpose(prod, side)
        assert np.allclose(np.linalg.eigvalsh(pt), np.linalg.eigvalsh(prod))
    bell = np.outer(BELL, BELL)
    assert np.allclose(np.linalg.eigvalsh(partial_transpose(bell)), [-0.5, 0.5, 0.5, 0.5])
    with pytest.raises(ValidationError):
        partial_transpose(bell, "third")


def test_negativity_examples():
    assert negativity(np.outer(BELL, BELL)) == pytest.approx(0.5)
    v = np.kron(eigenstate("y"), eigenstate("z"))
    assert negativity(np.outer(v, v.conj())) == 0
    assert negativity(np.eye(4) / 4) == 0


def test_bipartite_validation():
    with pytest.raises(ValidationError):
        BipartiteState(np.eye(4))
    with pytest.raises(ValidationError):
        BipartiteState(np.eye(2) / 2)


def test_pair_closed_eigenvalues_and_trace():
    for n in range(3, 9):
        for t in T_GRID[::5]:
            pt = partial_transpose(pair_closed_matrix(t, n))
            lam = pair_closed_eigenvalues(t, n)
            assert lam.sum() == pytest.approx(1.0, abs=1e-14)
            assert np.allclose(np.sort(lam), np.linalg.eigvalsh(pt), atol=1e-12)
            # only lambda_3 may be negative
            assert min(lam[[0, 1, 3]]) >= -1e-12


def test_negativity_closed_form_examples():
    # alpha = 0 and QFI = 1 at t = pi/2
    assert negativity_closed_form(math.pi / 2, 4, 1.0) == pytest.approx(0.5)
    assert negativity_closed_form(0.0, 4, 0.0) == 0
    psi, lay = protocol_state(5, 0.3)
    assert negativity_closed_form(0.3, 5, pinned_qfi_antenna(0.3, 5)) == pytest.approx(negativity(reduce_pair(psi, lay)), abs=1e-9)


def test_pinned_qfi_matches_transfer_qfi():
    for n in (3, 6):
        for t in T_GRID[::13]:
            q = qfi_qubit(offdiag_separable(TransferSetting.from_couplings(1, n - 2, 0.5, 1.0, t)))
            assert pinned_qfi_antenna(t, n) == pytest.approx(q, abs=1e-12)


def test_im_alpha_relation():
    for n in range(3, 9):
        for t in T_GRID:
            al, _ = pair_closed_params(t, n)
            assert (16 * al.imag) ** 2 == pytest.approx(16 * pinned_qfi_antenna(t, n), abs=1e-9)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
def test_negativity_peak_coincides_with_qfi_peak(n):
    negs, qfis = [], []
    for t in T_GRID:
        psi, lay = protocol_state(n, t)
        negs.append(negativity(reduce_pair(psi, lay)))
        qfis.append(pinned_qfi_antenna(t, n))
    assert abs(int(np.argmax(negs)) - int(np.argmax(qfis))) <= 1
