import numpy as np
import pytest

from qfi_conveyor.errors import ValidationError
from qfi_conveyor.ising import (
    ChainLayout,
    StarCouplings,
    basis_phase,
    evolve,
    expand_star,
    ising_energies,
    occupation_pair_energies,
    phases_from_couplings,
    validate_couplings,
)
from qfi_conveyor.statevec import SZ, product_state


def dense_hamiltonian(J):
    n = J.shape[0]
    H = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n):
        for j in range(i):
            ops = [np.eye(2)] * n
            ops[i] = SZ
            ops[j] = SZ
            term = np.ones((1, 1))
            for q in reversed(range(n)):
                term = np.kron(term, ops[q])
            H += J[i, j] * term
    return H


def random_couplings(rng, n):
    A = rng.normal(size=(n, n))
    J = A + A.T
    np.fill_diagonal(J, 0)
    return J


def test_energies_match_dense():
    rng = np.random.default_rng(0)
    J = random_couplings(rng, 4)
    assert np.allclose(ising_energies(J), np.diag(dense_hamiltonian(J)).real)


def test_evolve_matches_expm():
    from scipy.linalg import expm

    rng = np.random.default_rng(1)
    J = random_couplings(rng, 3)
    psi = product_state(3)
    assert np.allclose(evolve(psi, J, 0.37), expm(-0.37j * dense_hamiltonian(J)) @ psi)


def test_basis_phase():
    rng = np.random.default_rng(2)
    J = random_couplings(rng, 4)
    e = ising_energies(J)
    for k in (0, 5, 15):
        assert basis_phase(J, k, 0.8) == pytest.approx(0.8 * e[k])


def test_evolve_group_property():
    rng = np.random.default_rng(3)
    J = random_couplings(rng, 5)
    psi = product_state(5)
    assert np.allclose(evolve(evolve(psi, J, 0.2), J, 0.5), evolve(psi, J, 0.7))
    assert np.linalg.norm(evolve(psi, J, 3.0)) == pytest.approx(1.0)


def test_validate_couplings():
    with pytest.raises(ValidationError):
        validate_couplings(np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValidationError):
        validate_couplings(np.eye(2))
    with pytest.raises(ValidationError):
        evolve(product_state(3), np.zeros((2, 2)), 1.0)


def test_layout():
    lay = ChainLayout.standard(6, 2)
    assert lay.source == (0, 1) and lay.antenna == 5
    assert lay.medium == (2, 3, 4) and lay.mu == 3
    with pytest.raises(ValidationError):
        ChainLayout(3, (0, 1, 2), 2)
    with pytest.raises(ValidationError):
        ChainLayout(3, (0,), 0)


def test_expand_star():
    lay = ChainLayout.standard(5, 2)
    J = expand_star(lay, StarCouplings(0.5, 1.0, 0.3, -1.0))
    assert J[0, 4] == 0.5 and J[4, 1] == 0.5
    assert J[2, 4] == 1.0 and J[3, 4] == 1.0
    assert J[0, 1] == 0.3
    assert J[0, 2] == -1.0 and J[2, 3] == -1.0
    assert np.all(np.diag(J) == 0)


def test_phases_from_couplings():
    assert phases_from_couplings(0.5, 1.0, np.pi / 2) == (pytest.approx(np.pi / 2), pytest.approx(np.pi))


def test_occupation_energies_symmetric_sector():
    # on n occupied qubits out of M: u n (n-1) = u (Jz^2 - (M-1) Jz) + const
    m = 4
    e = occupation_pair_energies(m, range(m), 1.0)
    occ = np.array([bin(k).count("1") for k in range(2**m)])
    jz = m / 2 - occ
    assert np.allclose(e - (jz**2 - (m - 1) * jz), (e - (jz**2 - (m - 1) * jz))[0])
