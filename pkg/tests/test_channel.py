import math

import numpy as np
import pytest

from qfi_conveyor.channel import (
    ChoiMatrix,
    channel_family,
    choi,
    choi_from_blocks,
    conveyor,
    conveyor_blocks,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    process_fidelity,
    process_fidelity_local_frame,
    qfi_fidelity_gap,
    uhlmann_fidelity,
    unitary_channel,
)
from qfi_conveyor.errors import CertificationError, InconclusiveFitError, UnsupportedCaseError, ValidationError
from qfi_conveyor.ising import ChainLayout, StarCouplings, expand_star
from qfi_conveyor.metrology import ThetaFamily, qfi_eigendecomp
from qfi_conveyor.statevec import I2, SX, SY, eigenstate, rotation


def chain(n=4, j1=0.5, j2=1.0, u=0.0, jbg=0.0):
    lay = ChainLayout.standard(n, 1)
    return lay, expand_star(lay, StarCouplings(j1, j2, u, jbg))


def random_rho(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    r = a @ a.conj().T
    return r / np.trace(r)


def rotation_family():
    return ThetaFamily(lambda th: rotation("y", th) @ eigenstate("x"))


def test_conveyor_t0_constant():
    lay, J = chain()
    ch = conveyor(lay, J, 0.0)
    plus = np.outer(eigenstate("x"), eigenstate("x").conj())
    rng = np.random.default_rng(0)
    for _ in range(3):
        assert np.allclose(ch(random_rho(rng)), plus)


def test_conveyor_linear_tp():
    lay, J = chain(5, 0.3, 0.8, 0.2, -0.4)
    ch = conveyor(lay, J, 1.1)
    rng = np.random.default_rng(1)
    r1, r2 = random_rho(rng), random_rho(rng)
    for w in (0, 0.25, 0.5, 1):
        mix = ch(w * r1 + (1 - w) * r2)
        assert np.allclose(mix, w * ch(r1) + (1 - w) * ch(r2), atol=1e-10)
        assert np.trace(mix).real == pytest.approx(1.0, abs=1e-9)


def test_conveyor_rejects_multi_qubit_source():
    lay = ChainLayout.standard(4, 2)
    with pytest.raises(UnsupportedCaseError):
        conveyor(lay, expand_star(lay, StarCouplings(0.5, 1.0)), 1.0)


def test_choi_certified_over_sweep():
    rng = np.random.default_rng(2)
    for n in (2, 4, 6, 8):
        for t in np.linspace(0, 3, 5):
            lay, J = chain(n, *rng.normal(size=4))
            c = choi_from_blocks(conveyor_blocks(lay, J, t))
            assert np.linalg.eigvalsh(c.j).min() > -1e-9
            assert np.allclose(c.input_marginal(), I2 / 2, atol=1e-9)


def test_choi_blocks_agree_with_apply_and_reconstruct():
    lay, J = chain(5, 0.7, -0.3, 0.1, 0.9)
    ch = conveyor(lay, J, 0.8)
    c = choi(ch)
    assert np.allclose(c.j, choi_from_blocks(conveyor_blocks(lay, J, 0.8)).j, atol=1e-12)
    rng = np.random.default_rng(3)
    for _ in range(3):
        r = random_rho(rng)
        assert np.allclose(c.act(r), ch(r), atol=1e-8)


def test_choi_examples():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(choi(identity_channel()).j, np.outer(bell, bell))
    assert np.allclose(choi(depolarizing_channel(1.0)).j, np.eye(4) / 4)


def test_choi_certification_error():
    transpose = identity_channel().__class__(lambda rho: rho.T)
    with pytest.raises(CertificationError):
        choi(transpose)


def test_uhlmann_examples():
    rng = np.random.default_rng(4)
    r, s = random_rho(rng), random_rho(rng)
    assert uhlmann_fidelity(r, r) == pytest.approx(1.0, abs=1e-9)
    assert uhlmann_fidelity(r, s) == pytest.approx(uhlmann_fidelity(s, r), abs=1e-9)
    assert 0 <= uhlmann_fidelity(r, s) <= 1
    assert uhlmann_fidelity(np.diag([1, 0]), np.diag([0, 1])) == 0
    assert uhlmann_fidelity(I2 / 2, np.diag([1, 0])) == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        uhlmann_fidelity(np.diag([1.5, -0.5]), I2 / 2)


def test_process_fidelity_unitary_frame():
    u = rotation("z", 0.8) @ rotation("x", 0.3)
    assert process_fidelity(unitary_channel(u)) < 1
    f, _ = process_fidelity_local_frame(unitary_channel(u))
    assert f == pytest.approx(1.0, abs=1e-8)


def test_conveyor_optimal_qfi_preserved():
    lay, J = chain()
    ch = conveyor(lay, J, math.pi / 2)
    out = channel_family(ch, rotation_family())
    assert qfi_eigendecomp(out) == pytest.approx(1.0, abs=1e-6)
    out_generic = channel_family(conveyor(lay, J, 1.0), rotation_family())
    assert qfi_eigendecomp(out_generic) < 1.0 - 1e-3


def test_conveyor_process_fidelity_is_one_half_at_optimum():
    # the antenna only keeps the input's z component, so no output frame reaches 1
    lay, J = chain()
    f_raw = process_fidelity(conveyor(lay, J, math.pi / 2))
    f_loc, _ = process_fidelity_local_frame(conveyor(lay, J, math.pi / 2))
    assert f_raw == pytest.approx(0.25, abs=1e-9)
    assert f_loc == pytest.approx(0.5, abs=1e-8)
    assert process_fidelity_local_frame(conveyor(lay, J, 0.7))[0] < f_loc


def test_gap_identical_families():
    fam = rotation_family()
    fit = qfi_fidelity_gap(fam, fam)
    assert fit.intercept == pytest.approx(0, abs=1e-9) and fit.coefficient == pytest.approx(0, abs=1e-9)


def test_gap_conveyor_flat():
    lay, J = chain()
    fam = rotation_family()
    fit = qfi_fidelity_gap(fam, channel_family(conveyor(lay, J, math.pi / 2), fam))
    assert abs(fit.coefficient) < 1e-4
    assert fit.intercept == pytest.approx(0.5, abs=1e-9)


def test_gap_dephasing_matches_qfi_loss():
    r = 0.8
    fin = ThetaFamily(lambda th: 0.5 * (I2 + r * (math.cos(th) * SX + math.sin(th) * SY)))
    fout = channel_family(dephasing_channel("x"), fin)
    fit = qfi_fidelity_gap(fin, fout)
    expected = 0.25 * abs(qfi_eigendecomp(fin) - qfi_eigendecomp(fout))
    assert fit.coefficient == pytest.approx(expected, rel=0.1)


def test_gap_pure_input_is_not_quadratic_in_qfi():
    # a pure input family against a fully dephased output: 1-F = sin^2/2, twice the quadratic law
    fam = rotation_family()
    fit = qfi_fidelity_gap(fam, channel_family(dephasing_channel("x"), fam))
    assert fit.coefficient == pytest.approx(0.5, rel=1e-3)


def test_gap_grid_validation():
    fam = rotation_family()
    with pytest.raises(ValidationError):
        qfi_fidelity_gap(fam, fam, [0.01, 0.02])
    with pytest.raises(ValidationError):
        qfi_fidelity_gap(fam, fam, [0, 0.2])


def test_gap_inconclusive():
    fam = rotation_family()
    wobble = ThetaFamily(lambda th: rotation("y", th + 0.3 * abs(th) ** 0.25) @ eigenstate("x"))
    with pytest.raises(InconclusiveFitError):
        qfi_fidelity_gap(fam, wobble)


def test_choi_matrix_type():
    c = ChoiMatrix(np.eye(4) / 4)
    assert np.allclose(c.input_marginal(), I2 / 2)
