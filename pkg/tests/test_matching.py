import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import linalg

from holomimo import em, matching
from holomimo.errors import DomainError, NumericalError
from holomimo.frontend import RadioFrontEnd
from holomimo.matching import MatchingKind, Side

FE = RadioFrontEnd()
LNA = FE.lna()


def array_z(m, d):
    return em.coupling_matrix(em.ArrayGeometry(m, d * FE.wavelength), FE.dipole())


def random_hpd(rng, n, cond=10.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, _ = np.linalg.qr(a)
    w = np.geomspace(1.0, cond, n)
    return (q * w) @ q.conj().T


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_principal_sqrt_matches_scipy(n, seed):
    a = random_hpd(np.random.default_rng(seed), n)
    s = matching.principal_sqrt(a)
    np.testing.assert_allclose(s, linalg.sqrtm(a), atol=1e-10)
    np.testing.assert_allclose(s @ s, a, atol=1e-10)
    np.testing.assert_allclose(s, s.conj().T, atol=1e-12)
    inv = matching.inverse_sqrt(a)
    np.testing.assert_allclose(inv @ s, np.eye(n), atol=1e-10)


def test_principal_sqrt_real_input_stays_real():
    s = matching.principal_sqrt(np.array([[4.0, 0.0], [0.0, 9.0]]))
    assert np.isrealobj(s)
    np.testing.assert_allclose(s, np.diag([2.0, 3.0]))


def test_sqrt_rejects_bad_matrices():
    with pytest.raises(NumericalError) as exc:
        matching.principal_sqrt(np.array([[1.0, 2.0], [0.0, 1.0]]), where="here")
    assert exc.value.where == "here"
    with pytest.raises(NumericalError):
        matching.principal_sqrt(np.diag([1.0, -1.0]))
    with pytest.raises(NumericalError):
        matching.inverse_sqrt(np.diag([1.0, 0.0]))


@pytest.mark.parametrize("m,d", [(2, 0.1), (4, 0.25), (8, 0.5)])
def test_synthesized_networks_are_lossless_and_reciprocal(m, d):
    z = array_z(m, d)
    for blocks in (matching.synthesize_power_matching(z, FE.z_generator),
                   matching.synthesize_noise_matching(z, LNA)):
        assert blocks.is_lossless()
        assert blocks.is_reciprocal(1e-12)


@pytest.mark.parametrize("m,d", [(2, 0.1), (5, 0.3), (16, 0.5)])
def test_power_matching_closures(m, d):
    z = array_z(m, d)
    tx = matching.front_end("full", "tx", z, FE.z_generator)
    np.testing.assert_allclose(tx.Z_eff, np.conj(FE.z_generator) * np.eye(m), atol=1e-10 * abs(FE.z_generator))
    assert np.linalg.norm(tx.B - np.eye(m)) <= 1e-10
    s = matching.principal_sqrt(z.real)
    np.testing.assert_allclose(tx.F, -1j * np.sqrt(FE.z_generator.real) * np.linalg.inv(s), rtol=1e-9)


@pytest.mark.parametrize("m,d", [(2, 0.1), (5, 0.3), (16, 0.5)])
def test_noise_matching_closures(m, d):
    z = array_z(m, d)
    rx = matching.front_end("full", "rx", z, FE.z_load, LNA)
    np.testing.assert_allclose(rx.Z_eff, LNA.z_opt * np.eye(m), atol=1e-10 * abs(LNA.z_opt))
    q = FE.z_load / (FE.z_load + LNA.z_opt)
    np.testing.assert_allclose(rx.Q, q * np.eye(m), atol=1e-12)
    s = matching.principal_sqrt(z.real)
    np.testing.assert_allclose(rx.F, 1j * np.sqrt(LNA.z_opt.real) * np.linalg.inv(s), rtol=1e-9)


def test_self_impedance_matching_is_diagonal_design():
    z = array_z(4, 0.2)
    rx = matching.front_end("self", "rx", z, FE.z_load, LNA)
    # without coupling it would present z_opt; with coupling it does not
    assert np.linalg.norm(rx.Z_eff - LNA.z_opt * np.eye(4)) > 1e-3
    blocks = matching.synthesize_noise_matching(np.diag(np.diag(z)), LNA)
    for part in (blocks.Z11, blocks.Z12, blocks.Z22):
        np.testing.assert_allclose(part, np.diag(np.diag(part)), atol=1e-12)
    tx = matching.front_end("self", "tx", z, FE.z_generator)
    assert np.linalg.norm(tx.B - np.eye(4)) > 1e-3
    np.testing.assert_allclose(tx.B, tx.B.conj().T, atol=1e-14)
    assert np.linalg.eigvalsh(tx.B).min() > 0


def test_self_matching_equals_full_without_coupling():
    z = np.diag(np.diag(array_z(3, 0.5)))
    a = matching.front_end("self", "rx", z, FE.z_load, LNA)
    b = matching.front_end("full", "rx", z, FE.z_load, LNA)
    np.testing.assert_allclose(a.Z_eff, b.Z_eff, atol=1e-12)


def test_no_matching_is_identity():
    z = array_z(3, 0.3)
    rx = matching.front_end("none", "rx", z, FE.z_load)
    np.testing.assert_array_equal(rx.F, np.eye(3))
    np.testing.assert_array_equal(rx.Z_eff, z)
    np.testing.assert_allclose(rx.Q, FE.z_load * np.linalg.inv(FE.z_load * np.eye(3) + z))


def test_b_matrix_is_hermitian_positive():
    z = array_z(6, 0.1)
    b = matching.b_matrix(FE.z_generator, z)
    np.testing.assert_allclose(b, b.conj().T, atol=0)
    assert np.linalg.eigvalsh(b).min() > 0


def test_b_matrix_power_identity():
    # p_rad = v_G^H B v_G / (4 R_G) for any generator voltages
    rng = np.random.default_rng(5)
    z = array_z(4, 0.15)
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    i = np.linalg.solve(FE.z_generator * np.eye(4) + z, v)
    p_direct = np.real(i.conj() @ z.real @ i)
    b = matching.b_matrix(FE.z_generator, z)
    assert np.real(v.conj() @ b @ v) / (4 * FE.z_generator.real) == pytest.approx(p_direct, rel=1e-12)


def test_receive_matching_needs_lna():
    with pytest.raises(DomainError):
        matching.front_end("full", "rx", array_z(2, 0.5), FE.z_load)


def test_reduce_rejects_inconsistent_arguments():
    z = array_z(2, 0.5)
    blocks = matching.synthesize_power_matching(z, FE.z_generator)
    with pytest.raises(DomainError):
        matching.reduce_front_end(matching.MatchingSpec("none", "tx"), blocks, z, FE.z_generator)
    with pytest.raises(DomainError):
        matching.reduce_front_end(matching.MatchingSpec("full", "tx"), None, z, FE.z_generator)
    with pytest.raises(ValueError):
        matching.MatchingSpec("partial", "tx")


def test_ill_conditioned_warning_and_singular_error():
    a = np.diag([1.0, 1e-14])
    with pytest.warns(matching.IllConditionedWarning):
        matching._solve(a, np.eye(2), "test")
    with pytest.raises(NumericalError):
        matching._solve(np.zeros((2, 2)), np.eye(2), "test")


def test_enums_accept_strings():
    assert MatchingKind("self") is MatchingKind.SELF
    assert Side("rx") is Side.RECEIVE
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        matching.front_end(MatchingKind.FULL, Side.TRANSMIT, array_z(2, 0.2), FE.z_generator)


def test_lna_parameters():
    assert LNA.z_opt == pytest.approx(5.0)
    lna = matching.LnaParams(5.0, 0.3j, 1.0)
    assert lna.z_opt == pytest.approx(5 * (np.sqrt(1 - 0.09) + 0.3j))
    with pytest.raises(DomainError):
        matching.LnaParams(5.0, 1.5, 1.0)
