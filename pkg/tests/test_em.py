import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from holomimo import em
from holomimo.errors import DomainError

LAM = 0.1
P = em.DipoleParams(LAM)


def induced_emf(d, offset, params=P):
    """Mutual impedance by direct quadrature of the induced-EMF integral."""
    k, half = params.wavenumber, params.length / 2
    c = em.ETA0 / (4 * np.pi)

    def integrand(z):
        r1 = np.hypot(d, z - half)
        r2 = np.hypot(d, z + half)
        r0 = np.hypot(d, z)
        field = (np.exp(-1j * k * r1) / r1 + np.exp(-1j * k * r2) / r2
                 - 2 * np.cos(k * half) * np.exp(-1j * k * r0) / r0)
        return 1j * c * field * np.sin(k * (half - abs(z - offset)))

    lo, hi = offset - half, offset + half
    pts = [offset] + [p for p in (-half, 0.0, half) if lo < p < hi]
    re = integrate.quad(lambda z: integrand(z).real, lo, hi, points=pts, limit=400, epsabs=0, epsrel=1e-12)[0]
    im = integrate.quad(lambda z: integrand(z).imag, lo, hi, points=pts, limit=400, epsabs=0, epsrel=1e-12)[0]
    return (re + 1j * im) / np.sin(k * half) ** 2


@pytest.mark.parametrize("x", [1e-6, 0.01, 0.5, 1.0, np.pi, 7.3, 25.0, 180.0])
def test_si_ci_match_mpmath(x):
    si, ci = em.sin_cos_integrals(x)
    assert si == pytest.approx(float(mpmath.si(x)), rel=1e-13, abs=1e-15)
    assert ci == pytest.approx(float(mpmath.ci(x)), rel=1e-12)


def test_si_ci_domain():
    assert em.sine_integral(0.0) == 0.0
    with pytest.raises(DomainError):
        em.cosine_integral(0.0)
    with pytest.raises(DomainError):
        em.sine_integral(-1.0)


def test_self_impedance_frozen():
    # half-wave dipole: 73.079 + j42.515 ohms
    z = P.self_impedance
    assert z.real == pytest.approx(73.079, abs=5e-3)
    assert z.imag == pytest.approx(42.515, abs=5e-3)


def test_self_impedance_is_scale_free():
    other = em.DipoleParams(3.7)
    assert other.self_impedance == pytest.approx(P.self_impedance, rel=1e-12)


def test_side_by_side_half_wave_frozen():
    z = em.mutual_impedance("side-by-side", LAM / 2, 0.0, P)
    assert z.real == pytest.approx(-12.523, abs=5e-3)
    assert z.imag == pytest.approx(-29.908, abs=5e-3)


def test_collinear_one_wavelength_frozen():
    z = em.mutual_impedance("collinear", 0.0, LAM, P)
    assert z.real == pytest.approx(-4.116, abs=5e-3)
    assert z.imag == pytest.approx(-0.722, abs=5e-3)


@pytest.mark.parametrize("d", [0.05, 0.1, 0.25, 0.5, 1.0, 2.0])
def test_side_by_side_matches_quadrature(d):
    z = em.mutual_impedance("side-by-side", d * LAM, 0.0, P)
    ref = induced_emf(d * LAM, 0.0)
    assert abs(z - ref) / abs(ref) < 1e-6


@pytest.mark.parametrize("d,h", [(0.1, 0.2), (0.3, 0.5), (0.5, 0.25), (0.25, -0.4), (1.0, 1.5)])
def test_echelon_matches_quadrature(d, h):
    z = em.mutual_impedance("parallel-in-echelon", d * LAM, h * LAM, P)
    ref = induced_emf(d * LAM, h * LAM)
    assert abs(z - ref) / abs(ref) < 1e-6


@pytest.mark.parametrize("h", [0.6, 1.0, 2.0])
def test_collinear_matches_quadrature(h):
    z = em.mutual_impedance("collinear", 0.0, h * LAM, P)
    ref = induced_emf(0.0, h * LAM)
    assert abs(z - ref) / abs(ref) < 1e-6


def test_echelon_without_offset_is_side_by_side():
    d = np.array([0.05, 0.3, 0.9]) * LAM
    a = em.mutual_impedance("parallel-in-echelon", d, 0.0, P)
    b = em.mutual_impedance("side-by-side", d, 0.0, P)
    np.testing.assert_allclose(a, b, rtol=1e-10)


def test_mutual_impedance_domain_errors():
    with pytest.raises(DomainError):
        em.mutual_impedance("side-by-side", 0.0, 0.0, P)
    with pytest.raises(DomainError):
        em.mutual_impedance("collinear", 0.0, 0.4 * LAM, P)
    with pytest.raises(DomainError):
        em.mutual_impedance("side-by-side", 0.1, 0.1, P)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.02, 3.0), st.floats(-2.0, 2.0))
def test_echelon_offset_sign_symmetry(d, h):
    a = em.mutual_impedance("parallel-in-echelon", d * LAM, h * LAM, P)
    b = em.mutual_impedance("parallel-in-echelon", d * LAM, -h * LAM, P)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 20.0))
def test_mutual_resistance_bounded_by_self(d):
    # a passive pair has |R12| < R11
    z = em.mutual_impedance("side-by-side", d * LAM, 0.0, P)
    assert abs(z.real) < P.radiation_resistance


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12), st.floats(0.05, 1.0),
       st.sampled_from(["side-by-side", "parallel-in-echelon"]))
def test_coupling_matrix_symmetric_passive(m, d, config):
    geom = em.ArrayGeometry(m, d * LAM, config, 0.1 * LAM if config == "parallel-in-echelon" else 0.0)
    z = em.coupling_matrix(geom, P)
    np.testing.assert_allclose(z, z.T, rtol=0, atol=1e-12)
    assert np.linalg.eigvalsh(z.real).min() > 0


def test_coupling_matrix_diagonal_and_toeplitz():
    geom = em.ArrayGeometry(5, 0.3 * LAM)
    z = em.coupling_matrix(geom, P)
    np.testing.assert_allclose(np.diag(z), P.self_impedance + P.dissipation_resistance)
    assert z[0, 2] == pytest.approx(z[1, 3]) and z[0, 2] == pytest.approx(z[2, 0])
    assert z[0, 1] == pytest.approx(em.mutual_impedance("side-by-side", 0.3 * LAM, 0.0, P))
    np.testing.assert_allclose(np.diag(em.coupling_matrix(geom, P, dissipation=0.0)), P.self_impedance)


def test_mu_zero_crossings():
    # first null near 0.43 lambda; the induced-EMF resistance turns positive
    # again just below one wavelength
    xs = np.linspace(0.1, 1.0, 901)
    mu = np.array([em.mu_coefficient(x * LAM, P) for x in xs])
    changes = xs[np.flatnonzero(np.diff(np.sign(mu)))]
    assert len(changes) == 2
    assert abs(changes[0] - 0.4297) < 2e-3
    assert abs(changes[1] - 0.9634) < 2e-3
    assert em.mu_coefficient(0.2 * LAM, P) > 0
    assert em.mu_coefficient(0.5 * LAM, P) < 0


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 9), st.floats(0.05, 1.0), st.floats(-np.pi / 2, np.pi / 2), st.floats(-np.pi, np.pi))
def test_steering_vector_unit_modulus(m, d, theta, phi):
    geom = em.ArrayGeometry(m, d * LAM)
    a = em.steering_vector(theta, phi, geom, LAM)
    np.testing.assert_allclose(np.abs(a), 1.0, rtol=1e-12)


def test_steering_phase_progression():
    geom = em.ArrayGeometry(4, 0.25 * LAM)
    a = em.steering_vector(0.0, np.pi / 2, geom, LAM)
    ratios = a[1:] / a[:-1]
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-12)
    assert abs(abs(np.angle(ratios[0])) - np.pi / 2) < 1e-12


def test_array_geometry_rejects_bad_input():
    with pytest.raises(DomainError):
        em.ArrayGeometry(0, 0.1)
    with pytest.raises(DomainError):
        em.ArrayGeometry(3, -0.1)


def test_spatial_correlation_is_hermitian_psd():
    geom = em.ArrayGeometry(6, 0.2 * LAM)
    # uniform over the front half-space in the elevation/azimuth measure
    r = em.spatial_correlation(lambda t, p: np.cos(t) / (2 * np.pi) * np.ones_like(p), geom, LAM)
    np.testing.assert_allclose(r, r.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(r).min() > -1e-10
    np.testing.assert_allclose(np.diag(r).real, 1.0, rtol=1e-6)
    # isotropic scattering gives sinc(2 d / lambda) correlation
    np.testing.assert_allclose(r[0, 1].real, np.sinc(2 * 0.2), rtol=1e-6)
