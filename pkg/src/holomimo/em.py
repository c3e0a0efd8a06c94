"""Electromagnetic primitives for arrays of half-wavelength dipoles.

Geometry conventions: dipoles are vertical (along z); a side-by-side ULA lies
on the y-axis, so azimuth 0 is front-fire and azimuth +-pi/2 is end-fire.
Elevation ``theta`` is measured from the xy-plane, azimuth ``phi`` from the
x-axis. Impedances follow the induced-EMF method with sinusoidal currents.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import constants, linalg, special

from .errors import DomainError

ETA0 = constants.mu_0 * constants.c  # free-space wave impedance, ohms


class Configuration(str, enum.Enum):
    SIDE_BY_SIDE = "side-by-side"
    COLLINEAR = "collinear"
    ECHELON = "parallel-in-echelon"


@dataclass(frozen=True)
class DipoleParams:
    """A thin center-fed dipole of length lambda/2.

    ``radius`` defaults to lambda/1000. The dissipation resistance is given as
    a fraction of the radiation resistance.
    """

    wavelength: float
    radius: float | None = None
    dissipation_ratio: float = 1e-3

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError("wavelength must be positive")
        if self.radius is None:
            object.__setattr__(self, "radius", self.wavelength / 1000)
        if not 0 < self.radius < self.length / 20:
            raise DomainError("dipole radius must satisfy 0 < radius << length")
        if not self.dissipation_ratio >= 0:
            raise DomainError("dissipation_ratio must be >= 0")

    @classmethod
    def from_frequency(cls, frequency, **kwargs):
        return cls(constants.c / frequency, **kwargs)

    @property
    def length(self):
        return self.wavelength / 2

    @property
    def wavenumber(self):
        return 2 * np.pi / self.wavelength

    @cached_property
    def self_impedance(self):
        return self_impedance(self)

    @property
    def radiation_resistance(self):
        return self.self_impedance.real

    @property
    def dissipation_resistance(self):
        return self.dissipation_ratio * self.radiation_resistance


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array of parallel vertical dipoles centered at the origin.

    ``spacing`` is the element step perpendicular to the dipoles (side-by-side,
    echelon) or along them (collinear). ``offset`` is the extra step along z
    between neighbours of an echelon array.
    """

    count: int
    spacing: float
    configuration: Configuration = Configuration.SIDE_BY_SIDE
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "configuration", Configuration(self.configuration))
        if self.count < 1:
            raise DomainError("array needs at least one element")
        if not self.spacing > 0:
            raise DomainError("spacing must be positive")
        if self.configuration is not Configuration.ECHELON and self.offset != 0:
            raise DomainError("offset is only meaningful for parallel-in-echelon arrays")

    @property
    def step(self):
        if self.configuration is Configuration.COLLINEAR:
            return np.array([0.0, 0.0, self.spacing])
        return np.array([0.0, self.spacing, self.offset])

    @property
    def axis(self):
        s = self.step
        return s / np.linalg.norm(s)

    @property
    def positions(self):
        m = np.arange(self.count) - (self.count - 1) / 2
        return m[:, None] * self.step[None, :]


@dataclass(frozen=True)
class PlanePath:
    """One plane wave reaching the array.

    ``departure`` holds the (theta, phi) of departure at the transmitter; when
    omitted the line-of-sight reciprocal direction is used. ``gain``
    overrides the line-of-sight coefficient alpha' when given.
    """

    theta: float
    phi: float
    distance: float
    gain: complex | None = None
    departure: tuple[float, float] | None = field(default=None)

    def __post_init__(self):
        if not self.distance > 0:
            raise DomainError("path distance must be positive")

    @property
    def departure_angles(self):
        if self.departure is not None:
            return self.departure
        return -self.theta, self.phi + np.pi


def sine_integral(x):
    """Si(x) for x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x >= 0)):
        raise DomainError("Si is evaluated for x >= 0 only")
    return special.sici(x)[0]


def cosine_integral(x):
    """Ci(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("Ci(x) is undefined for x <= 0")
    return special.sici(x)[1]


def sin_cos_integrals(x):
    """Return ``(Si(x), Ci(x))`` for x > 0."""
    si, ci = sine_integral(x), cosine_integral(x)
    if np.ndim(si) == 0:
        return float(si), float(ci)
    return si, ci


def _si(x):
    return special.sici(x)[0]


def _ci(x):
    return special.sici(x)[1]


def self_impedance(params: DipoleParams) -> complex:
    """Input impedance of an isolated dipole, without dissipation."""
    k = params.wavenumber
    kl = k * params.length
    a = params.radius
    g = np.euler_gamma
    r = ETA0 / (2 * np.pi) * (
        g + np.log(kl) - _ci(kl)
        + 0.5 * np.sin(kl) * (_si(2 * kl) - 2 * _si(kl))
        + 0.5 * np.cos(kl) * (g + np.log(kl / 2) + _ci(2 * kl) - 2 * _ci(kl))
    )
    x = ETA0 / (4 * np.pi) * (
        2 * _si(kl)
        + np.cos(kl) * (2 * _si(kl) - _si(2 * kl))
        - np.sin(kl) * (2 * _ci(kl) - _ci(2 * kl) - _ci(2 * k * a * a / params.length))
    )
    # referred from the current maximum to the feed
    return complex(r + 1j * x) / np.sin(kl / 2) ** 2


def _side_by_side(d, params):
    k, l = params.wavenumber, params.length
    root = np.sqrt(d * d + l * l)
    u0, u1, u2 = k * d, k * (root + l), k * (root - l)
    r = ETA0 / (4 * np.pi) * (2 * _ci(u0) - _ci(u1) - _ci(u2))
    x = -ETA0 / (4 * np.pi) * (2 * _si(u0) - _si(u1) - _si(u2))
    return r + 1j * x


def _expint(w):
    si, ci = special.sici(w)
    return ci - 1j * si


def _segment(d, za, zb, sigma, k):
    # int_za^zb exp(-jk(R - sigma z)) / R dz with R = hypot(d, z)
    def w(z):
        r = np.hypot(d, z)
        s = sigma * z
        with np.errstate(divide="ignore", invalid="ignore"):
            return k * np.where(s > 0, d * d / (r + s), r - s)

    on_axis = (d == 0) & (sigma * za > 0)
    wa = np.where(on_axis, 1.0, w(za))
    wb = np.where(on_axis, 1.0, w(zb))
    regular = -sigma * (_expint(wb) - _expint(wa))
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = sigma * np.log(zb / za)
    return np.where(on_axis, logs, regular)


def _parallel_mutual(d, h, params):
    """Mutual impedance of parallel dipoles, side distance d, axial offset h."""
    k = params.wavenumber
    half = params.length / 2
    total = 0j
    for zs, coef in ((half, 1.0), (-half, 1.0), (0.0, -2 * np.cos(k * half))):
        lo, mid, hi = h - half - zs, h - zs, h + half - zs

        def seg(sigma, a, b):
            return np.exp(1j * sigma * k * zs) * _segment(d, a, b, sigma, k)

        lower = (np.exp(1j * k * (half - h)) * seg(1, lo, mid)
                 - np.exp(-1j * k * (half - h)) * seg(-1, lo, mid))
        upper = (np.exp(1j * k * (half + h)) * seg(-1, mid, hi)
                 - np.exp(-1j * k * (half + h)) * seg(1, mid, hi))
        total = total + coef * (lower + upper) / 2j
    return 1j * ETA0 / (4 * np.pi) * total / np.sin(k * half) ** 2


def mutual_impedance(config, separation, offset, params: DipoleParams):
    """Mutual impedance between two identical dipoles.

    ``separation`` is the distance between the dipole axes and ``offset`` the
    shift of their centers along z. Side-by-side pairs need ``offset == 0``;
    collinear pairs need ``separation == 0`` and ``|offset| > length``.
    Accepts scalars or arrays.
    """
    config = Configuration(config)
    d = np.asarray(separation, dtype=float)
    h = np.asarray(offset, dtype=float)
    if config is Configuration.SIDE_BY_SIDE:
        if np.any(~(d > 0)):
            raise DomainError("side-by-side dipoles need a positive separation")
        if np.any(h != 0):
            raise DomainError("side-by-side dipoles have zero axial offset")
        z = _side_by_side(d, params)
    elif config is Configuration.COLLINEAR:
        if np.any(d != 0):
            raise DomainError("collinear dipoles share an axis (separation = 0)")
        if np.any(~(np.abs(h) > params.length)):
            raise DomainError("collinear dipoles overlap or touch")
        z = _parallel_mutual(d, np.abs(h), params)
    else:
        if np.any(~(d > 0)):
            raise DomainError("echelon dipoles need a positive separation")
        z = _parallel_mutual(d, h, params)
    return complex(z) if z.ndim == 0 else z


def coupling_matrix(geom: ArrayGeometry, params: DipoleParams, dissipation=None):
    """Array impedance matrix including the dissipation resistance.

    ``dissipation`` overrides the per-element series resistance (scalar or
    length-M sequence); by default ``params.dissipation_resistance`` is used.
    """
    m = geom.count
    if dissipation is None:
        dissipation = params.dissipation_resistance
    diag = np.broadcast_to(np.asarray(dissipation, dtype=float), (m,))
    if np.any(diag < 0):
        raise DomainError("dissipation resistance must be >= 0")
    column = np.empty(m, dtype=complex)
    column[0] = params.self_impedance
    if m > 1:
        n = np.arange(1, m)
        step = geom.step
        sep = np.hypot(step[0], step[1]) * n
        off = step[2] * n
        column[1:] = mutual_impedance(geom.configuration, sep, off, params)
    z = linalg.toeplitz(column, column)  # symmetric, not Hermitian
    return z + np.diag(diag)


def mu_coefficient(d_h, params: DipoleParams):
    """Normalized mutual resistance of two side-by-side dipoles spaced ``d_h``."""
    z = mutual_impedance(Configuration.SIDE_BY_SIDE, d_h, 0.0, params)
    return np.real(z) / (params.radiation_resistance + params.dissipation_resistance)


def wave_vector(theta, phi, wavelength):
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    k = 2 * np.pi / wavelength
    return k * np.stack([np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), np.sin(theta)])


def steering_vector(theta, phi, geom: ArrayGeometry, wavelength):
    """Array response exp(j k(theta, phi)^T u_m); shape (M,) or (M, ...) for array angles."""
    kv = wave_vector(theta, phi, wavelength)
    phase = np.tensordot(geom.positions, kv, axes=(1, 0))
    return np.exp(1j * phase)


def radiation_pattern(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any(~(np.abs(theta) < np.pi / 2)):
        raise DomainError("pattern is evaluated for |theta| < pi/2")
    return np.cos(np.pi / 2 * np.sin(theta)) / (np.pi * np.cos(theta))


def theta_hat(theta, phi):
    # polar unit vector written with elevation angles
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), -np.cos(theta)])


def effective_length(theta, phi, params: DipoleParams):
    return params.wavelength * radiation_pattern(theta) * theta_hat(theta, phi)


def los_alpha_prime(tx_angles, rx_angles, distance, params: DipoleParams, tx_params=None):
    """Line-of-sight coupling coefficient alpha' between two dipoles.

    The reference phase is the propagation phase -2 pi d / lambda.
    """
    distance = np.asarray(distance, dtype=float)
    if np.any(~(distance > 0)):
        raise DomainError("distance must be positive")
    tx_params = tx_params or params
    lt = effective_length(*tx_angles, tx_params)
    lr = effective_length(*rx_angles, params)
    dot = np.sum(lt * lr, axis=0)
    lam = params.wavelength
    return 1j * np.exp(-2j * np.pi * distance / lam) * dot / (2 * lam * distance)


def los_z_art(theta, phi, distance, geom: ArrayGeometry, params: DipoleParams, tx_params=None):
    """Vectorized single-path LoS transimpedances, one column per user: shape (M, K)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    alpha = los_alpha_prime((-theta, phi + np.pi), (theta, phi), distance, params, tx_params)
    a = steering_vector(theta, phi, geom, params.wavelength)
    return ETA0 * a * alpha[None, :]


def z_art_los(paths, geom: ArrayGeometry, params: DipoleParams, tx_params=None):
    """Open-circuit transimpedance vector as a superposition of plane paths."""
    if not paths:
        raise DomainError("at least one path is required")
    z = np.zeros(geom.count, dtype=complex)
    for p in paths:
        if p.gain is None:
            alpha = los_alpha_prime(p.departure_angles, (p.theta, p.phi), p.distance, params, tx_params)
        else:
            alpha = p.gain
        z += ETA0 * alpha * steering_vector(p.theta, p.phi, geom, params.wavelength)
    return z


def _gauss_grid(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x = x * np.pi / 2
    w = w * np.pi / 2
    th, ph = np.meshgrid(x, x, indexing="ij")
    return th.ravel(), ph.ravel(), np.outer(w, w).ravel()


def spatial_correlation(density, geom: ArrayGeometry, wavelength, gain=1.0,
                        tol=1e-8, start=16, max_nodes=1024):
    """Correlation matrix of the open-circuit response for a continuum of paths.

    ``density`` is the normalized angular scattering function f(theta, phi) on
    [-pi/2, pi/2]^2 and ``gain`` the average channel gain (scalar or callable).
    Tensor Gauss-Legendre quadrature is refined by doubling the node count
    until the Frobenius change falls below ``tol``.
    """
    def evaluate(n):
        th, ph, w = _gauss_grid(n)
        f = np.asarray(density(th, ph), dtype=float) * np.ones_like(th)
        if np.any(f < 0):
            raise DomainError("scattering density must be non-negative")
        beta = gain(th, ph) if callable(gain) else gain * np.ones_like(th)
        a = steering_vector(th, ph, geom, wavelength)
        sigma = (a * (w * f * beta)[None, :]) @ a.conj().T
        return sigma, float(np.sum(w * f))

    n = start
    previous, _ = evaluate(n)
    while True:
        n *= 2
        sigma, mass = evaluate(n)
        if np.linalg.norm(sigma - previous) < tol or n >= max_nodes:
            break
        previous = sigma
    if abs(mass - 1) > 1e-6:
        raise DomainError(f"scattering density integrates to {mass:.9g}, not 1")
    return (sigma + sigma.conj().T) / 2
