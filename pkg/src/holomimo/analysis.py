"""Closed-form gains of a two-element fully matched array.

These expressions are independent of the circuit pipeline and serve as its
oracle. ``d_h`` is always in wavelengths here.
"""

import numpy as np

from .errors import DomainError

Z0 = 377.0  # ohms, as used in the small-spacing expansion


def psi(d_h, theta, phi):
    """Electrical phase between adjacent elements, 2 pi d_h cos(theta) sin(phi)."""
    return 2 * np.pi * d_h * np.cos(theta) * np.sin(phi)


def _check_mu(mu):
    if np.any(np.abs(np.asarray(mu)) >= 1):
        raise DomainError("|mu| must be < 1")


def array_gain_closed(mu, psi_k):
    _check_mu(mu)
    return 2 * (1 - mu * np.cos(psi_k)) / (1 - mu * mu)


def max_gain_end_fire(mu, d_h):
    return array_gain_closed(mu, 2 * np.pi * d_h)


def max_gain_front_fire(mu):
    _check_mu(mu)
    return 2 / (1 + mu)


def mu_constants(r_r, r_d, z0=Z0):
    """(mu0, mu2) of the expansion mu ~ mu0 - mu2 d_h^2."""
    return r_r / (r_r + r_d), np.pi / 2 * z0 / (r_r + r_d)


def mu_taylor(d_h, mu0, mu2):
    return mu0 - mu2 * np.asarray(d_h) ** 2


def array_gain_asymptotic(d_h, theta, phi, mu0, mu2):
    c2 = (np.cos(theta) * np.sin(phi)) ** 2
    x = np.asarray(d_h) ** 2
    num = 2 * (1 - mu0 + (2 * mu0 * np.pi**2 * c2 + mu2) * x)
    return num / ((1 + mu0) * (1 - mu0 + mu2 * x))


def array_gain_limit(theta, phi, mu0, mu2):
    """Small-spacing plateau of the asymptotic array gain.

    This is the value reached once mu2 d_h^2 dominates 1 - mu0, which for
    small dissipation holds over a wide range of spacings. Strictly at
    d_h -> 0 the asymptotic form returns to 2 / (1 + mu0). mu0 = 1 (no
    dissipation) is rejected as degenerate.
    """
    if mu0 >= 1:
        raise DomainError("degenerate limit: mu0 = 1 (no dissipation) makes the gain unbounded")
    c2 = (np.cos(theta) * np.sin(phi)) ** 2
    return (2 * mu0 * np.pi**2 * c2 + mu2) / (mu0 * mu2)


def interference_gain_closed(mu, psi_k, psi_i):
    """MR interference gain of user i on user k relative to one element.

    The numerator of the textbook expression,
    1 + mu^2 - 2 mu (cos psi_k + cos psi_i) + cos(psi_k - psi_i) + mu^2 cos(psi_k + psi_i),
    equals 2 (cos(delta/2) - mu cos(sigma/2))^2 with delta = psi_k - psi_i and
    sigma = psi_k + psi_i. The squared form keeps full relative accuracy near
    interference nulls, where the expanded sum cancels.
    """
    _check_mu(mu)
    den = (1 - mu * np.cos(psi_k)) * (1 - mu * mu)
    root = np.cos((psi_k - psi_i) / 2) - mu * np.cos((psi_k + psi_i) / 2)
    return 2 * root * root / den


def interference_gain_expanded(mu, psi_k, psi_i):
    """Same quantity written as the two-fraction sum; prone to cancellation near nulls."""
    _check_mu(mu)
    den = (1 - mu * np.cos(psi_k)) * (1 - mu * mu)
    first = 1 + mu * mu - 2 * mu * (np.cos(psi_k) + np.cos(psi_i))
    second = np.cos(psi_k - psi_i) + mu * mu * np.cos(psi_k + psi_i)
    return first / den + second / den
