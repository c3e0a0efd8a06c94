"""Noise covariances at the receive loads.

All covariances are in V^2 (or A^2 for the LNA current generator).
"""

from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import DomainError
from .matching import LnaParams

K_B = constants.k


@dataclass(frozen=True)
class NoisePhysics:
    temperature: float
    bandwidth: float

    def __post_init__(self):
        if not self.temperature > 0 or not self.bandwidth > 0:
            raise DomainError("noise temperature and bandwidth must be positive")

    @property
    def k_b(self):
        return K_B


def extrinsic_cov(Z_AR, phys: NoisePhysics):
    """Thermal noise picked up by the antennas, 4 k T df Re{Z_AR}."""
    Z_AR = np.atleast_2d(np.asarray(Z_AR, dtype=complex))
    return 4 * K_B * phys.temperature * phys.bandwidth * np.real(Z_AR)


def intrinsic_cov(Z_R, lna: LnaParams):
    """LNA noise referred to the open-circuit voltages seen by the LNAs."""
    Z_R = np.atleast_2d(np.asarray(Z_R, dtype=complex))
    r_n, rho = lna.noise_resistance, lna.rho
    eye = np.eye(Z_R.shape[0])
    u = Z_R @ Z_R.conj().T - r_n * (np.conj(rho) * Z_R + rho * Z_R.conj().T) + r_n**2 * eye
    u = lna.current_noise_var * u
    return (u + u.conj().T) / 2


def total_noise_cov(Q, U_IN, R_EN, F_R=None):
    """R_eta = Q (U_IN + F_R R_EN F_R^H) Q^H.

    ``R_EN`` is the extrinsic covariance at the antenna ports; when ``F_R`` is
    omitted it is taken as already referred through the matching network.
    """
    u_en = R_EN if F_R is None else F_R @ R_EN @ F_R.conj().T
    r = Q @ (U_IN + u_en) @ Q.conj().T
    return (r + r.conj().T) / 2


def matched_noise_power(lna: LnaParams, phys: NoisePhysics):
    """Per-port noise power sigma^2 under full noise matching."""
    z = lna.z_opt
    r_n, rho = lna.noise_resistance, lna.rho
    intrinsic = lna.current_noise_var * (abs(z) ** 2 - 2 * r_n * np.real(np.conj(rho) * z) + r_n**2)
    return float(intrinsic + 4 * K_B * phys.temperature * phys.bandwidth * np.real(z))
