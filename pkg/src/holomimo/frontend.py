"""Radio front-end constants shared by the base station and the users."""

from dataclasses import dataclass

from scipy import constants

from .em import DipoleParams
from .errors import DomainError
from .matching import LnaParams
from .noise import NoisePhysics


@dataclass(frozen=True)
class RadioFrontEnd:
    """Circuit and noise parameters; the defaults describe a 3.5 GHz, 20 MHz link."""

    frequency: float = 3.5e9
    z_generator: complex = 186 - 31.6j
    z_load: complex = 186 - 31.6j
    noise_resistance: float = 5.0
    rho: complex = 0.1
    antenna_temperature: float = 290.0
    bandwidth: float = 20e6
    tx_power: float = 1e-3  # watts per user, -30 dBW
    dissipation_ratio: float = 1e-3
    radius_over_wavelength: float = 1e-3

    def __post_init__(self):
        if not self.frequency > 0:
            raise DomainError("frequency must be positive")
        if not self.z_generator.real > 0 or not self.z_load.real > 0:
            raise DomainError("generator and load impedances need a positive real part")
        if not self.tx_power > 0:
            raise DomainError("transmit power must be positive")

    @property
    def wavelength(self):
        return constants.c / self.frequency

    def dipole(self):
        lam = self.wavelength
        return DipoleParams(lam, self.radius_over_wavelength * lam, self.dissipation_ratio)

    def lna(self):
        return LnaParams.from_temperature(self.noise_resistance, self.rho,
                                          self.antenna_temperature, self.bandwidth)

    def noise_physics(self):
        return NoisePhysics(self.antenna_temperature, self.bandwidth)
