"""Circuit-aware simulation of dense dipole arrays.

Models mutual coupling, matching networks and amplifier noise, and evaluates
uplink and downlink spectral efficiency as the antenna spacing shrinks.
"""

__version__ = "0.1.0"

from .errors import ConfigError, DomainError, HoloMimoError, NumericalError
from .em import ArrayGeometry, Configuration, DipoleParams, PlanePath, coupling_matrix, mutual_impedance
from .frontend import RadioFrontEnd
from .matching import MatchingKind, Side, front_end
from .channel import LinkModel
from .link import Scheme

__all__ = [
    "ArrayGeometry", "ConfigError", "Configuration", "DipoleParams", "DomainError",
    "HoloMimoError", "LinkModel", "MatchingKind", "NumericalError", "PlanePath",
    "RadioFrontEnd", "Scheme", "Side", "__version__", "coupling_matrix", "front_end",
    "mutual_impedance",
]
