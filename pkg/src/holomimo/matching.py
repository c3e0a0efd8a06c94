"""Matching-network synthesis and reduction of the array front ends.

A matching network is a 2N-port described by four N x N impedance blocks.
Port group 1 faces the generators (transmit) or the LNAs (receive), port
group 2 faces the antennas. Terminating group 2 with the antenna impedance
matrix reduces the chain to an effective impedance ``Z_eff`` seen from the
circuit side and a voltage transfer matrix ``F``.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import DomainError, NumericalError

COND_WARN = 1e12


class IllConditionedWarning(RuntimeWarning):
    pass


class MatchingKind(str, enum.Enum):
    FULL = "full"
    SELF = "self"
    NONE = "none"


class Side(str, enum.Enum):
    TRANSMIT = "tx"
    RECEIVE = "rx"


@dataclass(frozen=True)
class MatchingSpec:
    kind: MatchingKind
    side: Side

    def __post_init__(self):
        object.__setattr__(self, "kind", MatchingKind(self.kind))
        object.__setattr__(self, "side", Side(self.side))


@dataclass(frozen=True)
class TwoPortBlocks:
    Z11: np.ndarray
    Z12: np.ndarray
    Z21: np.ndarray
    Z22: np.ndarray

    @property
    def size(self):
        return self.Z11.shape[0]

    def as_matrix(self):
        return np.block([[self.Z11, self.Z12], [self.Z21, self.Z22]])

    def is_lossless(self, tol=1e-12):
        z = self.as_matrix()
        return bool(np.max(np.abs(z.real)) <= tol * max(1.0, np.max(np.abs(z))))

    def is_reciprocal(self, tol=0.0):
        return bool(np.max(np.abs(self.Z12 - self.Z21.T)) <= tol)


@dataclass(frozen=True)
class FrontEndReduction:
    """Effective description of one side of the link.

    ``F`` maps antenna-side voltages to circuit-side open-circuit voltages
    (F_R) or generator voltages to antenna currents (F_T, transmit side).
    ``Q`` exists on the receive side only and ``B`` on the transmit side only.
    """

    spec: MatchingSpec
    F: np.ndarray
    Z_eff: np.ndarray
    termination: complex
    Q: np.ndarray | None = None
    B: np.ndarray | None = None

    @property
    def size(self):
        return self.F.shape[0]


@dataclass(frozen=True)
class LnaParams:
    """Two-generator LNA noise model.

    ``current_noise_var`` is sigma_i^2 in A^2 and ``rho`` the normalized
    correlation between the voltage and current noise generators.
    """

    noise_resistance: float
    rho: complex
    current_noise_var: float

    def __post_init__(self):
        if not self.noise_resistance > 0:
            raise DomainError("LNA noise resistance must be positive")
        if not abs(self.rho) <= 1:
            raise DomainError("|rho| must not exceed 1")
        if not self.current_noise_var >= 0:
            raise DomainError("current noise variance must be >= 0")

    @classmethod
    def from_temperature(cls, noise_resistance, rho, temperature, bandwidth):
        if not noise_resistance > 0:
            raise DomainError("LNA noise resistance must be positive")
        var = 2 * constants.k * bandwidth * temperature / noise_resistance
        return cls(noise_resistance, rho, var)

    @property
    def z_opt(self):
        im = np.imag(self.rho)
        return self.noise_resistance * (np.sqrt(1 - im * im) + 1j * im)


def _hermitian_eigh(a, where):
    a = np.asarray(a)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    if np.linalg.norm(a - a.conj().T) > 1e-10 * scale:
        raise NumericalError(where, "matrix is not Hermitian")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    if w.min() < -1e-12 * scale:
        raise NumericalError(where, f"matrix is indefinite (min eigenvalue {w.min():.3e})")
    return np.clip(w, 0, None), v


def principal_sqrt(a, where="matching.principal_sqrt"):
    """Hermitian PSD square root of a Hermitian PSD matrix."""
    w, v = _hermitian_eigh(a, where)
    s = (v * np.sqrt(w)) @ v.conj().T
    return s.real if np.isrealobj(a) else s


def inverse_sqrt(a, where="matching.inverse_sqrt"):
    """Inverse of the principal square root; requires a positive definite input."""
    w, v = _hermitian_eigh(a, where)
    if w.min() <= 0:
        raise NumericalError(where, "matrix is singular")
    s = (v / np.sqrt(w)) @ v.conj().T
    return s.real if np.isrealobj(a) else s


def _pd_real_part(z, where):
    r = np.real(z)
    w = np.linalg.eigvalsh((r + r.T) / 2)
    if w.min() <= 0:
        raise NumericalError(where, "real part of the antenna impedance is not positive definite")
    return r


def synthesize_power_matching(Z_AT, Z_G) -> TwoPortBlocks:
    """Lossless network that conjugate-matches every generator to the array."""
    where = "matching.synthesize_power_matching"
    Z_AT = np.atleast_2d(np.asarray(Z_AT, dtype=complex))
    n = Z_AT.shape[0]
    s = principal_sqrt(_pd_real_part(Z_AT, where), where)
    r_g, x_g = np.real(Z_G), np.imag(Z_G)
    eye = np.eye(n)
    z12 = -1j * np.sqrt(r_g) * s
    return TwoPortBlocks(-1j * x_g * eye + 0j, z12, z12.copy(), -1j * np.imag(Z_AT))


def synthesize_noise_matching(Z_AR, lna: LnaParams) -> TwoPortBlocks:
    """Lossless network presenting Z_opt to every LNA input."""
    where = "matching.synthesize_noise_matching"
    Z_AR = np.atleast_2d(np.asarray(Z_AR, dtype=complex))
    n = Z_AR.shape[0]
    s = principal_sqrt(_pd_real_part(Z_AR, where), where)
    z_opt = lna.z_opt
    eye = np.eye(n)
    z12 = 1j * np.sqrt(np.real(z_opt)) * s
    return TwoPortBlocks(1j * np.imag(z_opt) * eye + 0j, z12, z12.copy(), -1j * np.imag(Z_AR))


def _solve(a, b, where):
    try:
        cond = np.linalg.cond(a)
        if not np.isfinite(cond):
            raise np.linalg.LinAlgError("singular")
        if cond > COND_WARN:
            warnings.warn(f"{where}: condition number {cond:.2e}", IllConditionedWarning, stacklevel=3)
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(where, f"singular system ({exc})") from None


def reduce_front_end(spec: MatchingSpec, blocks: TwoPortBlocks | None, Z_A, termination) -> FrontEndReduction:
    """Terminate the antenna side of ``blocks`` with the array impedance.

    ``termination`` is Z_L on the receive side and Z_G on the transmit side.
    Without a matching network F = I and Z_eff = Z_A.
    """
    where = "matching.reduce_front_end"
    Z_A = np.atleast_2d(np.asarray(Z_A, dtype=complex))
    n = Z_A.shape[0]
    eye = np.eye(n)
    if spec.kind is MatchingKind.NONE:
        if blocks is not None:
            raise DomainError("kind 'none' takes no matching network")
        F, Z_eff = eye + 0j, Z_A.copy()
    else:
        if blocks is None:
            raise DomainError(f"kind '{spec.kind.value}' needs a synthesized network")
        if blocks.size != n:
            raise DomainError("network and array sizes differ")
        # F = Z12 (Z22 + Z_A)^-1 via a transposed solve
        F = _solve((blocks.Z22 + Z_A).T, blocks.Z12.T, where).T
        Z_eff = blocks.Z11 - F @ blocks.Z21
    if spec.side is Side.RECEIVE:
        Q = termination * _solve(termination * eye + Z_eff, eye, where)
        return FrontEndReduction(spec, F, Z_eff, termination, Q=Q)
    return FrontEndReduction(spec, F, Z_eff, termination, B=b_matrix(termination, Z_eff))


def b_matrix(Z_G, Z_T):
    """Quadratic form of the radiated power in the generator voltages."""
    Z_T = np.atleast_2d(np.asarray(Z_T, dtype=complex))
    eye = np.eye(Z_T.shape[0])
    c = _solve(Z_G * eye + Z_T, eye, "matching.b_matrix")
    b = 4 * np.real(Z_G) * c.conj().T @ np.real(Z_T) @ c
    return (b + b.conj().T) / 2


def front_end(kind, side, Z_A, termination, lna: LnaParams | None = None) -> FrontEndReduction:
    """Synthesize (if needed) and reduce one side of the link."""
    spec = MatchingSpec(kind, side)
    z = np.atleast_2d(np.asarray(Z_A, dtype=complex))
    if spec.kind is MatchingKind.NONE:
        blocks = None
    else:
        design = z if spec.kind is MatchingKind.FULL else np.diag(np.diag(z))
        if spec.side is Side.TRANSMIT:
            blocks = synthesize_power_matching(design, termination)
        else:
            if lna is None:
                raise DomainError("receive matching needs LNA parameters")
            blocks = synthesize_noise_matching(design, lna)
    return reduce_front_end(spec, blocks, z, termination)
