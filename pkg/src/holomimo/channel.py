"""Uplink and downlink channels seen through the matching networks.

Channel vectors are dimensionless: voltages are normalized by c = 1 V^2 and
the transmitted symbols have variance p = 4 R_G P_T. Arrays of shape (M, K)
hold one user per column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import em, matching, noise
from .errors import DomainError, NumericalError
from .frontend import RadioFrontEnd
from .matching import FrontEndReduction, LnaParams, MatchingKind, Side

C_NORM = 1.0  # V^2


@dataclass(frozen=True)
class UePhysicalConfig:
    """Single-dipole user terminal, power matched in uplink and noise matched in downlink."""

    z_generator: complex
    z_load: complex
    z_antenna: complex
    lna: LnaParams

    def __post_init__(self):
        if not np.real(self.z_antenna) > 0:
            raise DomainError("user antenna resistance must be positive")

    @classmethod
    def from_frontend(cls, fe: RadioFrontEnd):
        dip = fe.dipole()
        return cls(fe.z_generator, fe.z_load,
                   dip.self_impedance + dip.dissipation_resistance, fe.lna())


def alpha_ul(z_load_bs, ue: UePhysicalConfig):
    return -1j * z_load_bs / (2 * np.sqrt(np.real(ue.z_generator) * np.real(ue.z_antenna)))


def alpha_dl(ue: UePhysicalConfig):
    z_opt = ue.lna.z_opt
    return (1j * ue.z_load * np.sqrt(np.real(z_opt))
            / ((ue.z_load + z_opt) * np.sqrt(np.real(ue.z_antenna))))


def xi_ul(z_load_bs, lna_bs: LnaParams, ue: UePhysicalConfig):
    """Scalar gain of the uplink channel under full noise matching at the array."""
    z_opt = lna_bs.z_opt
    return alpha_ul(z_load_bs, ue) * 1j * np.sqrt(np.real(z_opt)) / (z_load_bs + z_opt)


def xi_dl(z_generator_bs, ue: UePhysicalConfig):
    """Scalar gain of the downlink channel under full power matching at the array."""
    return -1j * alpha_dl(ue) / (2 * np.sqrt(np.real(z_generator_bs)))


def power_mapping(tx_power, r_g):
    """Symbol variance p for an available power ``tx_power`` (watts)."""
    if not tx_power > 0:
        raise DomainError("transmit power must be positive")
    return 4 * r_g * tx_power / C_NORM


def _uplink_operator(rx: FrontEndReduction, ue):
    m = rx.size
    a = rx.termination * np.eye(m) + rx.Z_eff
    try:
        return alpha_ul(rx.termination, ue) * np.linalg.solve(a, rx.F)
    except np.linalg.LinAlgError:
        raise NumericalError("channel.uplink_channel", "Z_L I + Z_R is singular") from None


def _downlink_operator(tx: FrontEndReduction, ue):
    m = tx.size
    a = tx.termination * np.eye(m) + tx.Z_eff
    try:
        return alpha_dl(ue) * np.linalg.solve(a, tx.F)
    except np.linalg.LinAlgError:
        raise NumericalError("channel.downlink_channel", "Z_G I + Z_T is singular") from None


def b_inverse_half_t(B):
    """B^{-T/2}: transpose of the inverse principal root of B."""
    return matching.inverse_sqrt(B, "channel.downlink_channel").T


def uplink_channel(z_art, rx: FrontEndReduction, ue: UePhysicalConfig):
    """d_ul = alpha_ul (Z_L I + Z_R)^{-1} F_R z_ART; also the uplink channel h_ul."""
    return _uplink_operator(rx, ue) @ np.asarray(z_art)


def downlink_channel(z_art, tx: FrontEndReduction, ue: UePhysicalConfig):
    """Return ``(d_dl, h_dl)`` with h_dl = B^{-T/2} d_dl."""
    d = _downlink_operator(tx, ue) @ np.asarray(z_art)
    return d, b_inverse_half_t(tx.B) @ d


def a_dl_ul(rx: FrontEndReduction, tx: FrontEndReduction):
    """A_dl,ul = (Z_G I + Z_T)^{-1} F_T F_R^{-1} (Z_L I + Z_R)."""
    where = "channel.duality_transform"
    m = rx.size
    eye = np.eye(m)
    try:
        right = np.linalg.solve(rx.F, rx.termination * eye + rx.Z_eff)
        return np.linalg.solve(tx.termination * eye + tx.Z_eff, tx.F @ right)
    except np.linalg.LinAlgError:
        raise NumericalError(where, "F_R or Z_G I + Z_T is singular") from None


def duality_transform(h_ul, rx: FrontEndReduction, tx: FrontEndReduction, ue: UePhysicalConfig,
                      lna: LnaParams | None = None):
    """Predict the downlink channel from the uplink one.

    Full matching on both sides gives a scalar map; no matching with
    Z_L = Z_G gives a scalar map followed by B^{-T/2}; every other case uses
    the matrix A_dl,ul. ``lna`` (the array's LNAs) is needed for the
    full-matching map.
    """
    h_ul = np.asarray(h_ul)
    kinds = (rx.spec.kind, tx.spec.kind)
    if kinds == (MatchingKind.FULL, MatchingKind.FULL):
        if lna is None:
            raise DomainError("full-matching duality needs the array LNA parameters")
        return xi_dl(tx.termination, ue) / xi_ul(rx.termination, lna, ue) * h_ul
    ratio = alpha_dl(ue) / alpha_ul(rx.termination, ue)
    if kinds == (MatchingKind.NONE, MatchingKind.NONE) and rx.termination == tx.termination:
        return ratio * (b_inverse_half_t(tx.B) @ h_ul)
    return b_inverse_half_t(tx.B) @ (ratio * (a_dl_ul(rx, tx) @ h_ul))


@dataclass(frozen=True)
class ChannelSet:
    """Channels of one user drop plus the quantities that turn them into SINRs."""

    h_ul: np.ndarray
    h_dl: np.ndarray
    d_dl: np.ndarray
    B_dl: np.ndarray
    R_n_ul: np.ndarray
    sigma2_dl: float
    p: np.ndarray
    meta: dict = field(default_factory=dict)


class LinkModel:
    """Geometry-dependent part of the link, built once and reused across drops."""

    def __init__(self, geom: em.ArrayGeometry, fe: RadioFrontEnd, rx_kind="full", tx_kind="full",
                 ue: UePhysicalConfig | None = None):
        self.geom = geom
        self.frontend = fe
        self.dipole = fe.dipole()
        self.ue = ue or UePhysicalConfig.from_frontend(fe)
        self.lna = fe.lna()
        self.phys = fe.noise_physics()
        self.Z_A = em.coupling_matrix(geom, self.dipole)
        self.rx = matching.front_end(rx_kind, Side.RECEIVE, self.Z_A, fe.z_load, self.lna)
        self.tx = matching.front_end(tx_kind, Side.TRANSMIT, self.Z_A, fe.z_generator)
        u_in = noise.intrinsic_cov(self.rx.Z_eff, self.lna)
        r_en = noise.extrinsic_cov(self.Z_A, self.phys)
        self.R_n = noise.total_noise_cov(self.rx.Q, u_in, r_en, self.rx.F) / C_NORM
        # the user is noise matched: scalar R_eta of a single matched port
        q_ue = self.ue.z_load / (self.ue.z_load + self.ue.lna.z_opt)
        self.sigma2_dl = abs(q_ue) ** 2 * noise.matched_noise_power(self.ue.lna, self.phys) / C_NORM
        self.G_ul = _uplink_operator(self.rx, self.ue)
        self.D_dl = _downlink_operator(self.tx, self.ue)
        self.B_half = b_inverse_half_t(self.tx.B)
        self.G_dl = self.B_half @ self.D_dl
        self.p_default = power_mapping(fe.tx_power, np.real(self.ue.z_generator))

    @property
    def count(self):
        return self.geom.count

    def z_art(self, theta, phi, distance):
        return em.los_z_art(theta, phi, distance, self.geom, self.dipole)

    def channels(self, z_art, p=None):
        z_art = np.asarray(z_art)
        if z_art.ndim == 1:
            z_art = z_art[:, None]
        k = z_art.shape[1]
        p = np.full(k, self.p_default) if p is None else np.broadcast_to(np.asarray(p, float), (k,))
        d_dl = self.D_dl @ z_art
        return ChannelSet(
            h_ul=self.G_ul @ z_art,
            h_dl=self.B_half @ d_dl,
            d_dl=d_dl,
            B_dl=self.tx.B,
            R_n_ul=self.R_n,
            sigma2_dl=self.sigma2_dl,
            p=p,
            meta={"rx": self.rx.spec.kind.value, "tx": self.tx.spec.kind.value,
                  "M": self.count, "spacing": self.geom.spacing},
        )

    def predicted_dl(self, h_ul):
        return duality_transform(h_ul, self.rx, self.tx, self.ue, self.lna)
