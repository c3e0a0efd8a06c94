"""Linear combining/precoding and the resulting SINR and spectral efficiency."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from . import em
from .channel import LinkModel
from .errors import DomainError, NumericalError
from .frontend import RadioFrontEnd


class Scheme(str, enum.Enum):
    MR = "mr"
    MMSE = "mmse"


@dataclass(frozen=True)
class LinkResult:
    sinr: np.ndarray
    scheme: Scheme

    @property
    def se(self):
        return np.log2(1 + self.sinr)


def _columns(h):
    h = np.asarray(h)
    return h[:, None] if h.ndim == 1 else h


def mr_combiner(h):
    """Unit-norm matched filter(s); columns of ``h`` are users."""
    h = np.asarray(h)
    norm = np.linalg.norm(h, axis=0)
    if np.any(norm == 0):
        raise DomainError("MR combiner of a zero channel")
    return h / norm


def mmse_combiners(H, p, R_n):
    """Columns (sum_i p_i h_i h_i^H + R_n)^{-1} h_k, one per user."""
    H = _columns(H)
    p = np.broadcast_to(np.asarray(p, dtype=float), (H.shape[1],))
    cov = (H * p) @ H.conj().T + R_n
    cov = (cov + cov.conj().T) / 2
    try:
        return linalg.solve(cov, H, assume_a="pos")
    except linalg.LinAlgError:
        raise NumericalError("link.mmse_combiners", "covariance is not positive definite") from None


def mmse_combiner(H, p, R_n, k):
    return mmse_combiners(H, p, R_n)[:, k]


def uplink_sinrs(U, H, p, R_n):
    """SINR of every user k for combiner column U[:, k]."""
    U, H = _columns(U), _columns(H)
    p = np.broadcast_to(np.asarray(p, dtype=float), (H.shape[1],))
    g = np.abs(U.conj().T @ H) ** 2 * p[None, :]
    signal = np.diag(g).copy()
    interference = g.sum(axis=1) - signal
    noise = np.real(np.einsum("mk,mn,nk->k", U.conj(), R_n, U))
    return signal / (interference + noise)


def uplink_sinr(u_k, H, p, R_n, k):
    """SINR of user ``k`` with combiner ``u_k``."""
    u_k = np.asarray(u_k)
    H = _columns(H)
    p = np.broadcast_to(np.asarray(p, dtype=float), (H.shape[1],))
    g = np.abs(u_k.conj() @ H) ** 2 * p
    noise = np.real(u_k.conj() @ R_n @ u_k)
    return float(g[k] / (g.sum() - g[k] + noise))


def uplink(H, p, R_n, scheme=Scheme.MMSE) -> LinkResult:
    scheme = Scheme(scheme)
    U = mr_combiner(_columns(H)) if scheme is Scheme.MR else mmse_combiners(H, p, R_n)
    return LinkResult(uplink_sinrs(U, H, p, R_n), scheme)


def downlink_precoders(H_design, p, sigma2, scheme=Scheme.MMSE):
    """Unit-norm precoders w_k built from the channels the array believes in."""
    H_design = _columns(H_design)
    if Scheme(scheme) is Scheme.MR:
        return mr_combiner(H_design)
    m = H_design.shape[0]
    return mr_combiner(mmse_combiners(H_design, p, sigma2 * np.eye(m)))


def downlink_precoders_and_sinr(H_dl, p, sigma2, scheme=Scheme.MMSE, H_design=None) -> LinkResult:
    """Downlink SINRs; ``H_design`` (default ``H_dl``) is used to build the precoders."""
    if not sigma2 > 0:
        raise DomainError("downlink noise power must be positive")
    H_dl = _columns(H_dl)
    p = np.broadcast_to(np.asarray(p, dtype=float), (H_dl.shape[1],))
    W = downlink_precoders(H_dl if H_design is None else H_design, p, sigma2, scheme)
    # g[i, k] = p_i |w_i^H h_k|^2
    g = np.abs(W.conj().T @ H_dl) ** 2 * p[:, None]
    signal = np.diag(g).copy()
    interference = g.sum(axis=0) - signal
    return LinkResult(signal / (interference + sigma2), Scheme(scheme))


def _two_element_models(d_h, fe: RadioFrontEnd):
    lam = fe.wavelength
    pair = LinkModel(em.ArrayGeometry(2, d_h * lam), fe, "full", "full")
    single = LinkModel(em.ArrayGeometry(1, d_h * lam), fe, "full", "full")
    return pair, single


def array_gain_pipeline(d_h, theta, phi, fe: RadioFrontEnd | None = None, distance=50.0, models=None):
    """SNR of a two-element fully matched array over that of one element.

    ``d_h`` is the spacing in wavelengths. Both arrays see the same user.
    """
    fe = fe or RadioFrontEnd()
    pair, single = models or _two_element_models(d_h, fe)
    if pair.count != 2 or pair.rx.spec.kind.value != "full":
        raise DomainError("array gain pipeline needs a fully matched two-element array")
    snr = []
    for model in (pair, single):
        cs = model.channels(model.z_art(theta, phi, distance))
        snr.append(uplink(cs.h_ul, cs.p, cs.R_n_ul, Scheme.MR).sinr[0])
    return snr[0] / snr[1]


def interference_gain_pipeline(d_h, user, interferer, fe: RadioFrontEnd | None = None,
                               distances=(50.0, 50.0), models=None):
    """Normalized MR interference of ``interferer`` on ``user`` relative to one element.

    ``user`` and ``interferer`` are (theta, phi) pairs.
    """
    fe = fe or RadioFrontEnd()
    pair, single = models or _two_element_models(d_h, fe)
    if pair.count != 2 or pair.rx.spec.kind.value != "full":
        raise DomainError("interference gain pipeline needs a fully matched two-element array")
    theta = np.array([user[0], interferer[0]])
    phi = np.array([user[1], interferer[1]])
    terms = []
    for model in (pair, single):
        cs = model.channels(model.z_art(theta, phi, np.asarray(distances, dtype=float)))
        u = cs.h_ul[:, 0]
        leak = cs.p[1] * abs(np.vdot(u, cs.h_ul[:, 1])) ** 2
        terms.append(leak / np.real(u.conj() @ cs.R_n_ul @ u))
    return terms[0] / terms[1]
