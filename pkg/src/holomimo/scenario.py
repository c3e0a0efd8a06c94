"""Monte Carlo experiments: user drops, spacing/aperture sweeps, duality and spectra.

Every drop draws its users from its own counter-based substream, so results
do not depend on the number of worker threads and the same users are seen by
every cell of a sweep (common random numbers).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import analysis, em, link, matching, noise
from .channel import LinkModel
from .errors import DomainError
from .frontend import RadioFrontEnd

DEFAULT_SPACINGS = (0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Experiment description. Lengths of the array are in wavelengths, angles in radians."""

    frontend: RadioFrontEnd = field(default_factory=RadioFrontEnd)
    configuration: str = "side-by-side"
    offset: float = 0.0  # echelon axial step, wavelengths
    count: int = 16
    apertures: tuple = (6.0,)
    spacings: tuple = DEFAULT_SPACINGS
    users: int = 10
    azimuth_range: tuple = (-math.pi / 2, math.pi / 2)
    distance_range: tuple = (15.0, 150.0)
    bs_height: float = 10.0
    distance_distribution: str = "uniform"
    rx_matching: tuple = ("full",)
    tx_matching: tuple = ("full",)
    combiners: tuple = ("mmse",)
    drops: int = 200
    seed: int = 0
    workers: int = 1
    reference_azimuth: float = -math.pi / 2
    reference_distance: float = 50.0

    def __post_init__(self):
        if self.users < 1 or self.drops < 1 or self.count < 1:
            raise DomainError("users, drops and count must be >= 1")
        if not 0 < self.distance_range[0] <= self.distance_range[1]:
            raise DomainError("distance range must be positive and ordered")
        if self.azimuth_range[0] > self.azimuth_range[1]:
            raise DomainError("azimuth range must be ordered")
        if self.distance_distribution not in ("uniform", "area"):
            raise DomainError("distance distribution is 'uniform' or 'area'")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if any(s <= 0 for s in self.spacings) or any(a <= 0 for a in self.apertures):
            raise DomainError("spacings and apertures must be positive")
        try:
            for kind in self.rx_matching + self.tx_matching:
                matching.MatchingKind(kind)
            for scheme in self.combiners:
                link.Scheme(scheme)
        except ValueError as exc:
            raise DomainError(str(exc)) from None
        if len(self.rx_matching) != len(self.tx_matching) and 1 not in (len(self.rx_matching), len(self.tx_matching)):
            raise DomainError("rx and tx matching lists must have equal length (or length 1)")

    @property
    def matching_pairs(self):
        n = max(len(self.rx_matching), len(self.tx_matching))
        rx = self.rx_matching * n if len(self.rx_matching) == 1 else self.rx_matching
        tx = self.tx_matching * n if len(self.tx_matching) == 1 else self.tx_matching
        return list(zip(rx, tx))

    def geometry(self, spacing, count):
        lam = self.frontend.wavelength
        return em.ArrayGeometry(count, spacing * lam, self.configuration, self.offset * lam)


def matching_label(rx, tx):
    return rx if rx == tx else f"{rx}/{tx}"


def element_count(aperture, spacing):
    """Elements spanning ``aperture`` at ``spacing`` (same units): floor(L/d) + 1."""
    return int(math.floor(aperture / spacing + 1e-9)) + 1


def drop_rng(seed, drop):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(drop,))))


def draw_users(rng, cfg: ScenarioConfig):
    """Elevation, azimuth and 3-D distance of every user of one drop."""
    k = cfg.users
    lo, hi = cfg.distance_range
    u = rng.random(k)
    if cfg.distance_distribution == "uniform":
        r = lo + (hi - lo) * u
    else:
        r = np.sqrt(lo * lo + (hi * hi - lo * lo) * u)
    phi = cfg.azimuth_range[0] + (cfg.azimuth_range[1] - cfg.azimuth_range[0]) * rng.random(k)
    theta = -np.arctan2(cfg.bs_height, r)
    return theta, phi, np.hypot(r, cfg.bs_height)


def sample_drop(rng, cfg: ScenarioConfig):
    theta, phi, dist = draw_users(rng, cfg)
    return [em.PlanePath(float(t), float(p), float(d)) for t, p, d in zip(theta, phi, dist)]


def draw_all(cfg: ScenarioConfig):
    users = [draw_users(drop_rng(cfg.seed, n), cfg) for n in range(cfg.drops)]
    return [np.array(x) for x in zip(*users)]


def _drop_metrics(model: LinkModel, chol, users, schemes, modes):
    cs = model.channels(model.z_art(*users))
    out = {}
    for s in schemes:
        if "ul" in modes:
            out["ul", s] = link.uplink(cs.h_ul, cs.p, cs.R_n_ul, s).se.mean()
        if "dl" in modes:
            out["dl", s] = link.downlink_precoders_and_sinr(cs.h_dl, cs.p, cs.sigma2_dl, s).se.mean()
        if "dl-naive" in modes:
            out["dl-naive", s] = link.downlink_precoders_and_sinr(
                cs.h_dl, cs.p, cs.sigma2_dl, s, H_design=cs.h_ul).se.mean()
    whitened = linalg.cho_solve(chol, cs.h_ul)
    snr = cs.p * np.real(np.sum(cs.h_ul.conj() * whitened, axis=0))
    out["gain"] = snr.mean() / model.count
    return out


def evaluate_cell(model: LinkModel, drops, schemes, modes=("ul",), workers=1):
    """Per-drop metrics of one sweep cell, as arrays keyed like ``_drop_metrics``."""
    theta, phi, dist = drops
    chol = linalg.cho_factor(model.R_n)

    def one(n):
        return _drop_metrics(model, chol, (theta[n], phi[n], dist[n]), schemes, modes)

    idx = range(theta.shape[0])
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, idx))
    else:
        rows = [one(n) for n in idx]
    return {key: np.array([r[key] for r in rows]) for key in rows[0]}


def _stats(values):
    n = values.size
    err = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    return float(values.mean()), err


@dataclass(frozen=True)
class SweepCell:
    spacing: float
    count: int
    matching: str
    scheme: str
    mean_se: float
    stderr_se: float
    mean_gain_db: float
    drops: int
    aperture: float | None = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SweepResult:
    cells: list
    seed: int

    def select(self, **kw):
        return [c for c in self.cells if all(getattr(c, k) == v for k, v in kw.items())]


def _geometries(cfg: ScenarioConfig, fixed_aperture):
    if fixed_aperture:
        for a in cfg.apertures:
            for s in cfg.spacings:
                yield a, s, element_count(a, s)
    else:
        for s in cfg.spacings:
            yield None, s, cfg.count


def _run(cfg: ScenarioConfig, fixed_aperture, direction, naive=False):
    drops = draw_all(cfg)
    modes = ("dl-naive",) if naive else (direction,)
    key = modes[0]
    cells = []
    for aperture, spacing, count in _geometries(cfg, fixed_aperture):
        geom = cfg.geometry(spacing, count)
        for rx, tx in cfg.matching_pairs:
            model = LinkModel(geom, cfg.frontend, rx, tx)
            res = evaluate_cell(model, drops, cfg.combiners, modes, cfg.workers)
            gain_db = 10 * math.log10(float(res["gain"].mean()))
            for s in cfg.combiners:
                mean, err = _stats(res[key, s])
                cells.append(SweepCell(spacing, count, matching_label(rx, tx), s, mean, err,
                                       gain_db, cfg.drops, aperture))
    return SweepResult(cells, cfg.seed)


def run_uplink(cfg: ScenarioConfig, fixed_aperture=False) -> SweepResult:
    return _run(cfg, fixed_aperture, "ul")


def run_downlink(cfg: ScenarioConfig, fixed_aperture=False, use_ul_channels_for_precoding=False) -> SweepResult:
    return _run(cfg, fixed_aperture, "dl", naive=use_ul_channels_for_precoding)


def run_duality(cfg: ScenarioConfig) -> SweepResult:
    """Uplink SE, downlink SE, and downlink SE with precoders built from h_ul, per cell."""
    drops = draw_all(cfg)
    cells = []
    for _, spacing, count in _geometries(cfg, False):
        geom = cfg.geometry(spacing, count)
        for rx, tx in cfg.matching_pairs:
            model = LinkModel(geom, cfg.frontend, rx, tx)
            res = evaluate_cell(model, drops, cfg.combiners, ("ul", "dl", "dl-naive"), cfg.workers)
            gain_db = 10 * math.log10(float(res["gain"].mean()))
            for s in cfg.combiners:
                extra = {}
                for mode in ("ul", "dl", "dl-naive"):
                    extra[mode] = _stats(res[mode, s])
                cells.append(SweepCell(spacing, count, matching_label(rx, tx), s, extra["ul"][0],
                                       extra["ul"][1], gain_db, cfg.drops, None, extra))
    return SweepResult(cells, cfg.seed)


def eigen_spectrum(kind, geom: em.ArrayGeometry, fe: RadioFrontEnd | None = None,
                   include_dissipation=True, rx_matching="none"):
    """Eigenvalues sorted in descending order and normalized to a maximum of 1.

    ``kind`` is "Z_AR" (eigenvalues of Re{Z_AR}) or "U" (covariance of the
    open-circuit noise seen by the LNAs, U_IN + F_R R_EN F_R^H).
    """
    fe = fe or RadioFrontEnd()
    dip = fe.dipole()
    if kind == "Z_AR":
        if not include_dissipation:
            dip = em.DipoleParams(dip.wavelength, dip.radius, 0.0)
        z = em.coupling_matrix(geom, dip)
        w = np.linalg.eigvalsh(np.real(z))
    elif kind == "U":
        z = em.coupling_matrix(geom, dip)
        lna = fe.lna()
        rx = matching.front_end(rx_matching, "rx", z, fe.z_load, lna)
        u = noise.intrinsic_cov(rx.Z_eff, lna) + rx.F @ noise.extrinsic_cov(z, fe.noise_physics()) @ rx.F.conj().T
        w = np.linalg.eigvalsh((u + u.conj().T) / 2)
    else:
        raise DomainError("spectrum kind is 'Z_AR' or 'U'")
    w = np.sort(w)[::-1]
    return w / w[0]


def count_within(eigs, db=40.0):
    """Number of normalized eigenvalues no more than ``db`` decibels below the largest."""
    eigs = np.asarray(eigs)
    return int(np.sum(eigs >= eigs.max() * 10 ** (-db / 10)))


def two_element_rows(cfg: ScenarioConfig, spacing, azimuths):
    """Closed-form and pipeline gains of a two-element array versus azimuth.

    The swept user sits at azimuth ``phi`` and ``reference_distance``; the
    interference rows use a fixed user at ``reference_azimuth`` with the swept
    user as interferer.
    """
    fe = cfg.frontend
    lam = fe.wavelength
    models = (LinkModel(cfg.geometry(spacing, 2), fe, "full", "full"),
              LinkModel(cfg.geometry(spacing, 1), fe, "full", "full"))
    dist = math.hypot(cfg.reference_distance, cfg.bs_height)
    theta = -math.atan2(cfg.bs_height, cfg.reference_distance)
    dip = fe.dipole()
    mu = float(em.mu_coefficient(spacing * lam, dip))
    ref = (theta, cfg.reference_azimuth)
    psi_ref = analysis.psi(spacing, *ref)
    rows = []
    pair = models[0]
    for phi in azimuths:
        psi = analysis.psi(spacing, theta, phi)
        g_pipe = link.array_gain_pipeline(spacing, theta, phi, fe, dist, models)
        i_pipe = link.interference_gain_pipeline(spacing, ref, (theta, phi), fe, (dist, dist), models)
        cs = pair.channels(pair.z_art(np.array([theta, theta]), np.array([ref[1], phi]), np.array([dist, dist])))
        se = link.uplink(cs.h_ul, cs.p, cs.R_n_ul, link.Scheme.MMSE).se
        snr = link.uplink(cs.h_ul[:, 1:], cs.p[1:], cs.R_n_ul, link.Scheme.MR).sinr[0]
        rows.append({
            "d_h_over_lambda": spacing,
            "phi_deg": math.degrees(phi),
            "theta_deg": math.degrees(theta),
            "mu": mu,
            "psi": float(psi),
            "array_gain_closed": float(analysis.array_gain_closed(mu, psi)),
            "array_gain_pipeline": float(g_pipe),
            "interference_gain_closed": float(analysis.interference_gain_closed(mu, psi_ref, psi)),
            "interference_gain_pipeline": float(i_pipe),
            "snr_db": 10 * math.log10(snr),
            "se_mmse_reference": float(se[0]),
            "se_mmse_swept": float(se[1]),
        })
    return rows
