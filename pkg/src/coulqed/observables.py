"""Spin sums, trace oracles and 2 -> 2 cross sections in the centre-of-mass frame."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import product

import numpy as np

from .amplitudes import compton_final, eemumu_covariant
from .dirac import GAMMA, GAMMA0, METRIC, SPINS, minkowski_dot, on_shell, slash
from .errors import KinematicsError
from .kinematics import E_CHARGE, M_E, M_MU, ComptonKinematics, PairKinematics, cm_momentum
from .polarization import HELICITIES, PolarizationState

PROCESSES = ("compton", "eemumu")
GEV2_TO_NB = 0.3893793721e6
DEFAULT_STRATA = 64
CSV_HEADER = ("process", "sqrt_s", "cos_theta", "value", "mc_error", "units")


@dataclass(frozen=True)
class CrossSectionPoint:
    sqrt_s: float
    cos_theta: float | str
    dsigma_domega: float
    mc_error: float = 0.0
    process: str = ""

    def __post_init__(self):
        if not self.dsigma_domega >= 0:
            raise ValueError("cross section must be nonnegative")
        if not self.mc_error >= 0:
            raise ValueError("mc_error must be nonnegative")


def _check_process(process):
    if process not in PROCESSES:
        raise ValueError(f"unknown process {process!r}; expected one of {PROCESSES}")


def spin_sum(process: str, kin, e: float = E_CHARGE) -> float:
    """|iM|^2 averaged over initial and summed over final discrete labels."""
    _check_process(process)
    total = 0.0
    if process == "compton":
        for sigma, sigma_out, lam, lam_out in product(SPINS, SPINS, HELICITIES, HELICITIES):
            pol_in = PolarizationState.helicity(kin.k[1:], lam)
            pol_out = PolarizationState.helicity(kin.k_out[1:], lam_out)
            total += abs(compton_final(kin, sigma, sigma_out, pol_in, pol_out, e).value) ** 2
    else:
        for labels in product(SPINS, repeat=4):
            total += abs(eemumu_covariant(kin, *labels, e=e).value) ** 2
    return total / 4.0


# --- trace oracles: completeness relations only, no explicit spinors ---

_ID4 = np.eye(4)


def _batch_slash(p):
    return np.einsum("ba,aij->bij", np.asarray(p) @ METRIC, GAMMA)


def _projector_batch(q3):
    q3 = np.asarray(q3, dtype=float)
    n2 = np.einsum("bi,bi->b", q3, q3)
    return np.eye(3) - np.einsum("bi,bj->bij", q3, q3) / n2[:, None, None]


def compton_trace_batch(p, k, p_out, k_out, m, e=E_CHARGE) -> np.ndarray:
    """Unpolarized |M|^2 for batches of Compton momenta, shape (B, 4) each."""
    p, k, p_out, k_out = (np.atleast_2d(np.asarray(x, dtype=float)) for x in (p, k, p_out, k_out))
    spatial = GAMMA[1:]
    s_num = (_batch_slash(p + k) + m * _ID4) / (2 * minkowski_dot(p, k))[:, None, None]
    u_num = (_batch_slash(p - k_out) + m * _ID4) / (-2 * minkowski_dot(p, k_out))[:, None, None]
    # vertex structure Gamma[b, i_out, i_in] as 4x4 matrices
    gam = (spatial[None, :, None] @ s_num[:, None, None] @ spatial[None, None, :]
           + spatial[None, None, :] @ u_num[:, None, None] @ spatial[None, :, None])
    # polarization sums are projectors, so P = P P splits them between Gamma and its bar
    proj_in = _projector_batch(k[:, 1:])
    proj_out = _projector_batch(k_out[:, 1:])
    gam = np.einsum("bJI,bIixy,bij->bJjxy", proj_out, gam, proj_in, optimize=True)
    gam_bar = GAMMA0 @ np.swapaxes(gam.conj(), -1, -2) @ GAMMA0
    left = (_batch_slash(p_out) + m * _ID4)[:, None, None]
    right = (_batch_slash(p) + m * _ID4)[:, None, None]
    total = np.einsum("bJjxz,bJjzx->b", left @ gam, right @ gam_bar, optimize=True)
    return e**4 * total.real / 4.0


def _trace_pair(left, right):
    """Tr[left g^a right g^c] for batched 4x4 matrices, shape (B, 4, 4)."""
    x = left[:, None] @ GAMMA[None]
    y = right[:, None] @ GAMMA[None]
    return np.einsum("baxz,bczx->bac", x, y, optimize=True)


def eemumu_trace_batch(p, p_bar, k, k_bar, m_e, m_mu, e=E_CHARGE) -> np.ndarray:
    p, p_bar, k, k_bar = (np.atleast_2d(np.asarray(x, dtype=float)) for x in (p, p_bar, k, k_bar))
    electron = _trace_pair(_batch_slash(p_bar) - m_e * _ID4, _batch_slash(p) + m_e * _ID4)
    muon = _trace_pair(_batch_slash(k) + m_mu * _ID4, _batch_slash(k_bar) - m_mu * _ID4)
    contracted = np.einsum("bac,a,c,bac->b", electron, np.diag(METRIC), np.diag(METRIC), muon)
    q2 = minkowski_dot(p + p_bar, p + p_bar)
    return e**4 * contracted.real / (4.0 * q2 * q2)


def trace_oracle_compton(kin: ComptonKinematics, e: float = E_CHARGE) -> float:
    return float(compton_trace_batch(kin.p, kin.k, kin.p_out, kin.k_out, kin.m, e)[0])


def trace_oracle_eemumu(kin: PairKinematics, e: float = E_CHARGE) -> float:
    return float(eemumu_trace_batch(kin.p, kin.p_bar, kin.k, kin.k_bar, kin.m_e, kin.m_mu, e)[0])


# --- cross sections ---

def _kinematics(process, sqrt_s, cos_theta, phi, m_e, m_mu):
    if process == "compton":
        return ComptonKinematics.center_of_mass(sqrt_s, cos_theta, phi, m_e)
    return PairKinematics.center_of_mass(sqrt_s, cos_theta, phi, m_e, m_mu)


def _momenta(process, sqrt_s, m_e, m_mu):
    if process == "compton":
        if sqrt_s <= m_e:
            raise KinematicsError("sqrt_s must exceed the electron mass")
        p = cm_momentum(sqrt_s, m_e, 0.0)
        return p, p
    if sqrt_s < 2 * m_mu:
        raise KinematicsError(f"sqrt_s = {sqrt_s} is below the muon pair threshold {2 * m_mu}")
    return cm_momentum(sqrt_s, m_e, m_e), cm_momentum(sqrt_s, m_mu, m_mu)


def flux_factor(process, sqrt_s, m_e=M_E, m_mu=M_MU) -> float:
    """|p_f| / (64 pi^2 s |p_i|), multiplying |M|^2 to give dsigma/dOmega."""
    p_in, p_out = _momenta(process, sqrt_s, m_e, m_mu)
    return p_out / (64 * np.pi**2 * sqrt_s**2 * p_in)


def dsigma_domega(process: str, sqrt_s: float, cos_theta: float, phi: float = 0.0,
                  e: float = E_CHARGE, m_e: float = M_E, m_mu: float = M_MU) -> CrossSectionPoint:
    _check_process(process)
    if not -1.0 <= cos_theta <= 1.0:
        raise ValueError("cos_theta must lie in [-1, 1]")
    factor = flux_factor(process, sqrt_s, m_e, m_mu)
    kin = _kinematics(process, sqrt_s, cos_theta, phi, m_e, m_mu)
    value = factor * spin_sum(process, kin, e) if factor > 0 else 0.0
    return CrossSectionPoint(sqrt_s, cos_theta, float(value), 0.0, process)


def _uniforms(seed: int, start: int, stop: int) -> np.ndarray:
    """Two uniforms per sample index, counter-addressed so shards line up exactly."""
    gen = np.random.Philox(key=seed)
    gen.advance(start)
    raw = gen.random_raw(4 * (stop - start)).reshape(-1, 4)[:, :2]
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _batch_msq(process, sqrt_s, cos_theta, phi, e, m_e, m_mu):
    sin_theta = np.sqrt(np.clip(1 - cos_theta**2, 0.0, None))
    n = np.stack([sin_theta * np.cos(phi), sin_theta * np.sin(phi), cos_theta], axis=-1)
    zhat = np.broadcast_to([0.0, 0.0, 1.0], n.shape)
    if process == "compton":
        omega = cm_momentum(sqrt_s, m_e, 0.0)
        k = np.concatenate([np.full((len(n), 1), omega), omega * zhat], axis=1)
        k_out = np.concatenate([np.full((len(n), 1), omega), omega * n], axis=1)
        return compton_trace_batch(on_shell(-omega * zhat, m_e), k, on_shell(-omega * n, m_e),
                                   k_out, m_e, e)
    p_in, p_out = cm_momentum(sqrt_s, m_e, m_e), cm_momentum(sqrt_s, m_mu, m_mu)
    return eemumu_trace_batch(on_shell(p_in * zhat, m_e), on_shell(-p_in * zhat, m_e),
                              on_shell(p_out * n, m_mu), on_shell(-p_out * n, m_mu), m_e, m_mu, e)


def total_sigma(process: str, sqrt_s: float, n_samples: int = 100_000, seed: int = 0,
                e: float = E_CHARGE, m_e: float = M_E, m_mu: float = M_MU,
                shards: int = 1, strata: int = DEFAULT_STRATA, chunk: int = 50_000):
    """Stratified Monte Carlo over (cos theta, phi); returns (sigma, mc_error) in GeV^-2.

    Sample j lands in stratum j mod strata; its randomness is keyed by j alone,
    so the estimate does not depend on how the index range is sharded.
    """
    _check_process(process)
    if n_samples < 10_000:
        raise ValueError("n_samples must be at least 10^4")
    if n_samples < 2 * strata:
        raise ValueError("need at least two samples per stratum")
    factor = flux_factor(process, sqrt_s, m_e, m_mu)
    if factor == 0:
        return 0.0, 0.0
    bounds = np.linspace(0, n_samples, shards + 1).astype(int)
    pieces = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        for start in range(lo, hi, chunk):
            stop = min(start + chunk, hi)
            u = _uniforms(seed, start, stop)
            stratum = np.arange(start, stop) % strata
            cos_theta = -1.0 + (2.0 / strata) * (stratum + u[:, 0])
            phi = 2 * np.pi * u[:, 1]
            pieces.append(_batch_msq(process, sqrt_s, cos_theta, phi, e, m_e, m_mu))
    values = 4 * np.pi * factor * np.concatenate(pieces)
    stratum = np.arange(n_samples) % strata
    counts = np.bincount(stratum, minlength=strata)
    means = np.bincount(stratum, weights=values, minlength=strata) / counts
    sq = np.bincount(stratum, weights=(values - means[stratum]) ** 2, minlength=strata)
    var_of_mean = sq / (counts - 1) / counts
    sigma = float(np.sum(means) / strata)
    error = float(np.sqrt(np.sum(var_of_mean)) / strata)
    return sigma, error


# --- closed forms used as independent references ---

def thomson_total(m: float = M_E, e: float = E_CHARGE) -> float:
    alpha = e * e / (4 * np.pi)
    return 8 * np.pi * alpha**2 / (3 * m * m)


def eemumu_total_analytic(sqrt_s: float, m_mu: float = M_MU, e: float = E_CHARGE,
                          m_e: float = 0.0) -> float:
    """Integrated lowest-order e+e- -> mu+mu-; m_e = 0 gives the massless-beam formula."""
    alpha = e * e / (4 * np.pi)
    s = sqrt_s * sqrt_s
    x = 4 * m_mu * m_mu / s
    if x > 1:
        raise KinematicsError("below the muon pair threshold")
    y = 4 * m_e * m_e / s
    return (4 * np.pi * alpha**2 / (3 * s)) * np.sqrt((1 - x) / (1 - y)) * (1 + x / 2) * (1 + y / 2)


def write_csv(points, units: str = "GeV^-2", scale: float = 1.0) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for pt in points:
        cos = pt.cos_theta if isinstance(pt.cos_theta, str) else repr(float(pt.cos_theta))
        writer.writerow([pt.process, repr(float(pt.sqrt_s)), cos, repr(pt.dsigma_domega * scale),
                         repr(pt.mc_error * scale), units])
    return buf.getvalue()
