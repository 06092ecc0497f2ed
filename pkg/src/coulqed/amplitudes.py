"""Tree-level Compton and e+e- -> mu+mu- matrix elements (iM, delta stripped)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirac import GAMMA, GAMMA0, METRIC, adjoint, minkowski_dot, slash, spatial_slash, u_spinor, v_spinor
from .errors import FrameError, PoleError
from .kinematics import E_CHARGE, ComptonKinematics, PairKinematics
from .polarization import PolarizationState
from .propagators import dirac_propagator, transverse_projector

_ID4 = np.eye(4)


@dataclass(frozen=True)
class AmplitudeResult:
    value: complex
    process: str
    labels: tuple

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValueError("amplitude is not finite")


def _pol_vector(pol) -> np.ndarray:
    if isinstance(pol, PolarizationState):
        return pol.vector
    return np.asarray(pol, dtype=complex)


def _compton_spinors(kin: ComptonKinematics, sigma, sigma_out):
    u_in = u_spinor(kin.p, sigma, kin.m)
    ubar_out = adjoint(u_spinor(kin.p_out, sigma_out, kin.m))
    return u_in, ubar_out


def compton_pieces(kin: ComptonKinematics, sigma, sigma_out, pol_in, pol_out,
                   epsilon: float = 0.0, e: float = E_CHARGE) -> complex:
    """Both exchange diagrams with full propagator factors N(q)gamma0 / (m^2 - q^2 - i eps)."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    u_in, ubar_out = _compton_spinors(kin, sigma, sigma_out)
    e_in = spatial_slash(_pol_vector(pol_in))
    e_out_conj = spatial_slash(np.conj(_pol_vector(pol_out)))
    s_chan = dirac_propagator(kin.p + kin.k, kin.m, epsilon)
    u_chan = dirac_propagator(kin.p - kin.k_out, kin.m, epsilon)
    braced = (e_out_conj @ s_chan.numerator @ GAMMA0 @ e_in / s_chan.denominator
              + e_in @ u_chan.numerator @ GAMMA0 @ e_out_conj / u_chan.denominator)
    return complex(1j * e * e * (ubar_out @ braced @ u_in))


def compton_final(kin: ComptonKinematics, sigma, sigma_out, pol_in, pol_out,
                  e: float = E_CHARGE) -> AmplitudeResult:
    u_in, ubar_out = _compton_spinors(kin, sigma, sigma_out)
    e_in = spatial_slash(_pol_vector(pol_in))
    e_out_conj = spatial_slash(np.conj(_pol_vector(pol_out)))
    m = kin.m
    pk = minkowski_dot(kin.p, kin.k)
    pk_out = minkowski_dot(kin.p, kin.k_out)
    braced = (e_out_conj @ (slash(kin.p + kin.k) + m * _ID4) @ e_in / (2 * pk)
              + e_in @ (slash(kin.p - kin.k_out) + m * _ID4) @ e_out_conj / (-2 * pk_out))
    value = complex(-1j * e * e * (ubar_out @ braced @ u_in))
    return AmplitudeResult(value, "compton", (sigma, sigma_out, _label(pol_in), _label(pol_out)))


def compton_covariant(kin: ComptonKinematics, sigma, sigma_out, eps_in, eps_out,
                      e: float = E_CHARGE) -> complex:
    """Textbook covariant form with four-vector polarizations; used as an oracle."""
    u_in, ubar_out = _compton_spinors(kin, sigma, sigma_out)
    m = kin.m
    a_in = slash(np.asarray(eps_in, dtype=complex))
    a_out = slash(np.conj(np.asarray(eps_out, dtype=complex)))
    braced = (a_out @ (slash(kin.p + kin.k) + m * _ID4) @ a_in / (2 * minkowski_dot(kin.p, kin.k))
              + a_in @ (slash(kin.p - kin.k_out) + m * _ID4) @ a_out
              / (-2 * minkowski_dot(kin.p, kin.k_out)))
    return complex(-1j * e * e * (ubar_out @ braced @ u_in))


def _label(pol):
    if isinstance(pol, PolarizationState):
        return (complex(pol.alpha_plus), complex(pol.alpha_minus))
    return tuple(complex(x) for x in np.asarray(pol).ravel())


def _widen(p, m):
    # Charge densities of relativistic pairs cancel by ~E/m, so the energy is
    # recomputed from the three-momentum in extended precision.
    p3 = np.asarray(p[1:], dtype=np.longdouble)
    m = np.longdouble(m)
    return np.concatenate([[np.sqrt(p3 @ p3 + m * m)], p3])


def pair_currents(kin: PairKinematics, sigma, sigma_bar, lam, lam_bar):
    """Electron current vbar(p') g^a u(p) and muon current ubar(k) g^a v(k'), upper index."""
    u_e = u_spinor(_widen(kin.p, kin.m_e), sigma, kin.m_e)
    vbar_e = adjoint(v_spinor(_widen(kin.p_bar, kin.m_e), sigma_bar, kin.m_e))
    ubar_mu = adjoint(u_spinor(_widen(kin.k, kin.m_mu), lam, kin.m_mu))
    v_mu = v_spinor(_widen(kin.k_bar, kin.m_mu), lam_bar, kin.m_mu)
    electron = np.einsum("i,aij,j->a", vbar_e, GAMMA, u_e)
    muon = np.einsum("i,aij,j->a", ubar_mu, GAMMA, v_mu)
    return electron, muon


def _exchange_three_momentum(kin: PairKinematics) -> np.ndarray:
    q3 = kin.k[1:] + kin.k_bar[1:]
    if np.linalg.norm(q3) <= 1e-12 * kin.sqrt_s:
        raise FrameError("transverse/Coulomb split undefined at zero net three-momentum")
    return q3


def eemumu_transverse(kin: PairKinematics, sigma, sigma_bar, lam, lam_bar,
                      e: float = E_CHARGE) -> complex:
    q3 = _exchange_three_momentum(kin)
    electron, muon = pair_currents(kin, sigma, sigma_bar, lam, lam_bar)
    proj = transverse_projector(q3)
    return complex(-1j * e * e / kin.s * (electron[1:] @ proj @ muon[1:]))


def eemumu_coulomb(kin: PairKinematics, sigma, sigma_bar, lam, lam_bar,
                   e: float = E_CHARGE) -> complex:
    q3 = _exchange_three_momentum(kin)
    # v^dagger u = vbar gamma^0 u, so the time components of the currents are the charge densities
    electron, muon = pair_currents(kin, sigma, sigma_bar, lam, lam_bar)
    return complex(-1j * e * e / (q3 @ q3) * electron[0] * muon[0])


def eemumu_covariant(kin: PairKinematics, sigma, sigma_bar, lam, lam_bar,
                     e: float = E_CHARGE) -> AmplitudeResult:
    q2 = kin.s
    if q2 == 0:
        raise PoleError("q^2 = 0")
    electron, muon = pair_currents(kin, sigma, sigma_bar, lam, lam_bar)
    value = complex(1j * e * e / q2 * (electron @ METRIC @ muon))
    return AmplitudeResult(value, "eemumu", (sigma, sigma_bar, lam, lam_bar))
