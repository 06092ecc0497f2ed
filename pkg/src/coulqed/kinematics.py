"""2 -> 2 kinematics: validated containers and centre-of-mass point construction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirac import minkowski_dot, on_shell
from .errors import KinematicsError

M_E = 0.000511
M_MU = 0.105658
ALPHA = 1 / 137.035999
E_CHARGE = float(np.sqrt(4 * np.pi * ALPHA))

_CONSERVATION_RTOL = 1e-10
_SHELL_RTOL = 1e-12


def _direction(cos_theta: float, phi: float) -> np.ndarray:
    sin_theta = np.sqrt(max(0.0, 1.0 - cos_theta * cos_theta))
    return np.array([sin_theta * np.cos(phi), sin_theta * np.sin(phi), cos_theta])


def boost_z(p, beta: float) -> np.ndarray:
    """Active boost of four-momenta along +z with velocity beta."""
    p = np.asarray(p, dtype=float)
    gamma = 1.0 / np.sqrt(1.0 - beta * beta)
    out = p.copy()
    out[..., 0] = gamma * (p[..., 0] + beta * p[..., 3])
    out[..., 3] = gamma * (p[..., 3] + beta * p[..., 0])
    return out


def _check_mass(p, m, label):
    scale = max(float(p[0]) ** 2, 1e-300)
    if p[0] <= 0:
        raise KinematicsError(f"{label}: energy must be positive")
    if abs(float(minkowski_dot(p, p)) - m * m) > _SHELL_RTOL * max(scale, m * m):
        raise KinematicsError(f"{label}: off shell")


def _check_conservation(initial, final, sqrt_s):
    if np.max(np.abs(initial - final)) > _CONSERVATION_RTOL * sqrt_s:
        raise KinematicsError("four-momentum not conserved")


@dataclass(frozen=True)
class ComptonKinematics:
    """e(p) + gamma(k) -> e(p') + gamma(k')."""

    p: np.ndarray
    k: np.ndarray
    p_out: np.ndarray
    k_out: np.ndarray
    m: float

    def __post_init__(self):
        for name in ("p", "k", "p_out", "k_out"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        _check_mass(self.p, self.m, "incoming electron")
        _check_mass(self.p_out, self.m, "outgoing electron")
        _check_mass(self.k, 0.0, "incoming photon")
        _check_mass(self.k_out, 0.0, "outgoing photon")
        _check_conservation(self.p + self.k, self.p_out + self.k_out, self.sqrt_s)

    @property
    def sqrt_s(self) -> float:
        tot = self.p + self.k
        return float(np.sqrt(minkowski_dot(tot, tot)))

    @classmethod
    def center_of_mass(cls, sqrt_s: float, cos_theta: float, phi: float, m: float):
        """Photon incoming along +z; theta is the photon scattering angle."""
        s = sqrt_s * sqrt_s
        if sqrt_s <= m:
            raise KinematicsError("sqrt_s must exceed the electron mass")
        omega = (s - m * m) / (2 * sqrt_s)
        zhat = np.array([0.0, 0.0, 1.0])
        n = _direction(cos_theta, phi)
        k = np.concatenate([[omega], omega * zhat])
        k_out = np.concatenate([[omega], omega * n])
        return cls(on_shell(-omega * zhat, m), k, on_shell(-omega * n, m), k_out, m)


def compton_sqrt_s(omega_lab: float, m: float) -> float:
    """CM energy for a photon of energy omega_lab hitting an electron at rest."""
    return float(np.sqrt(m * m + 2 * m * omega_lab))


@dataclass(frozen=True)
class PairKinematics:
    """e-(p) + e+(p') -> mu-(k) + mu+(k')."""

    p: np.ndarray
    p_bar: np.ndarray
    k: np.ndarray
    k_bar: np.ndarray
    m_e: float
    m_mu: float

    def __post_init__(self):
        for name in ("p", "p_bar", "k", "k_bar"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        _check_mass(self.p, self.m_e, "electron")
        _check_mass(self.p_bar, self.m_e, "positron")
        _check_mass(self.k, self.m_mu, "muon")
        _check_mass(self.k_bar, self.m_mu, "antimuon")
        if self.s < 4 * self.m_mu**2 * (1 - 1e-12):
            raise KinematicsError("below the muon pair threshold")
        _check_conservation(self.p + self.p_bar, self.k + self.k_bar, self.sqrt_s)

    @property
    def s(self) -> float:
        tot = self.p + self.p_bar
        return float(minkowski_dot(tot, tot))

    @property
    def sqrt_s(self) -> float:
        return float(np.sqrt(self.s))

    @classmethod
    def center_of_mass(cls, sqrt_s, cos_theta, phi, m_e=M_E, m_mu=M_MU, beta: float = 0.0):
        """Electron along +z, muon at (theta, phi); optionally boosted along z by beta."""
        if sqrt_s < 2 * m_mu:
            raise KinematicsError("below the muon pair threshold")
        e_beam = sqrt_s / 2
        p_in = np.sqrt(max(e_beam**2 - m_e**2, 0.0))
        p_out = np.sqrt(max(e_beam**2 - m_mu**2, 0.0))
        zhat = np.array([0.0, 0.0, 1.0])
        n = _direction(cos_theta, phi)
        moms = [
            on_shell(p_in * zhat, m_e),
            on_shell(-p_in * zhat, m_e),
            on_shell(p_out * n, m_mu),
            on_shell(-p_out * n, m_mu),
        ]
        if beta:
            moms = [_reshell(boost_z(q, beta), m) for q, m in zip(moms, (m_e, m_e, m_mu, m_mu))]
        return cls(*moms, m_e=m_e, m_mu=m_mu)


def _reshell(p, m):
    # recompute the energy from the boosted three-momentum to stay on shell to rounding
    return on_shell(p[1:], m)


def cm_momentum(sqrt_s: float, m1: float, m2: float) -> float:
    s = sqrt_s * sqrt_s
    lam = (s - (m1 + m2) ** 2) * (s - (m1 - m2) ** 2)
    return float(np.sqrt(max(lam, 0.0)) / (2 * sqrt_s))
