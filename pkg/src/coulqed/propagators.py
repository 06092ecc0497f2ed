"""Momentum-space propagator factors for Coulomb-gauge QED."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirac import GAMMA0, IDENTITY4, minkowski_dot, slash
from .errors import PoleError, ZeroModeError

# Value of the step function at coincident times; fixes the weight of the
# instantaneous Coulomb contraction.
THETA_AT_ZERO = 0.5


@dataclass(frozen=True)
class PropagatorFactor:
    numerator: np.ndarray
    denominator: complex
    q: np.ndarray


def dirac_propagator(q, m: float, epsilon: float = 0.0) -> PropagatorFactor:
    """Numerator (m + qslash) gamma^0 over m^2 - q^2 - i eps."""
    q = np.asarray(q, dtype=float)
    denom = m * m - float(minkowski_dot(q, q)) - 1j * epsilon
    if denom == 0:
        raise PoleError("Dirac propagator evaluated on its pole")
    numerator = (m * IDENTITY4 + slash(q)) @ GAMMA0
    return PropagatorFactor(numerator, denom, q)


def transverse_projector(q3) -> np.ndarray:
    q3 = np.asarray(q3, dtype=float)
    n2 = float(q3 @ q3)
    if n2 == 0.0:
        raise ZeroModeError("transverse projector undefined for zero three-momentum")
    return np.eye(3) - np.outer(q3, q3) / n2


def photon_propagator(q, epsilon: float = 0.0) -> PropagatorFactor:
    """Numerator delta_jk - q_j q_k/|q|^2 over q^2 + i eps."""
    q = np.asarray(q, dtype=float)
    numerator = transverse_projector(q[1:])
    denom = float(minkowski_dot(q, q)) + 1j * epsilon
    if denom == 0:
        raise PoleError("photon propagator evaluated on its pole")
    return PropagatorFactor(numerator, denom, q)


def coulomb_kernel(q3) -> float:
    """1/|q|^2, the transform of the instantaneous 1/(4 pi r) interaction."""
    q3 = np.asarray(q3, dtype=float)
    n2 = float(q3 @ q3)
    if n2 == 0.0:
        raise ZeroModeError("Coulomb kernel has no zero mode")
    return 1.0 / n2
