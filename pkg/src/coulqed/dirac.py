"""Gamma matrices, on-shell spinors and traces in the Dirac representation.

Metric signature is (+,-,-,-).  Momenta are numpy arrays whose last axis has
length 4; every function broadcasts over leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import KinematicsError, UnsupportedMassError

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

_PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

ONSHELL_RTOL = 1e-12


@dataclass(frozen=True)
class GammaSet:
    gamma: np.ndarray  # shape (4, 4, 4): gamma[a] is the 4x4 matrix
    metric: np.ndarray = METRIC

    def __getitem__(self, a: int) -> np.ndarray:
        return self.gamma[a]


def build_gammas() -> GammaSet:
    """Dirac representation: gamma^0 = diag(1,1,-1,-1), gamma^i = [[0, s_i], [-s_i, 0]]."""
    g = np.zeros((4, 4, 4), dtype=complex)
    g[0] = np.diag([1, 1, -1, -1])
    for i in range(3):
        g[i + 1, :2, 2:] = _PAULI[i]
        g[i + 1, 2:, :2] = -_PAULI[i]
    g.setflags(write=False)
    return GammaSet(g)


GAMMAS = build_gammas()
GAMMA = GAMMAS.gamma
GAMMA0 = GAMMA[0]
IDENTITY4 = np.eye(4, dtype=complex)


def minkowski_dot(p, q):
    p = np.asarray(p)
    q = np.asarray(q)
    return p[..., 0] * q[..., 0] - np.sum(p[..., 1:] * q[..., 1:], axis=-1)


def slash(p) -> np.ndarray:
    """p_a gamma^a with the index lowered by the metric."""
    p_lower = np.asarray(p) @ METRIC
    return np.einsum("...a,aij->...ij", p_lower, GAMMA)


def spatial_slash(e) -> np.ndarray:
    """gamma^i e_i for a (possibly complex) spatial 3-vector with lower index."""
    return np.einsum("...i,ijk->...jk", np.asarray(e), GAMMA[1:])


def trace_product(matrices) -> complex:
    if len(matrices) == 0:
        raise ValueError("trace_product needs at least one matrix")
    return complex(np.trace(reduce(np.matmul, matrices)))


def _check_on_shell(p: np.ndarray, m: float) -> None:
    e = p[..., 0]
    if np.any(e <= 0):
        raise KinematicsError("energy must be positive")
    defect = np.abs(minkowski_dot(p, p) - m * m)
    if np.any(defect > ONSHELL_RTOL * np.maximum(e * e, 1.0)):
        raise KinematicsError(f"momentum off shell for mass {m} (defect {np.max(defect):.3e})")


def on_shell(three_momentum, m: float) -> np.ndarray:
    """Four-momentum (E, p) with E = sqrt(p^2 + m^2)."""
    k = np.asarray(three_momentum, dtype=float)
    e = np.sqrt(np.sum(k * k, axis=-1) + m * m)
    return np.concatenate([e[..., None], k], axis=-1)


def _two_spinor(sigma: float) -> np.ndarray:
    if sigma == 0.5:
        return np.array([1.0, 0.0], dtype=complex)
    if sigma == -0.5:
        return np.array([0.0, 1.0], dtype=complex)
    raise ValueError(f"spin label must be +1/2 or -1/2, got {sigma}")


def _antiparticle_two_spinor(sigma: float) -> np.ndarray:
    # eta_sigma = -i s_2 xi_sigma^*, the charge-conjugate rest spinor
    return np.array([[0, -1], [1, 0]], dtype=complex) @ _two_spinor(sigma).conj()


def _sigma_dot(p3: np.ndarray) -> np.ndarray:
    return np.einsum("...i,ijk->...jk", p3, _PAULI)


def _real_array(p) -> np.ndarray:
    # extended precision inputs stay extended; everything else becomes float64
    arr = np.asarray(p)
    return arr if arr.dtype == np.longdouble else arr.astype(float)


def u_spinor(p, sigma: float, m: float, check: bool = True) -> np.ndarray:
    """Positive-energy spinor normalised to u^dagger u = 2E."""
    if m <= 0:
        raise UnsupportedMassError("massless spinors are not supported")
    p = _real_array(p)
    if check:
        _check_on_shell(p, m)
    xi = _two_spinor(sigma)
    root = np.sqrt(p[..., 0] + m)[..., None]
    upper = root * xi
    lower = np.einsum("...jk,k->...j", _sigma_dot(p[..., 1:]), xi) / root
    return np.concatenate([upper, lower], axis=-1)


def v_spinor(p, sigma: float, m: float, check: bool = True) -> np.ndarray:
    """Negative-energy spinor normalised to v^dagger v = 2E."""
    if m <= 0:
        raise UnsupportedMassError("massless spinors are not supported")
    p = _real_array(p)
    if check:
        _check_on_shell(p, m)
    eta = _antiparticle_two_spinor(sigma)
    root = np.sqrt(p[..., 0] + m)[..., None]
    upper = np.einsum("...jk,k->...j", _sigma_dot(p[..., 1:]), eta) / root
    lower = root * eta
    return np.concatenate([upper, lower], axis=-1)


def adjoint(s) -> np.ndarray:
    """Row spinor s^dagger gamma^0."""
    return np.asarray(s).conj() @ GAMMA0


SPINS = (0.5, -0.5)
