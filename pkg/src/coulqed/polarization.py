"""Transverse photon polarisation basis built from a fixed rotation of the z-axis basis."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DirectionError
from .propagators import transverse_projector

# Columns are the helicity +1 and -1 vectors for k along +z.
_E0_UNSCALED = np.array([[1, 1], [1j, -1j], [0, 0]], dtype=complex)
E0 = _E0_UNSCALED / np.sqrt(2.0)
HELICITIES = (1, -1)


def angles(k) -> tuple[float, float]:
    """Polar and azimuthal angle of k; the azimuth is pinned to 0 on the poles."""
    k = np.asarray(k, dtype=float)
    norm = float(np.linalg.norm(k))
    if norm == 0.0:
        raise DirectionError("direction of the zero vector is undefined")
    theta = float(np.arccos(np.clip(k[2] / norm, -1.0, 1.0)))
    if k[0] == 0.0 and k[1] == 0.0:
        return theta, 0.0
    phi = float(np.arctan2(k[1], k[0])) % (2 * np.pi)
    return theta, phi


def rotation(k) -> np.ndarray:
    """R(k) = R_z(phi) R_y(theta); maps z-hat onto k-hat."""
    theta, phi = angles(k)
    cp, sp = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    rz = np.array([[cp, -sp, 0.0], [sp, cp, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[ct, 0.0, st], [0.0, 1.0, 0.0], [-st, 0.0, ct]])
    return rz @ ry


def basis_matrix(k) -> np.ndarray:
    """3x2 matrix whose columns are e_{+1}(k), e_{-1}(k)."""
    return rotation(k) @ E0


def basis(k) -> tuple[np.ndarray, np.ndarray]:
    e = basis_matrix(k)
    return e[:, 0], e[:, 1]


def basis_explicit(k) -> np.ndarray:
    """The same basis written out componentwise in the polar angles (independent path)."""
    theta, phi = angles(k)
    cols = []
    for sign in (1, -1):
        cols.append(
            np.array(
                [
                    np.cos(theta) * np.cos(phi) - sign * 1j * np.sin(phi),
                    np.cos(theta) * np.sin(phi) + sign * 1j * np.cos(phi),
                    -np.sin(theta),
                ]
            )
            / np.sqrt(2.0)
        )
    return np.stack(cols, axis=1)


def completeness_sum(k) -> np.ndarray:
    """sum over helicities of e_i e_j^*."""
    e = basis_matrix(k)
    return e @ e.conj().T


def completeness_formula(k) -> np.ndarray:
    """Closed form of the helicity sum; shares its code path with the photon propagator numerator."""
    k = np.asarray(k, dtype=float)
    if not np.any(k):
        raise DirectionError("direction of the zero vector is undefined")
    return transverse_projector(k)


def mode_projection_identity(k) -> float:
    """Max deviation of e0^dagger R^{-1}(k) e(k) from the 2x2 identity."""
    r = rotation(k)
    # the 1/sqrt(2) normalisations are applied once, as an exact factor 1/2, so R = I gives exactly 0
    m = (_E0_UNSCALED.conj().T @ r.T @ (r @ _E0_UNSCALED)) / 2
    return float(np.max(np.abs(m - np.eye(2))))


@dataclass(frozen=True)
class PolarizationState:
    k: np.ndarray
    alpha_plus: complex
    alpha_minus: complex

    def __post_init__(self):
        norm = abs(self.alpha_plus) ** 2 + abs(self.alpha_minus) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|alpha_+|^2 + |alpha_-|^2 must be 1, got {norm}")

    @classmethod
    def helicity(cls, k, lam: int) -> "PolarizationState":
        if lam == 1:
            return cls(np.asarray(k, dtype=float), 1.0, 0.0)
        if lam == -1:
            return cls(np.asarray(k, dtype=float), 0.0, 1.0)
        raise ValueError(f"helicity must be +1 or -1, got {lam}")

    @property
    def vector(self) -> np.ndarray:
        e_plus, e_minus = basis(self.k)
        return self.alpha_plus * e_plus + self.alpha_minus * e_minus
