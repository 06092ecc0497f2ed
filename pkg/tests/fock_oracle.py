"""Truncated Fock-space matrices for two electron modes, two positron modes and two photon modes."""
from __future__ import annotations

from functools import reduce

import numpy as np

FERMION_ORDER = (("a", 0), ("a", 1), ("ac", 0), ("ac", 1))
PHOTON_CAP = 2

_SIGMA_Z = np.diag([1.0, -1.0])
_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]])  # |1> -> |0> in basis (|0>, |1>)


def _kron(*mats):
    return reduce(np.kron, mats)


def _fermion(slot: int) -> np.ndarray:
    # Jordan-Wigner string on the slots to the left
    mats = [_SIGMA_Z] * slot + [_LOWER] + [np.eye(2)] * (len(FERMION_ORDER) - slot - 1)
    return _kron(*mats)


def _boson(mode: int) -> np.ndarray:
    dim = PHOTON_CAP + 1
    lower = np.diag(np.sqrt(np.arange(1, dim)), k=1)
    return _kron(lower, np.eye(dim)) if mode == 0 else _kron(np.eye(dim), lower)


def operators() -> dict:
    """(kind, mode) -> matrix on the 16 x 9 = 144 dimensional space."""
    n_f = 2 ** len(FERMION_ORDER)
    n_b = (PHOTON_CAP + 1) ** 2
    out = {}
    for slot, (kind, mode) in enumerate(FERMION_ORDER):
        low = np.kron(_fermion(slot), np.eye(n_b))
        out[(kind, mode)] = low
        out[(kind + "+", mode)] = low.T.copy()
    for mode in (0, 1):
        low = np.kron(np.eye(n_f), _boson(mode))
        out[("b", mode)] = low
        out[("b+", mode)] = low.T.copy()
    return out


def vacuum(dim: int) -> np.ndarray:
    v = np.zeros(dim)
    v[0] = 1.0
    return v


def photon_overflow(letters) -> bool:
    """True if applying the word right to left would push a photon mode past the cap."""
    count = {0: 0, 1: 0}
    for kind, mode in reversed(letters):
        if kind == "b+":
            count[mode] += 1
            if count[mode] > PHOTON_CAP:
                return True
        elif kind == "b":
            count[mode] = max(count[mode] - 1, 0)
    return False
