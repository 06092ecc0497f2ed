import numpy as np
import pytest

from coulqed.errors import DirectionError
from coulqed.polarization import (
    E0,
    PolarizationState,
    angles,
    basis,
    basis_explicit,
    basis_matrix,
    completeness_formula,
    completeness_sum,
    mode_projection_identity,
    rotation,
)
from coulqed.propagators import photon_propagator


def random_directions(rng, count):
    return rng.normal(size=(count, 3)) * 10 ** rng.uniform(-2, 2, size=(count, 1))


def test_rotation_is_identity_along_z():
    assert np.array_equal(rotation([0, 0, 2.5]), np.eye(3))


def test_rotation_maps_z_to_x():
    assert np.allclose(rotation([3.0, 0, 0]) @ [0, 0, 1], [1, 0, 0], atol=1e-15)


def test_rotation_is_proper_orthogonal(rng):
    for k in random_directions(rng, 200):
        r = rotation(k)
        assert np.max(np.abs(r.T @ r - np.eye(3))) < 1e-14
        assert np.linalg.det(r) == pytest.approx(1, abs=1e-14)
        assert np.allclose(r @ [0, 0, 1], k / np.linalg.norm(k), atol=1e-14)


def test_basis_along_z():
    plus, minus = basis([0, 0, 1.0])
    assert np.allclose(plus, np.array([1, 1j, 0]) / np.sqrt(2))
    assert np.allclose(minus, np.array([1, -1j, 0]) / np.sqrt(2))


def test_basis_along_minus_z_is_well_defined():
    e = basis_matrix([0, 0, -1.0])
    assert np.allclose(e.conj().T @ e, np.eye(2))
    assert np.allclose(e[2], 0)
    assert angles([0, 0, -1.0]) == (pytest.approx(np.pi), 0.0)


def test_azimuth_range(rng):
    for k in random_directions(rng, 100):
        theta, phi = angles(k)
        assert 0 <= theta <= np.pi and 0 <= phi < 2 * np.pi


def test_transverse_orthonormal_complete(rng):
    for k in random_directions(rng, 1000):
        e = basis_matrix(k)
        khat = k / np.linalg.norm(k)
        assert np.max(np.abs(khat @ e)) < 1e-14
        assert np.max(np.abs(e.conj().T @ e - np.eye(2))) < 1e-14
        assert np.max(np.abs(completeness_sum(k) - (np.eye(3) - np.outer(khat, khat)))) < 1e-14


def test_explicit_angles_agree_with_rotation(rng):
    for k in random_directions(rng, 200):
        assert np.max(np.abs(basis_explicit(k) - basis_matrix(k))) < 1e-14


def test_completeness_equals_photon_numerator(rng):
    for k in random_directions(rng, 300):
        numerator = photon_propagator(np.concatenate([[2.0], k])).numerator
        assert np.array_equal(completeness_formula(k), numerator)
        assert np.max(np.abs(completeness_sum(k) - numerator)) < 1e-14


def test_mode_projection_identity(rng):
    assert np.allclose(E0.conj().T @ E0, np.eye(2))
    assert mode_projection_identity([0, 0, 1.0]) == 0
    assert max(mode_projection_identity(k) for k in random_directions(rng, 1000)) < 1e-13


def test_zero_direction_is_rejected():
    for fn in (rotation, basis, completeness_formula):
        with pytest.raises(DirectionError):
            fn([0, 0, 0])


def test_polarization_state(rng):
    k = np.array([0.3, -1.0, 2.0])
    a_plus, a_minus = 0.6, 0.8j
    state = PolarizationState(k, a_plus, a_minus)
    e = state.vector
    assert abs(k @ e) < 1e-14
    assert np.vdot(e, e).real == pytest.approx(1)
    plus, minus = basis(k)
    assert np.allclose(e, a_plus * plus + a_minus * minus)
    assert np.allclose(PolarizationState.helicity(k, -1).vector, minus)
    with pytest.raises(ValueError):
        PolarizationState(k, 1.0, 1.0)
    with pytest.raises(ValueError):
        PolarizationState.helicity(k, 0)
