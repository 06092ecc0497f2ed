import numpy as np
import pytest

from coulqed.dirac import GAMMA0, SPINS, on_shell, slash, u_spinor
from coulqed.errors import PoleError, ZeroModeError
from coulqed.lattice import LatticeSpec, green_function
from coulqed.propagators import THETA_AT_ZERO, coulomb_kernel, dirac_propagator, photon_propagator


def test_pole_is_reported():
    with pytest.raises(PoleError):
        dirac_propagator([1.0, 0, 0, 0], 1.0)
    assert dirac_propagator([1.0, 0, 0, 0], 1.0, epsilon=1e-6).denominator == pytest.approx(-1e-6j)


def test_numerator_and_denominator(rng):
    for q in rng.normal(size=(50, 4)):
        m = 0.7
        prop = dirac_propagator(q, m)
        assert np.allclose(prop.numerator @ GAMMA0, m * np.eye(4) + slash(q))
        assert prop.denominator == pytest.approx(m * m - (q[0] ** 2 - q[1:] @ q[1:]))


def test_compton_denominator_never_vanishes(rng):
    m = 1.0
    for _ in range(100):
        p = on_shell(rng.normal(size=3), m)
        k3 = rng.normal(size=3)
        k = np.concatenate([[np.linalg.norm(k3)], k3])
        prop = dirac_propagator(p + k, m)
        pk = p[0] * k[0] - p[1:] @ k[1:]
        assert prop.denominator == pytest.approx(-2 * pk)
        assert pk > 0


def test_on_shell_numerator_is_spinor_sum(rng):
    for _ in range(100):
        m = float(rng.uniform(0.1, 3))
        p = on_shell(rng.normal(size=3) * 3, m)
        numerator = dirac_propagator(p, m, epsilon=1.0).numerator
        spin_sum = sum(np.outer(u, u.conj()) for u in (u_spinor(p, s, m) for s in SPINS))
        assert np.max(np.abs(numerator - spin_sum)) < 1e-12 * p[0]


def test_photon_numerator_along_z():
    assert np.array_equal(photon_propagator([1.0, 0, 0, 2.0]).numerator, np.diag([1.0, 1.0, 0.0]))


def test_photon_numerator_is_transverse_projector(rng):
    for q in rng.normal(size=(100, 4)):
        n = photon_propagator(q).numerator
        assert np.max(np.abs(n @ n - n)) < 1e-14
        assert np.max(np.abs(n @ q[1:])) < 1e-14 * np.linalg.norm(q[1:])
        assert np.array_equal(n, n.T)


def test_photon_zero_three_momentum():
    with pytest.raises(ZeroModeError):
        photon_propagator([1.0, 0, 0, 0])


def test_coulomb_kernel():
    assert coulomb_kernel([0, 1.0, 0]) == 1
    assert coulomb_kernel([0, 0, 2.0]) == 0.25
    with pytest.raises(ZeroModeError):
        coulomb_kernel([0, 0, 0])


def test_lattice_green_function_transform():
    n = 8
    spec = LatticeSpec(n)
    g = np.fft.fftn(np.array(green_function(spec, exact_mode=False)).reshape(n, n, n)).real
    for label in spec.momenta():
        if any(label):
            khat = 2 * np.sin(np.pi * np.array(label) / n)
            assert -g[label] == pytest.approx(coulomb_kernel(khat), abs=1e-10)


def test_step_function_convention():
    assert THETA_AT_ZERO == 0.5
