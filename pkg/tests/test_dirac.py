from itertools import product

import numpy as np
import pytest

from coulqed import dirac
from coulqed.dirac import GAMMA, GAMMA0, METRIC, SPINS, adjoint, on_shell, slash, trace_product, u_spinor, v_spinor
from coulqed.errors import KinematicsError, UnsupportedMassError


def test_slash_of_time_unit_is_gamma0():
    assert np.array_equal(slash([1, 0, 0, 0]), GAMMA0)


def test_slash_lowers_the_index():
    p = np.array([0.3, 1.0, -2.0, 0.5])
    assert np.allclose(slash(p), p[0] * GAMMA[0] - sum(p[i] * GAMMA[i] for i in range(1, 4)))


def test_spatial_slash_takes_lower_components():
    e_lower = np.array([1.0, 2j, -0.5])
    assert np.allclose(dirac.spatial_slash(e_lower), sum(e_lower[i] * GAMMA[i + 1] for i in range(3)))
    # same as the four-vector slash of (0, e^i) with e^i = -e_i
    assert np.allclose(dirac.spatial_slash(e_lower), slash(np.concatenate([[0], -e_lower])))


def test_clifford_algebra():
    for a, b in product(range(4), repeat=2):
        assert np.array_equal(GAMMA[a] @ GAMMA[b] + GAMMA[b] @ GAMMA[a], 2 * METRIC[a, b] * np.eye(4))


def test_slash_squares_to_invariant_mass(rng):
    for p in rng.normal(size=(50, 4)):
        assert np.allclose(slash(p) @ slash(p), dirac.minkowski_dot(p, p) * np.eye(4), atol=1e-14)


def test_traces():
    for a, b in product(range(4), repeat=2):
        assert trace_product([GAMMA[a], GAMMA[b]]) == pytest.approx(4 * METRIC[a, b])
    for a in range(4):
        assert trace_product([GAMMA[a]]) == 0
    for a, b, c in product(range(4), repeat=3):
        assert trace_product([GAMMA[a], GAMMA[b], GAMMA[c]]) == 0


def test_rest_frame_spinors():
    m = 0.9
    p = np.array([m, 0, 0, 0])
    assert np.allclose(u_spinor(p, 0.5, m), np.sqrt(2 * m) * np.array([1, 0, 0, 0]))
    assert adjoint(u_spinor(p, 0.5, m)) @ u_spinor(p, 0.5, m) == pytest.approx(2 * m)
    assert adjoint(v_spinor(p, 0.5, m)) @ v_spinor(p, 0.5, m) == pytest.approx(-2 * m)
    rest = sum(np.outer(u, u.conj()) for u in (u_spinor(p, s, m) for s in SPINS))
    assert np.allclose(rest, m * np.diag([2, 2, 0, 0]))
    assert np.allclose(rest, (m * np.eye(4) + m * GAMMA0) @ GAMMA0)


def test_completeness_and_dirac_equation(rng):
    for _ in range(200):
        m = float(10 ** rng.uniform(-3, 1))
        p = on_shell(rng.normal(size=3) * 10 ** rng.uniform(-2, 2), m)
        us = [u_spinor(p, s, m) for s in SPINS]
        vs = [v_spinor(p, s, m) for s in SPINS]
        assert np.max(np.abs(sum(np.outer(u, u.conj()) for u in us) - (m * np.eye(4) + slash(p)) @ GAMMA0)) < 1e-12 * p[0]
        assert np.max(np.abs(sum(np.outer(u, adjoint(u)) for u in us) - (slash(p) + m * np.eye(4)))) < 1e-12 * p[0]
        assert np.max(np.abs(sum(np.outer(v, adjoint(v)) for v in vs) - (slash(p) - m * np.eye(4)))) < 1e-12 * p[0]
        for u, v in zip(us, vs):
            assert np.linalg.norm((slash(p) - m * np.eye(4)) @ u) < 1e-12 * np.linalg.norm(u) * p[0] / m
            assert np.vdot(u, u).real == pytest.approx(2 * p[0], rel=1e-12)
            assert adjoint(u) @ GAMMA0 @ u == pytest.approx(2 * p[0], rel=1e-12)
            for g in GAMMA:
                assert abs((adjoint(u) @ g @ u).imag) < 1e-12 * p[0]


def test_off_shell_momentum_is_rejected():
    with pytest.raises(KinematicsError):
        u_spinor([2.0, 0.0, 0.0, 0.0], 0.5, 1.0)


def test_massless_spinors_are_unsupported():
    with pytest.raises(UnsupportedMassError):
        u_spinor([1.0, 0.0, 0.0, 1.0], 0.5, 0.0)
    with pytest.raises(UnsupportedMassError):
        v_spinor([1.0, 0.0, 0.0, 1.0], 0.5, 0.0)
