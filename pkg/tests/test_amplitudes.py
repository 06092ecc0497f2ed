from itertools import product

import numpy as np
import pytest

from coulqed.amplitudes import (
    compton_covariant,
    compton_final,
    compton_pieces,
    eemumu_coulomb,
    eemumu_covariant,
    eemumu_transverse,
)
from coulqed.dirac import SPINS
from coulqed.errors import FrameError, KinematicsError
from coulqed.kinematics import M_E, M_MU, ComptonKinematics, PairKinematics
from coulqed.observables import spin_sum
from coulqed.polarization import PolarizationState

HELICITY_PAIRS = list(product((1, -1), repeat=2))


def compton_point(rng, m=M_E):
    return ComptonKinematics.center_of_mass(m * (1 + 10 ** rng.uniform(-2, 1.5)), rng.uniform(-1, 1),
                                            rng.uniform(0, 2 * np.pi), m)


def pair_point(rng, beta=0.3):
    return PairKinematics.center_of_mass(2 * M_MU * (1 + 10 ** rng.uniform(-2, 1)), rng.uniform(-1, 1),
                                         rng.uniform(0, 2 * np.pi), M_E, M_MU, beta)


def pols(kin, lam, lam_out):
    return PolarizationState.helicity(kin.k[1:], lam), PolarizationState.helicity(kin.k_out[1:], lam_out)


def test_pieces_equal_final_form(rng):
    for _ in range(30):
        kin = compton_point(rng)
        vals = [(compton_pieces(kin, s, so, *pols(kin, l, lo)), compton_final(kin, s, so, *pols(kin, l, lo)).value)
                for s, so in product(SPINS, SPINS) for l, lo in HELICITY_PAIRS]
        scale = max(abs(b) for _, b in vals)
        assert max(abs(a - b) for a, b in vals) < 1e-12 * scale


def test_small_width_is_harmless(rng):
    kin = compton_point(rng)
    pin, pout = pols(kin, 1, -1)
    a = compton_pieces(kin, 0.5, 0.5, pin, pout)
    b = compton_pieces(kin, 0.5, 0.5, pin, pout, epsilon=1e-6 * M_E**2)
    assert abs(a - b) < 1e-4 * abs(a)
    with pytest.raises(ValueError):
        compton_pieces(kin, 0.5, 0.5, pin, pout, epsilon=-1.0)


def test_final_form_matches_covariant_form_with_zero_time_component(rng):
    kin = compton_point(rng)
    for l, lo in HELICITY_PAIRS:
        pin, pout = pols(kin, l, lo)
        cov = compton_covariant(kin, 0.5, -0.5, np.concatenate([[0], -pin.vector]), np.concatenate([[0], -pout.vector]))
        assert compton_final(kin, 0.5, -0.5, pin, pout).value == pytest.approx(cov, rel=1e-12)


def test_ward_identity_of_covariant_form(rng):
    for _ in range(20):
        kin = compton_point(rng)
        pout = PolarizationState.helicity(kin.k_out[1:], 1)
        eps_out = np.concatenate([[0], -pout.vector])
        typical = max(abs(compton_covariant(kin, s, so, np.concatenate([[0], -PolarizationState.helicity(kin.k[1:], 1).vector]), eps_out))
                      for s, so in product(SPINS, SPINS))
        for s, so in product(SPINS, SPINS):
            assert abs(compton_covariant(kin, s, so, kin.k, eps_out)) < 1e-12 * typical


def test_polarization_linearity(rng):
    kin = compton_point(rng)
    a_plus, a_minus = 0.6, 0.8j
    b_plus, b_minus = 0.8, -0.6j
    mixed = compton_final(kin, 0.5, 0.5, PolarizationState(kin.k[1:], a_plus, a_minus),
                          PolarizationState(kin.k_out[1:], b_plus, b_minus)).value
    expected = 0
    for (ca, la), (cb, lb) in product(((a_plus, 1), (a_minus, -1)), ((b_plus, 1), (b_minus, -1))):
        expected += ca * np.conj(cb) * compton_final(kin, 0.5, 0.5, *pols(kin, la, lb)).value
    assert mixed == pytest.approx(expected, rel=1e-12)


def test_global_phase_of_both_polarizations_cancels(rng):
    kin = compton_point(rng)
    phase = np.exp(0.7j)
    base = compton_final(kin, 0.5, 0.5, PolarizationState(kin.k[1:], 0.6, 0.8), PolarizationState(kin.k_out[1:], 0.8, 0.6)).value
    rotated = compton_final(kin, 0.5, 0.5, PolarizationState(kin.k[1:], 0.6 * phase, 0.8 * phase),
                            PolarizationState(kin.k_out[1:], 0.8 * phase, 0.6 * phase)).value
    assert rotated == pytest.approx(base, rel=1e-12)


def test_recombination_identity(rng):
    for _ in range(30):
        kin = pair_point(rng, beta=rng.uniform(-0.9, 0.9))
        for labels in product(SPINS, repeat=4):
            cov = eemumu_covariant(kin, *labels).value
            split = eemumu_transverse(kin, *labels) + eemumu_coulomb(kin, *labels)
            assert abs(split - cov) <= 1e-12 * max(abs(cov), 1e-300) or abs(split - cov) < 1e-14


def test_recombination_along_boost_sequence(rng):
    cos, phi, sqrt_s = 0.4, 1.1, 3 * M_MU
    for beta in (0.5, 0.1, 1e-2, 1e-3, 1e-4):
        kin = PairKinematics.center_of_mass(sqrt_s, cos, phi, M_E, M_MU, beta)
        for labels in product(SPINS, repeat=4):
            cov = eemumu_covariant(kin, *labels).value
            split = eemumu_transverse(kin, *labels) + eemumu_coulomb(kin, *labels)
            assert abs(split - cov) <= 1e-10 * abs(eemumu_covariant(kin, 0.5, 0.5, 0.5, -0.5).value) + 1e-12 * abs(cov)


def test_split_is_undefined_in_the_centre_of_mass_frame():
    kin = PairKinematics.center_of_mass(3 * M_MU, 0.2, 0.0, M_E, M_MU)
    with pytest.raises(FrameError):
        eemumu_transverse(kin, 0.5, 0.5, 0.5, 0.5)
    with pytest.raises(FrameError):
        eemumu_coulomb(kin, 0.5, 0.5, 0.5, 0.5)
    assert np.isfinite(eemumu_covariant(kin, 0.5, 0.5, 0.5, 0.5).value)


def test_boosted_pieces_are_finite(rng):
    kin = pair_point(rng)
    assert np.isfinite(eemumu_transverse(kin, 0.5, -0.5, 0.5, -0.5))
    assert np.isfinite(eemumu_coulomb(kin, 0.5, -0.5, 0.5, -0.5))


def test_threshold_amplitude_is_finite():
    kin = PairKinematics.center_of_mass(2 * M_MU, 0.0, 0.0, M_E, M_MU)
    assert all(np.isfinite(eemumu_covariant(kin, *labels).value) for labels in product(SPINS, repeat=4))


def test_coupling_scaling(rng):
    kin, pair = compton_point(rng), pair_point(rng)
    pin, pout = pols(kin, 1, 1)
    for e in (0.1, 0.5):
        assert compton_final(kin, 0.5, 0.5, pin, pout, e=e).value == pytest.approx(
            (e / 0.3) ** 2 * compton_final(kin, 0.5, 0.5, pin, pout, e=0.3).value, rel=1e-13)
        assert eemumu_covariant(pair, 0.5, 0.5, -0.5, 0.5, e=e).value == pytest.approx(
            (e / 0.3) ** 2 * eemumu_covariant(pair, 0.5, 0.5, -0.5, 0.5, e=0.3).value, rel=1e-13)
    assert eemumu_transverse(pair, 0.5, 0.5, 0.5, 0.5, e=0.0) == 0


def test_summed_square_is_frame_independent(rng):
    for _ in range(10):
        sqrt_s, cos, phi = 2 * M_MU * (1 + rng.uniform(0.01, 5)), rng.uniform(-1, 1), rng.uniform(0, 6)
        rest = spin_sum("eemumu", PairKinematics.center_of_mass(sqrt_s, cos, phi, M_E, M_MU))
        moving = spin_sum("eemumu", PairKinematics.center_of_mass(sqrt_s, cos, phi, M_E, M_MU, 0.3))
        assert moving == pytest.approx(rest, rel=1e-10)


def test_kinematics_validation():
    kin = ComptonKinematics.center_of_mass(2 * M_E, 0.3, 0.0, M_E)
    with pytest.raises(KinematicsError):
        ComptonKinematics(kin.p, kin.k, kin.p_out, kin.k_out * 1.01, M_E)
    with pytest.raises(KinematicsError):
        PairKinematics.center_of_mass(1.9 * M_MU, 0.0, 0.0, M_E, M_MU)
