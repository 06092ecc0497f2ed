from fractions import Fraction

import numpy as np
import pytest

from coulqed.dirac_bracket import DiracBracket
from coulqed.graded import GradedPolynomial, PhaseSpace
from coulqed.lattice import LatticeSpec
from coulqed.qed import build_qed_system

# A few canonical pairs on two sites; random polynomials drawn from this pool have nonzero brackets.
POOL = [("A", 1, 0), ("piA", 1, 0), ("A", 2, 1), ("piA", 2, 1), ("A", 0, 1), ("piA", 0, 1),
        ("psi", 0, 0), ("pi", 0, 0), ("psibar", 1, 0), ("pibar", 1, 0), ("psi", 2, 1), ("pi", 2, 1)]


@pytest.fixture(scope="session")
def space():
    return PhaseSpace(2)


def random_poly(space, rng, parity, max_degree=3, n_terms=3, pool=POOL):
    ids = [space.id(*p) for p in pool]
    out = GradedPolynomial(space)
    while out.is_zero():
        for _ in range(n_terms):
            while True:
                deg = int(rng.integers(0, max_degree + 1))
                mon = [ids[int(rng.integers(len(ids)))] for _ in range(deg)]
                if sum(space.odd[s] for s in mon) % 2 == parity:
                    break
            term = GradedPolynomial.constant(space, Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))))
            for s in mon:
                term = term * GradedPolynomial.symbol(space, s)
            out = out + term
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def gauge_system_n2():
    return build_qed_system(LatticeSpec(2), e=0.3, m=1.0, coulomb=True)


@pytest.fixture(scope="session")
def gauge_bracket_n2(gauge_system_n2):
    return DiracBracket(gauge_system_n2.gauge_fixed_pairing())


@pytest.fixture(scope="session")
def gauge_system_n3():
    return build_qed_system(LatticeSpec(3), e=0.3, m=1.0, coulomb=True)


@pytest.fixture(scope="session")
def gauge_bracket_n3(gauge_system_n3):
    return DiracBracket(gauge_system_n3.gauge_fixed_pairing())
