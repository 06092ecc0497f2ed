from dataclasses import replace

import pytest

from coulqed.classification import classify, classify_report
from coulqed.consistency import run_consistency
from coulqed.errors import StructureError
from coulqed.dirac_bracket import DiracBracket
from coulqed.graded import GradedPolynomial, exact
from coulqed.lattice import LatticeSpec
from coulqed.qed import ConstraintSet, SurfaceReducer, build_qed_system


def spinor_free(poly, space):
    return not any(space.symbols[s].species in ("psi", "psibar", "pi", "pibar") for s in poly.symbols())


def test_free_hamiltonian_has_no_coupling_terms():
    system = build_qed_system(LatticeSpec(2), e=0.0)
    space = system.space
    for mon in system.hamiltonian.terms:
        species = {space.symbols[s].species for s in mon}
        assert not (species & {"A", "piA"} and species & {"psi", "psibar"})


def test_interacting_hamiltonian_couples_vector_potential_to_current():
    system = build_qed_system(LatticeSpec(2), e=0.3)
    space = system.space
    coupled = [m for m in system.hamiltonian.terms
               if {space.symbols[s].species for s in m} == {"A", "psi", "psibar"}]
    assert coupled


@pytest.mark.parametrize("e", [0.0, 0.3])
def test_hamiltonian_is_even(e):
    assert build_qed_system(LatticeSpec(2), e=e).hamiltonian.parity() == 0


def test_primaries():
    system = build_qed_system(LatticeSpec(2), e=0.3)
    hamiltonian, primaries = system
    assert primaries.names() == ["chi1", "chi2", "gamma1"]
    gamma1 = primaries.family("gamma1")
    assert len(gamma1.members) == 8
    for x, member in enumerate(gamma1.members):
        assert member == GradedPolynomial.symbol(system.space, system.space.id("piA", 0, x))
    assert len(primaries) == 4 * 8 * 2 + 8


def test_gauss_law_appears_at_first_step_with_coupling():
    system = build_qed_system(LatticeSpec(2), e=0.3)
    result = run_consistency(system=system, max_iterations=1)
    assert result.secondary_names == ["gamma2~"]


@pytest.mark.parametrize("n", [2, 3])
def test_free_tower_closes_with_gauss_law(n):
    result = run_consistency(system=build_qed_system(LatticeSpec(n), e=0.0))
    assert result.closed
    assert result.secondary_names == ["gamma2~"]
    # the pi^0 multipliers stay free
    assert result.free_multipliers


@pytest.mark.parametrize("e", [0.0, 0.3])
def test_coulomb_tower(e):
    result = run_consistency(system=build_qed_system(LatticeSpec(2), e=e, coulomb=True))
    assert result.closed
    assert sorted(result.secondary_names) == ["gamma2~", "phi"]


def test_interacting_tower_without_gauge_condition_does_not_close():
    # Without link variables the lattice Hamiltonian is not gauge invariant at e != 0.
    result = run_consistency(system=build_qed_system(LatticeSpec(2), e=0.3))
    assert not result.closed


def _mat(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(4)) for j in range(4)] for i in range(4)]


def test_spinor_multiplier_solution_matches_field_equation():
    """u1 solved from chi2 consistency equals the lattice Dirac equation for d psi/dt."""
    system = build_qed_system(LatticeSpec(3), e=0.3, m=1.0)
    result = run_consistency(system=system, max_iterations=1)
    f, ops = system.fields, system.fields.ops
    reducer = SurfaceReducer(system, system.primaries.families)
    g = f.gamma
    i_unit, half = f.coeff(1j), f.coeff(0.5)
    for x in range(system.spec.sites):
        expected = [f.zero() for _ in range(4)]
        for j in range(1, 4):
            g0j = _mat(g[0], g[j])
            hop = [[-c * half * ops.inv_a for c in row] for row in g0j]
            fwd, bwd = ops.shift(x, j - 1, 1), ops.shift(x, j - 1, -1)
            for l in range(4):
                expected[l] = (expected[l]
                               + f.linear([(("psi", k, fwd), hop[l][k]) for k in range(4)])
                               - f.linear([(("psi", k, bwd), hop[l][k]) for k in range(4)])
                               + f.sym("A", j, x) * f.linear([(("psi", k, x), -g0j[l][k] * i_unit * system.e)
                                                             for k in range(4)]))
        for l in range(4):
            expected[l] = (expected[l]
                           + f.linear([(("psi", k, x), -i_unit * system.m * g[0][l][k]) for k in range(4)])
                           + f.sym("A", 0, x) * f.sym("psi", l, x).scale(-i_unit * system.e))
            solved = result.solutions[system.space.id("u1", l, x)]
            assert reducer(solved) == reducer(expected[l])


def _set(system, names):
    return ConstraintSet(system, tuple(system.family(n) for n in names))


def test_first_class_combination_is_found():
    system = build_qed_system(LatticeSpec(2), e=0.3)
    report = classify_report(_set(system, ("chi1", "chi2", "gamma1", "gamma2~")))
    assert sorted(report.first_families) == ["gamma1", "gamma2"]
    assert sorted(report.second_families) == ["chi1", "chi2"]
    # the completed family is the gauge generator gauss + ie(pi psi - psibar pibar)
    completed = report.constraints.family("gamma2")
    reference = system.family("gamma2")
    reducer = SurfaceReducer(system, report.constraints.families, local_only=True)
    for a, b in zip(completed.projected(), reference.projected()):
        assert reducer(a - b).is_zero() or (a - b).is_zero()


def test_gauge_fixed_set_is_all_second_class():
    system = build_qed_system(LatticeSpec(2), e=0.3, coulomb=True)
    result = classify(run_consistency(system=system).constraints)
    assert {f.klass for f in result.families} == {"second"}
    assert len(result.families) == 6
    assert {frozenset(p) for p in result.pairs} == {
        frozenset(("chi1", "chi2")), frozenset(("chi", "gamma2")), frozenset(("gamma1", "chi6"))}


def test_single_scalar_momentum_constraint_is_first_class():
    system = build_qed_system(LatticeSpec(2), e=0.0)
    report = classify_report(_set(system, ("gamma1",)))
    assert report.first_families == ["gamma1"]


def test_class_counts_invariant_under_recombination():
    system = build_qed_system(LatticeSpec(2), e=0.3)
    n = system.spec.sites
    gamma1, gauss, chi1 = system.family("gamma1"), system.family("gamma2~"), system.family("chi1")
    gauss_mixed = replace(gauss, members=tuple(a + b.scale(3) for a, b in zip(gauss.members, gamma1.members)))
    chi1_mixed = replace(chi1, members=tuple(
        m + chi1.members[i + n].scale(2) if i < n else m for i, m in enumerate(chi1.members)))
    base = classify_report(_set(system, ("chi1", "chi2", "gamma1", "gamma2~")))
    mixed = classify_report(ConstraintSet(system, (chi1_mixed, system.family("chi2"), gamma1, gauss_mixed)))
    assert len(mixed.first_families) == len(base.first_families) == 2
    assert len(mixed.second_families) == len(base.second_families) == 2
    assert mixed.first_members == base.first_members


def test_dirac_bracket_needs_commuting_pairs():
    system = build_qed_system(LatticeSpec(2), e=0.3, coulomb=True)
    paired = system.gauge_fixed_pairing()
    wrong = paired.with_families(paired.families, pairs=(("chi1", "chi"), ("chi2", "gamma2"), ("gamma1", "chi6")))
    with pytest.raises(StructureError):
        DiracBracket(wrong)
