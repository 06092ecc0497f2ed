"""Named invariant checks grouped into the suites run by ``coulqed verify``."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import dirac, polarization, propagators
from .amplitudes import compton_covariant, compton_final, compton_pieces, eemumu_coulomb, eemumu_covariant, eemumu_transverse
from .graded import gpb
from .kinematics import M_E, M_MU, ComptonKinematics, PairKinematics, compton_sqrt_s
from .lattice import LatticeSpec, green_function
from .observables import (
    dsigma_domega,
    eemumu_total_analytic,
    spin_sum,
    thomson_total,
    total_sigma,
    trace_oracle_compton,
    trace_oracle_eemumu,
)
from .polarization import PolarizationState

SUITES = ("brackets", "spinors", "amplitudes", "all")


@dataclass
class Check:
    name: str
    max_residual: float
    tolerance: float
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_residual) and self.max_residual <= self.tolerance)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "max_residual": float(self.max_residual),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            **({"detail": self.detail} if self.detail else {}),
        }


def random_momenta(rng, count: int, scale: float = 5.0) -> np.ndarray:
    """Three-momenta with log-spread magnitudes and isotropic directions."""
    direction = rng.normal(size=(count, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return direction * scale * 10 ** rng.uniform(-2, 1, size=(count, 1))


def _timed(name, tol, fn):
    t0 = time.perf_counter()
    out = fn()
    residual, detail = out if isinstance(out, tuple) else (out, {})
    return Check(name, float(residual), tol, time.perf_counter() - t0, detail)


# spinor and polarization algebra


def clifford_residual() -> float:
    g = dirac.GAMMA
    return max(
        float(np.max(np.abs(g[a] @ g[b] + g[b] @ g[a] - 2 * dirac.METRIC[a, b] * np.eye(4))))
        for a in range(4) for b in range(4)
    )


def gamma_trace_residual() -> float:
    g = dirac.GAMMA
    worst = max(abs(dirac.trace_product([g[a]])) for a in range(4))
    for a, b in product(range(4), repeat=2):
        worst = max(worst, abs(dirac.trace_product([g[a], g[b]]) - 4 * dirac.METRIC[a, b]))
    for a, b, c in product(range(4), repeat=3):
        worst = max(worst, abs(dirac.trace_product([g[a], g[b], g[c]])))
    return float(worst)


def slash_square_residual(rng, count=200) -> float:
    worst = 0.0
    for p in rng.normal(size=(count, 4)):
        sq = dirac.slash(p) @ dirac.slash(p)
        worst = max(worst, float(np.max(np.abs(sq - dirac.minkowski_dot(p, p) * np.eye(4)))) / (p @ p))
    return worst


def spinor_completeness(rng, count=1000, antiparticle=False) -> float:
    """max |sum_s w w^dagger - (m +/- pslash) gamma0| / E for w = u or v."""
    worst = 0.0
    for p3 in random_momenta(rng, count):
        m = float(10 ** rng.uniform(-3, 1))
        p = dirac.on_shell(p3, m)
        make = dirac.v_spinor if antiparticle else dirac.u_spinor
        acc = sum(np.outer(w, w.conj()) for w in (make(p, s, m) for s in dirac.SPINS))
        target = (dirac.slash(p) + (-m if antiparticle else m) * np.eye(4)) @ dirac.GAMMA0
        worst = max(worst, float(np.max(np.abs(acc - target))) / p[0])
    return worst


def dirac_equation_residual(rng, count=300) -> float:
    worst = 0.0
    for p3 in random_momenta(rng, count):
        m = float(10 ** rng.uniform(-3, 1))
        p = dirac.on_shell(p3, m)
        for s in dirac.SPINS:
            u, v = dirac.u_spinor(p, s, m), dirac.v_spinor(p, s, m)
            worst = max(worst, np.linalg.norm((dirac.slash(p) - m * np.eye(4)) @ u) / np.linalg.norm(u))
            worst = max(worst, np.linalg.norm((dirac.slash(p) + m * np.eye(4)) @ v) / np.linalg.norm(v))
    return float(worst)


def spinor_normalization_residual(rng, count=300) -> float:
    """u^dagger u = 2E, ubar gamma0 u = 2E and current reality, relative to E."""
    worst = 0.0
    for p3 in random_momenta(rng, count):
        m = float(10 ** rng.uniform(-3, 1))
        p = dirac.on_shell(p3, m)
        for s in dirac.SPINS:
            u = dirac.u_spinor(p, s, m)
            worst = max(worst, abs(np.vdot(u, u) - 2 * p[0]) / p[0])
            current = np.array([dirac.adjoint(u) @ g @ u for g in dirac.GAMMA])
            worst = max(worst, abs(current[0] - 2 * p[0]) / p[0], float(np.max(np.abs(current.imag))) / p[0])
    return float(worst)


def rest_frame_residual() -> float:
    m = 0.75
    p = np.array([m, 0.0, 0.0, 0.0])
    u = dirac.u_spinor(p, 0.5, m)
    v = dirac.v_spinor(p, 0.5, m)
    worst = float(np.max(np.abs(u - np.sqrt(2 * m) * np.array([1, 0, 0, 0]))))
    worst = max(worst, abs(dirac.adjoint(u) @ u - 2 * m), abs(dirac.adjoint(v) @ v + 2 * m))
    rest_sum = sum(np.outer(w, w.conj()) for w in (dirac.u_spinor(p, s, m) for s in dirac.SPINS))
    return max(worst, float(np.max(np.abs(rest_sum - m * np.diag([2, 2, 0, 0])))))


def polarization_completeness(rng, count=1000) -> float:
    worst = 0.0
    for k in random_momenta(rng, count):
        khat = k / np.linalg.norm(k)
        target = np.eye(3) - np.outer(khat, khat)
        worst = max(worst, float(np.max(np.abs(polarization.completeness_sum(k) - target))))
    return worst


def polarization_propagator_agreement(rng, count=1000):
    """Formula path must agree bit for bit; basis path independently to 1e-14."""
    bitwise = 0
    worst = 0.0
    for k in random_momenta(rng, count):
        q = np.concatenate([[np.linalg.norm(k) * 1.5], k])
        numerator = propagators.photon_propagator(q).numerator
        bitwise += int(not np.array_equal(polarization.completeness_formula(k), numerator))
        worst = max(worst, float(np.max(np.abs(polarization.completeness_sum(k) - numerator))))
    return worst + bitwise, {"bitwise_mismatches": bitwise, "basis_path": worst}


def polarization_frame_residual(rng, count=500) -> float:
    """Transversality, orthonormality, rotation orthogonality and the explicit-angle basis."""
    worst = 0.0
    ks = np.vstack([random_momenta(rng, count), [[0, 0, 1.0], [0, 0, -2.0], [3.0, 0, 0]]])
    for k in ks:
        e = polarization.basis_matrix(k)
        r = polarization.rotation(k)
        khat = k / np.linalg.norm(k)
        worst = max(
            worst,
            float(np.max(np.abs(khat @ e))),
            float(np.max(np.abs(e.conj().T @ e - np.eye(2)))),
            float(np.max(np.abs(r.T @ r - np.eye(3)))),
            abs(np.linalg.det(r) - 1),
            float(np.max(np.abs(r @ [0, 0, 1.0] - khat))),
            float(np.max(np.abs(polarization.basis_explicit(k) - e))),
        )
    return worst


def mode_projection_residual(rng, count=1000) -> float:
    return max(polarization.mode_projection_identity(k) for k in random_momenta(rng, count))


def dirac_propagator_residual(rng, count=300) -> float:
    """N(q) gamma0 = m + qslash off shell, and N(q) = sum_s u u^dagger on shell (relative to E)."""
    worst = 0.0
    for q in rng.normal(size=(count, 4)):
        m = float(rng.uniform(0.1, 2))
        num = propagators.dirac_propagator(q, m).numerator
        worst = max(worst, float(np.max(np.abs(num @ dirac.GAMMA0 - m * np.eye(4) - dirac.slash(q)))))
        p = dirac.on_shell(q[1:], m)
        on = propagators.dirac_propagator(p, m, epsilon=1e-9).numerator
        acc = sum(np.outer(u, u.conj()) for u in (dirac.u_spinor(p, s, m) for s in dirac.SPINS))
        worst = max(worst, float(np.max(np.abs(on - acc))) / p[0])
    return worst


def photon_projector_residual(rng, count=500) -> float:
    worst = 0.0
    for k in random_momenta(rng, count):
        n = propagators.photon_propagator(np.concatenate([[1.0], k])).numerator
        worst = max(worst, float(np.max(np.abs(n @ n - n))), float(np.max(np.abs(n - n.T))),
                    float(np.max(np.abs(n @ k))) / np.linalg.norm(k))
    return worst


def lattice_coulomb_kernel_residual(n: int = 8) -> float:
    """Discrete transform of the lattice Green function against 1/|k_hat|^2 on every nonzero mode."""
    spec = LatticeSpec(n)
    g = np.array(green_function(spec, exact_mode=False), dtype=float).reshape(n, n, n)
    ft = np.fft.fftn(g).real
    worst = 0.0
    for label in spec.momenta():
        if not any(label):
            continue
        khat = 2 * np.sin(np.pi * np.array(label) / n)
        worst = max(worst, abs(-ft[label] - propagators.coulomb_kernel(khat)))
    return worst


def spinor_checks(seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    return [
        _timed("clifford_relations", 1e-14, clifford_residual),
        _timed("gamma_traces", 1e-14, gamma_trace_residual),
        _timed("slash_square", 1e-14, lambda: slash_square_residual(rng)),
        _timed("spinor_completeness_u", 1e-12, lambda: spinor_completeness(rng)),
        _timed("spinor_completeness_v", 1e-12, lambda: spinor_completeness(rng, antiparticle=True)),
        _timed("dirac_equation", 1e-12, lambda: dirac_equation_residual(rng)),
        _timed("spinor_normalization_and_current", 1e-12, lambda: spinor_normalization_residual(rng)),
        _timed("rest_frame_spinors", 1e-14, rest_frame_residual),
        _timed("polarization_completeness", 1e-14, lambda: polarization_completeness(rng)),
        _timed("polarization_vs_photon_numerator", 1e-14, lambda: polarization_propagator_agreement(rng)),
        _timed("polarization_frame", 1e-14, lambda: polarization_frame_residual(rng)),
        _timed("mode_projection_identity", 1e-13, lambda: mode_projection_residual(rng)),
        _timed("dirac_propagator_numerator", 1e-12, lambda: dirac_propagator_residual(rng)),
        _timed("photon_projector_identities", 1e-14, lambda: photon_projector_residual(rng)),
        _timed("lattice_coulomb_kernel", 1e-10, lattice_coulomb_kernel_residual),
    ]


# amplitudes and observables


def random_compton(rng, m: float = M_E) -> ComptonKinematics:
    sqrt_s = m * (1 + 10 ** rng.uniform(-3, 2))
    return ComptonKinematics.center_of_mass(sqrt_s, rng.uniform(-1, 1), rng.uniform(0, 2 * np.pi), m)


def random_pair(rng, boosted: bool = True, m_e: float = M_E, m_mu: float = M_MU) -> PairKinematics:
    sqrt_s = 2 * m_mu * (1 + 10 ** rng.uniform(-2, 1.5))
    beta = rng.uniform(-0.9, 0.9) if boosted else 0.0
    return PairKinematics.center_of_mass(sqrt_s, rng.uniform(-1, 1), rng.uniform(0, 2 * np.pi), m_e, m_mu, beta)


def _relative(a: complex, b: complex, scale: float) -> float:
    return abs(a - b) / scale if scale > 0 else abs(a - b)


def compton_identity_residual(rng, count=100):
    """Full-propagator form at eps = 0 against the simplified final form, 16 assignments per point."""
    worst = 0.0
    for _ in range(count):
        kin = random_compton(rng)
        values = []
        for s, s_out, lam, lam_out in product(dirac.SPINS, dirac.SPINS, (1, -1), (1, -1)):
            pin = PolarizationState.helicity(kin.k[1:], lam)
            pout = PolarizationState.helicity(kin.k_out[1:], lam_out)
            values.append((compton_pieces(kin, s, s_out, pin, pout), compton_final(kin, s, s_out, pin, pout).value))
        scale = max(abs(b) for _, b in values)
        worst = max(worst, max(_relative(a, b, scale) for a, b in values))
    return worst


def compton_covariant_residual(rng, count=50):
    """Transverse-gauge final form against the covariant form with eps = (0, e)."""
    worst = 0.0
    for _ in range(count):
        kin = random_compton(rng)
        values = []
        for s, s_out, lam, lam_out in product(dirac.SPINS, dirac.SPINS, (1, -1), (1, -1)):
            pin = PolarizationState.helicity(kin.k[1:], lam)
            pout = PolarizationState.helicity(kin.k_out[1:], lam_out)
            eps_in = np.concatenate([[0], pin.vector])
            eps_out = np.concatenate([[0], pout.vector])
            values.append((compton_final(kin, s, s_out, pin, pout).value, compton_covariant(kin, s, s_out, eps_in, eps_out)))
        scale = max(abs(b) for _, b in values)
        worst = max(worst, max(_relative(a, b, scale) for a, b in values))
    return worst


def recombination_residual(rng, count=100):
    worst = 0.0
    for _ in range(count):
        kin = random_pair(rng)
        values = []
        for labels in product(dirac.SPINS, repeat=4):
            split = eemumu_transverse(kin, *labels) + eemumu_coulomb(kin, *labels)
            values.append((split, eemumu_covariant(kin, *labels).value))
        scale = max(abs(b) for _, b in values)
        worst = max(worst, max(_relative(a, b, scale) for a, b in values))
    return worst


def trace_oracle_residual(rng, process: str, count=100):
    worst = 0.0
    for _ in range(count):
        if process == "compton":
            kin = random_compton(rng)
            a, b = spin_sum("compton", kin), trace_oracle_compton(kin)
        else:
            kin = random_pair(rng)
            a, b = spin_sum("eemumu", kin), trace_oracle_eemumu(kin)
        worst = max(worst, abs(a - b) / abs(b))
    return worst


def thomson_residual():
    """Low-energy Compton: angular shape (1 + cos^2)/2 and the integrated Thomson value."""
    m = M_E
    sqrt_s = compton_sqrt_s(1e-3 * m, m)
    forward = dsigma_domega("compton", sqrt_s, 0.0).dsigma_domega
    worst = 0.0
    for c in np.linspace(-1, 1, 21):
        ratio = dsigma_domega("compton", sqrt_s, c).dsigma_domega / (2 * forward)
        worst = max(worst, abs(ratio / ((1 + c * c) / 2) - 1))
    nodes, weights = np.polynomial.legendre.leggauss(24)
    total = 2 * np.pi * sum(w * dsigma_domega("compton", sqrt_s, c).dsigma_domega for c, w in zip(nodes, weights))
    total_dev = abs(total / thomson_total(m) - 1)
    return max(worst, total_dev), {"shape": worst, "total": total_dev}


def eemumu_total_residual(n_samples: int = 200_000, seed: int = 0):
    sqrt_s = 3 * M_MU
    sigma, err = total_sigma("eemumu", sqrt_s, n_samples=n_samples, seed=seed)
    analytic = eemumu_total_analytic(sqrt_s)
    dev = abs(sigma / analytic - 1)
    return dev, {"sigma": sigma, "mc_error": err, "analytic": analytic, "pulls": abs(sigma - analytic) / err}


def high_energy_shape_residual():
    sqrt_s = 1000 * M_MU
    ref = dsigma_domega("eemumu", sqrt_s, 0.0).dsigma_domega
    return max(abs(dsigma_domega("eemumu", sqrt_s, c).dsigma_domega / ref / (1 + c * c) - 1)
               for c in np.linspace(-0.99, 0.99, 23))


def forward_backward_residual():
    sqrt_s = 3 * M_MU
    grid = [(2 * k - 18) / 18 for k in range(19)]
    values = [dsigma_domega("eemumu", sqrt_s, c).dsigma_domega for c in grid]
    return max(abs(a - b) / abs(a) for a, b in zip(values, reversed(values)))


def wick_structure_residual():
    """Surviving Dyson terms: one forward N=0 term, vanishing N=1 transverse and same-species
    Coulomb terms, four nonforward N=2 Compton terms."""
    from .wick import dyson_n2_structure, forward_term, n1_structure

    fwd = forward_term("compton")
    mismatches = int(len(fwd.forward) != 1 or len(fwd.nonforward) != 0)
    for process, part in (("compton", "A"), ("compton", "C"), ("eemumu", "A")):
        mismatches += len(n1_structure(process, part).terms)
    n2 = dyson_n2_structure("compton")
    mismatches += abs(len(n2.nonforward) - 4)
    return mismatches, {"n2_compton_terms": len(n2.nonforward)}


def amplitude_checks(seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    return [
        _timed("compton_pieces_vs_final", 1e-12, lambda: compton_identity_residual(rng)),
        _timed("compton_final_vs_covariant", 1e-12, lambda: compton_covariant_residual(rng)),
        _timed("eemumu_recombination", 1e-12, lambda: recombination_residual(rng)),
        _timed("compton_spin_sum_vs_trace", 1e-10, lambda: trace_oracle_residual(rng, "compton")),
        _timed("eemumu_spin_sum_vs_trace", 1e-10, lambda: trace_oracle_residual(rng, "eemumu")),
        _timed("thomson_limit", 5e-3, thomson_residual),
        _timed("eemumu_total_cross_section", 1e-3, lambda: eemumu_total_residual(seed=seed)),
        _timed("eemumu_high_energy_shape", 1e-2, high_energy_shape_residual),
        _timed("eemumu_forward_backward_symmetry", 1e-10, forward_backward_residual),
        _timed("dyson_term_structure", 0, wick_structure_residual),
    ]


# lattice brackets


def graded_identity_residual(system, rng, samples: int = 4) -> float:
    """Graded antisymmetry and Jacobi on random mixed-parity polynomials."""
    from .lattice_checks import random_graded_polynomial

    worst = 0.0
    for _ in range(samples):
        f, g, h = (random_graded_polynomial(system, rng, int(rng.integers(2)), max_degree=2, n_terms=3) for _ in range(3))
        pf, pg, ph = f.parity(), g.parity(), h.parity()
        anti = gpb(f, g) + gpb(g, f) * ((-1) ** (pf * pg))
        jac = (gpb(f, gpb(g, h)) * ((-1) ** (pf * ph))
               + gpb(g, gpb(h, f)) * ((-1) ** (pg * pf))
               + gpb(h, gpb(f, g)) * ((-1) ** (ph * pg)))
        worst = max(worst, anti.max_abs(), jac.max_abs())
    return float(worst)


def bracket_checks(n: int = 4, e: float = 0.3, m: float = 1.0, seed: int = 0, samples: int = 20) -> tuple:
    """Runs the lattice report and converts it to checks; returns (checks, report)."""
    from .lattice_checks import lattice_report
    from .qed import build_qed_system

    t0 = time.perf_counter()
    report = lattice_report(n, e, m, exact=True, samples=samples, seed=seed, towers=("coulomb",))
    elapsed = time.perf_counter() - t0
    rng = np.random.default_rng(seed)
    small = build_qed_system(LatticeSpec(2), e, m, exact=True, coulomb=True)
    checks = [_timed("graded_antisymmetry_and_jacobi", 0, lambda: graded_identity_residual(small, rng))]
    for label, tower in report["constraints"].items():
        checks.append(Check(f"constraint_tower_{label}", 0.0 if tower["passed"] else 1.0, 0, tower["seconds"],
                            {k: tower[k] for k in ("coupling", "secondary", "first_class", "second_class", "failure")}))
    for label, entry in report["checks"].items():
        if label == "gauge":
            residual = max(entry["max_delta_pi"], entry["max_delta_current"], entry["max_delta_gauss"],
                           float(entry["infinitesimal_mismatches"]))
            checks.append(Check("gauge_invariance", residual, 1e-12, 0.0, {}))
        else:
            checks.append(Check(label, entry["max_residual"], 1e-10, 0.0,
                                {k: v for k, v in entry.items() if k not in ("max_residual", "passed")}))
    return checks, {"lattice_seconds": round(elapsed, 3), "n_per_axis": n, "coupling": e}


def run_suite(suite: str, seed: int = 0, n: int = 4, e: float = 0.3) -> dict:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    checks = []
    meta = {}
    if suite in ("spinors", "all"):
        checks += spinor_checks(seed)
    if suite in ("amplitudes", "all"):
        checks += amplitude_checks(seed)
    if suite in ("brackets", "all"):
        lattice, meta = bracket_checks(n, e, seed=seed)
        checks += lattice
    return {
        "suite": suite,
        "seed": seed,
        "lattice": meta,
        "checks": [c.as_dict() for c in checks],
        "n_checks": len(checks),
        "passed": all(c.passed for c in checks),
    }
