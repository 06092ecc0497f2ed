"""Gauge transformations: finite action on c-number field configurations, infinitesimal action as a bracket."""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .dirac import GAMMA
from .graded import GradedPolynomial, gpb
from .lattice import LatticeSpec
from .qed import QEDSystem


@dataclass(frozen=True)
class FieldConfiguration:
    """Site values of every canonical field; arrays have shape (components, sites)."""

    A: np.ndarray
    pi_A: np.ndarray
    psi: np.ndarray
    psibar: np.ndarray
    pi: np.ndarray
    pibar: np.ndarray

    @classmethod
    def random(cls, spec: LatticeSpec, rng: np.random.Generator):
        n = spec.sites

        def cplx():
            return rng.normal(size=(4, n)) + 1j * rng.normal(size=(4, n))

        return cls(rng.normal(size=(4, n)), rng.normal(size=(4, n)), cplx(), cplx(), cplx(), cplx())


def forward_gradient(spec: LatticeSpec, f: np.ndarray) -> np.ndarray:
    """(D_f f)_j for j = 1..3, shape (3, sites)."""
    n = spec.n_per_axis
    grid = f.reshape(n, n, n)
    a = float(spec.spacing)
    return np.stack([((np.roll(grid, -1, axis=j) - grid) / a).ravel() for j in range(3)])


def backward_divergence(spec: LatticeSpec, v: np.ndarray) -> np.ndarray:
    n = spec.n_per_axis
    a = float(spec.spacing)
    out = np.zeros(spec.sites, dtype=v.dtype)
    for j in range(3):
        grid = v[j].reshape(n, n, n)
        out = out + ((grid - np.roll(grid, 1, axis=j)) / a).ravel()
    return out


def currents(config: FieldConfiguration) -> np.ndarray:
    """psibar gamma^a psi per site, shape (4, sites)."""
    return np.einsum("ls,alk,ks->as", config.psibar, GAMMA, config.psi)


def gauge_transform(config: FieldConfiguration, f: np.ndarray, e: float, spec: LatticeSpec) -> FieldConfiguration:
    """A_j + D_j f, psi e^{-ief}, psibar e^{ief}, pi e^{ief}, pibar e^{-ief}; pi^a, A_0 unchanged."""
    f = np.asarray(f, dtype=float)
    phase = np.exp(-1j * e * f)
    a_new = config.A.copy()
    a_new[1:] += forward_gradient(spec, f)
    return replace(
        config,
        A=a_new,
        psi=config.psi * phase,
        psibar=config.psibar / phase,
        pi=config.pi / phase,
        pibar=config.pibar * phase,
    )


@dataclass(frozen=True)
class GaugeReport:
    max_delta_pi: float
    max_delta_current: float
    max_delta_gauss: float
    max_delta_gradient: float

    def passed(self, tol: float = 1e-13) -> bool:
        return self.max_delta_pi == 0.0 and max(self.max_delta_current, self.max_delta_gauss, self.max_delta_gradient) < tol


def gauge_action(config: FieldConfiguration, f, e: float, spec: LatticeSpec):
    """Transformed configuration plus the invariance report."""
    f = np.asarray(f, dtype=float)
    new = gauge_transform(config, f, e, spec)
    scale = max(1.0, float(np.max(np.abs(currents(config)))))
    d_current = float(np.max(np.abs(currents(new) - currents(config)))) / scale

    def gauss(c):
        return backward_divergence(spec, c.pi_A[1:]) - e * currents(c)[0]

    d_gauss = float(np.max(np.abs(gauss(new) - gauss(config)))) / scale
    d_grad = float(np.max(np.abs(new.A[1:] - config.A[1:] - forward_gradient(spec, f))))
    d_pi = float(np.max(np.abs(new.pi_A - config.pi_A)))
    return new, GaugeReport(d_pi, d_current, d_gauss, d_grad)


def smeared_generator(system: QEDSystem, f) -> GradedPolynomial:
    """a^3 sum_x f(x) gamma2(x) with the first-class Gauss constraint."""
    fam = system.family("gamma2")
    fields = system.fields
    out = fields.zero()
    for x, member in enumerate(fam.members):
        if f[x]:
            out = out + member.scale(fields.coeff(f[x]))
    return out.scale(fields.coeff(system.spec.spacing**3))


def linearized_variation(system: QEDSystem, species: str, component: int, site: int, f) -> GradedPolynomial:
    """First-order change of one canonical variable under the finite transformation."""
    fields = system.fields
    ie = fields.coeff(1j) * system.e
    fx = fields.coeff(f[site])
    sym = fields.sym(species, component, site)
    if species == "A" and component > 0:
        axis = component - 1
        nxt = fields.ops.shift(site, axis, 1)
        return fields.const((fields.coeff(f[nxt]) - fx) * fields.ops.inv_a)
    if species == "psi" or species == "pibar":
        return sym.scale(-ie * fx)
    if species == "psibar" or species == "pi":
        return sym.scale(ie * fx)
    return fields.zero()


def infinitesimal_check(system: QEDSystem, f) -> int:
    """Number of canonical variables whose -[z, G_f] differs from the linearized finite map (exact)."""
    gen = smeared_generator(system, f)
    bad = 0
    space = system.space
    for sid, sym in enumerate(space.symbols):
        if space.is_multiplier(sid):
            continue
        z = GradedPolynomial.symbol(space, sid, system.exact)
        variation = -gpb(z, gen)
        expected = linearized_variation(system, sym.species, sym.component, sym.site, f)
        if not (variation - expected).is_zero():
            bad += 1
    return bad


def random_rational_function(spec: LatticeSpec, rng) -> list:
    return [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))) for _ in range(spec.sites)]
