"""Periodic cubic lattice, finite-difference operators, Green function and the lattice QED phase space."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .dirac import GAMMA
from .graded import GradedPolynomial, PhaseSpace, exact, to_complex


@dataclass(frozen=True)
class LatticeSpec:
    n_per_axis: int = 4
    spacing: Fraction = Fraction(1)
    periodic: bool = field(default=True, init=False)

    def __post_init__(self):
        if int(self.n_per_axis) != self.n_per_axis or self.n_per_axis < 1:
            raise ValueError("n_per_axis must be a positive integer")
        spacing = Fraction(repr(self.spacing)) if isinstance(self.spacing, float) else Fraction(self.spacing)
        if spacing <= 0:
            raise ValueError("spacing must be positive")
        object.__setattr__(self, "spacing", spacing)

    @property
    def sites(self) -> int:
        return self.n_per_axis**3

    def coords(self, site: int) -> tuple:
        n = self.n_per_axis
        return (site // (n * n), (site // n) % n, site % n)

    def site(self, coords) -> int:
        n = self.n_per_axis
        x, y, z = (c % n for c in coords)
        return (x * n + y) * n + z

    def shift(self, site: int, axis: int, step: int = 1) -> int:
        c = list(self.coords(site))
        c[axis] += step
        return self.site(c)

    def displacement(self, x: int, y: int) -> int:
        """Site index of x - y (translation-invariant kernels are stored by displacement)."""
        cx, cy = self.coords(x), self.coords(y)
        return self.site([a - b for a, b in zip(cx, cy)])

    def momenta(self):
        """Integer mode labels (k_x, k_y, k_z); physical k = 2 pi label / (n a)."""
        return list(product(range(self.n_per_axis), repeat=3))


def _laplacian_dense(spec: LatticeSpec) -> list:
    n_sites = spec.sites
    rows = [[0] * n_sites for _ in range(n_sites)]
    for x in range(n_sites):
        rows[x][x] -= 6
        for axis in range(3):
            for step in (1, -1):
                rows[x][spec.shift(x, axis, step)] += 1
    return rows


def green_function(spec: LatticeSpec, exact_mode: bool = True) -> list:
    """g[d] with G(x, y) = g[x - y]: Laplacian inverse on the mean-zero subspace, sum_d g[d] = 0.

    Satisfies (Delta g)[d] = delta_{d,0} - 1/N.
    """
    n_sites = spec.sites
    a2 = spec.spacing**2
    lap = _laplacian_dense(spec)
    if n_sites == 1:
        return [QQ(0)] if exact_mode else [0.0]
    if exact_mode:
        # ground the last site, solve the regular (N-1) system, then remove the mean
        m = DomainMatrix([[QQ(v) for v in row[:-1]] for row in lap[:-1]], (n_sites - 1, n_sites - 1), QQ)
        rhs = [QQ(-1, n_sites)] * (n_sites - 1)
        rhs[0] += QQ(1)
        b = DomainMatrix([[v] for v in rhs], (n_sites - 1, 1), QQ)
        sol = [row[0] for row in m.lu_solve(b).to_list()] + [QQ(0)]
        mean = sum(sol, QQ(0)) / n_sites
        scale = QQ(a2.numerator, a2.denominator)
        return [(v - mean) * scale for v in sol]
    lapf = np.array(lap, dtype=float)
    rhs = -np.full(n_sites, 1.0 / n_sites)
    rhs[0] += 1.0
    sol = np.linalg.lstsq(lapf, rhs, rcond=None)[0]
    sol -= sol.mean()
    return list(sol * float(a2))


class LatticeOperators:
    """Finite differences and Green-function kernels with coefficients in the polynomial ring's field."""

    def __init__(self, spec: LatticeSpec, exact_mode: bool = True):
        self.spec = spec
        self.exact = exact_mode
        self.green = [self.coeff(v) for v in green_function(spec, exact_mode)]
        self.inv_a = self.coeff(1 / spec.spacing)
        n_sites = spec.sites
        self._disp = [[spec.displacement(x, y) for y in range(n_sites)] for x in range(n_sites)]
        self._shift = [[[spec.shift(x, ax, st) for st in (0, 1, -1)] for ax in range(3)] for x in range(n_sites)]
        # grad G kernel: (D_f,i G)(d) and projector kernel (D_f,i G D_b,j)(d)
        g = self.green
        self.grad_green = [[(g[self.shift(d, i)] - g[d]) * self.inv_a for d in range(n_sites)] for i in range(3)]
        self.longitudinal = [
            [
                [
                    (g[self.shift(d, i)] - g[self.shift(self.shift(d, i), j, -1)] - g[d] + g[self.shift(d, j, -1)])
                    * self.inv_a
                    * self.inv_a
                    for d in range(n_sites)
                ]
                for j in range(3)
            ]
            for i in range(3)
        ]

    def coeff(self, value):
        if self.exact:
            return exact(value)
        if isinstance(value, (int, float, complex)):
            return complex(value)
        if isinstance(value, Fraction) or hasattr(value, "numerator"):
            return complex(float(value))
        return to_complex(value)

    def shift(self, site, axis, step=1):
        return self._shift[site][axis][0 if step == 0 else (1 if step == 1 else 2)]

    def disp(self, x, y):
        return self._disp[x][y]

    def green_at(self, x, y):
        return self.green[self._disp[x][y]]

    def transverse(self, i, x, j, y):
        """(delta_ij delta_xy - D_f,i G D_b,j)(x, y): the lattice transverse projector."""
        val = -self.longitudinal[i][j][self._disp[x][y]]
        if i == j and x == y:
            val = val + self.coeff(1)
        return val


def _exact_gamma(a):
    return [[exact(complex(round(v.real), round(v.imag))) for v in row] for row in GAMMA[a]]


class QEDFields:
    """Symbol polynomials for the canonical fields and multipliers on one lattice."""

    def __init__(self, spec: LatticeSpec, exact_mode: bool = True):
        self.spec = spec
        self.exact = exact_mode
        self.space = PhaseSpace(spec.sites, spec.spacing)
        self.ops = LatticeOperators(spec, exact_mode)
        if exact_mode:
            self.gamma = [_exact_gamma(a) for a in range(4)]
        else:
            self.gamma = [[[complex(v) for v in row] for row in GAMMA[a]] for a in range(4)]
        self._cache = {}

    def coeff(self, value):
        return self.ops.coeff(value)

    def sym(self, species, component, site):
        key = (species, component, site % self.spec.sites)
        if key not in self._cache:
            self._cache[key] = GradedPolynomial.symbol(self.space, self.space.id(*key), self.exact)
        return self._cache[key]

    def zero(self):
        return GradedPolynomial(self.space, {}, self.exact)

    def const(self, value):
        return GradedPolynomial.constant(self.space, value, self.exact)

    def linear(self, pairs):
        """Sum of coefficient * symbol for ((species, component, site), coefficient) pairs."""
        terms = {}
        for key, c in pairs:
            if not c:
                continue
            mon = (self.space.id(key[0], key[1], key[2] % self.spec.sites),)
            terms[mon] = terms[mon] + c if mon in terms else c
        return GradedPolynomial(self.space, terms, self.exact)

    # lattice vector calculus on symbol species
    def backward_div(self, species, site):
        """sum_j (f_j(x) - f_j(x - j)) / a for a vector species with components 1..3."""
        inv = self.ops.inv_a
        pairs = []
        for j in range(3):
            pairs.append(((species, j + 1, site), inv))
            pairs.append(((species, j + 1, self.ops.shift(site, j, -1)), -inv))
        return self.linear(pairs)

    def laplacian(self, species, component, site):
        inv2 = self.ops.inv_a * self.ops.inv_a
        pairs = [((species, component, site), -6 * inv2)]
        for j in range(3):
            for step in (1, -1):
                pairs.append(((species, component, self.ops.shift(site, j, step)), inv2))
        return self.linear(pairs)

    def forward_grad(self, species, component, site, axis):
        inv = self.ops.inv_a
        return self.linear([((species, component, self.ops.shift(site, axis, 1)), inv), ((species, component, site), -inv)])

    # spinor bilinears
    def bilinear(self, matrix, site_left, site_right, left="psibar", right="psi"):
        """sum_{l,k} left_l(x) M_lk right_k(y)."""
        out = self.zero()
        for l in range(4):
            for k in range(4):
                c = matrix[l][k]
                if c:
                    out = out + (self.sym(left, l, site_left) * self.sym(right, k, site_right)).scale(c)
        return out

    def density(self, site):
        return self.bilinear(self.gamma[0], site, site)

    def current(self, j, site):
        """Site-local psibar gamma^j psi, j = 1..3."""
        return self.bilinear(self.gamma[j], site, site)

    def link_current(self, j, site):
        """Conserved current of the central-difference kinetic term on the link (x, x + j)."""
        nxt = self.ops.shift(site, j - 1, 1)
        half = self.coeff(Fraction(1, 2))
        return (self.bilinear(self.gamma[j], site, nxt) + self.bilinear(self.gamma[j], nxt, site)).scale(half)

    def psibar_gamma0(self, l, site):
        """(psibar gamma^0)_l."""
        return self.linear([(("psibar", k, site), self.gamma[0][k][l]) for k in range(4)])

    def gamma0_psi(self, l, site):
        """(gamma^0 psi)_l."""
        return self.linear([(("psi", k, site), self.gamma[0][l][k]) for k in range(4)])

    def pi_psi(self, site):
        """pi psi - psibar pibar, the combination generating phase rotations."""
        out = self.zero()
        for l in range(4):
            out = out + self.sym("pi", l, site) * self.sym("psi", l, site)
            out = out - self.sym("psibar", l, site) * self.sym("pibar", l, site)
        return out
