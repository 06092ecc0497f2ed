"""Lattice QED phase space: Hamiltonian, constraint families and reduction to the constraint surface."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .graded import GradedPolynomial, substitute
from .lattice import LatticeSpec, QEDFields

# family kinds the surface reducer knows how to solve
SPINOR_KINDS = ("chi1", "chi2")
GAUSS_KINDS = ("gauss", "gauss_first")
POTENTIAL_KINDS = ("phi", "chi6")
CLASSES = ("first", "second", "unknown")


@dataclass(frozen=True)
class ConstraintFamily:
    """Constraint members indexed component * sites + site.

    zero_mode families are used modulo their constant (sum over sites) mode.
    """

    name: str
    kind: str
    members: tuple
    components: int = 1
    zero_mode: bool = False
    klass: str = "unknown"

    def __post_init__(self):
        if self.klass not in CLASSES:
            raise ValueError(f"unknown constraint class {self.klass!r}")

    @property
    def sites(self):
        return len(self.members) // self.components

    def projected(self) -> list:
        """Independent members: m(x_k) - mean(m) for all but the last site when zero_mode."""
        if not self.zero_mode:
            return list(self.members)
        n = len(self.members)
        total = self.members[0].zero()
        for m in self.members:
            total = total + m
        mean = total.scale(Fraction(1, n))
        return [m - mean for m in self.members[: n - 1]]


@dataclass(frozen=True)
class ConstraintSet:
    system: "QEDSystem"
    families: tuple = ()
    pairs: tuple = ()

    @property
    def constraints(self) -> list:
        """(name, polynomial, class) triples for every member."""
        out = []
        for fam in self.families:
            for idx, poly in enumerate(fam.members):
                out.append((f"{fam.name}[{idx}]", poly, fam.klass))
        return out

    def names(self) -> list:
        return [f.name for f in self.families]

    def family(self, name) -> ConstraintFamily:
        for fam in self.families:
            if fam.name == name:
                return fam
        raise KeyError(name)

    def kinds(self) -> set:
        return {f.kind for f in self.families}

    def has(self, name) -> bool:
        return name in self.names()

    def extended(self, *families) -> "ConstraintSet":
        return replace(self, families=self.families + tuple(families))

    def with_families(self, families, pairs=None) -> "ConstraintSet":
        return replace(self, families=tuple(families), pairs=self.pairs if pairs is None else tuple(pairs))

    def __len__(self):
        return sum(len(f.members) for f in self.families)


@dataclass(frozen=True)
class QEDSystem:
    spec: LatticeSpec
    fields: QEDFields = field(repr=False)
    e: object
    m: object
    hamiltonian: GradedPolynomial = field(repr=False)
    primaries: ConstraintSet = field(repr=False, default=None)
    coulomb: bool = False

    @property
    def space(self):
        return self.fields.space

    @property
    def exact(self):
        return self.fields.exact

    def __iter__(self):
        # allows `hamiltonian, primaries = build_qed_system(...)`
        yield self.hamiltonian
        yield self.primaries

    # reference families
    def family(self, name: str, klass: str = "unknown") -> ConstraintFamily:
        builders = {
            "chi1": (self._chi1, "chi1", 4, False),
            "chi2": (self._chi2, "chi2", 4, False),
            "gamma1": (self._gamma1, "gamma1", 1, True),
            "gamma2~": (self._gauss, "gauss", 1, True),
            "gamma2": (self._gauss_first, "gauss_first", 1, True),
            "chi": (self._coulomb_condition, "coulomb", 1, True),
            "phi": (self._phi, "phi", 1, True),
            "chi6": (self._chi6, "chi6", 1, True),
        }
        build, kind, comps, zero_mode = builders[name]
        n = self.spec.sites
        members = tuple(build(c, x) for c in range(comps) for x in range(n))
        return ConstraintFamily(name, kind, members, comps, zero_mode, klass)

    def _chi1(self, l, x):
        f = self.fields
        return f.sym("pi", l, x) - f.psibar_gamma0(l, x).scale(f.coeff(0.5j))

    def _chi2(self, l, x):
        f = self.fields
        return f.sym("pibar", l, x) + f.gamma0_psi(l, x).scale(f.coeff(0.5j))

    def _gamma1(self, _, x):
        return self.fields.sym("piA", 0, x)

    def _gauss(self, _, x):
        f = self.fields
        return f.backward_div("piA", x) - f.density(x).scale(self.e)

    def _gauss_first(self, _, x):
        f = self.fields
        return f.backward_div("piA", x) + f.pi_psi(x).scale(f.coeff(1j) * self.e)

    def _coulomb_condition(self, _, x):
        # d_j A^j with the index raised: minus the backward divergence of the lower components
        return -self.fields.backward_div("A", x)

    def _phi(self, _, x):
        f = self.fields
        return -f.backward_div("piA", x) - f.laplacian("A", 0, x)

    def _chi6(self, _, x):
        f = self.fields
        return f.pi_psi(x).scale(f.coeff(1j) * self.e) - f.laplacian("A", 0, x)

    def gauge_fixed_pairing(self) -> ConstraintSet:
        """Gauge-fixed second-class set grouped as (chi1, chi2), (gamma2, chi), (gamma1, chi6)."""
        fams = [self.family(n, "second") for n in ("chi1", "chi2", "gamma2", "chi", "gamma1", "chi6")]
        return ConstraintSet(self, tuple(fams), (("chi1", "chi2"), ("gamma2", "chi"), ("gamma1", "chi6")))

    # multipliers
    def multiplier(self, species, component, site):
        return self.fields.sym(species, component, site)

    def total_hamiltonian(self, constraints: ConstraintSet = None) -> GradedPolynomial:
        """H plus a^3 sum_x of multiplier terms for the primary families (and the gauge condition)."""
        constraints = self.primaries if constraints is None else constraints
        f = self.fields
        n = self.spec.sites
        vol = f.coeff(self.spec.spacing**3)
        extra = f.zero()
        for fam in constraints.families:
            if fam.kind == "gamma1":
                for x in range(n):
                    extra = extra + f.sym("u0", 0, x) * fam.members[x]
            elif fam.kind == "chi1":
                for l in range(4):
                    for x in range(n):
                        extra = extra + fam.members[l * n + x] * f.sym("u1", l, x)
            elif fam.kind == "chi2":
                for l in range(4):
                    for x in range(n):
                        extra = extra + f.sym("u2", l, x) * fam.members[l * n + x]
            elif fam.kind == "coulomb":
                for x in range(n):
                    extra = extra + f.sym("u", 0, x) * fam.members[x]
        return self.hamiltonian + extra.scale(vol)


def build_hamiltonian(fields: QEDFields, e, m) -> GradedPolynomial:
    spec = fields.spec
    ops = fields.ops
    n = spec.sites
    half = fields.coeff(Fraction(1, 2))
    hop = fields.coeff(-0.5j) * ops.inv_a
    density = fields.zero()
    for x in range(n):
        # Dirac kinetic term with a central difference
        for j in range(1, 4):
            g = fields.gamma[j]
            fwd = ops.shift(x, j - 1, 1)
            bwd = ops.shift(x, j - 1, -1)
            scaled = [[c * hop for c in row] for row in g]
            density = density + fields.bilinear(scaled, x, fwd) - fields.bilinear(scaled, x, bwd)
        ident = [[m if l == k else 0 for k in range(4)] for l in range(4)]
        density = density + fields.bilinear(ident, x, x)
        for j in range(1, 4):
            p = fields.sym("piA", j, x)
            density = density + (p * p).scale(half)
        # magnetic energy: (1/2) sum_{i<j} F_ij^2, F_ij = D_i A_j - D_j A_i
        for i in range(1, 4):
            for j in range(i + 1, 4):
                fij = fields.forward_grad("A", j, x, i - 1) - fields.forward_grad("A", i, x, j - 1)
                density = density + (fij * fij).scale(half)
        if e:
            for j in range(1, 4):
                density = density + (fields.sym("A", j, x) * fields.current(j, x)).scale(e)
        gauss = fields.density(x).scale(e) - fields.backward_div("piA", x)
        density = density + fields.sym("A", 0, x) * gauss
    return density.scale(fields.coeff(spec.spacing**3))


def build_qed_system(spec: LatticeSpec = None, e=0.0, m=1.0, exact: bool = True, coulomb: bool = False) -> QEDSystem:
    """Lattice H and primaries {chi1, chi2, gamma1}; with coulomb=True the gauge condition chi is added."""
    spec = LatticeSpec() if spec is None else spec
    fields = QEDFields(spec, exact)
    e_c, m_c = fields.coeff(e), fields.coeff(m)
    ham = build_hamiltonian(fields, e_c, m_c)
    system = QEDSystem(spec, fields, e_c, m_c, ham, None, coulomb)
    names = ("chi1", "chi2", "gamma1") + (("chi",) if coulomb else ())
    primaries = ConstraintSet(system, tuple(system.family(nm) for nm in names))
    object.__setattr__(system, "primaries", primaries)
    return system


class SurfaceReducer:
    """Canonical representative on the constraint surface, by substitution of solved variables.

    Each recognised family removes one set of variables:
      chi1, chi2    pi, pibar in terms of psibar, psi
      gamma1        pi^0 -> its lattice mean
      Gauss law     longitudinal pi^j -> grad G (charge density)
      Coulomb cond. A_j -> transverse projection
      phi / chi6    A_0 -> mean + G (divergence source)
    The map is a ring homomorphism and idempotent, so equal classes give equal representatives.
    """

    def __init__(self, system: QEDSystem, families, local_only: bool = False):
        self.system = system
        f = system.fields
        self.fields = f
        by_kind = {fam.kind: fam for fam in families}
        self.spinor = "chi1" in by_kind and "chi2" in by_kind
        self.pi0 = by_kind.get("gamma1")
        # local_only keeps the site-local substitutions and skips the Green-function ones
        self.gauss = None if local_only else next((by_kind[k] for k in GAUSS_KINDS if k in by_kind), None)
        self.transverse_a = not local_only and "coulomb" in by_kind
        self.potential = None if local_only else next((by_kind[k] for k in POTENTIAL_KINDS if k in by_kind), None)
        self.tol = None if f.exact else 1e-12
        self._images = {}
        self._space = system.space
        n = system.spec.sites
        self._mean = f.coeff(Fraction(1, n))

    def kinds(self):
        return {
            "spinor": self.spinor,
            "pi0": self.pi0 is not None,
            "gauss": self.gauss is not None,
            "coulomb": self.transverse_a,
            "potential": self.potential is not None,
        }

    def __call__(self, poly: GradedPolynomial) -> GradedPolynomial:
        out = substitute(poly, self.image)
        return out.chop(self.tol) if self.tol else out

    def image(self, sid):
        if sid not in self._images:
            self._images[sid] = self._build(sid)
        return self._images[sid]

    def _mean_of(self, species, comp):
        f = self.fields
        n = self.system.spec.sites
        return f.linear([((species, comp, y), self._mean) for y in range(n)])

    def _build(self, sid):
        sym = self._space.symbols[sid]
        f = self.fields
        ops = f.ops
        n = self.system.spec.sites
        sp, comp, x = sym.species, sym.component, sym.site
        if sp == "pi" and self.spinor:
            return f.psibar_gamma0(comp, x).scale(f.coeff(0.5j))
        if sp == "pibar" and self.spinor:
            return f.gamma0_psi(comp, x).scale(f.coeff(-0.5j))
        if sp == "piA" and comp == 0 and self.pi0 is not None:
            return self._mean_of("piA", 0) if self.pi0.zero_mode else f.zero()
        if sp == "piA" and comp > 0 and self.gauss is not None:
            i = comp - 1
            pairs = [(("piA", j + 1, y), ops.transverse(i, x, j, y)) for j in range(3) for y in range(n)]
            out = f.linear(pairs)
            for y in range(n):
                g = ops.grad_green[i][ops.disp(x, y)]
                if g:
                    out = out + self._charge(y).scale(g)
            return out
        if sp == "A" and comp > 0 and self.transverse_a:
            i = comp - 1
            return f.linear([(("A", j + 1, y), ops.transverse(i, x, j, y)) for j in range(3) for y in range(n)])
        if sp == "A" and comp == 0 and self.potential is not None:
            out = self._mean_of("A", 0)
            for y in range(n):
                g = ops.green_at(x, y)
                if g:
                    out = out + self._source(y).scale(g)
            return out
        return None

    def _charge(self, y):
        """s(y) with divergence pi = s on the surface (reduced)."""
        key = ("charge", y)
        if key not in self._images:
            f = self.fields
            if self.gauss.kind == "gauss":
                s = f.density(y).scale(self.system.e)
            else:
                s = f.pi_psi(y).scale(-f.coeff(1j) * self.system.e)
            self._images[key] = self._reduce_spinor(s)
        return self._images[key]

    def _source(self, y):
        """Reduced right-hand side r(y) of Laplacian A0 = r."""
        key = ("source", y)
        if key not in self._images:
            f = self.fields
            if self.potential.kind == "phi":
                r = -f.backward_div("piA", y)
            else:
                r = f.pi_psi(y).scale(f.coeff(1j) * self.system.e)
            # r contains no A0, so reducing it does not recurse into this image
            self._images[key] = self(r)
        return self._images[key]

    def _reduce_spinor(self, poly):
        if not self.spinor:
            return poly

        def img(sid):
            sp = self._space.symbols[sid].species
            return self.image(sid) if sp in ("pi", "pibar") else None

        return substitute(poly, img)


def surface_reducer(constraints: ConstraintSet) -> SurfaceReducer:
    return SurfaceReducer(constraints.system, constraints.families)
