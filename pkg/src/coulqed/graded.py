"""Graded (super-commutative) polynomials over lattice phase-space symbols and their Poisson bracket."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number

from sympy.polys.domains import QQ, QQ_I

from .errors import ParityError

# species, number of components, odd?, canonical partner species, bracket sign with partner
_SPECIES = (
    ("A", 4, False),
    ("piA", 4, False),
    ("psi", 4, True),
    ("pi", 4, True),
    ("psibar", 4, True),
    ("pibar", 4, True),
    # multipliers of the total Hamiltonian; not canonical
    ("u0", 1, False),
    ("u", 1, False),
    ("u1", 4, True),
    ("u2", 4, True),
)
# [z, w] for the fundamental pairs: [A, piA] = 1, [psi, pi] = [pi, psi] = 1, [psibar, pibar] = [pibar, psibar] = -1
_PAIRS = {
    "A": ("piA", 1),
    "piA": ("A", -1),
    "psi": ("pi", 1),
    "pi": ("psi", 1),
    "psibar": ("pibar", -1),
    "pibar": ("psibar", -1),
}
MULTIPLIERS = ("u0", "u", "u1", "u2")


@dataclass(frozen=True)
class GradedSymbol:
    species: str
    component: int
    site: int
    odd: bool

    def __str__(self):
        return f"{self.species}{self.component}[{self.site}]"


class PhaseSpace:
    """Symbol table for the canonical fields (and multipliers) on `sites` lattice sites."""

    def __init__(self, sites: int, spacing=Fraction(1)):
        self.sites = sites
        self.spacing = Fraction(spacing)
        self._offset = {}
        self._ncomp = {}
        self.odd = []
        self.symbols = []
        block = 0
        for name, ncomp, odd in _SPECIES:
            self._offset[name] = block
            self._ncomp[name] = ncomp
            for comp in range(ncomp):
                for site in range(sites):
                    self.symbols.append(GradedSymbol(name, comp, site, odd))
                    self.odd.append(odd)
            block += ncomp * sites
        self.size = block
        self.inverse_volume = 1 / self.spacing**3
        self._partner = [None] * self.size
        for sid, sym in enumerate(self.symbols):
            if sym.species in _PAIRS:
                other, sign = _PAIRS[sym.species]
                self._partner[sid] = (self.id(other, sym.component, sym.site), sign)

    def id(self, species: str, component: int, site: int) -> int:
        if not 0 <= component < self._ncomp[species]:
            raise IndexError(f"{species} has no component {component}")
        return self._offset[species] + component * self.sites + site % self.sites

    def partner(self, sid: int):
        return self._partner[sid]

    def is_multiplier(self, sid: int) -> bool:
        return self.symbols[sid].species in MULTIPLIERS

    def __eq__(self, other):
        return isinstance(other, PhaseSpace) and (self.sites, self.spacing) == (other.sites, other.spacing)

    def __hash__(self):
        return hash((self.sites, self.spacing))


# --- coefficients ---

def exact(value):
    """Convert a Python number (int, Fraction, complex with rational parts) to an exact Gaussian rational."""
    if isinstance(value, type(QQ_I.one)):
        return value
    if isinstance(value, complex):
        return QQ_I(_rational(value.real), _rational(value.imag))
    return QQ_I.convert(_rational(value))


def _rational(value):
    # decimal literals such as 0.3 are meant as 3/10, not the nearest binary double
    if isinstance(value, float):
        return QQ.convert(Fraction(repr(value)))
    if isinstance(value, type(QQ.one)):
        return value
    return QQ.convert(Fraction(value))


def to_complex(value) -> complex:
    if isinstance(value, type(QQ_I.one)):
        return complex(float(value.x), float(value.y))
    return complex(value)


def conjugate(value):
    if isinstance(value, type(QQ_I.one)):
        return QQ_I(value.x, -value.y)
    return complex(value).conjugate()


def _sort_sign(ops, odd):
    """Bubble the symbol ids into order; return (sign, sorted) or (0, None) if an odd symbol repeats."""
    ops = list(ops)
    sign = 1
    for i in range(1, len(ops)):
        j = i
        while j > 0 and ops[j - 1] > ops[j]:
            if odd[ops[j]] and odd[ops[j - 1]]:
                sign = -sign
            ops[j - 1], ops[j] = ops[j], ops[j - 1]
            j -= 1
    for a, b in zip(ops, ops[1:]):
        if a == b and odd[a]:
            return 0, None
    return sign, tuple(ops)


def _merge(m1, m2, odd):
    if not m1:
        return 1, m2
    if not m2:
        return 1, m1
    if m1[-1] < m2[0]:
        return 1, m1 + m2
    return _sort_sign(m1 + m2, odd)


class GradedPolynomial:
    """Finite sum of coefficient * ordered monomial; treat instances as immutable."""

    __slots__ = ("space", "terms", "exact", "_index", "_parity")

    def __init__(self, space: PhaseSpace, terms=None, exact_mode: bool = True):
        self.space = space
        self.exact = exact_mode
        self.terms = {} if terms is None else {m: c for m, c in terms.items() if c}
        self._index = None
        self._parity = False

    @classmethod
    def _trusted(cls, space, terms, exact_mode):
        # terms already free of zero coefficients
        poly = cls.__new__(cls)
        poly.space = space
        poly.exact = exact_mode
        poly.terms = terms
        poly._index = None
        poly._parity = False
        return poly

    # construction
    @classmethod
    def symbol(cls, space, sid, exact_mode=True):
        one = QQ_I.one if exact_mode else 1 + 0j
        return cls(space, {(sid,): one}, exact_mode)

    @classmethod
    def constant(cls, space, value, exact_mode=True):
        return cls(space, {(): cls._coerce_static(value, exact_mode)}, exact_mode)

    @staticmethod
    def _coerce_static(value, exact_mode):
        return exact(value) if exact_mode else to_complex(value)

    def coerce(self, value):
        return self._coerce_static(value, self.exact)

    def zero(self):
        return GradedPolynomial(self.space, {}, self.exact)

    # algebra
    def __add__(self, other):
        if not isinstance(other, GradedPolynomial):
            other = GradedPolynomial.constant(self.space, other, self.exact)
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        terms = dict(big)
        for m, c in small.items():
            if m in terms:
                v = terms[m] + c
                if v:
                    terms[m] = v
                else:
                    del terms[m]
            else:
                terms[m] = c
        return GradedPolynomial._trusted(self.space, terms, self.exact)

    __radd__ = __add__

    def __neg__(self):
        return GradedPolynomial._trusted(self.space, {m: -c for m, c in self.terms.items()}, self.exact)

    def __sub__(self, other):
        return self + (-other if isinstance(other, GradedPolynomial) else -self.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor):
        factor = self.coerce(factor)
        if not factor:
            return self.zero()
        if self.exact:
            return GradedPolynomial._trusted(self.space, {m: c * factor for m, c in self.terms.items()}, True)
        return GradedPolynomial(self.space, {m: c * factor for m, c in self.terms.items()}, False)

    def __mul__(self, other):
        if not isinstance(other, GradedPolynomial):
            return self.scale(other)
        odd = self.space.odd
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, m = _merge(m1, m2, odd)
                if sign == 0:
                    continue
                c = c1 * c2 if sign > 0 else -(c1 * c2)
                terms[m] = terms[m] + c if m in terms else c
        return GradedPolynomial(self.space, terms, self.exact)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, GradedPolynomial):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # inspection
    def parity(self):
        """0 or 1 for homogeneous polynomials, None for zero; ParityError if mixed."""
        if self._parity is not False:
            return self._parity
        odd = self.space.odd
        parities = {sum(odd[s] for s in m) % 2 for m in self.terms}
        if len(parities) > 1:
            raise ParityError("polynomial has no definite Grassmann parity")
        self._parity = parities.pop() if parities else None
        return self._parity

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def body(self):
        """Constant term."""
        return self.terms.get((), self.coerce(0))

    def symbols(self) -> set:
        return {s for m in self.terms for s in m}

    def max_abs(self) -> float:
        return max((abs(to_complex(c)) for c in self.terms.values()), default=0.0)

    def to_float(self) -> "GradedPolynomial":
        return GradedPolynomial(self.space, {m: to_complex(c) for m, c in self.terms.items()}, False)

    def chop(self, tol: float) -> "GradedPolynomial":
        if self.exact:
            return self
        return GradedPolynomial(self.space, {m: c for m, c in self.terms.items() if abs(c) > tol}, False)

    def index(self) -> dict:
        if self._index is None:
            idx = {}
            for m in self.terms:
                for s in set(m):
                    idx.setdefault(s, []).append(m)
            self._index = idx
        return self._index

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            names = "*".join(str(self.space.symbols[s]) for s in m) or "1"
            parts.append(f"({c})*{names}")
        return " + ".join(parts)


def derivative(poly: GradedPolynomial, sid: int, side: str) -> GradedPolynomial:
    """Left ("left") or right ("right") partial derivative with respect to one symbol."""
    odd = poly.space.odd
    sym_odd = odd[sid]
    terms = {}
    for m in poly.index().get(sid, ()):
        c = poly.terms[m]
        pos = m.index(sid)
        if sym_odd:
            passed = m[:pos] if side == "left" else m[pos + 1:]
            if sum(odd[s] for s in passed) % 2:
                c = -c
        else:
            c = c * poly.coerce(m.count(sid))
        rest = m[:pos] + m[pos + 1:]
        terms[rest] = terms[rest] + c if rest in terms else c
    return GradedPolynomial(poly.space, terms, poly.exact)


def gpb(f: GradedPolynomial, g: GradedPolynomial) -> GradedPolynomial:
    """Graded Poisson bracket: sum over canonical pairs of (F d<-_z) omega_zw (d->_w G) / a^3."""
    f.parity()
    g.parity()
    space = f.space
    gidx = g.index()
    out = f.zero()
    for z in f.index():
        pair = space.partner(z)
        if pair is None:
            continue
        w, sign = pair
        if w not in gidx:
            continue
        term = derivative(f, z, "right") * derivative(g, w, "left")
        out = out + (term if sign > 0 else -term)
    return out.scale(space.inverse_volume) if space.inverse_volume != 1 else out


def substitute(poly: GradedPolynomial, image) -> GradedPolynomial:
    """Ring homomorphism fixing constants: each symbol s maps to image(s) (None keeps it)."""
    out_terms = {}
    cache = {}
    odd = poly.space.odd
    for m, c in poly.terms.items():
        acc = {(): c}
        for s in m:
            if s not in cache:
                cache[s] = image(s)
            img = cache[s]
            if img is None:
                new = {}
                for mon, cc in acc.items():
                    sign, merged = _merge(mon, (s,), odd)
                    if sign:
                        val = cc if sign > 0 else -cc
                        new[merged] = new[merged] + val if merged in new else val
                acc = new
            else:
                new = {}
                for mon, cc in acc.items():
                    for mon2, c2 in img.terms.items():
                        sign, merged = _merge(mon, mon2, odd)
                        if sign:
                            val = cc * c2 if sign > 0 else -(cc * c2)
                            new[merged] = new[merged] + val if merged in new else val
                acc = new
            if not acc:
                break
        for mon, cc in acc.items():
            out_terms[mon] = out_terms[mon] + cc if mon in out_terms else cc
    return GradedPolynomial(poly.space, out_terms, poly.exact)


def linear(space, pairs, exact_mode=True) -> GradedPolynomial:
    """Sum of coefficient * symbol from (sid, coefficient) pairs."""
    terms = {}
    for sid, c in pairs:
        c = exact(c) if exact_mode else to_complex(c)
        terms[(sid,)] = terms[(sid,)] + c if (sid,) in terms else c
    return GradedPolynomial(space, terms, exact_mode)


def sum_of_products(space, items, exact_mode=True) -> GradedPolynomial:
    """sum of factor * left * right over (left, right, factor) triples, accumulated in one dictionary."""
    odd = space.odd
    terms = {}
    for left, right, factor in items:
        for m1, c1 in left.terms.items():
            c1 = c1 * factor
            for m2, c2 in right.terms.items():
                sign, m = _merge(m1, m2, odd)
                if sign == 0:
                    continue
                c = c1 * c2 if sign > 0 else -(c1 * c2)
                terms[m] = terms[m] + c if m in terms else c
    return GradedPolynomial(space, terms, exact_mode)
